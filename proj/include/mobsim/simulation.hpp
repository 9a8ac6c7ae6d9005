#pragma once

#include <cstdint>

#include "mobsim/demand.hpp"
#include "mobsim/fleet.hpp"
#include "mobsim/result_store.hpp"
#include "mobsim/scenario.hpp"
#include "mobsim/street_network.hpp"
#include "mobsim/transit.hpp"

namespace mobsim {

struct WelfareBreakdown {
  double total_traveler_utility = 0.0;
  double pt_revenue = 0.0;
  double pt_cost = 0.0;
  double parking_revenue = 0.0;
  double pv_toll_revenue = 0.0;
  double amod_toll_revenue = 0.0;
  double pv_emission_cost = 0.0;
  double amod_emission_cost = 0.0;
  double pt_emission_cost = 0.0;

  std::map<std::string, double> components() const;
};

struct ProfitBreakdown {
  double fare_revenue = 0.0;
  double fixed_costs = 0.0;
  double variable_costs = 0.0;
  double toll_costs = 0.0;

  std::map<std::string, double> components() const;
};

// One simulation run: the per-step loop of vehicle movement, congestion
// state update, sequential request processing and accounting.
// Deterministic per (scenario, decision, seed). The path table can be
// shared across runs; pass the same instance to every worker.
ResultRecord run(const Scenario& s, const PathTable& paths,
                 const DecisionVector& decision, std::uint64_t seed);

// Convenience wrapper building its own path table.
ResultRecord run(const Scenario& s, const DecisionVector& decision,
                 std::uint64_t seed);

}  // namespace mobsim
