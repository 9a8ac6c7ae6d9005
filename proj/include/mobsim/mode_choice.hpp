#pragma once

#include <optional>
#include <random>

#include "mobsim/demand.hpp"
#include "mobsim/scenario.hpp"
#include "mobsim/transit.hpp"

namespace mobsim {

struct ModeCosts {
  std::optional<double> pv;
  std::optional<double> pt;
  std::optional<double> amod;
};

// Crowding multiplier on in-vehicle time: linear in eta, capped at the
// configured maximum factor once the system is at capacity.
double crowding_multiplier(double eta, double max_factor);

double pv_cost_eur(const ScenarioParams& p, double travel_time_s, double dist_m,
                   double toll_eur, double parking_eur);

// PT generalized cost with zero wait, crowding-weighted in-vehicle time
// and a transfer penalty shrinking with the frequency scale.
double pt_cost_eur(const ScenarioParams& p, const PTOffer& offer, double eta,
                   double pt_freq_scale);

double amod_cost_eur(const ScenarioParams& p, double fare_eur, double in_vehicle_s,
                     double wait_s);

// Logit draw over the present modes with U = -C, numerically stabilized.
Mode choose_mode(const ModeCosts& costs, double logit_scale, std::mt19937_64& rng);

// Choice probabilities in the fixed order (PV, PT, AMOD); absent modes
// get probability 0.
std::array<double, 3> mode_probabilities(const ModeCosts& costs, double logit_scale);

// Per-traveler RNG stream derived from (seed, request id).
std::mt19937_64 traveler_rng(std::uint64_t seed, int request_id);

}  // namespace mobsim
