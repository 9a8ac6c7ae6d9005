#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "mobsim/demand.hpp"
#include "mobsim/scenario.hpp"
#include "mobsim/street_network.hpp"

namespace mobsim {

struct PlanStop {
  int node = -1;
  std::vector<int> board;   // passenger (request) ids
  std::vector<int> alight;
  double planned_arrival_s = 0.0;
  double planned_departure_s = 0.0;
};

struct FleetPassenger {
  int id = -1;
  int origin = -1;
  int destination = -1;
  double request_time_s = 0.0;
  double direct_ff_time_s = 0.0;
  double direct_dist_m = 0.0;
  double fare_eur = 0.0;
  bool onboard = false;
  bool done = false;
  double pickup_arrival_s = -1.0;
  double pickup_departure_s = -1.0;  // boarding completed
  double dropoff_s = -1.0;
};

struct Vehicle {
  int id = -1;
  // Position: at pos_node, or part-way along cur_edge leaving it.
  int pos_node = -1;
  int cur_edge = -1;
  double edge_done_ff_s = 0.0;   // free-flow seconds consumed on cur_edge
  double dwell_remaining_s = 0.0;
  std::vector<int> route;        // edges towards the next stop
  size_t route_i = 0;
  std::vector<PlanStop> stops;
  std::vector<int> onboard;      // passenger ids
  double driven_m = 0.0;

  bool idle() const { return stops.empty() && cur_edge < 0 && dwell_remaining_s <= 0.0; }
};

struct Offer {
  int request_id = -1;
  int vehicle_id = -1;
  double fare_eur = 0.0;
  double wait_s = 0.0;         // planned pickup arrival - request time
  double in_vehicle_s = 0.0;   // pickup departure to drop-off arrival
  double direct_dist_m = 0.0;
};

struct InsertionResult {
  bool feasible = false;
  double delta_cost = 0.0;     // control-objective increase (Eq-style: distance + delays)
  std::vector<PlanStop> stops;
  double pickup_arrival_s = 0.0;
  double pickup_departure_s = 0.0;
  double dropoff_arrival_s = 0.0;
};

// The AMOD operator: a single logical state machine. Offers, commits and
// time advances are strictly serialized within one simulation run.
class FleetOperator {
 public:
  FleetOperator(const Scenario& s, const PathTable& paths, const NetworkState& net,
                const DecisionVector& decision, std::uint64_t seed);

  int fleet_size() const { return static_cast<int>(vehicles_.size()); }

  // Candidate pre-selection: up to 5 vehicles by earliest time-to-idle
  // plus up to 5 by closest heading, filtered to those able to reach the
  // origin within the wait bound.
  std::vector<int> candidate_vehicles(const TravelerRequest& r, double now_s) const;

  // Best feasible insertion of (pickup, drop-off) into one vehicle's
  // current stop list; all position pairs with pickup first.
  InsertionResult try_insert(const Vehicle& v, const TravelerRequest& r,
                             double now_s) const;

  std::optional<Offer> make_offer(const TravelerRequest& r, double now_s);
  void commit_or_discard(int request_id, bool accepted);

  // Moves vehicles, boards/alights passengers. Constraint drift does not
  // invalidate committed plans.
  void advance(double dt_s, double now_s);

  // Vehicles currently driving, per cluster index.
  std::vector<double> driving_counts(int cluster_count) const;
  int driving_in_cluster(int cluster) const;

  // Fraction of vehicles with a passenger onboard or a pickup planned.
  double utilization() const;

  double total_driven_m() const;
  const std::vector<Vehicle>& vehicles() const { return vehicles_; }
  Vehicle& vehicle_for_test(int id) { return vehicles_[static_cast<size_t>(id)]; }
  const std::map<int, FleetPassenger>& passengers() const { return passengers_; }
  void charge_toll(double eur) { toll_paid_eur_ += eur; }
  double toll_paid_eur() const { return toll_paid_eur_; }

 private:
  struct PlanTiming {
    bool feasible = false;
    double total_dist_m = 0.0;       // position through all stops
    double sum_dropoff_delay_s = 0.0;  // sum over passengers of dropoff - request
    std::map<int, double> arrival;   // passenger id -> pickup arrival
    std::map<int, double> departure; // passenger id -> pickup departure
    std::map<int, double> dropoff;
  };

  PlanTiming evaluate_plan(const Vehicle& v, const std::vector<PlanStop>& stops,
                           double now_s, const FleetPassenger* extra) const;
  double position_offset_s(const Vehicle& v) const;  // dwell + current edge remainder
  int position_node(const Vehicle& v) const;         // node the vehicle departs from next
  void arrive_at_stop(Vehicle& v, double t_s);

  const Scenario* s_;
  const PathTable* paths_;
  const NetworkState* net_;
  DecisionVector decision_;
  std::vector<Vehicle> vehicles_;
  std::map<int, FleetPassenger> passengers_;

  struct Pending {
    int vehicle_id;
    std::vector<PlanStop> stops;
    FleetPassenger passenger;
  };
  std::map<int, Pending> pending_;
  double toll_paid_eur_ = 0.0;
};

}  // namespace mobsim
