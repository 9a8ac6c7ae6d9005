#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mobsim {

// All quantities are stored in internal units: seconds, meters, euros.
// Input files use the natural units documented per column; conversion
// happens once at load time.

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Node {
  int id = -1;
  double x = 0.0;  // m
  double y = 0.0;  // m
  int zone = -1;
  bool access_point = false;
};

struct Edge {
  int id = -1;
  int from = -1;  // node index (not id)
  int to = -1;
  double length_m = 0.0;
  double speed_mps = 0.0;
  int cluster = -1;
  int lanes = 1;

  double ff_time_s() const { return length_m / speed_mps; }
};

// Piecewise-linear density -> flow lookup, clamped at the table ends.
class NfdTable {
 public:
  NfdTable() = default;
  NfdTable(std::vector<double> density, std::vector<double> flow);

  double flow_at(double density) const;
  bool empty() const { return density_.empty(); }
  const std::vector<double>& densities() const { return density_; }
  const std::vector<double>& flows() const { return flow_; }

 private:
  std::vector<double> density_;  // veh/lane-km, strictly increasing
  std::vector<double> flow_;     // veh/h
};

struct ClusterSpec {
  int id = -1;
  double lane_km = 0.0;           // sum of edge length * lanes, km
  double v1_kmh = 0.0;            // travel-time factor fit parameters
  double v2_kmh = 0.0;
  NfdTable nfd;
  std::vector<double> background_density;  // veh/lane-km per hour-of-day (24)
};

struct TransitLine {
  int id = -1;
  double trips_per_h = 0.0;    // nu_l
  double trip_len_km = 0.0;    // d_l
  double cost_eur_km = 0.0;    // c_l
  double emission_t_km = 0.0;  // e_l, tonne CO2 per km
  double capacity = 0.0;       // passengers per vehicle trip
};

struct SkimEntry {
  double walk_m = 0.0;       // transfer walking inside the PT trip
  double in_vehicle_s = 0.0;
  int transfers = 0;
};

struct PtStop {
  int id = -1;
  int node = -1;  // node index
};

struct OdEntry {
  int hour = 0;        // hour of day
  int origin_zone = -1;
  int dest_zone = -1;
  double trips_per_h = 0.0;
};

struct ScenarioParams {
  double time_step_s = 60.0;
  double vot_eur_s = 12.0 / 3600.0;         // value of time
  double pv_dist_cost_eur_m = 0.60 / 1000.0;
  double pv_intercept_eur = 0.0;            // u^PV, may be negative
  double walk_speed_mps = 1.3;
  double transfer_penalty_eur = 0.5;        // c^T_0
  double boarding_time_s = 30.0;            // B
  int vehicle_capacity = 4;                 // rho
  double max_wait_s = 300.0;
  double max_rel_detour = 0.4;
  double amod_fixed_cost_eur = 10.0;        // c_v^F per vehicle per horizon
  double amod_dist_cost_eur_m = 0.25 / 1000.0;
  double min_fare_eur = 1.0;
  double surge_util_threshold = 0.75;
  double toll_density_threshold = 5.0;      // k_0, veh/lane-km
  double co2_cost_eur_t = 100.0;
  double emission_pv_t_m = 150e-6 / 1000.0;    // tonne per meter
  double emission_amod_t_m = 130e-6 / 1000.0;
  double crowding_max_factor = 2.0;
  double pt_capacity_reduction = 3.0;
  int moving_average_window = 5;
  double pt_flat_fare_eur = 3.0;
  double logit_scale = 1.0;
  int start_hour = 6;
  double horizon_s = 3.0 * 3600.0;
  int inner_cluster = -1;                   // Z_I for the distance toll
  std::vector<int> inner_zones;             // Z_I zone ids for parking
  std::vector<double> background_pt_riders; // per hour-of-day (24)
  std::map<std::string, double> welfare_weights;  // defaults all 1

  bool zone_is_inner(int zone) const;
  void validate() const;
};

// Regulator variables (parking fee, toll rate, PT frequency scale, fleet
// cap) followed by operator variables (fleet size, distance fare, surge
// factor).
struct DecisionVector {
  double parking_fee_eur = 2.50;     // x^P
  double toll_rate_eur_km = 0.0;     // x^RT
  double pt_freq_scale = 1.0;        // x^PT
  double fleet_cap = 50000.0;        // x^F
  double fleet_size = 0.0;           // y^F
  double dist_fare_eur_km = 0.25;    // y^PD
  double surge_factor = 1.0;         // y^PU

  static constexpr int kDim = 7;
  static constexpr int kRegulatorDim = 4;
  static const std::array<std::string, kDim>& names();

  std::array<double, kDim> to_array() const;
  static DecisionVector from_array(const std::array<double, kDim>& a);

  bool operator==(const DecisionVector&) const = default;
};

struct DecisionBounds {
  std::array<double, DecisionVector::kDim> lo{2.50, 0.0, 0.25, 1.0, 0.0, 0.25, 1.0};
  std::array<double, DecisionVector::kDim> hi{5.00, 1.00, 2.0, 50000.0, 50000.0, 2.00, 10.0};

  void validate() const;
  // Exact bijection between the decision box and [0,1]^7.
  std::array<double, DecisionVector::kDim> normalize(const DecisionVector& d) const;
  DecisionVector denormalize(const std::array<double, DecisionVector::kDim>& u) const;
  void check_in_bounds(const DecisionVector& d) const;
};

struct Scenario {
  ScenarioParams params;
  DecisionBounds bounds;

  std::vector<Node> nodes;
  std::vector<Edge> edges;
  std::vector<ClusterSpec> clusters;
  std::vector<TransitLine> lines;
  std::vector<PtStop> stops;
  std::map<std::pair<int, int>, SkimEntry> skim;  // (stop id, stop id)
  std::vector<OdEntry> od;

  // Derived at load time.
  std::map<int, int> node_index;              // node id -> index
  std::map<int, int> cluster_index;           // cluster id -> index
  std::map<int, std::vector<int>> zone_access;  // zone -> access node indices
  std::vector<std::vector<int>> out_edges;    // node index -> edge indices
  std::vector<int> nearest_stop;              // node index -> stop index (-1 if none)

  int inner_cluster_index() const;  // -1 when no inner cluster configured
  void validate() const;
  void build_derived();
};

Scenario load_scenario(const std::filesystem::path& dir);
void save_scenario(const Scenario& s, const std::filesystem::path& dir);

}  // namespace mobsim
