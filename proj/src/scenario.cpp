#include "mobsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mobsim {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

// Reads a headered CSV file, skipping blank lines and '#' comments.
// Calls row(fields, line_no) for every data row.
template <typename Fn>
void read_csv(const fs::path& path, int min_cols, Fn row) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    auto fields = split_csv(line);
    if (static_cast<int>(fields.size()) < min_cols)
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": expected " + std::to_string(min_cols) + " columns");
    try {
      row(fields, line_no);
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

double to_double(const std::string& s) { return std::stod(s); }
int to_int(const std::string& s) { return std::stoi(s); }

void require_positive(double v, const std::string& name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw ValidationError("parameter '" + name + "' must be strictly positive");
}

}  // namespace

NfdTable::NfdTable(std::vector<double> density, std::vector<double> flow)
    : density_(std::move(density)), flow_(std::move(flow)) {
  if (density_.size() != flow_.size() || density_.empty())
    throw ValidationError("NFD table must have equal, nonzero row counts");
  for (size_t i = 1; i < density_.size(); ++i)
    if (density_[i] <= density_[i - 1])
      throw ValidationError("NFD densities must be strictly increasing");
  for (double q : flow_)
    if (q < 0.0) throw ValidationError("NFD flows must be nonnegative");
}

double NfdTable::flow_at(double k) const {
  if (empty()) throw ValidationError("empty NFD table");
  if (k <= density_.front()) return flow_.front();
  if (k >= density_.back()) return flow_.back();
  auto it = std::upper_bound(density_.begin(), density_.end(), k);
  size_t i = static_cast<size_t>(it - density_.begin());
  double t = (k - density_[i - 1]) / (density_[i] - density_[i - 1]);
  return flow_[i - 1] + t * (flow_[i] - flow_[i - 1]);
}

bool ScenarioParams::zone_is_inner(int zone) const {
  return std::find(inner_zones.begin(), inner_zones.end(), zone) != inner_zones.end();
}

void ScenarioParams::validate() const {
  require_positive(time_step_s, "time_step");
  require_positive(vot_eur_s, "value_of_time");
  require_positive(pv_dist_cost_eur_m, "pv_distance_cost");
  require_positive(walk_speed_mps, "walk_speed");
  require_positive(transfer_penalty_eur, "transfer_penalty");
  require_positive(boarding_time_s, "boarding_time");
  require_positive(max_wait_s, "max_wait");
  require_positive(max_rel_detour, "max_relative_detour");
  require_positive(amod_fixed_cost_eur, "amod_fixed_cost");
  require_positive(amod_dist_cost_eur_m, "amod_distance_cost");
  require_positive(min_fare_eur, "min_fare");
  require_positive(toll_density_threshold, "toll_density_threshold");
  require_positive(co2_cost_eur_t, "co2_cost");
  require_positive(emission_pv_t_m, "emission_pv");
  require_positive(emission_amod_t_m, "emission_amod");
  require_positive(crowding_max_factor, "crowding_max_factor");
  require_positive(pt_capacity_reduction, "pt_capacity_reduction");
  require_positive(pt_flat_fare_eur, "pt_flat_fare");
  require_positive(horizon_s, "horizon");
  if (!std::isfinite(pv_intercept_eur))
    throw ValidationError("pv_intercept must be finite");
  if (!(surge_util_threshold > 0.0 && surge_util_threshold <= 1.0))
    throw ValidationError("surge_utilization_threshold must be in (0, 1]");
  if (vehicle_capacity < 1) throw ValidationError("vehicle_capacity must be >= 1");
  if (moving_average_window < 1)
    throw ValidationError("moving_average_window must be >= 1");
}

const std::array<std::string, DecisionVector::kDim>& DecisionVector::names() {
  static const std::array<std::string, kDim> n = {
      "parking_fee", "toll_rate",  "pt_frequency_scale", "fleet_cap",
      "fleet_size",  "dist_fare",  "surge_factor"};
  return n;
}

std::array<double, DecisionVector::kDim> DecisionVector::to_array() const {
  return {parking_fee_eur, toll_rate_eur_km, pt_freq_scale, fleet_cap,
          fleet_size,      dist_fare_eur_km, surge_factor};
}

DecisionVector DecisionVector::from_array(const std::array<double, kDim>& a) {
  DecisionVector d;
  d.parking_fee_eur = a[0];
  d.toll_rate_eur_km = a[1];
  d.pt_freq_scale = a[2];
  d.fleet_cap = a[3];
  d.fleet_size = a[4];
  d.dist_fare_eur_km = a[5];
  d.surge_factor = a[6];
  return d;
}

void DecisionBounds::validate() const {
  for (int i = 0; i < DecisionVector::kDim; ++i)
    if (!(lo[i] < hi[i]))
      throw ValidationError("bounds for '" + DecisionVector::names()[i] +
                            "': min must be < max");
}

std::array<double, DecisionVector::kDim> DecisionBounds::normalize(
    const DecisionVector& d) const {
  auto a = d.to_array();
  std::array<double, DecisionVector::kDim> u{};
  for (int i = 0; i < DecisionVector::kDim; ++i) {
    if (a[i] == lo[i]) u[i] = 0.0;       // exact at the bounds
    else if (a[i] == hi[i]) u[i] = 1.0;
    else u[i] = (a[i] - lo[i]) / (hi[i] - lo[i]);
  }
  return u;
}

DecisionVector DecisionBounds::denormalize(
    const std::array<double, DecisionVector::kDim>& u) const {
  std::array<double, DecisionVector::kDim> a{};
  for (int i = 0; i < DecisionVector::kDim; ++i) {
    if (u[i] == 0.0) a[i] = lo[i];
    else if (u[i] == 1.0) a[i] = hi[i];
    else a[i] = lo[i] + u[i] * (hi[i] - lo[i]);
  }
  return DecisionVector::from_array(a);
}

void DecisionBounds::check_in_bounds(const DecisionVector& d) const {
  auto a = d.to_array();
  for (int i = 0; i < DecisionVector::kDim; ++i)
    if (a[i] < lo[i] - 1e-9 || a[i] > hi[i] + 1e-9)
      throw ValidationError("decision variable '" + DecisionVector::names()[i] +
                            "' out of bounds");
  if (d.fleet_size > d.fleet_cap + 1e-9)
    throw ValidationError("fleet_size must not exceed fleet_cap");
}

int Scenario::inner_cluster_index() const {
  auto it = cluster_index.find(params.inner_cluster);
  return it == cluster_index.end() ? -1 : it->second;
}

void Scenario::build_derived() {
  node_index.clear();
  for (size_t i = 0; i < nodes.size(); ++i) node_index[nodes[i].id] = static_cast<int>(i);
  cluster_index.clear();
  for (size_t i = 0; i < clusters.size(); ++i)
    cluster_index[clusters[i].id] = static_cast<int>(i);

  out_edges.assign(nodes.size(), {});
  for (size_t e = 0; e < edges.size(); ++e)
    out_edges[static_cast<size_t>(edges[e].from)].push_back(static_cast<int>(e));

  zone_access.clear();
  for (size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].access_point)
      zone_access[nodes[i].zone].push_back(static_cast<int>(i));

  // Lane-km per cluster from edge geometry.
  for (auto& c : clusters) c.lane_km = 0.0;
  for (const auto& e : edges) {
    auto it = cluster_index.find(e.cluster);
    if (it != cluster_index.end())
      clusters[static_cast<size_t>(it->second)].lane_km += e.length_m * e.lanes / 1000.0;
  }

  nearest_stop.assign(nodes.size(), -1);
  for (size_t i = 0; i < nodes.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t s = 0; s < stops.size(); ++s) {
      const Node& sn = nodes[static_cast<size_t>(stops[s].node)];
      double dx = nodes[i].x - sn.x, dy = nodes[i].y - sn.y;
      double d2 = dx * dx + dy * dy;
      if (d2 < best) {
        best = d2;
        nearest_stop[i] = static_cast<int>(s);
      }
    }
  }
}

void Scenario::validate() const {
  params.validate();
  bounds.validate();
  if (nodes.empty()) throw ValidationError("scenario has no nodes");
  if (edges.empty()) throw ValidationError("scenario has no edges");
  for (const auto& e : edges) {
    if (e.from < 0 || e.from >= static_cast<int>(nodes.size()) || e.to < 0 ||
        e.to >= static_cast<int>(nodes.size()))
      throw ValidationError("edge " + std::to_string(e.id) +
                            " references an unknown node id");
    if (!(e.length_m > 0.0) || !(e.speed_mps > 0.0) || e.lanes < 1)
      throw ValidationError("edge " + std::to_string(e.id) +
                            " has nonpositive length/speed/lanes");
    if (!cluster_index.count(e.cluster))
      throw ValidationError("edge " + std::to_string(e.id) +
                            " references unknown cluster " + std::to_string(e.cluster));
  }
  for (const auto& c : clusters) {
    if (c.nfd.empty())
      throw ValidationError("cluster " + std::to_string(c.id) + " has no NFD table");
    if (!(c.v1_kmh > 0.0) || !(c.v2_kmh > 0.0))
      throw ValidationError("cluster " + std::to_string(c.id) +
                            " needs positive v1/v2 parameters");
  }
  for (const auto& l : lines)
    if (!(l.trips_per_h > 0.0) || !(l.trip_len_km > 0.0) || !(l.cost_eur_km > 0.0) ||
        !(l.emission_t_km > 0.0) || !(l.capacity > 0.0))
      throw ValidationError("transit line " + std::to_string(l.id) +
                            " must have positive fields");
  for (const auto& s : stops)
    if (s.node < 0 || s.node >= static_cast<int>(nodes.size()))
      throw ValidationError("PT stop " + std::to_string(s.id) +
                            " references an unknown node");
  for (const auto& o : od) {
    if (o.trips_per_h < 0.0)
      throw ValidationError("OD entry has negative rate");
    for (int z : {o.origin_zone, o.dest_zone}) {
      auto it = zone_access.find(z);
      if (it == zone_access.end() || it->second.empty())
        throw ValidationError("OD entry references zone " + std::to_string(z) +
                              " without access points");
    }
  }
}

namespace {

ScenarioParams params_from_json(const json& j) {
  ScenarioParams p;
  auto get = [&](const char* key, double def) { return j.value(key, def); };
  p.time_step_s = get("time_step_s", p.time_step_s);
  p.vot_eur_s = j.value("value_of_time_eur_h", 12.0) / 3600.0;
  p.pv_dist_cost_eur_m = j.value("pv_distance_cost_eur_km", 0.60) / 1000.0;
  p.pv_intercept_eur = get("pv_intercept_eur", p.pv_intercept_eur);
  p.walk_speed_mps = get("walk_speed_mps", p.walk_speed_mps);
  p.transfer_penalty_eur = get("transfer_penalty_eur", p.transfer_penalty_eur);
  p.boarding_time_s = get("boarding_time_s", p.boarding_time_s);
  p.vehicle_capacity = j.value("vehicle_capacity", p.vehicle_capacity);
  p.max_wait_s = get("max_wait_s", p.max_wait_s);
  p.max_rel_detour = get("max_relative_detour", p.max_rel_detour);
  p.amod_fixed_cost_eur = get("amod_fixed_cost_eur", p.amod_fixed_cost_eur);
  p.amod_dist_cost_eur_m = j.value("amod_distance_cost_eur_km", 0.25) / 1000.0;
  p.min_fare_eur = get("min_fare_eur", p.min_fare_eur);
  p.surge_util_threshold = get("surge_utilization_threshold", p.surge_util_threshold);
  p.toll_density_threshold = get("toll_density_threshold", p.toll_density_threshold);
  p.co2_cost_eur_t = get("co2_cost_eur_t", p.co2_cost_eur_t);
  p.emission_pv_t_m = j.value("emission_pv_t_km", 150e-6) / 1000.0;
  p.emission_amod_t_m = j.value("emission_amod_t_km", 130e-6) / 1000.0;
  p.crowding_max_factor = get("crowding_max_factor", p.crowding_max_factor);
  p.pt_capacity_reduction = get("pt_capacity_reduction", p.pt_capacity_reduction);
  p.moving_average_window = j.value("moving_average_window", p.moving_average_window);
  p.pt_flat_fare_eur = get("pt_flat_fare_eur", p.pt_flat_fare_eur);
  p.logit_scale = get("logit_scale", p.logit_scale);
  p.start_hour = j.value("start_hour", p.start_hour);
  p.horizon_s = j.value("horizon_h", 3.0) * 3600.0;
  p.inner_cluster = j.value("inner_cluster", p.inner_cluster);
  if (j.contains("inner_zones"))
    p.inner_zones = j.at("inner_zones").get<std::vector<int>>();
  if (j.contains("background_pt_riders"))
    p.background_pt_riders = j.at("background_pt_riders").get<std::vector<double>>();
  if (j.contains("welfare_weights"))
    for (auto& [k, v] : j.at("welfare_weights").items())
      p.welfare_weights[k] = v.get<double>();
  return p;
}

json params_to_json(const ScenarioParams& p) {
  json j;
  j["time_step_s"] = p.time_step_s;
  j["value_of_time_eur_h"] = p.vot_eur_s * 3600.0;
  j["pv_distance_cost_eur_km"] = p.pv_dist_cost_eur_m * 1000.0;
  j["pv_intercept_eur"] = p.pv_intercept_eur;
  j["walk_speed_mps"] = p.walk_speed_mps;
  j["transfer_penalty_eur"] = p.transfer_penalty_eur;
  j["boarding_time_s"] = p.boarding_time_s;
  j["vehicle_capacity"] = p.vehicle_capacity;
  j["max_wait_s"] = p.max_wait_s;
  j["max_relative_detour"] = p.max_rel_detour;
  j["amod_fixed_cost_eur"] = p.amod_fixed_cost_eur;
  j["amod_distance_cost_eur_km"] = p.amod_dist_cost_eur_m * 1000.0;
  j["min_fare_eur"] = p.min_fare_eur;
  j["surge_utilization_threshold"] = p.surge_util_threshold;
  j["toll_density_threshold"] = p.toll_density_threshold;
  j["co2_cost_eur_t"] = p.co2_cost_eur_t;
  j["emission_pv_t_km"] = p.emission_pv_t_m * 1000.0;
  j["emission_amod_t_km"] = p.emission_amod_t_m * 1000.0;
  j["crowding_max_factor"] = p.crowding_max_factor;
  j["pt_capacity_reduction"] = p.pt_capacity_reduction;
  j["moving_average_window"] = p.moving_average_window;
  j["pt_flat_fare_eur"] = p.pt_flat_fare_eur;
  j["logit_scale"] = p.logit_scale;
  j["start_hour"] = p.start_hour;
  j["horizon_h"] = p.horizon_s / 3600.0;
  j["inner_cluster"] = p.inner_cluster;
  j["inner_zones"] = p.inner_zones;
  j["background_pt_riders"] = p.background_pt_riders;
  j["welfare_weights"] = p.welfare_weights;
  return j;
}

json load_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return j;
}

}  // namespace

Scenario load_scenario(const fs::path& dir) {
  Scenario s;

  json pj = load_json_file(dir / "params.json");
  s.params = params_from_json(pj);

  if (fs::exists(dir / "bounds.json")) {
    json bj = load_json_file(dir / "bounds.json");
    for (int i = 0; i < DecisionVector::kDim; ++i) {
      const std::string& name = DecisionVector::names()[i];
      if (bj.contains(name)) {
        s.bounds.lo[i] = bj.at(name).at(0).get<double>();
        s.bounds.hi[i] = bj.at(name).at(1).get<double>();
      }
    }
  }

  read_csv(dir / "network_nodes.csv", 5, [&](const auto& f, int) {
    Node n;
    n.id = to_int(f[0]);
    n.x = to_double(f[1]);
    n.y = to_double(f[2]);
    n.zone = to_int(f[3]);
    n.access_point = to_int(f[4]) != 0;
    s.nodes.push_back(n);
  });
  std::map<int, int> nidx;
  for (size_t i = 0; i < s.nodes.size(); ++i) nidx[s.nodes[i].id] = static_cast<int>(i);

  read_csv(dir / "network_edges.csv", 7, [&](const auto& f, int line) {
    Edge e;
    e.id = to_int(f[0]);
    auto from = nidx.find(to_int(f[1]));
    auto to = nidx.find(to_int(f[2]));
    if (from == nidx.end() || to == nidx.end())
      throw ValidationError("network_edges.csv:" + std::to_string(line) + ": edge " +
                            f[0] + " references unknown node id");
    e.from = from->second;
    e.to = to->second;
    e.length_m = to_double(f[3]);
    e.speed_mps = to_double(f[4]);
    e.cluster = to_int(f[5]);
    e.lanes = to_int(f[6]);
    s.edges.push_back(e);
  });

  // One NFD file per cluster id occurring in the edge list.
  std::vector<int> cluster_ids;
  for (const auto& e : s.edges)
    if (std::find(cluster_ids.begin(), cluster_ids.end(), e.cluster) == cluster_ids.end())
      cluster_ids.push_back(e.cluster);
  std::sort(cluster_ids.begin(), cluster_ids.end());

  json cj = pj.value("clusters", json::object());
  for (int cid : cluster_ids) {
    ClusterSpec c;
    c.id = cid;
    std::vector<double> kk, qq;
    read_csv(dir / ("nfd_" + std::to_string(cid) + ".csv"), 2, [&](const auto& f, int) {
      kk.push_back(to_double(f[0]));
      qq.push_back(to_double(f[1]));
    });
    c.nfd = NfdTable(std::move(kk), std::move(qq));
    json cc = cj.value(std::to_string(cid), json::object());
    // Default v1 = v2 = mean free-flow speed of the cluster.
    double vsum = 0.0;
    int vcount = 0;
    for (const auto& e : s.edges)
      if (e.cluster == cid) {
        vsum += e.speed_mps * 3.6;
        ++vcount;
      }
    double vff = vcount ? vsum / vcount : 50.0;
    c.v1_kmh = cc.value("v1_kmh", vff);
    c.v2_kmh = cc.value("v2_kmh", vff);
    if (cc.contains("background_density"))
      c.background_density = cc.at("background_density").get<std::vector<double>>();
    s.clusters.push_back(std::move(c));
  }

  if (fs::exists(dir / "pt_lines.csv"))
    read_csv(dir / "pt_lines.csv", 6, [&](const auto& f, int) {
      TransitLine l;
      l.id = to_int(f[0]);
      l.trips_per_h = to_double(f[1]);
      l.trip_len_km = to_double(f[2]);
      l.cost_eur_km = to_double(f[3]);
      l.emission_t_km = to_double(f[4]);
      l.capacity = to_double(f[5]);
      s.lines.push_back(l);
    });

  if (fs::exists(dir / "pt_stops.csv"))
    read_csv(dir / "pt_stops.csv", 2, [&](const auto& f, int line) {
      PtStop st;
      st.id = to_int(f[0]);
      auto it = nidx.find(to_int(f[1]));
      if (it == nidx.end())
        throw ValidationError("pt_stops.csv:" + std::to_string(line) +
                              ": unknown node id " + f[1]);
      st.node = it->second;
      s.stops.push_back(st);
    });

  if (fs::exists(dir / "pt_skim.csv"))
    read_csv(dir / "pt_skim.csv", 5, [&](const auto& f, int) {
      SkimEntry e;
      int o = to_int(f[0]), d = to_int(f[1]);
      e.walk_m = to_double(f[2]);
      e.in_vehicle_s = to_double(f[3]);
      e.transfers = to_int(f[4]);
      s.skim[{o, d}] = e;
    });

  read_csv(dir / "od_matrix.csv", 4, [&](const auto& f, int) {
    OdEntry o;
    o.hour = to_int(f[0]);
    o.origin_zone = to_int(f[1]);
    o.dest_zone = to_int(f[2]);
    o.trips_per_h = to_double(f[3]);
    s.od.push_back(o);
  });

  s.build_derived();
  s.validate();
  return s;
}

void save_scenario(const Scenario& s, const fs::path& dir) {
  fs::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream out(dir / name);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out.precision(17);
    return out;
  };

  {
    json pj = params_to_json(s.params);
    json cj = json::object();
    for (const auto& c : s.clusters) {
      json cc;
      cc["v1_kmh"] = c.v1_kmh;
      cc["v2_kmh"] = c.v2_kmh;
      if (!c.background_density.empty()) cc["background_density"] = c.background_density;
      cj[std::to_string(c.id)] = cc;
    }
    pj["clusters"] = cj;
    auto out = open("params.json");
    out << pj.dump(2) << "\n";
  }
  {
    json bj;
    for (int i = 0; i < DecisionVector::kDim; ++i)
      bj[DecisionVector::names()[i]] = {s.bounds.lo[i], s.bounds.hi[i]};
    auto out = open("bounds.json");
    out << bj.dump(2) << "\n";
  }
  {
    auto out = open("network_nodes.csv");
    out << "node_id,x,y,zone_id,access_point\n";
    for (const auto& n : s.nodes)
      out << n.id << ',' << n.x << ',' << n.y << ',' << n.zone << ','
          << (n.access_point ? 1 : 0) << '\n';
  }
  {
    auto out = open("network_edges.csv");
    out << "edge_id,from_node,to_node,length_m,speed_mps,cluster_id,lanes\n";
    for (const auto& e : s.edges)
      out << e.id << ',' << s.nodes[static_cast<size_t>(e.from)].id << ','
          << s.nodes[static_cast<size_t>(e.to)].id << ',' << e.length_m << ','
          << e.speed_mps << ',' << e.cluster << ',' << e.lanes << '\n';
  }
  for (const auto& c : s.clusters) {
    auto out = open("nfd_" + std::to_string(c.id) + ".csv");
    out << "density_veh_lane_km,flow_veh_h\n";
    for (size_t i = 0; i < c.nfd.densities().size(); ++i)
      out << c.nfd.densities()[i] << ',' << c.nfd.flows()[i] << '\n';
  }
  {
    auto out = open("pt_lines.csv");
    out << "line_id,trips_per_h,trip_len_km,cost_eur_km,emission_t_km,capacity\n";
    for (const auto& l : s.lines)
      out << l.id << ',' << l.trips_per_h << ',' << l.trip_len_km << ','
          << l.cost_eur_km << ',' << l.emission_t_km << ',' << l.capacity << '\n';
  }
  {
    auto out = open("pt_stops.csv");
    out << "stop_id,node_id\n";
    for (const auto& st : s.stops)
      out << st.id << ',' << s.nodes[static_cast<size_t>(st.node)].id << '\n';
  }
  {
    auto out = open("pt_skim.csv");
    out << "origin_stop,dest_stop,walk_m,in_vehicle_s,transfers\n";
    for (const auto& [key, e] : s.skim)
      out << key.first << ',' << key.second << ',' << e.walk_m << ','
          << e.in_vehicle_s << ',' << e.transfers << '\n';
  }
  {
    auto out = open("od_matrix.csv");
    out << "hour,origin_zone,dest_zone,trips_per_h\n";
    for (const auto& o : s.od)
      out << o.hour << ',' << o.origin_zone << ',' << o.dest_zone << ','
          << o.trips_per_h << '\n';
  }
}

}  // namespace mobsim
