#include "mobsim/fleet.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mobsim/policy.hpp"

namespace mobsim {

namespace {
constexpr double kEps = 1e-6;

double wrap_angle(double a) {
  while (a > M_PI) a -= 2.0 * M_PI;
  while (a < -M_PI) a += 2.0 * M_PI;
  return a;
}
}  // namespace

FleetOperator::FleetOperator(const Scenario& s, const PathTable& paths,
                             const NetworkState& net, const DecisionVector& decision,
                             std::uint64_t seed)
    : s_(&s), paths_(&paths), net_(&net), decision_(decision) {
  int n = static_cast<int>(
      std::llround(apply_fleet_cap(decision.fleet_size, decision.fleet_cap)));
  n = std::max(n, 0);

  std::vector<int> access;
  for (size_t i = 0; i < s.nodes.size(); ++i)
    if (s.nodes[i].access_point) access.push_back(static_cast<int>(i));
  if (access.empty())
    for (size_t i = 0; i < s.nodes.size(); ++i) access.push_back(static_cast<int>(i));

  std::mt19937_64 rng(seed ^ 0xf1ee7ULL);
  std::uniform_int_distribution<size_t> pick(0, access.size() - 1);
  vehicles_.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    vehicles_[static_cast<size_t>(i)].id = i;
    vehicles_[static_cast<size_t>(i)].pos_node = access[pick(rng)];
  }
}

int FleetOperator::position_node(const Vehicle& v) const {
  if (v.cur_edge >= 0) return s_->edges[static_cast<size_t>(v.cur_edge)].to;
  return v.pos_node;
}

double FleetOperator::position_offset_s(const Vehicle& v) const {
  double t = v.dwell_remaining_s;
  if (v.cur_edge >= 0) {
    const Edge& e = s_->edges[static_cast<size_t>(v.cur_edge)];
    double psi = net_->psi(s_->cluster_index.at(e.cluster));
    t += (e.ff_time_s() - v.edge_done_ff_s) * psi;
  }
  return t;
}

FleetOperator::PlanTiming FleetOperator::evaluate_plan(
    const Vehicle& v, const std::vector<PlanStop>& stops, double now_s,
    const FleetPassenger* extra) const {
  PlanTiming out;
  out.feasible = true;

  auto passenger = [&](int id) -> const FleetPassenger& {
    if (extra && extra->id == id) return *extra;
    return passengers_.at(id);
  };

  double t = now_s + position_offset_s(v);
  int node = position_node(v);
  int load = static_cast<int>(v.onboard.size());

  if (v.cur_edge >= 0) {
    const Edge& e = s_->edges[static_cast<size_t>(v.cur_edge)];
    out.total_dist_m += e.length_m * (1.0 - v.edge_done_ff_s / e.ff_time_s());
  }

  for (const PlanStop& stop : stops) {
    if (node != stop.node) {
      if (!paths_->reachable(node, stop.node)) {
        out.feasible = false;
        return out;
      }
      out.total_dist_m += paths_->path(node, stop.node).dist_m;
      t += net_->travel_time_s(node, stop.node);
      node = stop.node;
    }
    double arrival = t;

    for (int id : stop.alight) {
      const FleetPassenger& p = passenger(id);
      double ref = p.onboard ? p.pickup_departure_s : out.departure.at(id);
      if (arrival - ref > (1.0 + s_->params.max_rel_detour) * p.direct_ff_time_s + kEps)
        out.feasible = false;
      out.dropoff[id] = arrival;
      out.sum_dropoff_delay_s += arrival - p.request_time_s;
      --load;
    }
    double dwell = s_->params.boarding_time_s *
                   static_cast<double>(stop.board.size() + stop.alight.size());
    for (int id : stop.board) {
      const FleetPassenger& p = passenger(id);
      if (arrival - p.request_time_s > s_->params.max_wait_s + kEps)
        out.feasible = false;
      out.arrival[id] = arrival;
      out.departure[id] = arrival + dwell;
      ++load;
    }
    if (load > s_->params.vehicle_capacity) out.feasible = false;
    if (!out.feasible) return out;
    t = arrival + dwell;
  }
  return out;
}

std::vector<int> FleetOperator::candidate_vehicles(const TravelerRequest& r,
                                                   double now_s) const {
  struct Ranked {
    int id;
    double key;
  };
  std::vector<Ranked> by_idle, by_heading;

  double req_heading = 0.0;
  {
    const Node& a = s_->nodes[static_cast<size_t>(r.origin)];
    const Node& b = s_->nodes[static_cast<size_t>(r.destination)];
    req_heading = std::atan2(b.y - a.y, b.x - a.x);
  }

  for (const Vehicle& v : vehicles_) {
    int pos = position_node(v);
    if (!paths_->reachable(pos, r.origin)) continue;
    double reach = position_offset_s(v) + net_->travel_time_s(pos, r.origin);
    if (reach > s_->params.max_wait_s + kEps) continue;

    double tti = 0.0;
    if (!v.stops.empty())
      tti = std::max(0.0, v.stops.back().planned_departure_s - now_s);
    else if (v.dwell_remaining_s > 0.0 || v.cur_edge >= 0)
      tti = position_offset_s(v);
    by_idle.push_back({v.id, tti});

    // Heading is undefined for vehicles without a stop list; those are
    // only eligible through the idleness criterion.
    if (!v.stops.empty()) {
      const Node& a = s_->nodes[static_cast<size_t>(pos)];
      const Node& b =
          s_->nodes[static_cast<size_t>(v.stops.back().node)];
      if (a.x != b.x || a.y != b.y) {
        double h = std::atan2(b.y - a.y, b.x - a.x);
        by_heading.push_back({v.id, std::abs(wrap_angle(h - req_heading))});
      }
    }
  }

  auto take5 = [](std::vector<Ranked>& v) {
    std::sort(v.begin(), v.end(), [](const Ranked& a, const Ranked& b) {
      return a.key != b.key ? a.key < b.key : a.id < b.id;
    });
    if (v.size() > 5) v.resize(5);
  };
  take5(by_idle);
  take5(by_heading);

  std::vector<int> ids;
  for (const auto& x : by_idle) ids.push_back(x.id);
  for (const auto& x : by_heading) ids.push_back(x.id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

InsertionResult FleetOperator::try_insert(const Vehicle& v, const TravelerRequest& r,
                                          double now_s) const {
  InsertionResult best;

  FleetPassenger np;
  np.id = r.id;
  np.origin = r.origin;
  np.destination = r.destination;
  np.request_time_s = r.request_time_s;
  const PathInfo& direct = paths_->path(r.origin, r.destination);
  np.direct_ff_time_s = direct.ff_time_s;
  np.direct_dist_m = direct.dist_m;

  PlanTiming base = evaluate_plan(v, v.stops, now_s, nullptr);
  double base_cost = s_->params.amod_dist_cost_eur_m * base.total_dist_m +
                     s_->params.vot_eur_s * base.sum_dropoff_delay_s;

  const size_t n = v.stops.size();
  for (size_t pi = 0; pi <= n; ++pi) {
    for (size_t di = pi; di <= n; ++di) {
      std::vector<PlanStop> cand;
      cand.reserve(n + 2);
      for (size_t k = 0; k < pi; ++k) cand.push_back(v.stops[k]);
      PlanStop pickup;
      pickup.node = r.origin;
      pickup.board.push_back(r.id);
      cand.push_back(pickup);
      for (size_t k = pi; k < di; ++k) cand.push_back(v.stops[k]);
      PlanStop dropoff;
      dropoff.node = r.destination;
      dropoff.alight.push_back(r.id);
      cand.push_back(dropoff);
      for (size_t k = di; k < n; ++k) cand.push_back(v.stops[k]);

      PlanTiming timing = evaluate_plan(v, cand, now_s, &np);
      if (!timing.feasible) continue;
      double cost = s_->params.amod_dist_cost_eur_m * timing.total_dist_m +
                    s_->params.vot_eur_s * timing.sum_dropoff_delay_s;
      double delta = cost - base_cost;
      if (!best.feasible || delta < best.delta_cost - 1e-9) {
        best.feasible = true;
        best.delta_cost = delta;
        best.stops = std::move(cand);
        best.pickup_arrival_s = timing.arrival.at(r.id);
        best.pickup_departure_s = timing.departure.at(r.id);
        best.dropoff_arrival_s = timing.dropoff.at(r.id);
        // Refresh planned times for the whole candidate plan.
        double t = now_s + position_offset_s(v);
        int node = position_node(v);
        for (PlanStop& stop : best.stops) {
          if (node != stop.node) {
            t += net_->travel_time_s(node, stop.node);
            node = stop.node;
          }
          stop.planned_arrival_s = t;
          t += s_->params.boarding_time_s *
               static_cast<double>(stop.board.size() + stop.alight.size());
          stop.planned_departure_s = t;
        }
      }
    }
  }
  return best;
}

std::optional<Offer> FleetOperator::make_offer(const TravelerRequest& r, double now_s) {
  if (vehicles_.empty()) return std::nullopt;
  if (!paths_->reachable(r.origin, r.destination)) return std::nullopt;

  double util = utilization();

  InsertionResult best;
  int best_vehicle = -1;
  for (int vid : candidate_vehicles(r, now_s)) {
    InsertionResult res = try_insert(vehicles_[static_cast<size_t>(vid)], r, now_s);
    if (!res.feasible) continue;
    if (best_vehicle < 0 || res.delta_cost < best.delta_cost - 1e-9) {
      best = std::move(res);
      best_vehicle = vid;
    }
  }
  if (best_vehicle < 0) return std::nullopt;

  const PathInfo& direct = paths_->path(r.origin, r.destination);
  double fare = std::max(s_->params.min_fare_eur,
                         decision_.dist_fare_eur_km * direct.dist_m / 1000.0);
  if (util >= s_->params.surge_util_threshold) fare *= decision_.surge_factor;

  Offer offer;
  offer.request_id = r.id;
  offer.vehicle_id = best_vehicle;
  offer.fare_eur = fare;
  offer.wait_s = best.pickup_arrival_s - r.request_time_s;
  offer.in_vehicle_s = best.dropoff_arrival_s - best.pickup_departure_s;
  offer.direct_dist_m = direct.dist_m;

  Pending pending;
  pending.vehicle_id = best_vehicle;
  pending.stops = std::move(best.stops);
  pending.passenger.id = r.id;
  pending.passenger.origin = r.origin;
  pending.passenger.destination = r.destination;
  pending.passenger.request_time_s = r.request_time_s;
  pending.passenger.direct_ff_time_s = direct.ff_time_s;
  pending.passenger.direct_dist_m = direct.dist_m;
  pending.passenger.fare_eur = fare;
  pending_[r.id] = std::move(pending);
  return offer;
}

void FleetOperator::commit_or_discard(int request_id, bool accepted) {
  auto it = pending_.find(request_id);
  if (it == pending_.end())
    throw std::logic_error("commit_or_discard without a pending offer for request " +
                           std::to_string(request_id));
  if (accepted) {
    Vehicle& v = vehicles_[static_cast<size_t>(it->second.vehicle_id)];
    v.stops = std::move(it->second.stops);
    v.route.clear();
    v.route_i = 0;
    passengers_[request_id] = it->second.passenger;
  }
  pending_.erase(it);
}

void FleetOperator::arrive_at_stop(Vehicle& v, double t_s) {
  PlanStop stop = v.stops.front();
  v.stops.erase(v.stops.begin());

  double dwell = s_->params.boarding_time_s *
                 static_cast<double>(stop.board.size() + stop.alight.size());
  for (int id : stop.alight) {
    FleetPassenger& p = passengers_.at(id);
    p.done = true;
    p.onboard = false;
    p.dropoff_s = t_s;
    v.onboard.erase(std::find(v.onboard.begin(), v.onboard.end(), id));
  }
  for (int id : stop.board) {
    FleetPassenger& p = passengers_.at(id);
    p.onboard = true;
    p.pickup_arrival_s = t_s;
    p.pickup_departure_s = t_s + dwell;
    v.onboard.push_back(id);
  }
  v.dwell_remaining_s = dwell;
}

void FleetOperator::advance(double dt_s, double now_s) {
  for (Vehicle& v : vehicles_) {
    double remaining = dt_s;
    double t = now_s;
    while (remaining > kEps) {
      if (v.dwell_remaining_s > kEps) {
        double c = std::min(v.dwell_remaining_s, remaining);
        v.dwell_remaining_s -= c;
        remaining -= c;
        t += c;
        continue;
      }
      v.dwell_remaining_s = 0.0;
      if (v.cur_edge >= 0) {
        const Edge& e = s_->edges[static_cast<size_t>(v.cur_edge)];
        double psi = net_->psi(s_->cluster_index.at(e.cluster));
        double rem_ff = e.ff_time_s() - v.edge_done_ff_s;
        double scaled = rem_ff * psi;
        if (remaining + kEps >= scaled) {
          remaining -= scaled;
          t += scaled;
          v.driven_m += e.length_m * rem_ff / e.ff_time_s();
          v.pos_node = e.to;
          v.cur_edge = -1;
          v.edge_done_ff_s = 0.0;
        } else {
          double p = remaining / psi;
          v.edge_done_ff_s += p;
          v.driven_m += e.length_m * p / e.ff_time_s();
          remaining = 0.0;
        }
        continue;
      }
      if (v.stops.empty()) break;  // idle
      if (v.pos_node == v.stops.front().node) {
        arrive_at_stop(v, t);
        v.route.clear();
        v.route_i = 0;
        continue;
      }
      if (v.route_i >= v.route.size()) {
        v.route = paths_->path(v.pos_node, v.stops.front().node).edge_seq;
        v.route_i = 0;
      }
      v.cur_edge = v.route[v.route_i++];
      v.edge_done_ff_s = 0.0;
    }
  }
}

std::vector<double> FleetOperator::driving_counts(int cluster_count) const {
  std::vector<double> counts(static_cast<size_t>(cluster_count), 0.0);
  for (const Vehicle& v : vehicles_)
    if (v.cur_edge >= 0) {
      int c = s_->cluster_index.at(
          s_->edges[static_cast<size_t>(v.cur_edge)].cluster);
      counts[static_cast<size_t>(c)] += 1.0;
    }
  return counts;
}

int FleetOperator::driving_in_cluster(int cluster) const {
  int n = 0;
  for (const Vehicle& v : vehicles_)
    if (v.cur_edge >= 0 &&
        s_->cluster_index.at(s_->edges[static_cast<size_t>(v.cur_edge)].cluster) ==
            cluster)
      ++n;
  return n;
}

double FleetOperator::utilization() const {
  if (vehicles_.empty()) return 0.0;
  int used = 0;
  for (const Vehicle& v : vehicles_) {
    bool pickup_planned = false;
    for (const PlanStop& s : v.stops)
      if (!s.board.empty()) {
        pickup_planned = true;
        break;
      }
    if (!v.onboard.empty() || pickup_planned) ++used;
  }
  return static_cast<double>(used) / static_cast<double>(vehicles_.size());
}

double FleetOperator::total_driven_m() const {
  double d = 0.0;
  for (const Vehicle& v : vehicles_) d += v.driven_m;
  return d;
}

}  // namespace mobsim
