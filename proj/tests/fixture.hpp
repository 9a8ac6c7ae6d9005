#pragma once

// Synthetic 4x4-grid city shared by the tests: 16 nodes, 48 directed
// edges, two congestion clusters (inner = the top-left 2x2 block, zone
// 0), two transit lines with a full stop-to-stop skim, and an hourly OD
// matrix producing roughly 400-500 requests over a 3-hour morning peak.

#include <cmath>
#include <string>

#include "mobsim/scenario.hpp"

namespace fixture {

inline mobsim::Scenario make_city() {
  using namespace mobsim;
  Scenario s;

  s.params.inner_cluster = 0;
  s.params.inner_zones = {0};
  s.params.start_hour = 6;
  s.params.horizon_s = 3.0 * 3600.0;
  s.params.background_pt_riders.assign(24, 10.0);
  for (int h : {6, 7, 8}) s.params.background_pt_riders[h] = 50.0;

  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      Node n;
      n.id = r * 4 + c;
      n.x = c * 500.0;
      n.y = r * 500.0;
      n.zone = (r / 2) * 2 + (c / 2);
      n.access_point = true;
      s.nodes.push_back(n);
    }

  int eid = 0;
  auto add_edge = [&](int a, int b) {
    Edge e;
    e.id = eid++;
    e.from = a;
    e.to = b;
    e.length_m = 500.0;
    e.speed_mps = 10.0;
    e.lanes = 1;
    e.cluster = s.nodes[static_cast<size_t>(a)].zone == 0 ? 0 : 1;
    s.edges.push_back(e);
  };
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      int n = r * 4 + c;
      if (c < 3) {
        add_edge(n, n + 1);
        add_edge(n + 1, n);
      }
      if (r < 3) {
        add_edge(n, n + 4);
        add_edge(n + 4, n);
      }
    }

  for (int cid : {0, 1}) {
    ClusterSpec c;
    c.id = cid;
    c.nfd = NfdTable({0.0, 10.0, 25.0, 50.0, 80.0, 120.0},
                     {0.0, 330.0, 700.0, 900.0, 800.0, 400.0});
    // v1 (k/q + 1/v2) == 1 at free flow (36 km/h) with v1 = 18, v2 = 36.
    c.v1_kmh = 18.0;
    c.v2_kmh = 36.0;
    c.background_density.assign(24, cid == 0 ? 1.0 : 0.5);
    for (int h : {6, 7, 8}) c.background_density[h] = cid == 0 ? 4.0 : 2.0;
    s.clusters.push_back(std::move(c));
  }

  {
    TransitLine l;
    l.id = 1;
    l.trips_per_h = 6.0;
    l.trip_len_km = 8.0;
    l.cost_eur_km = 5.0;
    l.emission_t_km = 1.3e-3;
    l.capacity = 60.0;
    s.lines.push_back(l);
    l.id = 2;
    l.trips_per_h = 4.0;
    l.trip_len_km = 10.0;
    l.cost_eur_km = 5.0;
    l.emission_t_km = 1.3e-3;
    l.capacity = 80.0;
    s.lines.push_back(l);
  }
  int sid = 0;
  for (int node : {0, 3, 5, 10, 12, 15}) {
    PtStop st;
    st.id = sid++;
    st.node = node;
    s.stops.push_back(st);
  }
  for (const auto& a : s.stops)
    for (const auto& b : s.stops) {
      if (a.id == b.id) continue;
      const Node& na = s.nodes[static_cast<size_t>(a.node)];
      const Node& nb = s.nodes[static_cast<size_t>(b.node)];
      double dist = std::hypot(na.x - nb.x, na.y - nb.y);
      SkimEntry e;
      e.walk_m = 100.0;
      e.in_vehicle_s = dist / (20.0 / 3.6) + 300.0;  // 20 km/h + dwell slack
      e.transfers = dist > 1400.0 ? 1 : 0;
      s.skim[{a.id, b.id}] = e;
    }

  for (int hour : {6, 7, 8}) {
    auto add_od = [&](int o, int d, double rate) {
      s.od.push_back({hour, o, d, rate});
    };
    add_od(1, 0, 20.0);
    add_od(2, 0, 15.0);
    add_od(3, 0, 15.0);
    add_od(0, 1, 5.0);
    add_od(0, 2, 5.0);
    add_od(0, 3, 5.0);
    add_od(1, 2, 8.0);
    add_od(2, 1, 8.0);
    add_od(1, 3, 8.0);
    add_od(3, 1, 8.0);
    add_od(2, 3, 8.0);
    add_od(3, 2, 8.0);
    add_od(0, 0, 5.0);
    add_od(1, 1, 5.0);
    add_od(2, 2, 5.0);
    add_od(3, 3, 5.0);
  }

  s.build_derived();
  s.validate();
  return s;
}

inline mobsim::DecisionVector default_decision() {
  mobsim::DecisionVector d;
  d.fleet_size = 20.0;
  d.dist_fare_eur_km = 1.0;
  return d;
}

}  // namespace fixture
