#include "mobsim/street_network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mobsim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieEps = 1e-9;
}  // namespace

double PathInfo::cluster_dist_m(int cluster) const {
  double d = 0.0;
  for (const auto& seg : segments)
    if (seg.cluster == cluster) d += seg.dist_m;
  return d;
}

double PathInfo::cluster_time_s(int cluster) const {
  double t = 0.0;
  for (const auto& seg : segments)
    if (seg.cluster == cluster) t += seg.ff_time_s;
  return t;
}

namespace {

// Single-source shortest paths with deterministic lexicographic
// tie-breaking. A plain Dijkstra pass fixes distances; a second pass in
// increasing-distance order picks, per node, the predecessor whose path
// node sequence is lexicographically smallest (edge times are strictly
// positive, so all predecessors on a shortest path are finalized first).
void single_source(const Scenario& s, int source, std::vector<double>& dist,
                   std::vector<int>& parent_edge) {
  const int n = static_cast<int>(s.nodes.size());
  dist.assign(static_cast<size_t>(n), kInf);
  parent_edge.assign(static_cast<size_t>(n), -1);
  dist[static_cast<size_t>(source)] = 0.0;

  using QItem = std::pair<double, int>;
  std::priority_queue<QItem, std::vector<QItem>, std::greater<>> pq;
  pq.push({0.0, source});
  std::vector<char> done(static_cast<size_t>(n), 0);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (done[static_cast<size_t>(u)]) continue;
    done[static_cast<size_t>(u)] = 1;
    for (int ei : s.out_edges[static_cast<size_t>(u)]) {
      const Edge& e = s.edges[static_cast<size_t>(ei)];
      double nd = d + e.ff_time_s();
      if (nd < dist[static_cast<size_t>(e.to)] - kTieEps) {
        dist[static_cast<size_t>(e.to)] = nd;
        pq.push({nd, e.to});
      }
    }
  }

  // Lexicographic predecessor selection in increasing-distance order.
  std::vector<int> order;
  order.reserve(static_cast<size_t>(n));
  for (int v = 0; v < n; ++v)
    if (dist[static_cast<size_t>(v)] < kInf) order.push_back(v);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    double da = dist[static_cast<size_t>(a)], db = dist[static_cast<size_t>(b)];
    return da != db ? da < db : a < b;
  });

  auto path_ids = [&](int v) {
    std::vector<int> ids;
    while (v != source) {
      ids.push_back(s.nodes[static_cast<size_t>(v)].id);
      v = s.edges[static_cast<size_t>(parent_edge[static_cast<size_t>(v)])].from;
    }
    ids.push_back(s.nodes[static_cast<size_t>(source)].id);
    std::reverse(ids.begin(), ids.end());
    return ids;
  };

  // Incoming edges, grouped once.
  std::vector<std::vector<int>> in_edges(static_cast<size_t>(n));
  for (size_t ei = 0; ei < s.edges.size(); ++ei)
    in_edges[static_cast<size_t>(s.edges[ei].to)].push_back(static_cast<int>(ei));

  for (int v : order) {
    if (v == source) continue;
    double dv = dist[static_cast<size_t>(v)];
    int best_edge = -1;
    std::vector<int> best_path;
    for (int ei : in_edges[static_cast<size_t>(v)]) {
      const Edge& e = s.edges[static_cast<size_t>(ei)];
      double du = dist[static_cast<size_t>(e.from)];
      if (du == kInf || std::abs(du + e.ff_time_s() - dv) > kTieEps) continue;
      parent_edge[static_cast<size_t>(v)] = ei;
      std::vector<int> cand = path_ids(v);
      if (best_edge < 0 || cand < best_path) {
        best_edge = ei;
        best_path = std::move(cand);
      }
    }
    parent_edge[static_cast<size_t>(v)] = best_edge;
  }
}

PathInfo make_path(const Scenario& s, int source, int target,
                   const std::vector<double>& dist,
                   const std::vector<int>& parent_edge) {
  PathInfo p;
  if (dist[static_cast<size_t>(target)] == kInf) return p;
  p.reachable = true;
  p.ff_time_s = dist[static_cast<size_t>(target)];

  int v = target;
  while (v != source) {
    int ei = parent_edge[static_cast<size_t>(v)];
    p.edge_seq.push_back(ei);
    v = s.edges[static_cast<size_t>(ei)].from;
  }
  std::reverse(p.edge_seq.begin(), p.edge_seq.end());

  for (int ei : p.edge_seq) {
    const Edge& e = s.edges[static_cast<size_t>(ei)];
    int c = s.cluster_index.at(e.cluster);
    p.dist_m += e.length_m;
    if (p.segments.empty() || p.segments.back().cluster != c)
      p.segments.push_back({c, 0.0, 0.0});
    p.segments.back().ff_time_s += e.ff_time_s();
    p.segments.back().dist_m += e.length_m;
  }
  return p;
}

}  // namespace

PathTable PathTable::build(const Scenario& s, bool parallel) {
  PathTable t;
  t.n_ = static_cast<int>(s.nodes.size());
  t.paths_.assign(static_cast<size_t>(t.n_) * t.n_, PathInfo{});

#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int src = 0; src < t.n_; ++src) {
    std::vector<double> dist;
    std::vector<int> parent_edge;
    single_source(s, src, dist, parent_edge);
    for (int dst = 0; dst < t.n_; ++dst) {
      PathInfo p;
      if (src == dst) {
        p.reachable = true;
      } else {
        p = make_path(s, src, dst, dist, parent_edge);
      }
      t.paths_[static_cast<size_t>(src) * t.n_ + dst] = std::move(p);
    }
  }
  return t;
}

const PathInfo& PathTable::path(int o, int d) const {
  const PathInfo& p = at(o, d);
  if (!p.reachable)
    throw UnreachablePair("no path from node index " + std::to_string(o) +
                          " to node index " + std::to_string(d));
  return p;
}

std::vector<std::vector<double>> floyd_warshall_times(const Scenario& s) {
  const size_t n = s.nodes.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, kInf));
  for (size_t i = 0; i < n; ++i) d[i][i] = 0.0;
  for (const auto& e : s.edges) {
    size_t u = static_cast<size_t>(e.from), v = static_cast<size_t>(e.to);
    d[u][v] = std::min(d[u][v], e.ff_time_s());
  }
  for (size_t k = 0; k < n; ++k)
    for (size_t i = 0; i < n; ++i) {
      if (d[i][k] == kInf) continue;
      for (size_t j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
    }
  return d;
}

ClusterState::ClusterState(const ClusterSpec* spec, int window)
    : spec_(spec), window_(window) {}

void ClusterState::update(double n_driving, int hour) {
  double background = 0.0;
  if (!spec_->background_density.empty())
    background = spec_->background_density[static_cast<size_t>(hour) %
                                           spec_->background_density.size()];
  density_ = n_driving / spec_->lane_km + background;
  flow_ = spec_->nfd.flow_at(density_);
  // k/q is taken as 0 at zero density so the free-flow floor applies.
  double pace = (density_ > 0.0 && flow_ > 0.0) ? density_ / flow_ : 0.0;
  raw_psi_ = spec_->v1_kmh * (pace + 1.0 / spec_->v2_kmh);
  raw_psi_ = std::max(raw_psi_, 1.0);

  history_.push_back(raw_psi_);
  if (static_cast<int>(history_.size()) > window_)
    history_.erase(history_.begin());
  double sum = 0.0;
  for (double v : history_) sum += v;
  smoothed_psi_ = sum / static_cast<double>(history_.size());
}

NetworkState::NetworkState(const Scenario& s, const PathTable& paths)
    : paths_(&paths), inner_cluster_(s.inner_cluster_index()) {
  states_.reserve(s.clusters.size());
  for (const auto& c : s.clusters)
    states_.emplace_back(&c, s.params.moving_average_window);
}

void NetworkState::update(const std::vector<double>& n_driving, int hour) {
  for (size_t c = 0; c < states_.size(); ++c)
    states_[c].update(c < n_driving.size() ? n_driving[c] : 0.0, hour);
}

double NetworkState::travel_time_s(int o, int d) const {
  const PathInfo& p = paths_->path(o, d);
  double t = 0.0;
  for (const auto& seg : p.segments)
    t += seg.ff_time_s * states_[static_cast<size_t>(seg.cluster)].psi();
  return t;
}

double NetworkState::toll_distance_m(int o, int d) const {
  if (inner_cluster_ < 0) return 0.0;
  return paths_->path(o, d).cluster_dist_m(inner_cluster_);
}

}  // namespace mobsim
