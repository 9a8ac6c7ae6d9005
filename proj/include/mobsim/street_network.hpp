#pragma once

#include <vector>

#include "mobsim/scenario.hpp"

namespace mobsim {

struct UnreachablePair : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One maximal same-cluster stretch of a path, in path order.
struct PathSegment {
  int cluster = -1;      // cluster index
  double ff_time_s = 0.0;
  double dist_m = 0.0;
};

struct PathInfo {
  bool reachable = false;
  double ff_time_s = 0.0;
  double dist_m = 0.0;
  std::vector<PathSegment> segments;  // cluster splits, sum to totals
  std::vector<int> edge_seq;          // edge indices for fleet vehicles

  double cluster_dist_m(int cluster) const;
  double cluster_time_s(int cluster) const;
};

// Free-flow all-pairs shortest paths over the directed street graph.
// Paths are fixed at preprocessing time; congestion only rescales times.
// Equal-cost ties resolve to the lexicographically smallest node sequence.
class PathTable {
 public:
  PathTable() = default;
  static PathTable build(const Scenario& s, bool parallel = true);

  const PathInfo& path(int o, int d) const;  // throws UnreachablePair
  bool reachable(int o, int d) const { return at(o, d).reachable; }
  int node_count() const { return n_; }

 private:
  const PathInfo& at(int o, int d) const { return paths_[static_cast<size_t>(o) * n_ + d]; }
  int n_ = 0;
  std::vector<PathInfo> paths_;
};

// Serial textbook all-pairs reference (times only); kept as the oracle
// for the Dijkstra-based table and for the benchmark comparison.
std::vector<std::vector<double>> floyd_warshall_times(const Scenario& s);

// Per-cluster NFD state: density -> flow -> raw travel time factor,
// smoothed by a moving average over the last `window` raw values.
class ClusterState {
 public:
  ClusterState() = default;
  ClusterState(const ClusterSpec* spec, int window);

  // n_driving counts PVs plus AMOD vehicles currently moving in this
  // cluster; hour indexes the background density schedule.
  void update(double n_driving, int hour);

  double density() const { return density_; }
  double flow() const { return flow_; }
  double raw_psi() const { return raw_psi_; }
  double psi() const { return smoothed_psi_; }

 private:
  const ClusterSpec* spec_ = nullptr;
  int window_ = 5;
  std::vector<double> history_;  // last <= window raw values
  double density_ = 0.0;
  double flow_ = 0.0;
  double raw_psi_ = 1.0;
  double smoothed_psi_ = 1.0;
};

// Read view over the cluster states used for dynamic travel times.
class NetworkState {
 public:
  NetworkState(const Scenario& s, const PathTable& paths);

  void update(const std::vector<double>& n_driving_per_cluster, int hour);

  double psi(int cluster) const { return states_[static_cast<size_t>(cluster)].psi(); }
  double density(int cluster) const { return states_[static_cast<size_t>(cluster)].density(); }
  const ClusterState& cluster(int c) const { return states_[static_cast<size_t>(c)]; }
  int cluster_count() const { return static_cast<int>(states_.size()); }

  // Scaled travel time: sum over cluster segments of ff-time * psi_c.
  double travel_time_s(int o, int d) const;
  // Distance driven inside the toll (inner) cluster; 0 when none is set.
  double toll_distance_m(int o, int d) const;

 private:
  const PathTable* paths_;
  std::vector<ClusterState> states_;
  int inner_cluster_ = -1;
};

}  // namespace mobsim
