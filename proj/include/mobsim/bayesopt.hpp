#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <vector>

#include "mobsim/gp.hpp"

namespace mobsim {

// UCB exploration weight schedule: sqrt(2 log(pi^2 n^(2 + d/2) / (3 delta))).
double kappa(int n, int d, double delta = 0.1);

// Axis-aligned search box inside the unit cube.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  static Box unit(int dim);
  void validate() const;
};

struct AcquisitionConfig {
  int starts = 64;
  double tol = 1e-4;
};

// Approximate maximizer of mu + kappa * sigma over the box, with the
// listed coordinates pinned. Multi-start (Sobol) coordinate descent;
// deterministic.
std::vector<double> next_point(const GaussianProcess& gp, double kappa_value,
                               const Box& box, const std::map<int, double>& frozen,
                               const AcquisitionConfig& cfg = {});

// One objective evaluation returns both levels' targets.
struct Evaluation {
  double profit = 0.0;
  double welfare = 0.0;
};
using EvalFn = std::function<Evaluation(const std::vector<double>& u)>;

struct BoSettings {
  int init_operator = 8;     // Sobol points on the first hyperplane
  int init_regulator = 8;    // Sobol regulator settings in stage 2
  bool regulator_corners = false;
  int budget_operator = 30;  // evaluations per hyperplane
  int budget_regulator = 8;  // stage-3 proposals
  double improvement_tol = 1e-3;
  int patience = 6;
  int cap_kappa_after = 34;  // operator iterations before kappa clamps to 1
  AcquisitionConfig acq;
};

struct OperatorResult {
  std::vector<double> u;  // full normalized vector at the incumbent
  double profit = 0.0;
  double welfare = 0.0;   // welfare observed at the incumbent evaluation
  int evaluations = 0;
};

struct RegulatorResult {
  std::vector<double> u;
  double profit = 0.0;
  double welfare = 0.0;
  int inner_evaluations = 0;
  std::vector<double> welfare_trace;  // incumbent welfare per regulator setting
};

// Shared two-level surrogate state. The profit surrogate spans the full
// decision space; the welfare surrogate holds one point per regulator
// setting: the welfare at that setting's best-profit operator response.
class OptimizationState {
 public:
  OptimizationState(int regulator_dim, int operator_dim);

  int regulator_dim() const { return dr_; }
  int operator_dim() const { return do_; }
  int dim() const { return dr_ + do_; }

  GaussianProcess& profit_gp() { return profit_gp_; }
  GaussianProcess& welfare_gp() { return welfare_gp_; }
  const GaussianProcess& profit_gp() const { return profit_gp_; }
  const GaussianProcess& welfare_gp() const { return welfare_gp_; }

  void record(const std::vector<double>& u, const Evaluation& e);
  void record_regulator(const std::vector<double>& xr, double welfare);

  int evaluations() const { return profit_gp_.size(); }
  int operator_iterations = 0;  // drives the kappa cap

  void save(const std::filesystem::path& path) const;
  static OptimizationState load(const std::filesystem::path& path);

  // Raw observations, for checkpoint round-trips and reporting.
  std::vector<std::vector<double>> profit_x;
  std::vector<Evaluation> profit_f;
  std::vector<std::vector<double>> welfare_x;
  std::vector<double> welfare_f;

 private:
  int dr_, do_;
  GaussianProcess profit_gp_;
  GaussianProcess welfare_gp_;
};

// Operator-level BO on the hyperplane with the regulator coordinates of
// `xr` frozen. `box` bounds the free coordinates (already truncated for
// the fleet cap where applicable). Initializes with Sobol points only
// when the shared surrogate is empty; warm hyperplanes start from UCB
// proposals directly.
OperatorResult optimize_operator(OptimizationState& state,
                                 const std::vector<double>& xr, const Box& box,
                                 const EvalFn& eval, const BoSettings& settings);

// Full two-level loop: status-quo hyperplane first, then Sobol(+corner)
// regulator settings, then welfare-UCB proposals. `status_quo` is the
// normalized regulator vector of the no-regulation scenario.
// `operator_box` maps a regulator setting to the (possibly truncated)
// operator search box.
RegulatorResult optimize_regulator(
    OptimizationState& state, const std::vector<double>& status_quo,
    const std::function<Box(const std::vector<double>& xr)>& operator_box,
    const EvalFn& eval, const BoSettings& settings);

}  // namespace mobsim
