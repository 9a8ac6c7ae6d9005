#include "mobsim/bayesopt.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "mobsim/sobol.hpp"

namespace mobsim {

double kappa(int n, int d, double delta) {
  if (n < 1) throw std::invalid_argument("kappa: n must be >= 1");
  double arg = std::numbers::pi * std::numbers::pi *
               std::pow(static_cast<double>(n), 2.0 + d / 2.0) / (3.0 * delta);
  return std::sqrt(std::max(2.0 * std::log(arg), 0.0));
}

Box Box::unit(int dim) {
  Box b;
  b.lo.assign(static_cast<size_t>(dim), 0.0);
  b.hi.assign(static_cast<size_t>(dim), 1.0);
  return b;
}

void Box::validate() const {
  if (lo.size() != hi.size()) throw std::invalid_argument("Box: size mismatch");
  for (size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] <= hi[i]) || lo[i] < 0.0 || hi[i] > 1.0)
      throw std::invalid_argument("Box: bounds outside the unit cube or inverted");
}

namespace {

double acquisition(const GaussianProcess& gp, double kappa_value,
                   const std::vector<double>& u) {
  auto [mu, sigma] = gp.posterior(u);
  return mu + kappa_value * sigma;
}

// Shrinking-grid line searches per free coordinate until the interval
// width drops below tol; sweeps until a full sweep stops improving.
void coordinate_descent(const GaussianProcess& gp, double kappa_value,
                        const Box& box, const std::vector<int>& free_dims,
                        double tol, std::vector<double>& u, double& value) {
  constexpr int kGridPoints = 9;
  for (int sweep = 0; sweep < 20; ++sweep) {
    double sweep_start = value;
    for (int d : free_dims) {
      double lo = box.lo[static_cast<size_t>(d)];
      double hi = box.hi[static_cast<size_t>(d)];
      while (hi - lo > tol) {
        double best_x = u[static_cast<size_t>(d)];
        double step = (hi - lo) / (kGridPoints - 1);
        for (int g = 0; g < kGridPoints; ++g) {
          double x = lo + g * step;
          u[static_cast<size_t>(d)] = x;
          double v = acquisition(gp, kappa_value, u);
          if (v > value + 1e-15) {
            value = v;
            best_x = x;
          }
        }
        u[static_cast<size_t>(d)] = best_x;
        lo = std::max(box.lo[static_cast<size_t>(d)], best_x - step);
        hi = std::min(box.hi[static_cast<size_t>(d)], best_x + step);
      }
    }
    if (value <= sweep_start + 1e-12) break;
  }
}

}  // namespace

std::vector<double> next_point(const GaussianProcess& gp, double kappa_value,
                               const Box& box, const std::map<int, double>& frozen,
                               const AcquisitionConfig& cfg) {
  const int dim = gp.dim();
  box.validate();
  if (static_cast<int>(box.lo.size()) != dim)
    throw std::invalid_argument("next_point: box dimension mismatch");

  std::vector<int> free_dims;
  for (int d = 0; d < dim; ++d)
    if (!frozen.count(d)) free_dims.push_back(d);
  if (free_dims.empty()) throw std::invalid_argument("next_point: no free coordinates");

  auto assemble = [&](const std::vector<double>& pt) {
    std::vector<double> u(static_cast<size_t>(dim));
    for (auto& [d, v] : frozen) u[static_cast<size_t>(d)] = v;
    for (size_t i = 0; i < free_dims.size(); ++i) {
      int d = free_dims[i];
      u[static_cast<size_t>(d)] = box.lo[static_cast<size_t>(d)] +
                                  pt[i] * (box.hi[static_cast<size_t>(d)] -
                                           box.lo[static_cast<size_t>(d)]);
    }
    return u;
  };

  SobolSequence seq(static_cast<int>(free_dims.size()));
  std::vector<std::pair<double, std::vector<double>>> starts;
  for (int i = 0; i < std::max(cfg.starts, 1); ++i) {
    std::vector<double> u = assemble(seq.next());
    starts.emplace_back(acquisition(gp, kappa_value, u), std::move(u));
  }
  // Also start from the best observed point, clamped into the box.
  if (gp.size() > 0) {
    int best = 0;
    for (int i = 1; i < gp.size(); ++i)
      if (gp.targets()[static_cast<size_t>(i)] > gp.targets()[static_cast<size_t>(best)])
        best = i;
    std::vector<double> u = gp.points()[static_cast<size_t>(best)];
    for (auto& [d, v] : frozen) u[static_cast<size_t>(d)] = v;
    for (int d : free_dims)
      u[static_cast<size_t>(d)] =
          std::clamp(u[static_cast<size_t>(d)], box.lo[static_cast<size_t>(d)],
                     box.hi[static_cast<size_t>(d)]);
    starts.emplace_back(acquisition(gp, kappa_value, u), std::move(u));
  }

  std::sort(starts.begin(), starts.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  size_t refine = std::min<size_t>(starts.size(), 8);

  double best_value = -std::numeric_limits<double>::infinity();
  std::vector<double> best_u;
  for (size_t i = 0; i < refine; ++i) {
    std::vector<double> u = starts[i].second;
    double value = starts[i].first;
    coordinate_descent(gp, kappa_value, box, free_dims, cfg.tol, u, value);
    if (value > best_value) {
      best_value = value;
      best_u = std::move(u);
    }
  }
  return best_u;
}

OptimizationState::OptimizationState(int regulator_dim, int operator_dim)
    : dr_(regulator_dim), do_(operator_dim),
      profit_gp_(regulator_dim + operator_dim), welfare_gp_(regulator_dim) {}

void OptimizationState::record(const std::vector<double>& u, const Evaluation& e) {
  profit_gp_.add(u, e.profit);
  profit_x.push_back(u);
  profit_f.push_back(e);
}

void OptimizationState::record_regulator(const std::vector<double>& xr, double welfare) {
  welfare_gp_.add(xr, welfare);
  welfare_x.push_back(xr);
  welfare_f.push_back(welfare);
}

void OptimizationState::save(const std::filesystem::path& path) const {
  nlohmann::json j;
  j["regulator_dim"] = dr_;
  j["operator_dim"] = do_;
  j["operator_iterations"] = operator_iterations;
  for (size_t i = 0; i < profit_x.size(); ++i)
    j["profit"].push_back({{"u", profit_x[i]},
                           {"profit", profit_f[i].profit},
                           {"welfare", profit_f[i].welfare}});
  for (size_t i = 0; i < welfare_x.size(); ++i)
    j["welfare"].push_back({{"x", welfare_x[i]}, {"w", welfare_f[i]}});
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path.string());
  out << j.dump(2) << "\n";
}

OptimizationState OptimizationState::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read checkpoint: " + path.string());
  nlohmann::json j = nlohmann::json::parse(in);
  OptimizationState state(j.at("regulator_dim").get<int>(),
                          j.at("operator_dim").get<int>());
  state.operator_iterations = j.value("operator_iterations", 0);
  if (j.contains("profit"))
    for (const auto& p : j["profit"]) {
      Evaluation e;
      e.profit = p.at("profit").get<double>();
      e.welfare = p.at("welfare").get<double>();
      state.record(p.at("u").get<std::vector<double>>(), e);
    }
  if (j.contains("welfare"))
    for (const auto& p : j["welfare"])
      state.record_regulator(p.at("x").get<std::vector<double>>(),
                             p.at("w").get<double>());
  return state;
}

OperatorResult optimize_operator(OptimizationState& state,
                                 const std::vector<double>& xr, const Box& box,
                                 const EvalFn& eval, const BoSettings& settings) {
  const int dr = state.regulator_dim();
  const int dop = state.operator_dim();
  if (static_cast<int>(xr.size()) != dr)
    throw std::invalid_argument("optimize_operator: regulator vector dimension");

  std::map<int, double> frozen;
  for (int d = 0; d < dr; ++d) frozen[d] = xr[static_cast<size_t>(d)];

  OperatorResult res;
  res.profit = -std::numeric_limits<double>::infinity();

  auto evaluate = [&](const std::vector<double>& u) {
    Evaluation e = eval(u);
    state.record(u, e);
    ++state.operator_iterations;
    ++res.evaluations;
    if (e.profit > res.profit) {
      res.profit = e.profit;
      res.welfare = e.welfare;
      res.u = u;
    }
    return e;
  };

  if (state.profit_gp().size() == 0) {
    auto pts = sobol_init(dop, settings.init_operator, false);
    for (const auto& pt : pts) {
      std::vector<double> u(xr);
      u.resize(static_cast<size_t>(dr + dop));
      for (int d = 0; d < dop; ++d)
        u[static_cast<size_t>(dr + d)] =
            box.lo[static_cast<size_t>(dr + d)] +
            pt[static_cast<size_t>(d)] * (box.hi[static_cast<size_t>(dr + d)] -
                                          box.lo[static_cast<size_t>(dr + d)]);
      evaluate(u);
      if (res.evaluations >= settings.budget_operator) return res;
    }
  }

  int no_improve = 0;
  while (res.evaluations < settings.budget_operator &&
         no_improve < settings.patience) {
    int n = std::max(state.profit_gp().size(), 1);
    double k = kappa(n, dop);
    if (state.operator_iterations >= settings.cap_kappa_after) k = std::min(k, 1.0);

    std::vector<double> u =
        next_point(state.profit_gp(), k, box, frozen, settings.acq);
    double before = res.profit;
    evaluate(u);
    if (res.profit > before + settings.improvement_tol)
      no_improve = 0;
    else
      ++no_improve;
  }
  return res;
}

RegulatorResult optimize_regulator(
    OptimizationState& state, const std::vector<double>& status_quo,
    const std::function<Box(const std::vector<double>& xr)>& operator_box,
    const EvalFn& eval, const BoSettings& settings) {
  const int dr = state.regulator_dim();
  RegulatorResult best;
  best.welfare = -std::numeric_limits<double>::infinity();

  auto run_setting = [&](const std::vector<double>& xr) {
    OperatorResult r =
        optimize_operator(state, xr, operator_box(xr), eval, settings);
    state.record_regulator(xr, r.welfare);
    best.inner_evaluations += r.evaluations;
    best.welfare_trace.push_back(r.welfare);
    if (r.welfare > best.welfare) {
      best.welfare = r.welfare;
      best.profit = r.profit;
      best.u = r.u;
    }
  };

  // Stage 1: the no-regulation hyperplane anchors the shared surrogate.
  run_setting(status_quo);

  // Stage 2: quasi-random (plus corner) regulator settings.
  for (const auto& xr :
       sobol_init(dr, settings.init_regulator, settings.regulator_corners))
    run_setting(xr);

  // Stage 3: welfare-level UCB proposals.
  Box rbox = Box::unit(dr);
  for (int i = 0; i < settings.budget_regulator; ++i) {
    int n = std::max(state.welfare_gp().size(), 1);
    std::vector<double> xr =
        next_point(state.welfare_gp(), kappa(n, dr), rbox, {}, settings.acq);
    run_setting(xr);
  }
  return best;
}

}  // namespace mobsim
