#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "mobsim/bayesopt.hpp"
#include "mobsim/result_store.hpp"
#include "mobsim/scenario.hpp"
#include "mobsim/simulation.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace mobsim;

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

DecisionVector apply_overrides(const DecisionVector& base,
                               const std::vector<std::string>& sets) {
  auto arr = base.to_array();
  const auto& names = DecisionVector::names();
  for (const std::string& kv : sets) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ValidationError("--set expects KEY=VALUE, got '" + kv + "'");
    std::string key = kv.substr(0, eq);
    double value = std::stod(kv.substr(eq + 1));
    auto it = std::find(names.begin(), names.end(), key);
    if (it == names.end()) {
      std::string known;
      for (const auto& n : names) known += (known.empty() ? "" : ", ") + n;
      throw ValidationError("unknown decision variable '" + key + "' (known: " +
                            known + ")");
    }
    arr[static_cast<size_t>(it - names.begin())] = value;
  }
  return DecisionVector::from_array(arr);
}

std::map<std::string, double> load_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open weights file: " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  std::map<std::string, double> w;
  for (auto& [k, v] : j.items()) w[k] = v.get<double>();
  return w;
}

int cmd_validate(const std::string& scenario_path) {
  load_scenario(scenario_path);
  std::cout << "OK: " << scenario_path << "\n";
  return 0;
}

int cmd_simulate(const std::string& scenario_path,
                 const std::vector<std::string>& sets, int seeds, int jobs,
                 const std::string& out_path) {
  Scenario s = load_scenario(scenario_path);
  DecisionVector decision = apply_overrides(DecisionVector{}, sets);
  s.bounds.check_in_bounds(decision);

  PathTable paths = PathTable::build(s);
  std::vector<ResultRecord> records(static_cast<size_t>(seeds));
#ifdef _OPENMP
  if (jobs > 0) omp_set_num_threads(jobs);
#else
  (void)jobs;
#endif
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < seeds; ++i)
    records[static_cast<size_t>(i)] =
        run(s, paths, decision, static_cast<std::uint64_t>(i));

  std::optional<ResultStore> store;
  if (!out_path.empty()) store.emplace(out_path);
  for (const auto& r : records) {
    if (store)
      store->append(r);
    else
      std::cout << r.to_json_line() << "\n";
  }
  ResultRecord mean = aggregate_runs(records);
  std::fprintf(stderr, "seeds=%d  mean profit=%.6f  mean welfare=%.6f\n", seeds,
               mean.profit(), mean.welfare(s.params.welfare_weights));
  return 0;
}

int cmd_optimize(const std::string& scenario_path, int seeds, int jobs,
                 int budget_operator, int budget_regulator, int init_operator,
                 int init_regulator, const std::string& checkpoint,
                 const std::string& out_path) {
  Scenario s = load_scenario(scenario_path);
  PathTable paths = PathTable::build(s);
  std::optional<ResultStore> store;
  if (!out_path.empty()) store.emplace(out_path);

#ifdef _OPENMP
  if (jobs > 0) omp_set_num_threads(jobs);
#else
  (void)jobs;
#endif

  EvalFn eval = [&](const std::vector<double>& u) {
    std::array<double, DecisionVector::kDim> a{};
    std::copy(u.begin(), u.end(), a.begin());
    DecisionVector d = s.bounds.denormalize(a);
    // Guard against round-off at the cap edge.
    d.fleet_size = std::min(d.fleet_size, d.fleet_cap);

    std::vector<ResultRecord> records(static_cast<size_t>(seeds));
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < seeds; ++i)
      records[static_cast<size_t>(i)] =
          run(s, paths, d, static_cast<std::uint64_t>(i));
    for (const auto& r : records)
      if (store) store->append(r);
    ResultRecord mean = aggregate_runs(records);
    return Evaluation{mean.profit(), mean.welfare(s.params.welfare_weights)};
  };

  auto operator_box = [&](const std::vector<double>& xr) {
    Box box = Box::unit(DecisionVector::kDim);
    // Fleet-cap truncation: y^F may not exceed this setting's x^F.
    std::array<double, DecisionVector::kDim> a{};
    std::copy(xr.begin(), xr.end(), a.begin());
    double cap = s.bounds.lo[3] + xr[3] * (s.bounds.hi[3] - s.bounds.lo[3]);
    double span = s.bounds.hi[4] - s.bounds.lo[4];
    double hi = span > 0.0 ? (cap - s.bounds.lo[4]) / span : 1.0;
    box.hi[4] = std::clamp(hi, 0.0, 1.0);
    return box;
  };

  OptimizationState state(DecisionVector::kRegulatorDim,
                          DecisionVector::kDim - DecisionVector::kRegulatorDim);
  if (!checkpoint.empty() && std::filesystem::exists(checkpoint))
    state = OptimizationState::load(checkpoint);

  BoSettings settings;
  settings.budget_operator = budget_operator;
  settings.budget_regulator = budget_regulator;
  settings.init_operator = init_operator;
  settings.init_regulator = init_regulator;

  DecisionVector sq;  // status quo: defaults are the no-regulation setting
  auto sq_u = s.bounds.normalize(sq);
  std::vector<double> status_quo(sq_u.begin(),
                                 sq_u.begin() + DecisionVector::kRegulatorDim);

  RegulatorResult res =
      optimize_regulator(state, status_quo, operator_box, eval, settings);

  if (!checkpoint.empty()) state.save(checkpoint);

  std::array<double, DecisionVector::kDim> a{};
  std::copy(res.u.begin(), res.u.end(), a.begin());
  DecisionVector best = s.bounds.denormalize(a);
  nlohmann::json j;
  const auto& names = DecisionVector::names();
  auto barr = best.to_array();
  for (size_t i = 0; i < names.size(); ++i) j["decision"][names[i]] = barr[i];
  j["profit"] = res.profit;
  j["welfare"] = res.welfare;
  j["inner_evaluations"] = res.inner_evaluations;
  j["welfare_trace"] = res.welfare_trace;
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_reweight(const std::string& store_path, const std::string& weights_path) {
  ResultStore store(store_path);
  std::vector<ResultRecord> records = store.read_all();
  std::map<std::string, double> weights;
  if (!weights_path.empty()) weights = load_weights(weights_path);

  std::cout << "seed\tprofit\twelfare\treweighted_welfare\n";
  for (const auto& r : records) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%llu\t%.9f\t%.9f\t%.9f",
                  static_cast<unsigned long long>(r.seed), r.profit(),
                  r.welfare(), r.welfare(weights));
    std::cout << buf << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Agent-based urban transport simulator with nested "
               "Bayesian optimization of regulation and fleet operation"};
  app.require_subcommand(1);

  std::string scenario_path, out_path, checkpoint, weights_path, store_path;
  std::vector<std::string> sets;
  int seeds = 3, jobs = 0;
  int budget_operator = 30, budget_regulator = 8;
  int init_operator = 8, init_regulator = 8;

  auto* validate = app.add_subcommand("validate", "Check a scenario directory");
  validate->add_option("--scenario", scenario_path, "Scenario directory")->required();

  auto* simulate = app.add_subcommand("simulate", "Run single simulations");
  simulate->add_option("--scenario", scenario_path, "Scenario directory")->required();
  simulate->add_option("--set", sets, "Decision override KEY=VALUE");
  simulate->add_option("--seeds", seeds, "Number of seeds (0, 1, ...)");
  simulate->add_option("--jobs", jobs, "Worker threads (0 = default)");
  simulate->add_option("--out", out_path, "Append records to this JSONL store");

  auto* optimize = app.add_subcommand("optimize", "Two-level optimization");
  optimize->add_option("--scenario", scenario_path, "Scenario directory")->required();
  optimize->add_option("--seeds", seeds, "Seeds averaged per evaluation");
  optimize->add_option("--jobs", jobs, "Worker threads (0 = default)");
  optimize->add_option("--budget-operator", budget_operator,
                       "Evaluations per operator hyperplane");
  optimize->add_option("--budget-regulator", budget_regulator,
                       "Welfare-level proposals after initialization");
  optimize->add_option("--init-operator", init_operator,
                       "Sobol points on the first hyperplane");
  optimize->add_option("--init-regulator", init_regulator,
                       "Sobol regulator settings");
  optimize->add_option("--checkpoint", checkpoint, "Checkpoint file (resume + save)");
  optimize->add_option("--out", out_path, "Append all records to this JSONL store");

  auto* reweight = app.add_subcommand("reweight", "Recompute welfare from a store");
  reweight->add_option("--store", store_path, "JSONL result store")->required();
  reweight->add_option("--weights", weights_path,
                       "JSON file of component weights (default: all 1)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(scenario_path);
    if (simulate->parsed())
      return cmd_simulate(scenario_path, sets, seeds, jobs, out_path);
    if (optimize->parsed())
      return cmd_optimize(scenario_path, seeds, jobs, budget_operator,
                          budget_regulator, init_operator, init_regulator,
                          checkpoint, out_path);
    if (reweight->parsed()) return cmd_reweight(store_path, weights_path);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ParseError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
