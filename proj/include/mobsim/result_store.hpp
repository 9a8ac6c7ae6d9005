#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mobsim/scenario.hpp"

namespace mobsim {

// Component keys and signs for the social welfare sum. Components are
// stored as positive magnitudes (except traveler utility, which is a
// signed sum); the sign column says how they enter the welfare total.
struct WelfareTerm {
  const char* key;
  double sign;
};

inline constexpr WelfareTerm kWelfareTerms[] = {
    {"total_traveler_utility", +1.0}, {"pt_revenue", +1.0},
    {"pt_cost", -1.0},                {"parking_revenue", +1.0},
    {"pv_toll_revenue", +1.0},        {"amod_toll_revenue", +1.0},
    {"pv_emission_cost", -1.0},       {"amod_emission_cost", -1.0},
    {"pt_emission_cost", -1.0},
};

// W under an arbitrary per-component weight vector; missing weights
// default to 1. Evaluation order is fixed so reweighting a stored record
// reproduces a fresh evaluation bit-for-bit.
double weighted_welfare(const std::map<std::string, double>& components,
                        const std::map<std::string, double>& weights);

double profit_from_components(const std::map<std::string, double>& components);

struct ResultRecord {
  DecisionVector decision;
  std::uint64_t seed = 0;
  std::map<std::string, double> welfare_components;
  std::map<std::string, double> profit_components;  // fare_revenue, fixed_costs, variable_costs, toll_costs
  std::map<std::string, double> service_kpis;

  double welfare(const std::map<std::string, double>& weights = {}) const {
    return weighted_welfare(welfare_components, weights);
  }
  double profit() const { return profit_from_components(profit_components); }

  void validate() const;
  std::string to_json_line() const;
  static ResultRecord from_json_line(const std::string& line);
};

// Append-only line-delimited record store. Each append is a single
// O_APPEND write, so concurrent appenders do not interleave records.
class ResultStore {
 public:
  explicit ResultStore(std::filesystem::path path) : path_(std::move(path)) {}

  void append(const ResultRecord& record) const;
  std::vector<ResultRecord> read_all() const;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Arithmetic means of profit, welfare, and all components over records
// sharing one decision vector.
ResultRecord aggregate_runs(const std::vector<ResultRecord>& records);

}  // namespace mobsim
