#include "mobsim/result_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace mobsim {

using nlohmann::json;

double weighted_welfare(const std::map<std::string, double>& components,
                        const std::map<std::string, double>& weights) {
  double w = 0.0;
  for (const auto& term : kWelfareTerms) {
    auto c = components.find(term.key);
    if (c == components.end()) continue;
    auto wt = weights.find(term.key);
    double weight = wt == weights.end() ? 1.0 : wt->second;
    w += term.sign * weight * c->second;
  }
  return w;
}

double profit_from_components(const std::map<std::string, double>& c) {
  auto get = [&](const char* k) {
    auto it = c.find(k);
    return it == c.end() ? 0.0 : it->second;
  };
  return get("fare_revenue") - get("fixed_costs") - get("variable_costs") -
         get("toll_costs");
}

void ResultRecord::validate() const {
  auto it = profit_components.find("profit");
  if (it != profit_components.end()) {
    double p = profit_from_components(profit_components);
    double scale = std::max({1.0, std::abs(p), std::abs(it->second)});
    if (std::abs(p - it->second) > 1e-6 * scale)
      throw ValidationError("profit does not equal revenue - costs");
  }
  for (const auto& m : {&welfare_components, &profit_components, &service_kpis})
    for (const auto& [k, v] : *m)
      if (!std::isfinite(v))
        throw ValidationError("non-finite result component '" + k + "'");
}

namespace {

json decision_to_json(const DecisionVector& d) {
  json j;
  auto a = d.to_array();
  for (int i = 0; i < DecisionVector::kDim; ++i) j[DecisionVector::names()[i]] = a[i];
  return j;
}

DecisionVector decision_from_json(const json& j) {
  std::array<double, DecisionVector::kDim> a{};
  for (int i = 0; i < DecisionVector::kDim; ++i)
    a[i] = j.at(DecisionVector::names()[i]).get<double>();
  return DecisionVector::from_array(a);
}

}  // namespace

std::string ResultRecord::to_json_line() const {
  json j;
  j["decision"] = decision_to_json(decision);
  j["seed"] = seed;
  j["welfare_components"] = welfare_components;
  j["profit_components"] = profit_components;
  j["service_kpis"] = service_kpis;
  return j.dump();
}

ResultRecord ResultRecord::from_json_line(const std::string& line) {
  json j = json::parse(line);
  ResultRecord r;
  r.decision = decision_from_json(j.at("decision"));
  r.seed = j.at("seed").get<std::uint64_t>();
  r.welfare_components = j.at("welfare_components").get<std::map<std::string, double>>();
  r.profit_components = j.at("profit_components").get<std::map<std::string, double>>();
  r.service_kpis = j.at("service_kpis").get<std::map<std::string, double>>();
  return r;
}

void ResultStore::append(const ResultRecord& record) const {
  record.validate();
  std::string line = record.to_json_line();
  line.push_back('\n');
  int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  if (fd < 0)
    throw std::runtime_error("cannot open result store " + path_.string() + ": " +
                             std::strerror(errno));
  ssize_t n = ::write(fd, line.data(), line.size());
  int saved = errno;
  ::close(fd);
  if (n != static_cast<ssize_t>(line.size()))
    throw std::runtime_error("short write to result store " + path_.string() + ": " +
                             std::strerror(saved));
}

std::vector<ResultRecord> ResultStore::read_all() const {
  std::vector<ResultRecord> out;
  std::ifstream in(path_);
  if (!in) return out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(ResultRecord::from_json_line(line));
  }
  return out;
}

ResultRecord aggregate_runs(const std::vector<ResultRecord>& records) {
  if (records.empty()) throw std::invalid_argument("aggregate_runs: no records");
  const DecisionVector& d = records.front().decision;
  for (const auto& r : records)
    if (!(r.decision == d))
      throw std::invalid_argument("aggregate_runs: mixed decision vectors");

  ResultRecord mean;
  mean.decision = d;
  mean.seed = 0;
  auto accumulate = [&](auto member) {
    for (const auto& r : records)
      for (const auto& [k, v] : r.*member) (mean.*member)[k] += v;
    for (auto& [k, v] : mean.*member) v /= static_cast<double>(records.size());
  };
  accumulate(&ResultRecord::welfare_components);
  accumulate(&ResultRecord::profit_components);
  accumulate(&ResultRecord::service_kpis);
  mean.service_kpis["seed_count"] = static_cast<double>(records.size());
  return mean;
}

}  // namespace mobsim
