#include "mobsim/mode_choice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mobsim {

double crowding_multiplier(double eta, double max_factor) {
  return 1.0 + (max_factor - 1.0) * std::min(std::max(eta, 0.0), 1.0);
}

double pv_cost_eur(const ScenarioParams& p, double travel_time_s, double dist_m,
                   double toll_eur, double parking_eur) {
  return p.vot_eur_s * travel_time_s + p.pv_dist_cost_eur_m * dist_m + toll_eur +
         parking_eur + p.pv_intercept_eur;
}

double pt_cost_eur(const ScenarioParams& p, const PTOffer& offer, double eta,
                   double pt_freq_scale) {
  double g = crowding_multiplier(eta, p.crowding_max_factor);
  double walk_time_s = offer.walk_m / p.walk_speed_mps;
  double transfer_penalty = p.transfer_penalty_eur / pt_freq_scale;
  return offer.fare_eur + g * p.vot_eur_s * offer.in_vehicle_s +
         p.vot_eur_s * walk_time_s + p.vot_eur_s * offer.wait_s +
         transfer_penalty * offer.transfers;
}

double amod_cost_eur(const ScenarioParams& p, double fare_eur, double in_vehicle_s,
                     double wait_s) {
  return fare_eur + p.vot_eur_s * in_vehicle_s + p.vot_eur_s * wait_s;
}

std::array<double, 3> mode_probabilities(const ModeCosts& costs, double logit_scale) {
  std::array<std::optional<double>, 3> u = {costs.pv, costs.pt, costs.amod};
  double umax = -std::numeric_limits<double>::infinity();
  for (auto& c : u)
    if (c) umax = std::max(umax, -*c * logit_scale);
  if (umax == -std::numeric_limits<double>::infinity())
    throw std::logic_error("choose_mode called with an empty choice set");

  std::array<double, 3> w{};
  double total = 0.0;
  for (int m = 0; m < 3; ++m)
    if (u[static_cast<size_t>(m)]) {
      w[static_cast<size_t>(m)] =
          std::exp(-*u[static_cast<size_t>(m)] * logit_scale - umax);
      total += w[static_cast<size_t>(m)];
    }
  for (auto& x : w) x /= total;
  return w;
}

Mode choose_mode(const ModeCosts& costs, double logit_scale, std::mt19937_64& rng) {
  auto p = mode_probabilities(costs, logit_scale);
  double r = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  static constexpr Mode kModes[3] = {Mode::PV, Mode::PT, Mode::AMOD};
  double acc = 0.0;
  int last_present = 0;
  for (int m = 0; m < 3; ++m) {
    if (p[static_cast<size_t>(m)] <= 0.0) continue;
    last_present = m;
    acc += p[static_cast<size_t>(m)];
    if (r < acc) return kModes[m];
  }
  return kModes[last_present];  // guard against round-off at r ~ 1
}

std::mt19937_64 traveler_rng(std::uint64_t seed, int request_id) {
  std::seed_seq seq{static_cast<std::uint64_t>(0x7261766c65ULL), seed,
                    static_cast<std::uint64_t>(request_id)};
  return std::mt19937_64(seq);
}

}  // namespace mobsim
