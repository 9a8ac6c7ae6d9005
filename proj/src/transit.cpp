#include "mobsim/transit.hpp"

#include <cmath>

namespace mobsim {

TransitSystem::TransitSystem(const Scenario& s, double pt_freq_scale)
    : s_(&s), freq_scale_(pt_freq_scale) {
  double base = 0.0;  // Omega = sum_l nu_l * C_l
  for (const auto& l : s.lines) base += l.trips_per_h * l.capacity;
  capacity_ = base * freq_scale_ / s.params.pt_capacity_reduction;
}

std::optional<PTOffer> TransitSystem::query(int o_node, int d_node) const {
  int so = s_->nearest_stop[static_cast<size_t>(o_node)];
  int sd = s_->nearest_stop[static_cast<size_t>(d_node)];
  if (so < 0 || sd < 0) return std::nullopt;

  PTOffer offer;
  offer.fare_eur = s_->params.pt_flat_fare_eur;
  if (so != sd) {
    auto it = s_->skim.find({s_->stops[static_cast<size_t>(so)].id,
                             s_->stops[static_cast<size_t>(sd)].id});
    if (it == s_->skim.end()) return std::nullopt;
    offer.in_vehicle_s = it->second.in_vehicle_s;
    offer.walk_m = it->second.walk_m;
    offer.transfers = it->second.transfers;
  }

  auto walk_to = [&](int node, int stop) {
    const Node& a = s_->nodes[static_cast<size_t>(node)];
    const Node& b = s_->nodes[static_cast<size_t>(s_->stops[static_cast<size_t>(stop)].node)];
    return std::hypot(a.x - b.x, a.y - b.y);
  };
  offer.walk_m += walk_to(o_node, so) + walk_to(d_node, sd);
  return offer;
}

double TransitSystem::update_crowding(int boarded, int alighted, int hour) {
  onboard_simulated_ += boarded - alighted;
  background_ = 0.0;
  const auto& sched = s_->params.background_pt_riders;
  if (!sched.empty())
    background_ = sched[static_cast<size_t>(hour) % sched.size()];
  eta_ = capacity_ > 0.0 ? (onboard_simulated_ + background_) / capacity_ : 0.0;
  return eta_;
}

double TransitSystem::cost_eur(double horizon_s) const {
  double base = 0.0;  // C = T * sum_l nu_l * d_l * c_l
  for (const auto& l : s_->lines) base += l.trips_per_h * l.trip_len_km * l.cost_eur_km;
  return freq_scale_ * base * horizon_s / 3600.0;
}

double TransitSystem::emissions_t(double horizon_s) const {
  double base = 0.0;  // E = T * sum_l nu_l * d_l * e_l
  for (const auto& l : s_->lines) base += l.trips_per_h * l.trip_len_km * l.emission_t_km;
  return freq_scale_ * base * horizon_s / 3600.0;
}

}  // namespace mobsim
