#pragma once

#include <optional>

#include "mobsim/scenario.hpp"

namespace mobsim {

struct PTOffer {
  double fare_eur = 0.0;
  double in_vehicle_s = 0.0;
  double walk_m = 0.0;     // access + egress + in-trip transfer walking
  int transfers = 0;
  double wait_s = 0.0;     // travelers arrive just in time
};

// System-wide PT state: onboard count, capacity under frequency scaling,
// crowding factor, and cost/emission reporting.
class TransitSystem {
 public:
  TransitSystem(const Scenario& s, double pt_freq_scale);

  // Skim lookup for the stops nearest to o and d, plus access/egress
  // walk. nullopt when the stop pair is absent (no PT offer).
  std::optional<PTOffer> query(int o_node, int d_node) const;

  // Onboard flows plus the background schedule; returns the new crowding
  // factor eta = n / capacity.
  double update_crowding(int boarded, int alighted, int hour);

  double crowding() const { return eta_; }
  double onboard() const { return onboard_simulated_ + background_; }
  double capacity() const { return capacity_; }

  // Operating cost and emissions over a horizon of `horizon_s`, linear
  // in the frequency scale.
  double cost_eur(double horizon_s) const;
  double emissions_t(double horizon_s) const;

 private:
  const Scenario* s_;
  double freq_scale_;
  double capacity_ = 0.0;   // scaled by x^PT, divided by the reduction factor
  double onboard_simulated_ = 0.0;
  double background_ = 0.0;
  double eta_ = 0.0;
};

}  // namespace mobsim
