#include "mobsim/policy.hpp"

#include <algorithm>

namespace mobsim {

double parking_fee_eur(double hour_of_day, bool origin_inner, bool dest_inner,
                       double x_parking_eur) {
  if (hour_of_day < 12.0) return dest_inner ? x_parking_eur : 0.0;
  return origin_inner ? x_parking_eur : 0.0;
}

double pv_toll_eur(double k_inner, double k0, double toll_rate_eur_km,
                   double toll_dist_m) {
  double excess = std::max((k_inner - k0) / k0, 0.0);
  return excess * toll_rate_eur_km * toll_dist_m / 1000.0;
}

double amod_toll_tick_eur(double k_inner, double k0, double toll_rate_eur_km,
                          int vehicles_in_zone) {
  double excess = std::max(k_inner - k0, 0.0);
  return excess * toll_rate_eur_km * vehicles_in_zone;
}

double apply_fleet_cap(double fleet_size, double fleet_cap) {
  return std::min(fleet_size, fleet_cap);
}

}  // namespace mobsim
