#pragma once

#include "mobsim/scenario.hpp"

namespace mobsim {

// Regulator instruments. All pure functions of kernel-owned state.

// Morning trips (before 12:00) pay when the destination is in the inner
// zone, afternoon trips when the origin is; exactly one case applies.
double parking_fee_eur(double hour_of_day, bool origin_inner, bool dest_inner,
                       double x_parking_eur);

// Distance toll for a PV trip, zero below the density threshold k0 and
// growing with relative excess density above it.
double pv_toll_eur(double k_inner, double k0, double toll_rate_eur_km,
                   double toll_dist_m);

// Per-time-step toll charged to the fleet operator for vehicles driving
// in the toll zone; uses absolute (not relative) excess density.
double amod_toll_tick_eur(double k_inner, double k0, double toll_rate_eur_km,
                          int vehicles_in_zone);

// Fleet cap binds the operator: min(fleet size, licenses).
double apply_fleet_cap(double fleet_size, double fleet_cap);

}  // namespace mobsim
