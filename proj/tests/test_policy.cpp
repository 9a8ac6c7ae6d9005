#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mobsim/policy.hpp"

using namespace mobsim;

// Twelve hand-computed cases covering every parking branch, both sides
// of the density threshold for each toll, and the fleet cap.

TEST_CASE("parking fee: all four time/zone branches") {
  // Morning (before 12:00): pay on inner destination.
  CHECK(parking_fee_eur(8.0, false, true, 3.0) == 3.0);    // case 1
  CHECK(parking_fee_eur(8.0, true, false, 3.0) == 0.0);    // case 2
  // Afternoon (from 12:00): pay on inner origin.
  CHECK(parking_fee_eur(14.0, true, false, 3.0) == 3.0);   // case 3
  CHECK(parking_fee_eur(14.0, false, true, 3.0) == 0.0);   // case 4
  // Noon itself belongs to the afternoon rule.
  CHECK(parking_fee_eur(12.0, true, true, 2.5) == 2.5);    // case 5
}

TEST_CASE("private car toll: relative excess above the threshold") {
  // k = 6, k0 = 5, rate 0.5 eur/km, 2 km inside the zone:
  // ((6-5)/5) * 0.5 * 2 = 0.2
  CHECK(pv_toll_eur(6.0, 5.0, 0.5, 2000.0) == doctest::Approx(0.2));  // case 6
  CHECK(pv_toll_eur(4.0, 5.0, 0.5, 2000.0) == 0.0);                   // case 7
  CHECK(pv_toll_eur(5.0, 5.0, 0.5, 2000.0) == 0.0);                   // case 8
  // k = 15, k0 = 5, rate 1 eur/km, 500 m: (10/5) * 1 * 0.5 = 1.
  CHECK(pv_toll_eur(15.0, 5.0, 1.0, 500.0) == doctest::Approx(1.0));  // case 9
}

TEST_CASE("fleet toll: absolute excess per vehicle in the zone") {
  // k = 7, k0 = 5, rate 0.5, 3 vehicles: (7-5) * 0.5 * 3 = 3.
  CHECK(amod_toll_tick_eur(7.0, 5.0, 0.5, 3) == doctest::Approx(3.0));  // case 10
  CHECK(amod_toll_tick_eur(4.5, 5.0, 0.5, 3) == 0.0);                   // case 11
}

TEST_CASE("fleet cap binds the operator") {
  CHECK(apply_fleet_cap(120.0, 100.0) == 100.0);  // case 12
  CHECK(apply_fleet_cap(80.0, 100.0) == 80.0);
}
