#pragma once

#include <cstdint>
#include <vector>

#include "mobsim/scenario.hpp"

namespace mobsim {

enum class Mode { None, PV, PT, AMOD };

struct TravelerRequest {
  int id = -1;
  int origin = -1;       // node index
  int destination = -1;  // node index
  double request_time_s = 0.0;  // seconds from simulation start
  int origin_zone = -1;
  int dest_zone = -1;
  Mode chosen = Mode::None;
};

// Poisson request streams from the hourly OD matrix. Inter-arrival times
// per OD entry are exponential with the hourly rate; origin/destination
// access points are drawn uniformly within the zone. Fully deterministic
// for a given seed; the output is sorted by request time with ids
// assigned in stream order.
std::vector<TravelerRequest> generate_requests(const Scenario& s, std::uint64_t seed);

}  // namespace mobsim
