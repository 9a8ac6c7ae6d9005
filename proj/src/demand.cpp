#include "mobsim/demand.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace mobsim {

namespace {

// splitmix64; used to derive independent per-entry RNG streams.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::vector<TravelerRequest> generate_requests(const Scenario& s, std::uint64_t seed) {
  std::vector<TravelerRequest> out;
  const double horizon = s.params.horizon_s;
  const int first_hour = s.params.start_hour;
  const int hours = static_cast<int>(std::ceil(horizon / 3600.0));

  for (size_t ei = 0; ei < s.od.size(); ++ei) {
    const OdEntry& e = s.od[ei];
    if (e.trips_per_h <= 0.0) continue;
    int offset = e.hour - first_hour;
    if (offset < 0 || offset >= hours) continue;

    std::mt19937_64 rng(mix(seed ^ mix(static_cast<std::uint64_t>(ei) + 1)));
    std::exponential_distribution<double> gap(e.trips_per_h / 3600.0);
    const auto& origins = s.zone_access.at(e.origin_zone);
    const auto& dests = s.zone_access.at(e.dest_zone);
    std::uniform_int_distribution<size_t> opick(0, origins.size() - 1);
    std::uniform_int_distribution<size_t> dpick(0, dests.size() - 1);

    double t = gap(rng);
    while (t < 3600.0) {
      double abs_t = offset * 3600.0 + t;
      if (abs_t >= horizon) break;
      TravelerRequest r;
      r.origin = origins[opick(rng)];
      r.destination = dests[dpick(rng)];
      r.request_time_s = abs_t;
      r.origin_zone = e.origin_zone;
      r.dest_zone = e.dest_zone;
      out.push_back(r);
      t += gap(rng);
    }
  }

  std::stable_sort(out.begin(), out.end(),
                   [](const TravelerRequest& a, const TravelerRequest& b) {
                     return a.request_time_s < b.request_time_s;
                   });
  for (size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<int>(i);
  return out;
}

}  // namespace mobsim
