#include "mobsim/simulation.hpp"

#include <algorithm>
#include <cmath>

#include "mobsim/mode_choice.hpp"
#include "mobsim/policy.hpp"

namespace mobsim {

std::map<std::string, double> WelfareBreakdown::components() const {
  return {
      {"total_traveler_utility", total_traveler_utility},
      {"pt_revenue", pt_revenue},
      {"pt_cost", pt_cost},
      {"parking_revenue", parking_revenue},
      {"pv_toll_revenue", pv_toll_revenue},
      {"amod_toll_revenue", amod_toll_revenue},
      {"pv_emission_cost", pv_emission_cost},
      {"amod_emission_cost", amod_emission_cost},
      {"pt_emission_cost", pt_emission_cost},
  };
}

std::map<std::string, double> ProfitBreakdown::components() const {
  return {
      {"fare_revenue", fare_revenue},
      {"fixed_costs", fixed_costs},
      {"variable_costs", variable_costs},
      {"toll_costs", toll_costs},
  };
}

namespace {

// A private car en route: frozen path segments, remaining free-flow time
// on the current one. Remaining time rescales with the segment cluster's
// psi, symmetric with fleet vehicles.
struct PvTrip {
  std::vector<PathSegment> segments;
  size_t seg_i = 0;
  double seg_done_ff_s = 0.0;

  bool done() const { return seg_i >= segments.size(); }
  int cluster() const { return segments[seg_i].cluster; }

  void advance(const NetworkState& net, double dt_s) {
    double remaining = dt_s;
    while (remaining > 1e-9 && !done()) {
      const PathSegment& seg = segments[seg_i];
      double psi = net.psi(seg.cluster);
      double rem = (seg.ff_time_s - seg_done_ff_s) * psi;
      if (remaining + 1e-9 >= rem) {
        remaining -= rem;
        ++seg_i;
        seg_done_ff_s = 0.0;
      } else {
        seg_done_ff_s += remaining / psi;
        remaining = 0.0;
      }
    }
  }
};

}  // namespace

ResultRecord run(const Scenario& s, const PathTable& paths,
                 const DecisionVector& decision, std::uint64_t seed) {
  s.bounds.check_in_bounds(decision);
  const ScenarioParams& p = s.params;

  NetworkState net(s, paths);
  TransitSystem transit(s, decision.pt_freq_scale);
  FleetOperator fleet(s, paths, net, decision, seed);

  std::vector<TravelerRequest> requests = generate_requests(s, seed);

  WelfareBreakdown w;
  ProfitBreakdown profit;
  profit.fixed_costs = fleet.fleet_size() * p.amod_fixed_cost_eur;

  std::vector<PvTrip> pv_trips;
  std::vector<double> pt_alight_times;  // unsorted; scanned per step

  const int inner = s.inner_cluster_index();
  const int cluster_count = static_cast<int>(s.clusters.size());
  const double dt = p.time_step_s;
  const int steps = static_cast<int>(std::ceil(s.params.horizon_s / dt - 1e-9));

  size_t next_req = 0;
  int boarded_accum = 0;

  // KPI accumulators
  int n_pv = 0, n_pt = 0, n_amod = 0, n_unserved = 0, n_offers = 0;
  double sum_offer_wait = 0.0, sum_offer_detour = 0.0;
  double sum_inner_density = 0.0, sum_eta = 0.0;
  double pv_dist_total = 0.0;

  for (int k = 0; k < steps; ++k) {
    double now = k * dt;
    int hour = p.start_hour + static_cast<int>(now / 3600.0);

    if (k > 0) {
      fleet.advance(dt, now - dt);
      for (PvTrip& trip : pv_trips) trip.advance(net, dt);
      pv_trips.erase(std::remove_if(pv_trips.begin(), pv_trips.end(),
                                    [](const PvTrip& t) { return t.done(); }),
                     pv_trips.end());
    }

    int alighted = 0;
    for (size_t i = 0; i < pt_alight_times.size();) {
      if (pt_alight_times[i] <= now) {
        ++alighted;
        pt_alight_times[i] = pt_alight_times.back();
        pt_alight_times.pop_back();
      } else {
        ++i;
      }
    }

    std::vector<double> driving = fleet.driving_counts(cluster_count);
    for (const PvTrip& trip : pv_trips)
      driving[static_cast<size_t>(trip.cluster())] += 1.0;
    net.update(driving, hour);
    transit.update_crowding(boarded_accum, alighted, hour);
    boarded_accum = 0;

    if (inner >= 0) {
      double tick =
          amod_toll_tick_eur(net.density(inner), p.toll_density_threshold,
                             decision.toll_rate_eur_km, fleet.driving_in_cluster(inner));
      profit.toll_costs += tick;
      w.amod_toll_revenue += tick;
      fleet.charge_toll(tick);
      sum_inner_density += net.density(inner);
    }
    sum_eta += transit.crowding();

    double step_end = now + dt;
    while (next_req < requests.size() &&
           requests[next_req].request_time_s < step_end) {
      const TravelerRequest& r = requests[next_req++];
      double hour_of_day =
          p.start_hour + r.request_time_s / 3600.0;

      ModeCosts costs;
      double pv_toll = 0.0, pv_park = 0.0, pv_dist = 0.0;
      if (paths.reachable(r.origin, r.destination)) {
        pv_dist = paths.path(r.origin, r.destination).dist_m;
        if (inner >= 0)
          pv_toll = pv_toll_eur(net.density(inner), p.toll_density_threshold,
                                decision.toll_rate_eur_km,
                                net.toll_distance_m(r.origin, r.destination));
        pv_park = parking_fee_eur(hour_of_day, p.zone_is_inner(r.origin_zone),
                                  p.zone_is_inner(r.dest_zone),
                                  decision.parking_fee_eur);
        costs.pv = pv_cost_eur(p, net.travel_time_s(r.origin, r.destination),
                               pv_dist, pv_toll, pv_park);
      }

      std::optional<PTOffer> pt = transit.query(r.origin, r.destination);
      if (pt)
        costs.pt = pt_cost_eur(p, *pt, transit.crowding(), decision.pt_freq_scale);

      std::optional<Offer> offer = fleet.make_offer(r, now);
      if (offer)
        costs.amod = amod_cost_eur(p, offer->fare_eur, offer->in_vehicle_s,
                                   offer->wait_s);

      if (!costs.pv && !costs.pt && !costs.amod) {
        ++n_unserved;
        continue;
      }

      std::mt19937_64 rng = traveler_rng(seed, r.id);
      Mode chosen = choose_mode(costs, p.logit_scale, rng);
      if (offer) fleet.commit_or_discard(r.id, chosen == Mode::AMOD);

      switch (chosen) {
        case Mode::PV: {
          ++n_pv;
          w.total_traveler_utility -= *costs.pv;
          w.pv_toll_revenue += pv_toll;
          w.parking_revenue += pv_park;
          pv_dist_total += pv_dist;
          PvTrip trip;
          trip.segments = paths.path(r.origin, r.destination).segments;
          if (!trip.done()) pv_trips.push_back(std::move(trip));
          break;
        }
        case Mode::PT: {
          ++n_pt;
          w.total_traveler_utility -= *costs.pt;
          w.pt_revenue += pt->fare_eur;
          ++boarded_accum;
          pt_alight_times.push_back(r.request_time_s + pt->in_vehicle_s);
          break;
        }
        case Mode::AMOD: {
          ++n_amod;
          w.total_traveler_utility -= *costs.amod;
          profit.fare_revenue += offer->fare_eur;
          ++n_offers;
          sum_offer_wait += offer->wait_s;
          double direct_ff = paths.path(r.origin, r.destination).ff_time_s;
          if (direct_ff > 0.0)
            sum_offer_detour += offer->in_vehicle_s / direct_ff - 1.0;
          break;
        }
        case Mode::None:
          break;
      }
    }
  }

  profit.variable_costs = p.amod_dist_cost_eur_m * fleet.total_driven_m();

  w.pt_cost = transit.cost_eur(p.horizon_s);
  w.pt_emission_cost = p.co2_cost_eur_t * transit.emissions_t(p.horizon_s);
  w.pv_emission_cost = p.co2_cost_eur_t * p.emission_pv_t_m * pv_dist_total;
  w.amod_emission_cost =
      p.co2_cost_eur_t * p.emission_amod_t_m * fleet.total_driven_m();

  ResultRecord rec;
  rec.decision = decision;
  rec.seed = seed;
  rec.welfare_components = w.components();
  rec.profit_components = profit.components();

  int n_req = static_cast<int>(requests.size());
  rec.service_kpis["requests"] = n_req;
  rec.service_kpis["pv_trips"] = n_pv;
  rec.service_kpis["pt_trips"] = n_pt;
  rec.service_kpis["amod_trips"] = n_amod;
  rec.service_kpis["unserved"] = n_unserved;
  rec.service_kpis["fleet_size"] = fleet.fleet_size();
  rec.service_kpis["amod_driven_m"] = fleet.total_driven_m();
  rec.service_kpis["pv_driven_m"] = pv_dist_total;
  rec.service_kpis["mean_offer_wait_s"] =
      n_offers > 0 ? sum_offer_wait / n_offers : 0.0;
  rec.service_kpis["mean_offer_detour"] =
      n_offers > 0 ? sum_offer_detour / n_offers : 0.0;
  rec.service_kpis["mean_inner_density"] =
      inner >= 0 ? sum_inner_density / steps : 0.0;
  rec.service_kpis["mean_crowding"] = sum_eta / steps;
  return rec;
}

ResultRecord run(const Scenario& s, const DecisionVector& decision,
                 std::uint64_t seed) {
  PathTable paths = PathTable::build(s);
  return run(s, paths, decision, seed);
}

}  // namespace mobsim
