#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "fixture.hpp"
#include "mobsim/scenario.hpp"

using namespace mobsim;
namespace fs = std::filesystem;

TEST_CASE("NFD table interpolates and clamps") {
  NfdTable nfd({0.0, 10.0, 20.0}, {0.0, 500.0, 800.0});
  CHECK(nfd.flow_at(-5.0) == 0.0);
  CHECK(nfd.flow_at(0.0) == 0.0);
  CHECK(nfd.flow_at(5.0) == doctest::Approx(250.0));
  CHECK(nfd.flow_at(15.0) == doctest::Approx(650.0));
  CHECK(nfd.flow_at(100.0) == 800.0);
  CHECK_THROWS_AS(NfdTable({0.0, 0.0}, {0.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(NfdTable({0.0, 1.0}, {0.0, -1.0}), ValidationError);
}

TEST_CASE("bounds normalize/denormalize are exact inverses at the box edges") {
  DecisionBounds b;
  DecisionVector lo = DecisionVector::from_array(b.lo);
  DecisionVector hi = DecisionVector::from_array(b.hi);
  auto ulo = b.normalize(lo);
  auto uhi = b.normalize(hi);
  for (int i = 0; i < DecisionVector::kDim; ++i) {
    CHECK(ulo[i] == 0.0);
    CHECK(uhi[i] == 1.0);
  }
  CHECK(b.denormalize(ulo) == lo);
  CHECK(b.denormalize(uhi) == hi);

  DecisionVector mid;
  mid.parking_fee_eur = 3.75;
  mid.toll_rate_eur_km = 0.5;
  mid.fleet_size = 100.0;
  auto u = b.normalize(mid);
  DecisionVector back = b.denormalize(u);
  CHECK(back.parking_fee_eur == doctest::Approx(3.75).epsilon(1e-12));
  CHECK(back.fleet_size == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("fleet size above the cap is rejected") {
  DecisionBounds b;
  DecisionVector d;
  d.fleet_cap = 100.0;
  d.fleet_size = 101.0;
  CHECK_THROWS_AS(b.check_in_bounds(d), ValidationError);
  d.fleet_size = 100.0;
  CHECK_NOTHROW(b.check_in_bounds(d));
}

TEST_CASE("bounds with min >= max fail validation") {
  DecisionBounds b;
  b.lo[2] = b.hi[2];
  CHECK_THROWS_AS(b.validate(), ValidationError);
}

TEST_CASE("scenario round trip through the on-disk format") {
  Scenario s = fixture::make_city();
  fs::path dir = fs::temp_directory_path() / "mobsim_scn_roundtrip";
  fs::remove_all(dir);
  save_scenario(s, dir);
  Scenario t = load_scenario(dir);

  CHECK(t.nodes.size() == s.nodes.size());
  CHECK(t.edges.size() == s.edges.size());
  CHECK(t.clusters.size() == s.clusters.size());
  CHECK(t.lines.size() == s.lines.size());
  CHECK(t.stops.size() == s.stops.size());
  CHECK(t.skim.size() == s.skim.size());
  CHECK(t.od.size() == s.od.size());
  CHECK(t.params.inner_cluster == s.params.inner_cluster);
  CHECK(t.params.inner_zones == s.params.inner_zones);
  CHECK(t.params.vot_eur_s == doctest::Approx(s.params.vot_eur_s).epsilon(1e-12));
  CHECK(t.params.horizon_s == doctest::Approx(s.params.horizon_s));
  CHECK(t.clusters[0].v1_kmh == doctest::Approx(18.0));
  CHECK(t.clusters[0].background_density[6] == doctest::Approx(4.0));
  for (int i = 0; i < DecisionVector::kDim; ++i) {
    CHECK(t.bounds.lo[i] == s.bounds.lo[i]);
    CHECK(t.bounds.hi[i] == s.bounds.hi[i]);
  }
  CHECK(t.clusters[0].lane_km == doctest::Approx(s.clusters[0].lane_km));

  auto key = std::make_pair(0, 3);
  CHECK(t.skim.at(key).in_vehicle_s ==
        doctest::Approx(s.skim.at(key).in_vehicle_s).epsilon(1e-12));
  fs::remove_all(dir);
}

TEST_CASE("missing scenario directory raises a parse error") {
  CHECK_THROWS_AS(load_scenario("/nonexistent/mobsim"), ParseError);
}

TEST_CASE("validation rejects dangling references") {
  Scenario s = fixture::make_city();
  s.od.push_back({6, 0, 99, 5.0});  // zone 99 has no access points
  CHECK_THROWS_AS(s.validate(), ValidationError);

  Scenario s2 = fixture::make_city();
  s2.edges[0].length_m = -1.0;
  CHECK_THROWS_AS(s2.validate(), ValidationError);
}

TEST_CASE("inner-zone lookup") {
  Scenario s = fixture::make_city();
  CHECK(s.params.zone_is_inner(0));
  CHECK_FALSE(s.params.zone_is_inner(1));
  CHECK(s.inner_cluster_index() == 0);
}
