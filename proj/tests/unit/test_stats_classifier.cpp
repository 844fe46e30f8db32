#include <doctest.h>

#include <set>

#include "cyclemeter/anomaly_classifier.hpp"
#include "cyclemeter/consumption_stats.hpp"
#include "cyclemeter/errors.hpp"
#include "generators.hpp"
#include "properties.hpp"

using namespace cyclemeter;
using namespace cyclemeter::testing;

namespace {

std::vector<OnCycle> cycles_of(std::initializer_list<std::pair<double, double>> duration_energy) {
  std::vector<OnCycle> out;
  Instant t = to_instant(test_epoch());
  for (const auto& [d, e] : duration_energy) {
    out.push_back({"load", t, t + Seconds{d * 60}, d, e});
    t += Seconds{d * 60 + 600};
  }
  return out;
}

LoadSpec spec(double ideal, ToleranceBand band) {
  LoadSpec s;
  s.load_id = "load";
  s.ideal_ton_min = ideal;
  s.band = band;
  return s;
}

LoadStats stats_of(std::size_t n, std::size_t within, double mean) {
  LoadStats s;
  s.n_cycles = n;
  s.n_within_band = within;
  s.mean_duration_min = mean;
  return s;
}

void require_passed(const PropertyOutcome& o) {
  INFO(o.name << ": " << o.failures << "/" << o.cases << " failed; first: " << o.first_failure);
  CHECK(o.passed());
}

}  // namespace

TEST_CASE("histogram of {14, 14, 16} at 5 min") {
  const auto c = cycles_of({{14, 1}, {14, 1}, {16, 1}});
  const auto h = build_histogram(c, 5.0);
  REQUIRE(h.bins.size() == 2);
  CHECK(h.bins[0].lo_min == 10.0);
  CHECK(h.bins[0].hi_min == 15.0);
  CHECK(h.bins[0].count == 2);
  CHECK(h.bins[1].lo_min == 15.0);
  CHECK(h.bins[1].hi_min == 20.0);
  CHECK(h.bins[1].count == 1);
  CHECK(h.total == 3);
}

TEST_CASE("histogram edges are half-open and origin-aligned") {
  const auto c = cycles_of({{15, 1}, {0.5, 1}});
  const auto h = build_histogram(c, 5.0, 0.0);
  REQUIRE(h.bins.size() == 4);
  CHECK(h.bins.front().lo_min == 0.0);
  CHECK(h.bins.back().lo_min == 15.0);
  CHECK(h.bins.back().count == 1);
  const auto shifted = build_histogram(c, 5.0, 2.0);
  CHECK(shifted.bins.front().lo_min == -3.0);
  CHECK(shifted.bins.back().hi_min == 17.0);
  CHECK_THROWS_AS(build_histogram(c, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(build_histogram({}, 5.0), EmptyCycleList);
}

TEST_CASE("load statistics") {
  SUBCASE("two points") {
    const auto s = compute_load_stats(cycles_of({{10, 1}, {20, 3}}), {13, 18});
    CHECK(s.n_cycles == 2);
    CHECK(s.mean_duration_min == 15.0);
    CHECK(s.std_duration_min == 5.0);
    CHECK(s.mean_energy_kwh == 2.0);
    CHECK(s.std_energy_kwh == 1.0);
    CHECK(s.max_energy_kwh == 3.0);
    CHECK(s.n_within_band == 0);
  }
  SUBCASE("single cycle") {
    const auto s = compute_load_stats(cycles_of({{15, 1.25}}), {13, 18});
    CHECK(s.std_duration_min == 0.0);
    CHECK(s.std_energy_kwh == 0.0);
    CHECK(s.mean_energy_kwh == 1.25);
    CHECK(s.n_within_band == 1);
  }
  SUBCASE("band is closed") {
    CHECK(compute_load_stats(cycles_of({{13, 1}, {18, 1}, {18.0001, 1}}), {13, 18}).n_within_band == 2);
  }
  SUBCASE("empty") { CHECK_THROWS_AS(compute_load_stats({}, {13, 18}), EmptyCycleList); }
}

TEST_CASE("scatter points") {
  const auto pts = scatter_points(cycles_of({{10, 1}, {20, 3}}));
  REQUIRE(pts.size() == 2);
  CHECK(pts[1].duration_min == 20.0);
  CHECK(pts[1].energy_kwh == 3.0);
}

TEST_CASE("classification of the case-study loads") {
  const ClassificationPolicy policy;
  SUBCASE("shot peening") {
    const auto f = classify_load(stats_of(4589, 2738, 13.0), spec(15, {13, 18}), policy);
    CHECK(f.verdict == Verdict::Normal);
    CHECK(f.direction == Direction::None);
    CHECK(f.band_fraction == doctest::Approx(2738.0 / 4589.0));
  }
  SUBCASE("cleaning") {
    const auto f = classify_load(stats_of(645, 37, 11.0), spec(15, {13, 18}), policy);
    CHECK(f.verdict == Verdict::Anomalous);
    CHECK(f.direction != Direction::None);
  }
  SUBCASE("trowalising 370") {
    const auto f = classify_load(stats_of(1526, 5, 50.0), spec(150, {151, 155}), policy);
    CHECK(f.verdict == Verdict::Anomalous);
    CHECK(f.direction == Direction::UnderRun);
  }
  SUBCASE("trowalising 510") {
    const auto f = classify_load(stats_of(1199, 8, 130.0), spec(150, {151, 155}), policy);
    CHECK(f.verdict == Verdict::Anomalous);
    CHECK(f.direction == Direction::UnderRun);
  }
}

TEST_CASE("classification edges") {
  const ClassificationPolicy policy;
  CHECK(classify_load(stats_of(10, 5, 15), spec(15, {13, 18}), policy).verdict == Verdict::Normal);
  CHECK(classify_load(stats_of(10, 4, 15), spec(15, {13, 18}), policy).direction == Direction::Mixed);
  CHECK(classify_load(stats_of(10, 0, 17), spec(15, {13, 18}), policy).direction == Direction::OverRun);
  const auto few = classify_load(stats_of(9, 0, 1), spec(15, {13, 18}), policy);
  CHECK(few.verdict == Verdict::Indeterminate);
  CHECK(few.direction == Direction::None);
  CHECK_THROWS_AS(classify_load(stats_of(0, 0, 0), spec(15, {13, 18}), policy), ZeroCycles);
  ClassificationPolicy bad;
  bad.min_band_fraction = 1.5;
  CHECK_THROWS_AS(classify_load(stats_of(10, 5, 15), spec(15, {13, 18}), bad), std::invalid_argument);
}

TEST_CASE("recommendations") {
  const ClassificationPolicy policy;
  const auto anomalous = attach_recommendations(classify_load(stats_of(645, 37, 11.0), spec(15, {13, 18}), policy));
  CHECK(anomalous.causes.size() == 6);
  CHECK(anomalous.remedies.size() == 4);
  CHECK(std::set<std::string>(anomalous.causes.begin(), anomalous.causes.end()).size() == 6);
  CHECK(std::find(anomalous.remedies.begin(), anomalous.remedies.end(), "Keep suggested batch size") !=
        anomalous.remedies.end());
  CHECK(attach_recommendations(anomalous) == anomalous);

  const auto normal = attach_recommendations(classify_load(stats_of(4589, 2738, 13.0), spec(15, {13, 18}), policy));
  CHECK(normal.causes.empty());
  CHECK(normal.remedies.empty());
  const auto few = attach_recommendations(classify_load(stats_of(3, 0, 1.0), spec(15, {13, 18}), policy));
  CHECK(few.causes.empty());
}

TEST_CASE("enum names round trip") {
  for (auto v : {Verdict::Normal, Verdict::Anomalous, Verdict::Indeterminate}) CHECK(verdict_from_string(to_string(v)) == v);
  for (auto d : {Direction::None, Direction::UnderRun, Direction::OverRun, Direction::Mixed}) {
    CHECK(direction_from_string(to_string(d)) == d);
  }
  CHECK_THROWS_AS(verdict_from_string("Broken"), std::invalid_argument);
}

TEST_CASE("statistics and classification properties (reduced)") {
  require_passed(check_histogram_conservation(100, 21));
  require_passed(check_band_matches_aligned_bins(100, 22));
  require_passed(check_stats_permutation_invariance(100, 23));
  require_passed(check_sigma_two_ways(100, 24));
  require_passed(check_classification_dependencies(500, 25));
  require_passed(check_classification_unit_invariance(500, 26));
}
