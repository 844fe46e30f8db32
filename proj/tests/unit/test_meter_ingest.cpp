#include <doctest.h>

#include "cyclemeter/errors.hpp"
#include "cyclemeter/meter_ingest.hpp"
#include "generators.hpp"

using namespace cyclemeter;
using cyclemeter::testing::series_from_minutes;

TEST_CASE("parse_meter_csv: single load") {
  const auto series = parse_meter_csv(
      "load_id,timestamp,power_kw\n"
      "cleaning,2024-03-01T08:00:00Z,0.0\n"
      "cleaning,2024-03-01T08:00:10Z,15.2\n"
      "cleaning,2024-03-01T08:00:20Z,15.1\n");
  REQUIRE(series.size() == 1);
  CHECK(series[0].load_id == "cleaning");
  REQUIRE(series[0].samples.size() == 3);
  CHECK(series[0].samples[1].power_kw == 15.2);
  CHECK(series[0].samples[2].timestamp - series[0].samples[0].timestamp == std::chrono::seconds{20});
}

TEST_CASE("parse_meter_csv: interleaved loads are split and sorted") {
  const auto series = parse_meter_csv(
      "load_id,timestamp,power_kw\r\n"
      "b,2024-03-01T08:00:10Z,2\r\n"
      "a,2024-03-01T08:00:00Z,1\r\n"
      "b,2024-03-01T08:00:00Z,3\r\n"
      "a,2024-03-01T08:00:10Z,4\r\n");
  REQUIRE(series.size() == 2);
  CHECK(series[0].load_id == "a");
  CHECK(series[1].load_id == "b");
  CHECK(series[1].samples[0].power_kw == 3.0);
  CHECK(series[1].samples[1].power_kw == 2.0);
}

TEST_CASE("parse_meter_csv: errors") {
  SUBCASE("negative power") {
    try {
      parse_meter_csv("load_id,timestamp,power_kw\na,2024-03-01T08:00:00Z,1\na,2024-03-01T08:00:10Z,-1\n");
      FAIL("expected MalformedRow");
    } catch (const MalformedRow& e) {
      CHECK(e.line() == 3);
    }
  }
  SUBCASE("bad rows") {
    for (const char* row : {"a,2024-03-01T08:00:00Z", "a,2024-03-01T08:00:00,1", "a,2024-03-01T08:00:00Z,x",
                            ",2024-03-01T08:00:00Z,1", "a,2024-03-01T08:00:00Z,nan", "a,2024-03-01T08:00:00Z,1,2"}) {
      CAPTURE(row);
      CHECK_THROWS_AS(parse_meter_csv(std::string("load_id,timestamp,power_kw\n") + row + "\n"), MalformedRow);
    }
  }
  SUBCASE("duplicate timestamp") {
    try {
      parse_meter_csv("load_id,timestamp,power_kw\na,2024-03-01T08:00:00Z,1\na,2024-03-01T09:00:00+01:00,2\n");
      FAIL("expected DuplicateTimestamp");
    } catch (const DuplicateTimestamp& e) {
      CHECK(e.load_id() == "a");
    }
  }
  SUBCASE("empty") {
    CHECK_THROWS_AS(parse_meter_csv(""), EmptyInput);
    CHECK_THROWS_AS(parse_meter_csv("load_id,timestamp,power_kw\n"), EmptyInput);
  }
  SUBCASE("wrong header") { CHECK_THROWS_AS(parse_meter_csv("id,time,kw\na,2024-03-01T08:00:00Z,1\n"), MalformedRow); }
}

TEST_CASE("write_meter_csv round trips") {
  const auto s = series_from_minutes("x", {{0, 0.1}, {0.5, 1e-7}, {1, 123456.789}});
  const std::vector<MeterSeries> in{s};
  const auto text = write_meter_csv(in);
  CHECK(text.rfind(std::string(kMeterCsvHeader) + "\n", 0) == 0);
  CHECK(parse_meter_csv(text) == in);
}

namespace {
constexpr const char* kCleaning =
    R"({"load_id": "cleaning", "name": "Cleaning", "rated_power_kw": 15, "ideal_ton_min": 15, "band_min": [13, 18]})";
constexpr const char* kTrow =
    R"({"load_id": "trowalising_370", "ideal_ton_min": 150, "band_min": [151, 155]})";

std::string config_of(std::initializer_list<const char*> loads) {
  std::string s = R"({"loads": [)";
  bool first = true;
  for (const char* l : loads) {
    if (!first) s += ",";
    s += l;
    first = false;
  }
  return s + "]}";
}
}  // namespace

TEST_CASE("parse_plant_config") {
  const auto cfg = parse_plant_config(config_of({kCleaning, kTrow}));
  REQUIRE(cfg.loads.size() == 2);
  const LoadSpec* c = cfg.find("cleaning");
  REQUIRE(c != nullptr);
  CHECK(c->band == ToleranceBand{13, 18});
  CHECK(c->rated_power_kw == 15.0);
  const LoadSpec* t = cfg.find("trowalising_370");
  REQUIRE(t != nullptr);
  CHECK(t->band == ToleranceBand{151, 155});
  CHECK(t->name == "trowalising_370");
  CHECK_FALSE(t->rated_power_kw.has_value());
  CHECK(cfg.find("honing") == nullptr);
  CHECK(parse_plant_config(plant_config_to_json(cfg)) == cfg);
}

TEST_CASE("parse_plant_config errors") {
  CHECK_THROWS_AS(parse_plant_config(config_of({R"({"load_id": "a", "ideal_ton_min": 15, "band_min": [18, 13]})"})),
                  InvalidBand);
  CHECK_THROWS_AS(parse_plant_config(config_of({kCleaning, kCleaning})), DuplicateLoadId);
  try {
    parse_plant_config(config_of({R"({"load_id": "a", "band_min": [13, 18]})"}));
    FAIL("expected MissingField");
  } catch (const MissingField& e) {
    CHECK(e.field() == "ideal_ton_min");
  }
  CHECK_THROWS_AS(parse_plant_config("{not json"), InvalidConfig);
  CHECK_THROWS_AS(parse_plant_config(R"({"plant": []})"), MissingField);
}

TEST_CASE("validate_series") {
  const auto cfg = parse_plant_config(config_of({kCleaning}));
  SUBCASE("uniform sampling is clean") {
    MeterSeries s{"cleaning", {}};
    for (int i = 0; i < 100; ++i) s.samples.push_back({cyclemeter::testing::test_epoch() + std::chrono::seconds{10 * i}, 5.0});
    CHECK(validate_series(s, cfg).empty());
  }
  SUBCASE("two-hour hole") {
    const auto s = series_from_minutes("cleaning", {{0, 1}, {1, 1}, {121, 1}, {122, 1}});
    const auto r = validate_series(s, cfg);
    REQUIRE(r.gaps.size() == 1);
    CHECK(r.gaps[0].minutes() == doctest::Approx(120.0));
    CHECK(r.over_rating.empty());
  }
  SUBCASE("twice rated power") {
    const auto s = series_from_minutes("cleaning", {{0, 1}, {1, 30}, {2, 1}});
    const auto r = validate_series(s, cfg);
    REQUIRE(r.over_rating.size() == 1);
    CHECK(r.over_rating[0].power_kw == 30.0);
    CHECK(r.over_rating[0].limit_kw == doctest::Approx(22.5));
  }
  SUBCASE("unknown load") {
    CHECK_THROWS_AS(validate_series(series_from_minutes("honing", {{0, 1}}), cfg), UnknownLoad);
  }
}
