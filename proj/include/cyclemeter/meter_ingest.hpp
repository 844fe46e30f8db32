#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cyclemeter/anomaly_classifier.hpp"
#include "cyclemeter/cycle_segmentation.hpp"
#include "cyclemeter/series.hpp"

namespace cyclemeter {

struct ValidationPolicy {
  double gap_threshold_min = 10.0;
  double over_rating_factor = 1.5;

  bool operator==(const ValidationPolicy&) const = default;
};

struct PlantConfig {
  std::vector<LoadSpec> loads;
  SegmentationPolicy segmentation;
  ClassificationPolicy classification;
  ValidationPolicy validation;

  /// nullptr when no load has this id.
  [[nodiscard]] const LoadSpec* find(std::string_view load_id) const;

  bool operator==(const PlantConfig&) const = default;
};

struct GapFlag {
  SampleTime from;
  SampleTime to;

  [[nodiscard]] double minutes() const;
  bool operator==(const GapFlag&) const = default;
};

struct OverRatingFlag {
  SampleTime at;
  double power_kw = 0.0;
  double limit_kw = 0.0;

  bool operator==(const OverRatingFlag&) const = default;
};

/// Findings about data quality. Nothing here stops the analysis.
struct ValidationReport {
  std::vector<GapFlag> gaps;
  std::vector<OverRatingFlag> over_rating;

  [[nodiscard]] bool empty() const noexcept { return gaps.empty() && over_rating.empty(); }
};

inline constexpr std::string_view kMeterCsvHeader = "load_id,timestamp,power_kw";

/// Long-format meter CSV -> one series per load_id, ordered by load_id,
/// samples sorted by time.
/// Throws EmptyInput, MalformedRow (1-based line number), DuplicateTimestamp.
std::vector<MeterSeries> parse_meter_csv(std::string_view text);

/// Inverse of parse_meter_csv. Powers use the shortest representation that
/// reads back to the same double.
std::string write_meter_csv(std::span<const MeterSeries> series);

/// Throws DuplicateLoadId, MissingField, InvalidBand, InvalidConfig.
PlantConfig parse_plant_config(std::string_view text);
std::string plant_config_to_json(const PlantConfig& config);

/// Checks `series` against `spec`. Throws UnknownLoad if the ids differ.
ValidationReport validate_series(const MeterSeries& series, const LoadSpec& spec, const ValidationPolicy& policy);
/// Looks the load up in `config`. Throws UnknownLoad if it is not configured.
ValidationReport validate_series(const MeterSeries& series, const PlantConfig& config);

}  // namespace cyclemeter
