#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cyclemeter/anomaly_classifier.hpp"
#include "cyclemeter/consumption_stats.hpp"
#include "cyclemeter/meter_ingest.hpp"
#include "cyclemeter/series.hpp"

namespace cyclemeter {

struct LoadDiagnostics {
  bool has_data = false;
  std::size_t n_samples = 0;
  std::size_t truncated_cycles = 0;
  std::vector<GapFlag> gaps;
  std::size_t over_rating_samples = 0;
  double max_power_kw = 0.0;

  bool operator==(const LoadDiagnostics&) const = default;
};

struct LoadReport {
  std::string load_id;
  std::string name;
  LoadStats stats;
  DurationHistogram histogram;
  AnomalyFinding finding;
  LoadDiagnostics diagnostics;
  std::vector<OnCycle> cycles;

  bool operator==(const LoadReport&) const = default;
};

struct ReportSummary {
  std::size_t normal = 0;
  std::size_t anomalous = 0;
  std::size_t indeterminate = 0;
  /// Series whose load_id is not configured; they are not analyzed.
  std::vector<std::string> unmatched_series;

  bool operator==(const ReportSummary&) const = default;
};

struct Report {
  SampleTime generated_at;
  std::string config_digest;
  std::vector<LoadReport> loads;  // ordered by load_id
  ReportSummary summary;

  bool operator==(const Report&) const = default;
};

struct AnalyzeOptions {
  double bin_width_min = kDefaultBinWidthMin;
  double bin_origin_min = 0.0;
  /// Defaults to the current time, truncated to whole seconds.
  std::optional<SampleTime> generated_at;
  /// Analyze loads on worker threads. The output does not depend on it.
  bool parallel = true;
};

enum class ReportFormat { Structured, Text };
enum class PlotKind { Histogram, Scatter };

/// `fnv1a64:<hex>` over the canonical JSON form of the configuration.
std::string config_digest(const PlantConfig& config);

/// Runs validation, segmentation, statistics, histogram and classification
/// for every configured load. Configured loads without a series, or with no
/// detected cycles, are reported Indeterminate.
/// Throws NoMatchingLoads when no series belongs to a configured load.
Report run_analyze(const PlantConfig& config, std::span<const MeterSeries> meter_data, const AnalyzeOptions& options = {});

std::string emit_report(const Report& report, ReportFormat format);
/// Inverse of emit_report(..., Structured). Throws InvalidConfig on a
/// document that does not follow the report schema.
Report parse_report(std::string_view text);

/// Histogram: `bin_lo_min,bin_hi_min,count`; scatter: `duration_min,energy_kwh`.
/// Throws UnknownLoad.
std::string emit_plot_data(const Report& report, PlotKind kind, std::string_view load_id);

/// 0 when every load is Normal or Indeterminate, 2 when any is Anomalous.
int exit_code_for(const Report& report);

}  // namespace cyclemeter
