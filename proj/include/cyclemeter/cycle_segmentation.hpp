#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "cyclemeter/series.hpp"
#include "cyclemeter/time.hpp"

namespace cyclemeter {

struct AbsoluteThreshold {
  double kw = 0.0;
  bool operator==(const AbsoluteThreshold&) const = default;
};

/// Threshold expressed as a share of the load's rated power.
struct RatedFractionThreshold {
  double fraction = 0.1;
  bool operator==(const RatedFractionThreshold&) const = default;
};

struct SegmentationPolicy {
  std::variant<AbsoluteThreshold, RatedFractionThreshold> on_threshold = RatedFractionThreshold{0.1};
  /// ON runs shorter than this are flicker, not cycles.
  double min_on_min = 1.0;
  /// OFF gaps shorter than this inside a cycle are bridged.
  double merge_gap_min = 1.0;

  bool operator==(const SegmentationPolicy&) const = default;
};

struct SegmentationResult {
  std::vector<OnCycle> cycles;
  /// Cycles cut by the start or end of the data window; not in `cycles`.
  std::size_t truncated = 0;
};

/// Absolute ON threshold in kW for `spec`. Throws UnresolvedThreshold when a
/// fractional threshold is requested for a load without rated power, and
/// std::invalid_argument when the threshold or windows are out of range.
double resolve_threshold(const SegmentationPolicy& policy, const LoadSpec& spec);

/// Splits a power series into ON cycles.
///
/// The signal is the piecewise-linear interpolant of the samples. A load is
/// ON wherever that interpolant is at or above the threshold, so cycle
/// boundaries fall on interpolated threshold crossings, not on samples.
///
/// Post-processing, in order:
///   1. OFF gaps shorter than `merge_gap_min` between consecutive ON runs
///      are bridged into one group.
///   2. Groups touching the first or last sample are dropped and counted
///      in `truncated`.
///   3. A group is kept only if at least one of its constituent ON runs
///      lasts `min_on_min` or longer (so a kept cycle is never shorter
///      than `min_on_min`), and its duration is positive.
///
/// Energy of each cycle is the trapezoidal integral over [start, end],
/// bridged gaps included.
SegmentationResult detect_cycles(const MeterSeries& series, const LoadSpec& spec, const SegmentationPolicy& policy);

/// Trapezoidal integral, in kWh, of the piecewise-linear power signal over
/// [start, end]. Endpoint powers are linearly interpolated.
/// Throws OutOfRange when the interval is empty or leaves the sample span.
double integrate_energy(const MeterSeries& series, Instant start, Instant end);

}  // namespace cyclemeter
