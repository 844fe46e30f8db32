#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "cyclemeter/series.hpp"

namespace cyclemeter {

struct HistogramBin {
  double lo_min = 0.0;  // inclusive
  double hi_min = 0.0;  // exclusive
  std::size_t count = 0;

  bool operator==(const HistogramBin&) const = default;
};

/// Cycle counts per duration bin. Bins are contiguous, `origin + k * width`.
struct DurationHistogram {
  double origin_min = 0.0;
  double bin_width_min = 5.0;
  std::vector<HistogramBin> bins;
  std::size_t total = 0;

  bool operator==(const DurationHistogram&) const = default;
};

/// Duration and energy moments of a load's cycles. Standard deviations use
/// the population divisor n.
struct LoadStats {
  std::size_t n_cycles = 0;
  double mean_duration_min = 0.0;
  double std_duration_min = 0.0;
  double mean_energy_kwh = 0.0;
  double std_energy_kwh = 0.0;
  double max_energy_kwh = 0.0;
  std::size_t n_within_band = 0;

  bool operator==(const LoadStats&) const = default;
};

struct ScatterPoint {
  double duration_min = 0.0;
  double energy_kwh = 0.0;

  bool operator==(const ScatterPoint&) const = default;
};

inline constexpr double kDefaultBinWidthMin = 5.0;

/// Throws EmptyCycleList for no cycles and std::invalid_argument for a
/// non-positive width, a negative origin, or an absurd number of bins.
DurationHistogram build_histogram(std::span<const OnCycle> cycles, double bin_width_min = kDefaultBinWidthMin,
                                  double origin_min = 0.0);

/// Throws EmptyCycleList for no cycles.
LoadStats compute_load_stats(std::span<const OnCycle> cycles, const ToleranceBand& band);

std::vector<ScatterPoint> scatter_points(std::span<const OnCycle> cycles);

}  // namespace cyclemeter
