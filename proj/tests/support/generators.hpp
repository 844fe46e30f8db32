#pragma once

#include <random>
#include <vector>

#include "cyclemeter/series.hpp"
#include "cyclemeter/synth_plant.hpp"

namespace cyclemeter::testing {

using TestRng = std::mt19937_64;

inline SampleTime test_epoch() { return std::chrono::sys_days{std::chrono::year{2024} / 3 / 1}; }

/// Series from (minute, kW) breakpoints, starting at test_epoch().
MeterSeries series_from_minutes(const std::string& load_id, std::initializer_list<std::pair<double, double>> points);

struct BlockSignalOptions {
  double threshold_kw = 1.0;
  double min_on_s = 60.0;
  double merge_gap_s = 60.0;
  /// Keep every ON run and OFF gap well away from min_on / merge_gap and
  /// sample densely, so a grid oracle resolves the same cycles.
  bool separated = false;
  int blocks = 20;
};

/// Alternating OFF / ON blocks with irregular sampling. OFF samples stay
/// below 0.8 x threshold and ON samples above 1.2 x threshold, so each
/// block edge produces exactly one threshold crossing. Mixes flicker,
/// short dropouts and long cycles; may end mid-cycle.
MeterSeries random_block_signal(TestRng& rng, const BlockSignalOptions& options);

/// Arbitrary non-negative piecewise-linear signal with irregular
/// (microsecond-resolution) sample times.
MeterSeries random_piecewise_signal(TestRng& rng, int n_samples);

/// Disjoint, ordered cycles with random durations and energies.
std::vector<OnCycle> random_cycles(TestRng& rng, std::size_t n);

/// Random feasible profile: durations within 5-200 min, gaps above the
/// merge window, sample period from 1 s to 60 s.
CycleProfile random_profile(TestRng& rng);

/// Inserts a sample between every pair of neighbours, placed on the linear
/// interpolant.
MeterSeries refine_on_interpolant(const MeterSeries& series);

}  // namespace cyclemeter::testing
