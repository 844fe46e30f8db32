#include "cyclemeter/consumption_stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cyclemeter/errors.hpp"

namespace cyclemeter {

namespace {

constexpr long long kMaxBins = 1'000'000;

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
};

// Values are summed in sorted order so the result does not depend on the
// order of the input cycles.
template <typename Proj>
Moments population_moments(std::span<const OnCycle> cycles, Proj proj) {
  std::vector<double> v;
  v.reserve(cycles.size());
  for (const auto& c : cycles) v.push_back(proj(c));
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / n)};
}

}  // namespace

DurationHistogram build_histogram(std::span<const OnCycle> cycles, double bin_width_min, double origin_min) {
  if (cycles.empty()) throw EmptyCycleList();
  if (!(bin_width_min > 0.0) || !std::isfinite(bin_width_min)) throw std::invalid_argument("bin width must be > 0");
  if (!(origin_min >= 0.0) || !std::isfinite(origin_min)) throw std::invalid_argument("origin must be >= 0");

  auto edge = [&](long long k) { return origin_min + static_cast<double>(k) * bin_width_min; };
  // Index from the quotient, then nudged so the bin's stored edges agree.
  auto index_of = [&](double d) {
    auto k = static_cast<long long>(std::floor((d - origin_min) / bin_width_min));
    while (d < edge(k)) --k;
    while (d >= edge(k + 1)) ++k;
    return k;
  };

  std::vector<long long> index;
  index.reserve(cycles.size());
  for (const auto& c : cycles) index.push_back(index_of(c.duration_min));
  auto [lo_it, hi_it] = std::minmax_element(index.begin(), index.end());
  const long long k_lo = *lo_it;
  const long long k_hi = *hi_it;
  if (k_hi - k_lo + 1 > kMaxBins) throw std::invalid_argument("bin width too small for the duration range");

  DurationHistogram h;
  h.origin_min = origin_min;
  h.bin_width_min = bin_width_min;
  h.bins.reserve(static_cast<std::size_t>(k_hi - k_lo + 1));
  for (long long k = k_lo; k <= k_hi; ++k) h.bins.push_back({edge(k), edge(k + 1), 0});
  for (long long k : index) ++h.bins[static_cast<std::size_t>(k - k_lo)].count;
  h.total = cycles.size();
  return h;
}

LoadStats compute_load_stats(std::span<const OnCycle> cycles, const ToleranceBand& band) {
  if (cycles.empty()) throw EmptyCycleList();
  LoadStats s;
  s.n_cycles = cycles.size();
  auto dur = population_moments(cycles, [](const OnCycle& c) { return c.duration_min; });
  auto en = population_moments(cycles, [](const OnCycle& c) { return c.energy_kwh; });
  s.mean_duration_min = dur.mean;
  s.std_duration_min = dur.stddev;
  s.mean_energy_kwh = en.mean;
  s.std_energy_kwh = en.stddev;
  s.max_energy_kwh = std::max_element(cycles.begin(), cycles.end(), [](const OnCycle& a, const OnCycle& b) {
                       return a.energy_kwh < b.energy_kwh;
                     })->energy_kwh;
  s.n_within_band = static_cast<std::size_t>(
      std::count_if(cycles.begin(), cycles.end(), [&](const OnCycle& c) { return band.contains(c.duration_min); }));
  return s;
}

std::vector<ScatterPoint> scatter_points(std::span<const OnCycle> cycles) {
  std::vector<ScatterPoint> out;
  out.reserve(cycles.size());
  for (const auto& c : cycles) out.push_back({c.duration_min, c.energy_kwh});
  return out;
}

}  // namespace cyclemeter
