#include "cyclemeter/cycle_segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cyclemeter/errors.hpp"

namespace cyclemeter {

namespace {

/// Sample times as seconds relative to the first sample, so arithmetic on
/// cycle boundaries does not lose precision to the epoch offset.
struct RelativeSignal {
  SampleTime origin;
  std::vector<double> t;
  std::vector<double> p;

  explicit RelativeSignal(const MeterSeries& series) {
    if (series.samples.empty()) return;
    origin = series.samples.front().timestamp;
    t.reserve(series.samples.size());
    p.reserve(series.samples.size());
    for (const auto& s : series.samples) {
      t.push_back(static_cast<double>((s.timestamp - origin).count()) * 1e-6);
      p.push_back(s.power_kw);
    }
  }

  [[nodiscard]] Instant absolute(double rel) const { return to_instant(origin) + Seconds{rel}; }
  [[nodiscard]] double relative(Instant x) const { return (x - to_instant(origin)).count(); }

  // Interpolated power at x, which must lie within [t.front(), t.back()].
  [[nodiscard]] double value_at(double x) const {
    auto it = std::upper_bound(t.begin(), t.end(), x);
    if (it == t.begin()) return p.front();
    if (it == t.end()) return p.back();
    auto j = static_cast<std::size_t>(it - t.begin());
    auto i = j - 1;
    double f = (x - t[i]) / (t[j] - t[i]);
    return p[i] + f * (p[j] - p[i]);
  }

  // kW·s over [a, b], a <= b, both inside the span.
  [[nodiscard]] double integrate(double a, double b) const {
    double sum = 0.0;
    double x_prev = a;
    double p_prev = value_at(a);
    auto j = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), a) - t.begin());
    for (; j < t.size() && t[j] < b; ++j) {
      sum += 0.5 * (p_prev + p[j]) * (t[j] - x_prev);
      x_prev = t[j];
      p_prev = p[j];
    }
    sum += 0.5 * (p_prev + value_at(b)) * (b - x_prev);
    return std::max(sum, 0.0);
  }
};

struct Group {
  double start = 0.0;
  double end = 0.0;
  bool truncated = false;
  bool anchored = false;
};

double crossing(const RelativeSignal& s, std::size_t i, std::size_t j, double threshold) {
  double f = (threshold - s.p[i]) / (s.p[j] - s.p[i]);
  return s.t[i] + f * (s.t[j] - s.t[i]);
}

}  // namespace

double resolve_threshold(const SegmentationPolicy& policy, const LoadSpec& spec) {
  if (!(policy.min_on_min >= 0.0) || !(policy.merge_gap_min >= 0.0)) {
    throw std::invalid_argument("min_on and merge_gap must be >= 0");
  }
  double kw = std::visit(
      [&](const auto& th) -> double {
        using T = std::decay_t<decltype(th)>;
        if constexpr (std::is_same_v<T, AbsoluteThreshold>) {
          return th.kw;
        } else {
          if (!spec.rated_power_kw) throw UnresolvedThreshold(spec.load_id);
          return th.fraction * *spec.rated_power_kw;
        }
      },
      policy.on_threshold);
  if (!(kw > 0.0) || !std::isfinite(kw)) throw std::invalid_argument("ON threshold must be > 0 kW");
  return kw;
}

SegmentationResult detect_cycles(const MeterSeries& series, const LoadSpec& spec, const SegmentationPolicy& policy) {
  const double threshold = resolve_threshold(policy, spec);
  const double min_on_s = policy.min_on_min * kSecondsPerMinute;
  const double merge_gap_s = policy.merge_gap_min * kSecondsPerMinute;

  SegmentationResult result;
  const RelativeSignal sig(series);
  const std::size_t n = sig.t.size();

  std::vector<Group> groups;
  std::size_t i = 0;
  while (i < n) {
    if (sig.p[i] < threshold) {
      ++i;
      continue;
    }
    std::size_t first = i;
    while (i + 1 < n && sig.p[i + 1] >= threshold) ++i;
    std::size_t last = i;
    ++i;

    Group run;
    run.truncated = first == 0 || last == n - 1;
    run.start = first == 0 ? sig.t[first] : crossing(sig, first - 1, first, threshold);
    run.end = last == n - 1 ? sig.t[last] : crossing(sig, last, last + 1, threshold);
    run.anchored = run.end - run.start >= min_on_s;

    if (!groups.empty() && run.start - groups.back().end < merge_gap_s) {
      Group& g = groups.back();
      g.end = run.end;
      g.truncated = g.truncated || run.truncated;
      g.anchored = g.anchored || run.anchored;
    } else {
      groups.push_back(run);
    }
  }

  for (const Group& g : groups) {
    if (g.truncated) {
      ++result.truncated;
      continue;
    }
    if (!g.anchored || !(g.end > g.start)) continue;
    OnCycle c;
    c.load_id = series.load_id;
    c.start = sig.absolute(g.start);
    c.end = sig.absolute(g.end);
    c.duration_min = (g.end - g.start) / kSecondsPerMinute;
    c.energy_kwh = sig.integrate(g.start, g.end) / kSecondsPerHour;
    result.cycles.push_back(std::move(c));
  }
  return result;
}

double integrate_energy(const MeterSeries& series, Instant start, Instant end) {
  if (series.samples.empty()) throw OutOfRange("series has no samples");
  if (!(start < end)) throw OutOfRange("integration interval is empty");
  if (start < to_instant(series.samples.front().timestamp) || end > to_instant(series.samples.back().timestamp)) {
    throw OutOfRange("integration interval leaves the sample span");
  }
  const RelativeSignal sig(series);
  // Range was checked on absolute instants; the relative form may differ by rounding.
  const double a = std::clamp(sig.relative(start), 0.0, sig.t.back());
  const double b = std::clamp(sig.relative(end), a, sig.t.back());
  return sig.integrate(a, b) / kSecondsPerHour;
}

}  // namespace cyclemeter
