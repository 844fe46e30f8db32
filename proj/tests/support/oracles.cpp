#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace cyclemeter::testing {

Interpolant::Interpolant(const MeterSeries& series) {
  if (series.samples.empty()) return;
  origin_ = series.samples.front().timestamp;
  for (const auto& s : series.samples) {
    t_.push_back(static_cast<double>((s.timestamp - origin_).count()) / 1e6);
    p_.push_back(s.power_kw);
  }
}

double Interpolant::at(double t) const {
  if (t <= t_.front()) return p_.front();
  if (t >= t_.back()) return p_.back();
  std::size_t lo = 0;
  std::size_t hi = t_.size() - 1;
  while (hi - lo > 1) {
    std::size_t mid = (lo + hi) / 2;
    if (t_[mid] <= t) lo = mid; else hi = mid;
  }
  const double w = (t - t_[lo]) / (t_[hi] - t_[lo]);
  return (1.0 - w) * p_[lo] + w * p_[hi];
}

std::vector<OracleCycle> brute_force_cycles(const MeterSeries& series, double threshold_kw, double min_on_s,
                                            double merge_gap_s, double step_s) {
  struct Run {
    double first, last;
    bool truncated, anchored;
  };
  const Interpolant f(series);
  const double span = f.span_s();
  const auto steps = static_cast<long long>(std::floor(span / step_s));

  std::vector<Run> runs;
  bool on = false;
  double first = 0.0;
  double prev_t = 0.0;
  for (long long k = 0; k <= steps + 1; ++k) {
    const bool last_point = k == steps + 1;
    const double t = last_point ? span : static_cast<double>(k) * step_s;
    const bool now_on = f.at(t) >= threshold_kw;
    if (now_on && !on) first = t;
    if (!now_on && on) runs.push_back({first, prev_t, first == 0.0, false});
    on = now_on;
    prev_t = t;
  }
  if (on) runs.push_back({first, span, true, false});
  for (auto& r : runs) r.anchored = r.last - r.first >= min_on_s;

  std::vector<Run> groups;
  for (const auto& r : runs) {
    if (!groups.empty() && r.first - groups.back().last < merge_gap_s) {
      groups.back().last = r.last;
      groups.back().truncated |= r.truncated;
      groups.back().anchored |= r.anchored;
    } else {
      groups.push_back(r);
    }
  }
  std::vector<OracleCycle> out;
  for (const auto& g : groups) {
    if (!g.truncated && g.anchored && g.last > g.first) out.push_back({g.first, g.last});
  }
  return out;
}

double midpoint_energy_kwh(const MeterSeries& series, double a, double b, int refine) {
  const Interpolant f(series);
  std::vector<double> breaks{a};
  for (double t : f.times()) {
    if (t > a && t < b) breaks.push_back(t);
  }
  breaks.push_back(b);
  double kws = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double h = (breaks[i + 1] - breaks[i]) / refine;
    double piece = 0.0;
    for (int k = 0; k < refine; ++k) piece += f.at(breaks[i] + (k + 0.5) * h);
    kws += piece * h;
  }
  return kws / 3600.0;
}

double shifted_single_pass_std(std::span<const double> values) {
  const double shift = values.front();
  double s1 = 0.0;
  double s2 = 0.0;
  for (double v : values) {
    s1 += v - shift;
    s2 += (v - shift) * (v - shift);
  }
  const double n = static_cast<double>(values.size());
  return std::sqrt(std::max(0.0, s2 / n - (s1 / n) * (s1 / n)));
}

}  // namespace cyclemeter::testing
