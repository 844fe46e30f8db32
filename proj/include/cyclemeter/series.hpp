#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cyclemeter/time.hpp"

namespace cyclemeter {

struct MeterSample {
  SampleTime timestamp;
  double power_kw = 0.0;

  bool operator==(const MeterSample&) const = default;
};

/// Power samples of one load, strictly increasing in time.
struct MeterSeries {
  std::string load_id;
  std::vector<MeterSample> samples;

  bool operator==(const MeterSeries&) const = default;
};

/// Closed duration interval, in minutes, that counts as conforming.
struct ToleranceBand {
  double lower_min = 0.0;
  double upper_min = 0.0;

  [[nodiscard]] bool contains(double duration_min) const noexcept {
    return lower_min <= duration_min && duration_min <= upper_min;
  }
  bool operator==(const ToleranceBand&) const = default;
};

struct LoadSpec {
  std::string load_id;
  std::string name;
  /// Nameplate rating. Optional: without it, fractional ON thresholds and
  /// over-rating checks cannot be resolved for the load.
  std::optional<double> rated_power_kw;
  double ideal_ton_min = 0.0;
  ToleranceBand band;
  std::string role;

  bool operator==(const LoadSpec&) const = default;
};

/// One ON episode of a load.
struct OnCycle {
  std::string load_id;
  Instant start;
  Instant end;
  double duration_min = 0.0;
  double energy_kwh = 0.0;

  bool operator==(const OnCycle&) const = default;
};

}  // namespace cyclemeter
