#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cyclemeter/meter_ingest.hpp"
#include "cyclemeter/series.hpp"
#include "cyclemeter/time.hpp"

namespace cyclemeter {

struct ConstantLaw {
  double value = 0.0;
  bool operator==(const ConstantLaw&) const = default;
};

struct UniformLaw {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const UniformLaw&) const = default;
};

/// Normal distribution truncated to (min, max). `min` defaults to 0 so the
/// support stays positive.
struct NormalLaw {
  double mean = 0.0;
  double stddev = 1.0;
  double min = 0.0;
  std::optional<double> max;
  bool operator==(const NormalLaw&) const = default;
};

using BaseLaw = std::variant<ConstantLaw, UniformLaw, NormalLaw>;

struct MixtureComponent {
  double weight = 0.0;
  BaseLaw law;
  bool operator==(const MixtureComponent&) const = default;
};

/// When n values are drawn at once, component counts are fixed by
/// largest-remainder apportionment of `weight * n` and the assignment order
/// is shuffled. The realized mixture proportions therefore carry no
/// sampling noise.
struct MixtureLaw {
  std::vector<MixtureComponent> components;
  bool operator==(const MixtureLaw&) const = default;
};

using Law = std::variant<ConstantLaw, UniformLaw, NormalLaw, MixtureLaw>;

double law_mean(const Law& law);
double law_variance(const Law& law);
/// Infimum of the support.
double law_support_min(const Law& law);

struct CycleProfile {
  std::string load_id;
  std::size_t n_cycles = 0;
  Law duration_law = ConstantLaw{15.0};  // minutes
  Law power_law = ConstantLaw{5.0};      // kW
  Law off_gap_law = ConstantLaw{10.0};   // minutes
  double sample_period_s = 10.0;
  SampleTime start = std::chrono::sys_days{std::chrono::year{2024} / 1 / 1};
  /// Detection windows the series must stay clear of: every duration must
  /// exceed min_on_min and every gap merge_gap_min, each with two sample
  /// periods of slack for boundary quantization.
  double min_on_min = 1.0;
  double merge_gap_min = 1.0;
  /// Meter resolution; sampled powers are rounded to it. 0 disables rounding.
  double power_resolution_kw = 0.01;

  bool operator==(const CycleProfile&) const = default;
};

inline constexpr std::string_view kRngAlgorithm = "mt19937_64";

struct SynthGroundTruth {
  std::vector<OnCycle> cycles;
  std::uint64_t seed = 0;
  CycleProfile profile;
  std::string rng_algorithm{kRngAlgorithm};
};

struct SynthOutput {
  MeterSeries series;
  SynthGroundTruth truth;
};

/// Throws InfeasibleProfile describing the first violated constraint.
void validate_profile(const CycleProfile& profile);

/// Rectangular pulses at sampled powers and durations, separated by sampled
/// OFF gaps (one leading and one trailing gap included), sampled on a
/// regular grid. A grid sample on a pulse edge reads the pulse power.
/// Deterministic in (profile, seed) on every platform: the generator is
/// mt19937_64 and all variates are derived from its raw output here.
SynthOutput generate_series(const CycleProfile& profile, std::uint64_t seed);

/// Cleaning, shot peening, trowalising 370 and trowalising 510, fitted to
/// the case-study statistics of the camplate line.
std::vector<CycleProfile> paper_case_profiles();
/// Plant configuration for the four case-study loads.
PlantConfig paper_case_config();
std::optional<CycleProfile> find_paper_case_profile(std::string_view load_id);

CycleProfile profile_from_json(std::string_view text);
std::string profile_to_json(const CycleProfile& profile);
std::string ground_truth_to_json(const SynthGroundTruth& truth);

}  // namespace cyclemeter
