#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "cyclemeter/consumption_stats.hpp"
#include "cyclemeter/series.hpp"

namespace cyclemeter {

enum class Verdict { Normal, Anomalous, Indeterminate };
enum class Direction { None, UnderRun, OverRun, Mixed };

std::string_view to_string(Verdict v);
std::string_view to_string(Direction d);
/// Inverse of to_string; throws std::invalid_argument on unknown names.
Verdict verdict_from_string(std::string_view s);
Direction direction_from_string(std::string_view s);

struct ClassificationPolicy {
  /// Share of cycles inside the tolerance band required for Normal.
  double min_band_fraction = 0.5;
  /// Relative shortfall of the mean duration below ideal that reads as under-run.
  double underrun_margin = 0.1;
  double overrun_margin = 0.1;
  /// Fewer cycles than this gives Indeterminate.
  std::size_t min_cycles = 10;

  bool operator==(const ClassificationPolicy&) const = default;
};

struct FindingEvidence {
  LoadStats stats;
  double ideal_ton_min = 0.0;
  ToleranceBand band;

  bool operator==(const FindingEvidence&) const = default;
};

struct AnomalyFinding {
  std::string load_id;
  Verdict verdict = Verdict::Indeterminate;
  Direction direction = Direction::None;
  double band_fraction = 0.0;
  FindingEvidence evidence;
  std::vector<std::string> causes;
  std::vector<std::string> remedies;

  bool operator==(const AnomalyFinding&) const = default;
};

/// Probable causes and remedies reported to the facility manager for an
/// anomalous load. The text is fixed; the catalog does not tie causes to
/// a particular anomaly direction.
struct CauseCatalog {
  std::array<std::string_view, 6> causes;
  std::array<std::string_view, 4> remedies;

  static const CauseCatalog& standard();
};

/// Throws ZeroCycles when stats.n_cycles == 0 and std::invalid_argument
/// when a policy fraction lies outside [0, 1].
AnomalyFinding classify_load(const LoadStats& stats, const LoadSpec& spec, const ClassificationPolicy& policy);

/// Anomalous findings get the full cause and remedy lists; any other
/// verdict gets empty lists. Idempotent.
AnomalyFinding attach_recommendations(AnomalyFinding finding, const CauseCatalog& catalog = CauseCatalog::standard());

}  // namespace cyclemeter
