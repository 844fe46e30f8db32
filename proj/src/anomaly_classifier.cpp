#include "cyclemeter/anomaly_classifier.hpp"

#include <stdexcept>

#include "cyclemeter/errors.hpp"

namespace cyclemeter {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Normal: return "Normal";
    case Verdict::Anomalous: return "Anomalous";
    case Verdict::Indeterminate: return "Indeterminate";
  }
  return "Indeterminate";
}

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::None: return "None";
    case Direction::UnderRun: return "UnderRun";
    case Direction::OverRun: return "OverRun";
    case Direction::Mixed: return "Mixed";
  }
  return "None";
}

Verdict verdict_from_string(std::string_view s) {
  for (auto v : {Verdict::Normal, Verdict::Anomalous, Verdict::Indeterminate}) {
    if (to_string(v) == s) return v;
  }
  throw std::invalid_argument("unknown verdict '" + std::string(s) + "'");
}

Direction direction_from_string(std::string_view s) {
  for (auto d : {Direction::None, Direction::UnderRun, Direction::OverRun, Direction::Mixed}) {
    if (to_string(d) == s) return d;
  }
  throw std::invalid_argument("unknown direction '" + std::string(s) + "'");
}

const CauseCatalog& CauseCatalog::standard() {
  static const CauseCatalog catalog{
      {
          "the process being operated in under load or over load",
          "enhanced machine down time during process cycle",
          "human error during manual operations of the load",
          "machine exceeding thermal limits",
          "supply problems",
          "sudden change in batch size",
      },
      {
          "routine maintenance checks",
          "Keep suggested batch size",
          "aversion of sudden changes in batch size (in case to meet production target)",
          "standardization of work: fool proofing, bench marking",
      },
  };
  return catalog;
}

AnomalyFinding classify_load(const LoadStats& stats, const LoadSpec& spec, const ClassificationPolicy& policy) {
  auto unit = [](double f) { return f >= 0.0 && f <= 1.0; };
  if (!unit(policy.min_band_fraction) || !unit(policy.underrun_margin) || !unit(policy.overrun_margin)) {
    throw std::invalid_argument("classification fractions must lie in [0, 1]");
  }
  if (stats.n_cycles == 0) throw ZeroCycles(spec.load_id);

  AnomalyFinding f;
  f.load_id = spec.load_id;
  f.band_fraction = static_cast<double>(stats.n_within_band) / static_cast<double>(stats.n_cycles);
  f.evidence = {stats, spec.ideal_ton_min, spec.band};

  if (stats.n_cycles < policy.min_cycles) {
    f.verdict = Verdict::Indeterminate;
    return f;
  }
  f.verdict = f.band_fraction >= policy.min_band_fraction ? Verdict::Normal : Verdict::Anomalous;
  if (f.verdict == Verdict::Normal) return f;

  const double mu = stats.mean_duration_min;
  if (mu < spec.ideal_ton_min * (1.0 - policy.underrun_margin)) {
    f.direction = Direction::UnderRun;
  } else if (mu > spec.ideal_ton_min * (1.0 + policy.overrun_margin)) {
    f.direction = Direction::OverRun;
  } else {
    f.direction = Direction::Mixed;
  }
  return f;
}

AnomalyFinding attach_recommendations(AnomalyFinding finding, const CauseCatalog& catalog) {
  finding.causes.clear();
  finding.remedies.clear();
  if (finding.verdict == Verdict::Anomalous) {
    finding.causes.assign(catalog.causes.begin(), catalog.causes.end());
    finding.remedies.assign(catalog.remedies.begin(), catalog.remedies.end());
  }
  return finding;
}

}  // namespace cyclemeter
