#include "cyclemeter/synth_plant.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <json.hpp>

#include "cyclemeter/errors.hpp"

namespace cyclemeter {

using nlohmann::json;

namespace {

// Variates are derived from raw engine output by hand: the standard
// distribution classes are implementation-defined and would make seeded
// output differ between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // [0, 1)
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Box-Muller, one variate per call.
  double standard_normal() {
    double u1 = 1.0 - uniform01();  // (0, 1]
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // Uniform integer in [0, n), n > 0, by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 engine_;
};

double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }
double big_phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

struct TruncatedMoments {
  double mean;
  double variance;
};

TruncatedMoments truncated_normal_moments(const NormalLaw& n) {
  const double a = (n.min - n.mean) / n.stddev;
  const double b = n.max ? (*n.max - n.mean) / n.stddev : INFINITY;
  const double phi_a = phi(a);
  const double phi_b = std::isinf(b) ? 0.0 : phi(b);
  const double z = big_phi(b) - big_phi(a);
  const double a_term = a * phi_a;
  const double b_term = std::isinf(b) ? 0.0 : b * phi_b;
  const double shift = (phi_a - phi_b) / z;
  return {n.mean + n.stddev * shift, n.stddev * n.stddev * (1.0 + (a_term - b_term) / z - shift * shift)};
}

double base_mean(const BaseLaw& law) {
  return std::visit(
      [](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, ConstantLaw>) return l.value;
        else if constexpr (std::is_same_v<T, UniformLaw>) return 0.5 * (l.lo + l.hi);
        else return truncated_normal_moments(l).mean;
      },
      law);
}

double base_variance(const BaseLaw& law) {
  return std::visit(
      [](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, ConstantLaw>) return 0.0;
        else if constexpr (std::is_same_v<T, UniformLaw>) return (l.hi - l.lo) * (l.hi - l.lo) / 12.0;
        else return truncated_normal_moments(l).variance;
      },
      law);
}

double base_support_min(const BaseLaw& law) {
  return std::visit(
      [](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, ConstantLaw>) return l.value;
        else if constexpr (std::is_same_v<T, UniformLaw>) return l.lo;
        else return l.min;
      },
      law);
}

void validate_base(const BaseLaw& law, const std::string& what) {
  std::visit(
      [&](const auto& l) {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, ConstantLaw>) {
          if (!std::isfinite(l.value)) throw InfeasibleProfile(what + ": constant must be finite");
        } else if constexpr (std::is_same_v<T, UniformLaw>) {
          if (!(l.lo <= l.hi) || !std::isfinite(l.lo) || !std::isfinite(l.hi)) {
            throw InfeasibleProfile(what + ": uniform needs finite lo <= hi");
          }
        } else {
          if (!(l.stddev > 0.0) || !std::isfinite(l.mean)) throw InfeasibleProfile(what + ": normal needs stddev > 0");
          if (l.max && !(*l.max > l.min)) throw InfeasibleProfile(what + ": normal truncation needs min < max");
          // Rejection sampling must terminate in reasonable time.
          const double a = (l.min - l.mean) / l.stddev;
          const double b = l.max ? (*l.max - l.mean) / l.stddev : INFINITY;
          if (big_phi(b) - big_phi(a) < 1e-6) throw InfeasibleProfile(what + ": normal truncation keeps almost no mass");
        }
      },
      law);
}

void validate_law(const Law& law, const std::string& what) {
  if (const auto* m = std::get_if<MixtureLaw>(&law)) {
    if (m->components.empty()) throw InfeasibleProfile(what + ": mixture has no components");
    double total = 0.0;
    for (const auto& c : m->components) {
      if (!(c.weight >= 0.0)) throw InfeasibleProfile(what + ": mixture weights must be >= 0");
      total += c.weight;
      validate_base(c.law, what);
    }
    if (std::abs(total - 1.0) > 1e-9) throw InfeasibleProfile(what + ": mixture weights must sum to 1");
    return;
  }
  std::visit(
      [&](const auto& l) {
        using T = std::decay_t<decltype(l)>;
        if constexpr (!std::is_same_v<T, MixtureLaw>) validate_base(l, what);
      },
      law);
}

double draw_base(const BaseLaw& law, Rng& rng) {
  return std::visit(
      [&](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, ConstantLaw>) {
          return l.value;
        } else if constexpr (std::is_same_v<T, UniformLaw>) {
          return l.lo + (l.hi - l.lo) * rng.uniform01();
        } else {
          for (;;) {
            double x = l.mean + l.stddev * rng.standard_normal();
            if (x > l.min && (!l.max || x < *l.max)) return x;
          }
        }
      },
      law);
}

std::vector<std::size_t> apportion(const MixtureLaw& m, std::size_t n) {
  const std::size_t k = m.components.size();
  std::vector<std::size_t> counts(k);
  std::vector<double> remainder(k);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < k; ++i) {
    double q = m.components[i].weight * static_cast<double>(n);
    counts[i] = static_cast<std::size_t>(std::floor(q));
    remainder[i] = q - std::floor(q);
    assigned += counts[i];
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < n; i = (i + 1) % k, ++assigned) ++counts[order[i]];
  return counts;
}

std::vector<double> draw_n(const Law& law, std::size_t n, Rng& rng) {
  std::vector<double> out;
  out.reserve(n);
  if (const auto* m = std::get_if<MixtureLaw>(&law)) {
    auto counts = apportion(*m, n);
    std::vector<std::size_t> assignment;
    assignment.reserve(n);
    for (std::size_t c = 0; c < counts.size(); ++c) assignment.insert(assignment.end(), counts[c], c);
    for (std::size_t i = n; i > 1; --i) std::swap(assignment[i - 1], assignment[rng.below(i)]);
    for (std::size_t c : assignment) out.push_back(draw_base(m->components[c].law, rng));
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(std::visit(
        [&](const auto& l) -> double {
          using T = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<T, MixtureLaw>) return 0.0;  // handled above
          else return draw_base(l, rng);
        },
        law));
  }
  return out;
}

// ---- json ----------------------------------------------------------------

json base_to_json(const BaseLaw& law) {
  return std::visit(
      [](const auto& l) -> json {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, ConstantLaw>) {
          return {{"kind", "constant"}, {"value", l.value}};
        } else if constexpr (std::is_same_v<T, UniformLaw>) {
          return {{"kind", "uniform"}, {"lo", l.lo}, {"hi", l.hi}};
        } else {
          json j{{"kind", "normal"}, {"mean", l.mean}, {"stddev", l.stddev}, {"min", l.min}};
          if (l.max) j["max"] = *l.max;
          return j;
        }
      },
      law);
}

json law_to_json(const Law& law) {
  if (const auto* m = std::get_if<MixtureLaw>(&law)) {
    json comps = json::array();
    for (const auto& c : m->components) comps.push_back({{"weight", c.weight}, {"law", base_to_json(c.law)}});
    return {{"kind", "mixture"}, {"components", comps}};
  }
  return std::visit(
      [](const auto& l) -> json {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, MixtureLaw>) return {};
        else return base_to_json(l);
      },
      law);
}

double num(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) throw MissingField(key);
  return it->get<double>();
}

BaseLaw base_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) throw MissingField("kind");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "constant") return ConstantLaw{num(j, "value")};
  if (kind == "uniform") return UniformLaw{num(j, "lo"), num(j, "hi")};
  if (kind == "normal") {
    NormalLaw n{num(j, "mean"), num(j, "stddev"), j.contains("min") ? num(j, "min") : 0.0, std::nullopt};
    if (j.contains("max")) n.max = num(j, "max");
    return n;
  }
  throw InfeasibleProfile("unknown law kind '" + kind + "'");
}

Law law_from_json(const json& j) {
  if (j.is_object() && j.value("kind", "") == "mixture") {
    if (!j.contains("components") || !j.at("components").is_array()) throw MissingField("components");
    MixtureLaw m;
    for (const auto& c : j.at("components")) {
      if (!c.contains("law")) throw MissingField("law");
      m.components.push_back({num(c, "weight"), base_from_json(c.at("law"))});
    }
    return m;
  }
  return std::visit([](auto&& l) -> Law { return l; }, base_from_json(j));
}

json profile_json(const CycleProfile& p) {
  return {{"load_id", p.load_id},
          {"n_cycles", p.n_cycles},
          {"duration_law", law_to_json(p.duration_law)},
          {"power_law", law_to_json(p.power_law)},
          {"off_gap_law", law_to_json(p.off_gap_law)},
          {"sample_period_s", p.sample_period_s},
          {"start", format_iso8601(p.start)},
          {"min_on_min", p.min_on_min},
          {"merge_gap_min", p.merge_gap_min},
          {"power_resolution_kw", p.power_resolution_kw}};
}

// Mixture whose weights are exact counts out of n.
Law counted_mixture(std::size_t n, std::initializer_list<std::pair<std::size_t, UniformLaw>> parts) {
  MixtureLaw m;
  for (const auto& [count, law] : parts) {
    m.components.push_back({static_cast<double>(count) / static_cast<double>(n), law});
  }
  return m;
}

}  // namespace

double law_mean(const Law& law) {
  if (const auto* m = std::get_if<MixtureLaw>(&law)) {
    double s = 0.0;
    for (const auto& c : m->components) s += c.weight * base_mean(c.law);
    return s;
  }
  return std::visit(
      [](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, MixtureLaw>) return 0.0;
        else return base_mean(l);
      },
      law);
}

double law_variance(const Law& law) {
  if (const auto* m = std::get_if<MixtureLaw>(&law)) {
    const double mean = law_mean(law);
    double second = 0.0;
    for (const auto& c : m->components) {
      double mu = base_mean(c.law);
      second += c.weight * (base_variance(c.law) + mu * mu);
    }
    return second - mean * mean;
  }
  return std::visit(
      [](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, MixtureLaw>) return 0.0;
        else return base_variance(l);
      },
      law);
}

double law_support_min(const Law& law) {
  if (const auto* m = std::get_if<MixtureLaw>(&law)) {
    double lo = INFINITY;
    for (const auto& c : m->components) {
      if (c.weight > 0.0) lo = std::min(lo, base_support_min(c.law));
    }
    return lo;
  }
  return std::visit(
      [](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, MixtureLaw>) return 0.0;
        else return base_support_min(l);
      },
      law);
}

void validate_profile(const CycleProfile& p) {
  if (p.load_id.empty()) throw InfeasibleProfile("profile needs a load_id");
  if (!(p.sample_period_s > 0.0) || !std::isfinite(p.sample_period_s)) {
    throw InfeasibleProfile("sample_period_s must be > 0");
  }
  if (std::llround(p.sample_period_s * 1e6) < 1) throw InfeasibleProfile("sample_period_s below 1 microsecond");
  if (p.min_on_min < 0.0 || p.merge_gap_min < 0.0 || p.power_resolution_kw < 0.0) {
    throw InfeasibleProfile("min_on_min, merge_gap_min and power_resolution_kw must be >= 0");
  }
  validate_law(p.duration_law, "duration_law");
  validate_law(p.power_law, "power_law");
  validate_law(p.off_gap_law, "off_gap_law");

  const double slack_min = 2.0 * p.sample_period_s / kSecondsPerMinute;
  if (!(law_support_min(p.power_law) > 0.0)) throw InfeasibleProfile("power_law support must be > 0 kW");
  if (!(law_support_min(p.duration_law) > p.min_on_min + slack_min)) {
    throw InfeasibleProfile("duration_law support reaches below min_on_min + 2 sample periods");
  }
  if (!(law_support_min(p.off_gap_law) > p.merge_gap_min + slack_min)) {
    throw InfeasibleProfile("off_gap_law support reaches below merge_gap_min + 2 sample periods");
  }
}

SynthOutput generate_series(const CycleProfile& profile, std::uint64_t seed) {
  validate_profile(profile);
  Rng rng(seed);
  const std::size_t n = profile.n_cycles;
  auto durations = draw_n(profile.duration_law, n, rng);
  auto powers = draw_n(profile.power_law, n, rng);
  auto gaps = draw_n(profile.off_gap_law, n + 1, rng);

  if (profile.power_resolution_kw > 0.0) {
    const double r = profile.power_resolution_kw;
    for (double& p : powers) p = std::max(r, std::round(p / r) * r);
  }

  SynthOutput out;
  out.series.load_id = profile.load_id;
  out.truth.seed = seed;
  out.truth.profile = profile;
  out.truth.cycles.reserve(n);

  struct Pulse {
    double t0, t1, kw;
  };
  std::vector<Pulse> pulses;
  pulses.reserve(n);
  const Instant origin = to_instant(profile.start);
  double cursor = gaps[0] * kSecondsPerMinute;
  for (std::size_t i = 0; i < n; ++i) {
    const double t0 = cursor;
    const double t1 = t0 + durations[i] * kSecondsPerMinute;
    pulses.push_back({t0, t1, powers[i]});
    out.truth.cycles.push_back({profile.load_id, origin + Seconds{t0}, origin + Seconds{t1}, durations[i],
                                powers[i] * durations[i] / kSecondsPerMinute});
    cursor = t1 + gaps[i + 1] * kSecondsPerMinute;
  }

  const std::int64_t period_us = std::llround(profile.sample_period_s * 1e6);
  const auto last_k = static_cast<std::int64_t>(std::ceil(cursor * 1e6 / static_cast<double>(period_us)));
  out.series.samples.reserve(static_cast<std::size_t>(last_k + 1));
  std::size_t next = 0;
  for (std::int64_t k = 0; k <= last_k; ++k) {
    const double t = static_cast<double>(k * period_us) * 1e-6;
    while (next < pulses.size() && pulses[next].t1 < t) ++next;
    double kw = 0.0;
    if (next < pulses.size() && pulses[next].t0 <= t) kw = pulses[next].kw;
    out.series.samples.push_back({profile.start + std::chrono::microseconds{k * period_us}, kw});
  }
  return out;
}

std::vector<CycleProfile> paper_case_profiles() {
  // Mixture parameters for cleaning come from a coarse grid search over
  // component counts and ranges, matching a 2.43 kWh mean, 2.89 kWh
  // standard deviation and ~7.5 kWh maximum cycle energy with 37 of 645
  // cycles in 13-18 min.
  CycleProfile cleaning;
  cleaning.load_id = "cleaning";
  cleaning.n_cycles = 645;
  cleaning.duration_law = counted_mixture(645, {{446, {1.5, 3.0}}, {37, {13.5, 17.5}}, {162, {28.0, 29.0}}});
  cleaning.power_law = UniformLaw{15.0, 15.5};
  cleaning.off_gap_law = UniformLaw{3.0, 25.0};
  cleaning.sample_period_s = 10.0;

  // 2738 of 4589 cycles inside 13-18 min, mean duration 13 min. At ~20 kW
  // the resulting energy spread is close to 0.87 kWh.
  CycleProfile shot;
  shot.load_id = "shot_peening";
  shot.n_cycles = 4589;
  shot.duration_law = counted_mixture(4589, {{2738, {13.5, 16.5}}, {1851, {7.5, 12.5}}});
  shot.power_law = UniformLaw{19.5, 20.5};
  shot.off_gap_law = UniformLaw{2.0, 10.0};
  shot.sample_period_s = 10.0;

  // 5 of 1526 cycles inside 151-155 min, mean duration 50 min.
  CycleProfile trow370;
  trow370.load_id = "trowalising_370";
  trow370.n_cycles = 1526;
  trow370.duration_law = counted_mixture(1526, {{5, {152.0, 154.0}}, {1521, {20.0, 79.0}}});
  trow370.power_law = UniformLaw{6.5, 7.5};
  trow370.off_gap_law = UniformLaw{5.0, 30.0};
  trow370.sample_period_s = 30.0;

  // 8 of 1199 cycles inside 151-155 min, mean duration 130 min.
  CycleProfile trow510;
  trow510.load_id = "trowalising_510";
  trow510.n_cycles = 1199;
  trow510.duration_law = counted_mixture(1199, {{8, {152.0, 154.0}}, {1191, {110.0, 149.0}}});
  trow510.power_law = UniformLaw{9.0, 10.5};
  trow510.off_gap_law = UniformLaw{5.0, 30.0};
  trow510.sample_period_s = 30.0;

  return {cleaning, shot, trow370, trow510};
}

PlantConfig paper_case_config() {
  PlantConfig cfg;
  cfg.loads = {
      {"cleaning", "Cascade camplate cleaning", 15.0, 15.0, {13.0, 18.0}, "cleans the finished camplate"},
      {"shot_peening", "Shot peening", 22.0, 15.0, {13.0, 18.0}, "relieves grinding stress in the camplate"},
      {"trowalising_370", "Trowalising 370", 8.0, 150.0, {151.0, 155.0}, "deburrs sharp camplate edges"},
      {"trowalising_510", "Trowalising 510", 11.0, 150.0, {151.0, 155.0}, "deburrs sharp camplate edges"},
  };
  return cfg;
}

std::optional<CycleProfile> find_paper_case_profile(std::string_view load_id) {
  for (auto& p : paper_case_profiles()) {
    if (p.load_id == load_id) return p;
  }
  return std::nullopt;
}

CycleProfile profile_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InfeasibleProfile(std::string("profile is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InfeasibleProfile("profile must be a JSON object");
  CycleProfile p;
  if (!j.contains("load_id") || !j.at("load_id").is_string()) throw MissingField("load_id");
  p.load_id = j.at("load_id").get<std::string>();
  if (!j.contains("n_cycles") || !j.at("n_cycles").is_number_unsigned()) throw MissingField("n_cycles");
  p.n_cycles = j.at("n_cycles").get<std::size_t>();
  for (const char* key : {"duration_law", "power_law", "off_gap_law"}) {
    if (!j.contains(key)) throw MissingField(key);
  }
  p.duration_law = law_from_json(j.at("duration_law"));
  p.power_law = law_from_json(j.at("power_law"));
  p.off_gap_law = law_from_json(j.at("off_gap_law"));
  p.sample_period_s = num(j, "sample_period_s");
  if (j.contains("start")) {
    auto t = j.at("start").is_string() ? parse_iso8601(j.at("start").get<std::string>()) : std::nullopt;
    if (!t) throw MissingField("start");
    p.start = *t;
  }
  if (j.contains("min_on_min")) p.min_on_min = num(j, "min_on_min");
  if (j.contains("merge_gap_min")) p.merge_gap_min = num(j, "merge_gap_min");
  if (j.contains("power_resolution_kw")) p.power_resolution_kw = num(j, "power_resolution_kw");
  validate_profile(p);
  return p;
}

std::string profile_to_json(const CycleProfile& profile) { return profile_json(profile).dump(2); }

std::string ground_truth_to_json(const SynthGroundTruth& truth) {
  json cycles = json::array();
  for (const auto& c : truth.cycles) {
    cycles.push_back({{"start_unix_s", unix_seconds(c.start)},
                      {"end_unix_s", unix_seconds(c.end)},
                      {"duration_min", c.duration_min},
                      {"energy_kwh", c.energy_kwh}});
  }
  json j{{"seed", truth.seed},
         {"rng_algorithm", truth.rng_algorithm},
         {"profile", profile_json(truth.profile)},
         {"cycles", cycles}};
  return j.dump(2);
}

}  // namespace cyclemeter
