#include "cyclemeter/meter_ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include <json.hpp>

#include "cyclemeter/errors.hpp"

namespace cyclemeter {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// ---- config ----------------------------------------------------------------

double number_field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) throw MissingField(key);
  return it->get<double>();
}

double number_field_or(const json& obj, const char* key, double fallback) {
  return obj.contains(key) ? number_field(obj, key) : fallback;
}

std::string string_field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) throw MissingField(key);
  return it->get<std::string>();
}

LoadSpec parse_load(const json& j) {
  if (!j.is_object()) throw InvalidConfig("each entry of 'loads' must be an object");
  LoadSpec spec;
  spec.load_id = string_field(j, "load_id");
  if (spec.load_id.empty()) throw MissingField("load_id");
  spec.name = j.contains("name") ? string_field(j, "name") : spec.load_id;
  spec.role = j.contains("role") ? string_field(j, "role") : std::string{};
  if (j.contains("rated_power_kw") && !j.at("rated_power_kw").is_null()) {
    double rated = number_field(j, "rated_power_kw");
    if (!(rated > 0.0)) throw InvalidConfig("rated_power_kw must be > 0 for load '" + spec.load_id + "'");
    spec.rated_power_kw = rated;
  }
  spec.ideal_ton_min = number_field(j, "ideal_ton_min");
  if (!(spec.ideal_ton_min > 0.0)) throw InvalidConfig("ideal_ton_min must be > 0 for load '" + spec.load_id + "'");

  auto band = j.find("band_min");
  if (band == j.end() || !band->is_array() || band->size() != 2 || !(*band)[0].is_number() ||
      !(*band)[1].is_number()) {
    throw MissingField("band_min");
  }
  spec.band = {(*band)[0].get<double>(), (*band)[1].get<double>()};
  if (spec.band.lower_min < 0.0 || spec.band.lower_min > spec.band.upper_min) {
    throw InvalidBand(spec.band.lower_min, spec.band.upper_min);
  }
  return spec;
}

SegmentationPolicy parse_segmentation(const json& j) {
  SegmentationPolicy p;
  if (j.contains("on_threshold_kw") && j.contains("on_threshold_fraction")) {
    throw InvalidConfig("give either on_threshold_kw or on_threshold_fraction, not both");
  }
  if (j.contains("on_threshold_kw")) {
    p.on_threshold = AbsoluteThreshold{number_field(j, "on_threshold_kw")};
  } else if (j.contains("on_threshold_fraction")) {
    p.on_threshold = RatedFractionThreshold{number_field(j, "on_threshold_fraction")};
  }
  std::visit(
      [](const auto& th) {
        using T = std::decay_t<decltype(th)>;
        double v;
        if constexpr (std::is_same_v<T, AbsoluteThreshold>) v = th.kw; else v = th.fraction;
        if (!(v > 0.0)) throw InvalidConfig("ON threshold must be > 0");
      },
      p.on_threshold);
  p.min_on_min = number_field_or(j, "min_on_min", p.min_on_min);
  p.merge_gap_min = number_field_or(j, "merge_gap_min", p.merge_gap_min);
  if (p.min_on_min < 0.0 || p.merge_gap_min < 0.0) throw InvalidConfig("min_on_min and merge_gap_min must be >= 0");
  return p;
}

ClassificationPolicy parse_classification(const json& j) {
  ClassificationPolicy p;
  p.min_band_fraction = number_field_or(j, "min_band_fraction", p.min_band_fraction);
  p.underrun_margin = number_field_or(j, "underrun_margin", p.underrun_margin);
  p.overrun_margin = number_field_or(j, "overrun_margin", p.overrun_margin);
  if (j.contains("min_cycles")) {
    if (!j.at("min_cycles").is_number_unsigned()) throw MissingField("min_cycles");
    p.min_cycles = j.at("min_cycles").get<std::size_t>();
  }
  for (double f : {p.min_band_fraction, p.underrun_margin, p.overrun_margin}) {
    if (!(f >= 0.0 && f <= 1.0)) throw InvalidConfig("classification fractions must lie in [0, 1]");
  }
  return p;
}

ValidationPolicy parse_validation(const json& j) {
  ValidationPolicy p;
  p.gap_threshold_min = number_field_or(j, "gap_threshold_min", p.gap_threshold_min);
  p.over_rating_factor = number_field_or(j, "over_rating_factor", p.over_rating_factor);
  if (!(p.gap_threshold_min > 0.0) || !(p.over_rating_factor > 0.0)) {
    throw InvalidConfig("validation thresholds must be > 0");
  }
  return p;
}

}  // namespace

const LoadSpec* PlantConfig::find(std::string_view load_id) const {
  auto it = std::find_if(loads.begin(), loads.end(), [&](const LoadSpec& l) { return l.load_id == load_id; });
  return it == loads.end() ? nullptr : &*it;
}

double GapFlag::minutes() const {
  return std::chrono::duration<double, std::ratio<60>>(to - from).count();
}

std::vector<MeterSeries> parse_meter_csv(std::string_view text) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  std::map<std::string, std::vector<MeterSample>, std::less<>> by_load;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::size_t rows = 0;

  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;

    if (!header_seen) {
      if (line != kMeterCsvHeader) throw MalformedRow(line_no, "expected header '" + std::string(kMeterCsvHeader) + "'");
      header_seen = true;
      continue;
    }

    auto c1 = line.find(',');
    auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos) {
      throw MalformedRow(line_no, "expected 3 fields");
    }
    auto id = trim(line.substr(0, c1));
    auto ts = trim(line.substr(c1 + 1, c2 - c1 - 1));
    auto pw = trim(line.substr(c2 + 1));
    if (id.empty()) throw MalformedRow(line_no, "empty load_id");
    auto t = parse_iso8601(ts);
    if (!t) throw MalformedRow(line_no, "timestamp '" + std::string(ts) + "' is not ISO-8601 with a UTC offset");
    auto p = parse_double(pw);
    if (!p) throw MalformedRow(line_no, "power '" + std::string(pw) + "' is not a number");
    if (*p < 0.0) throw MalformedRow(line_no, "negative power");

    auto it = by_load.find(id);
    if (it == by_load.end()) it = by_load.emplace(std::string(id), std::vector<MeterSample>{}).first;
    it->second.push_back({*t, *p});
    ++rows;
  }
  if (rows == 0) throw EmptyInput();

  std::vector<MeterSeries> out;
  out.reserve(by_load.size());
  for (auto& [id, samples] : by_load) {
    std::stable_sort(samples.begin(), samples.end(),
                     [](const MeterSample& a, const MeterSample& b) { return a.timestamp < b.timestamp; });
    auto dup = std::adjacent_find(samples.begin(), samples.end(), [](const MeterSample& a, const MeterSample& b) {
      return a.timestamp == b.timestamp;
    });
    if (dup != samples.end()) throw DuplicateTimestamp(id, format_iso8601(dup->timestamp));
    out.push_back({id, std::move(samples)});
  }
  return out;
}

std::string write_meter_csv(std::span<const MeterSeries> series) {
  std::string out(kMeterCsvHeader);
  out += '\n';
  for (const auto& s : series) {
    for (const auto& sample : s.samples) {
      out += s.load_id;
      out += ',';
      out += format_iso8601(sample.timestamp);
      out += ',';
      out += format_double(sample.power_kw);
      out += '\n';
    }
  }
  return out;
}

PlantConfig parse_plant_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidConfig(std::string("plant config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InvalidConfig("plant config must be a JSON object");

  PlantConfig cfg;
  auto loads = doc.find("loads");
  if (loads == doc.end() || !loads->is_array()) throw MissingField("loads");
  std::set<std::string> seen;
  for (const auto& j : *loads) {
    LoadSpec spec = parse_load(j);
    if (!seen.insert(spec.load_id).second) throw DuplicateLoadId(spec.load_id);
    cfg.loads.push_back(std::move(spec));
  }
  if (auto it = doc.find("segmentation"); it != doc.end()) cfg.segmentation = parse_segmentation(*it);
  if (auto it = doc.find("classification"); it != doc.end()) cfg.classification = parse_classification(*it);
  if (auto it = doc.find("validation"); it != doc.end()) cfg.validation = parse_validation(*it);
  return cfg;
}

std::string plant_config_to_json(const PlantConfig& config) {
  json doc;
  json seg;
  std::visit(
      [&](const auto& th) {
        using T = std::decay_t<decltype(th)>;
        if constexpr (std::is_same_v<T, AbsoluteThreshold>) seg["on_threshold_kw"] = th.kw;
        else seg["on_threshold_fraction"] = th.fraction;
      },
      config.segmentation.on_threshold);
  seg["min_on_min"] = config.segmentation.min_on_min;
  seg["merge_gap_min"] = config.segmentation.merge_gap_min;
  doc["segmentation"] = seg;
  doc["classification"] = {{"min_band_fraction", config.classification.min_band_fraction},
                           {"underrun_margin", config.classification.underrun_margin},
                           {"overrun_margin", config.classification.overrun_margin},
                           {"min_cycles", config.classification.min_cycles}};
  doc["validation"] = {{"gap_threshold_min", config.validation.gap_threshold_min},
                       {"over_rating_factor", config.validation.over_rating_factor}};
  json loads = json::array();
  for (const auto& l : config.loads) {
    json j{{"load_id", l.load_id},
           {"name", l.name},
           {"ideal_ton_min", l.ideal_ton_min},
           {"band_min", {l.band.lower_min, l.band.upper_min}},
           {"role", l.role}};
    j["rated_power_kw"] = l.rated_power_kw ? json(*l.rated_power_kw) : json(nullptr);
    loads.push_back(std::move(j));
  }
  doc["loads"] = std::move(loads);
  return doc.dump(2);
}

ValidationReport validate_series(const MeterSeries& series, const LoadSpec& spec, const ValidationPolicy& policy) {
  if (series.load_id != spec.load_id) throw UnknownLoad(series.load_id);
  ValidationReport report;
  const auto gap_limit = std::chrono::duration<double>(policy.gap_threshold_min * kSecondsPerMinute);
  for (std::size_t i = 1; i < series.samples.size(); ++i) {
    const auto& a = series.samples[i - 1];
    const auto& b = series.samples[i];
    if (b.timestamp - a.timestamp > gap_limit) report.gaps.push_back({a.timestamp, b.timestamp});
  }
  if (spec.rated_power_kw) {
    const double limit = policy.over_rating_factor * *spec.rated_power_kw;
    for (const auto& s : series.samples) {
      if (s.power_kw > limit) report.over_rating.push_back({s.timestamp, s.power_kw, limit});
    }
  }
  return report;
}

ValidationReport validate_series(const MeterSeries& series, const PlantConfig& config) {
  const LoadSpec* spec = config.find(series.load_id);
  if (!spec) throw UnknownLoad(series.load_id);
  return validate_series(series, *spec, config.validation);
}

}  // namespace cyclemeter
