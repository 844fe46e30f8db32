#include "cyclemeter/report.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <future>
#include <map>

#include <json.hpp>

#include "cyclemeter/cycle_segmentation.hpp"
#include "cyclemeter/errors.hpp"

namespace cyclemeter {

using nlohmann::json;

namespace {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

LoadReport analyze_load(const LoadSpec& spec, const MeterSeries* series, const PlantConfig& config,
                        const AnalyzeOptions& options) {
  LoadReport out;
  out.load_id = spec.load_id;
  out.name = spec.name;
  out.histogram.origin_min = options.bin_origin_min;
  out.histogram.bin_width_min = options.bin_width_min;

  if (series && !series->samples.empty()) {
    auto& diag = out.diagnostics;
    diag.has_data = true;
    diag.n_samples = series->samples.size();
    auto validation = validate_series(*series, spec, config.validation);
    diag.gaps = std::move(validation.gaps);
    diag.over_rating_samples = validation.over_rating.size();
    for (const auto& s : series->samples) diag.max_power_kw = std::max(diag.max_power_kw, s.power_kw);

    auto seg = detect_cycles(*series, spec, config.segmentation);
    diag.truncated_cycles = seg.truncated;
    out.cycles = std::move(seg.cycles);
  }

  if (out.cycles.empty()) {
    out.finding.load_id = spec.load_id;
    out.finding.verdict = Verdict::Indeterminate;
    out.finding.evidence = {out.stats, spec.ideal_ton_min, spec.band};
    return out;
  }
  out.stats = compute_load_stats(out.cycles, spec.band);
  out.histogram = build_histogram(out.cycles, options.bin_width_min, options.bin_origin_min);
  out.finding = attach_recommendations(classify_load(out.stats, spec, config.classification));
  return out;
}

// ---- json ----------------------------------------------------------------

json stats_to_json(const LoadStats& s) {
  return {{"n_cycles", s.n_cycles},
          {"mean_duration_min", s.mean_duration_min},
          {"std_duration_min", s.std_duration_min},
          {"mean_energy_kwh", s.mean_energy_kwh},
          {"std_energy_kwh", s.std_energy_kwh},
          {"max_energy_kwh", s.max_energy_kwh},
          {"n_within_band", s.n_within_band}};
}

json load_to_json(const LoadReport& l) {
  json bins = json::array();
  for (const auto& b : l.histogram.bins) bins.push_back({{"lo_min", b.lo_min}, {"hi_min", b.hi_min}, {"count", b.count}});
  json gaps = json::array();
  for (const auto& g : l.diagnostics.gaps) {
    gaps.push_back({{"from", format_iso8601(g.from)}, {"to", format_iso8601(g.to)}, {"minutes", g.minutes()}});
  }
  json cycles = json::array();
  for (const auto& c : l.cycles) {
    cycles.push_back({{"start_unix_s", unix_seconds(c.start)},
                      {"end_unix_s", unix_seconds(c.end)},
                      {"duration_min", c.duration_min},
                      {"energy_kwh", c.energy_kwh}});
  }
  const auto& f = l.finding;
  return {
      {"load_id", l.load_id},
      {"name", l.name},
      {"stats", stats_to_json(l.stats)},
      {"histogram",
       {{"origin_min", l.histogram.origin_min},
        {"bin_width_min", l.histogram.bin_width_min},
        {"total", l.histogram.total},
        {"bins", bins}}},
      {"finding",
       {{"verdict", to_string(f.verdict)},
        {"direction", to_string(f.direction)},
        {"band_fraction", f.band_fraction},
        {"evidence",
         {{"ideal_ton_min", f.evidence.ideal_ton_min},
          {"band_min", {f.evidence.band.lower_min, f.evidence.band.upper_min}}}},
        {"causes", f.causes},
        {"remedies", f.remedies}}},
      {"diagnostics",
       {{"has_data", l.diagnostics.has_data},
        {"n_samples", l.diagnostics.n_samples},
        {"truncated_cycles", l.diagnostics.truncated_cycles},
        {"gaps", gaps},
        {"over_rating_samples", l.diagnostics.over_rating_samples},
        {"max_power_kw", l.diagnostics.max_power_kw}}},
      {"cycles", cycles},
  };
}

SampleTime time_from_json(const json& j) {
  auto t = parse_iso8601(j.get<std::string>());
  if (!t) throw InvalidConfig("report contains an invalid timestamp");
  return *t;
}

LoadReport load_from_json(const json& j) {
  LoadReport l;
  l.load_id = j.at("load_id").get<std::string>();
  l.name = j.at("name").get<std::string>();

  const auto& s = j.at("stats");
  l.stats.n_cycles = s.at("n_cycles").get<std::size_t>();
  l.stats.mean_duration_min = s.at("mean_duration_min").get<double>();
  l.stats.std_duration_min = s.at("std_duration_min").get<double>();
  l.stats.mean_energy_kwh = s.at("mean_energy_kwh").get<double>();
  l.stats.std_energy_kwh = s.at("std_energy_kwh").get<double>();
  l.stats.max_energy_kwh = s.at("max_energy_kwh").get<double>();
  l.stats.n_within_band = s.at("n_within_band").get<std::size_t>();

  const auto& h = j.at("histogram");
  l.histogram.origin_min = h.at("origin_min").get<double>();
  l.histogram.bin_width_min = h.at("bin_width_min").get<double>();
  l.histogram.total = h.at("total").get<std::size_t>();
  for (const auto& b : h.at("bins")) {
    l.histogram.bins.push_back({b.at("lo_min").get<double>(), b.at("hi_min").get<double>(), b.at("count").get<std::size_t>()});
  }

  const auto& f = j.at("finding");
  l.finding.load_id = l.load_id;
  l.finding.verdict = verdict_from_string(f.at("verdict").get<std::string>());
  l.finding.direction = direction_from_string(f.at("direction").get<std::string>());
  l.finding.band_fraction = f.at("band_fraction").get<double>();
  const auto& ev = f.at("evidence");
  l.finding.evidence.stats = l.stats;
  l.finding.evidence.ideal_ton_min = ev.at("ideal_ton_min").get<double>();
  l.finding.evidence.band = {ev.at("band_min").at(0).get<double>(), ev.at("band_min").at(1).get<double>()};
  l.finding.causes = f.at("causes").get<std::vector<std::string>>();
  l.finding.remedies = f.at("remedies").get<std::vector<std::string>>();

  const auto& d = j.at("diagnostics");
  l.diagnostics.has_data = d.at("has_data").get<bool>();
  l.diagnostics.n_samples = d.at("n_samples").get<std::size_t>();
  l.diagnostics.truncated_cycles = d.at("truncated_cycles").get<std::size_t>();
  for (const auto& g : d.at("gaps")) l.diagnostics.gaps.push_back({time_from_json(g.at("from")), time_from_json(g.at("to"))});
  l.diagnostics.over_rating_samples = d.at("over_rating_samples").get<std::size_t>();
  l.diagnostics.max_power_kw = d.at("max_power_kw").get<double>();

  for (const auto& c : j.at("cycles")) {
    l.cycles.push_back({l.load_id, instant_from_unix_seconds(c.at("start_unix_s").get<double>()),
                        instant_from_unix_seconds(c.at("end_unix_s").get<double>()), c.at("duration_min").get<double>(),
                        c.at("energy_kwh").get<double>()});
  }
  return l;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string format_row(const char* fmt, auto... args) {
  char buf[512];
  int n = std::snprintf(buf, sizeof buf, fmt, args...);
  return std::string(buf, static_cast<std::size_t>(std::clamp(n, 0, static_cast<int>(sizeof buf) - 1)));
}

std::string emit_text(const Report& report) {
  std::string out;
  out += "generated_at:  " + format_iso8601(report.generated_at) + "\n";
  out += "config_digest: " + report.config_digest + "\n\n";
  out += format_row("%-20s %7s %7s %8s %9s %9s %9s %9s %9s  %-13s %-9s\n", "LOAD", "CYCLES", "IN_BAND", "FRACTION",
                    "MU_T_MIN", "SD_T_MIN", "MU_E_KWH", "SD_E_KWH", "MAX_E_KWH", "VERDICT", "DIRECTION");
  for (const auto& l : report.loads) {
    const auto& s = l.stats;
    out += format_row("%-20s %7zu %7zu %8.3f %9.2f %9.2f %9.3f %9.3f %9.3f  %-13s %-9s\n", l.load_id.c_str(), s.n_cycles,
                      s.n_within_band, l.finding.band_fraction, s.mean_duration_min, s.std_duration_min,
                      s.mean_energy_kwh, s.std_energy_kwh, s.max_energy_kwh, upper(to_string(l.finding.verdict)).c_str(),
                      std::string(to_string(l.finding.direction)).c_str());
  }
  out += format_row("\nsummary: normal=%zu anomalous=%zu indeterminate=%zu\n", report.summary.normal,
                    report.summary.anomalous, report.summary.indeterminate);
  if (!report.summary.unmatched_series.empty()) {
    out += "unmatched series:";
    for (const auto& id : report.summary.unmatched_series) out += " " + id;
    out += "\n";
  }
  for (const auto& l : report.loads) {
    const auto& d = l.diagnostics;
    if (!d.has_data) {
      out += "\n" + l.load_id + ": no meter data\n";
      continue;
    }
    if (d.truncated_cycles || !d.gaps.empty() || d.over_rating_samples) {
      out += format_row("\n%s: %zu truncated cycle(s), %zu sampling gap(s), %zu sample(s) above rating\n",
                        l.load_id.c_str(), d.truncated_cycles, d.gaps.size(), d.over_rating_samples);
    }
  }
  for (const auto& l : report.loads) {
    if (l.finding.causes.empty() && l.finding.remedies.empty()) continue;
    out += "\n" + l.load_id + " (" + upper(to_string(l.finding.verdict)) + ", " +
           std::string(to_string(l.finding.direction)) + ")\n  probable causes:\n";
    for (const auto& c : l.finding.causes) out += "    - " + c + "\n";
    out += "  remedies:\n";
    for (const auto& r : l.finding.remedies) out += "    - " + r + "\n";
  }
  return out;
}

std::string csv_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

}  // namespace

std::string config_digest(const PlantConfig& config) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(plant_config_to_json(config))));
  return buf;
}

Report run_analyze(const PlantConfig& config, std::span<const MeterSeries> meter_data, const AnalyzeOptions& options) {
  std::map<std::string_view, const MeterSeries*> by_id;
  std::vector<std::string> unmatched;
  for (const auto& s : meter_data) {
    if (config.find(s.load_id)) {
      by_id[s.load_id] = &s;
    } else {
      unmatched.push_back(s.load_id);
    }
  }
  if (by_id.empty()) throw NoMatchingLoads();

  std::vector<const LoadSpec*> specs;
  for (const auto& l : config.loads) specs.push_back(&l);
  std::sort(specs.begin(), specs.end(), [](const LoadSpec* a, const LoadSpec* b) { return a->load_id < b->load_id; });

  auto series_for = [&](const LoadSpec* spec) -> const MeterSeries* {
    auto it = by_id.find(spec->load_id);
    return it == by_id.end() ? nullptr : it->second;
  };

  Report report;
  report.generated_at = options.generated_at.value_or(
      std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()));
  report.config_digest = config_digest(config);
  report.loads.reserve(specs.size());
  if (options.parallel && specs.size() > 1) {
    std::vector<std::future<LoadReport>> pending;
    for (const LoadSpec* spec : specs) {
      pending.push_back(std::async(std::launch::async, analyze_load, std::cref(*spec), series_for(spec), std::cref(config),
                                   std::cref(options)));
    }
    for (auto& f : pending) report.loads.push_back(f.get());
  } else {
    for (const LoadSpec* spec : specs) report.loads.push_back(analyze_load(*spec, series_for(spec), config, options));
  }

  for (const auto& l : report.loads) {
    switch (l.finding.verdict) {
      case Verdict::Normal: ++report.summary.normal; break;
      case Verdict::Anomalous: ++report.summary.anomalous; break;
      case Verdict::Indeterminate: ++report.summary.indeterminate; break;
    }
  }
  std::sort(unmatched.begin(), unmatched.end());
  unmatched.erase(std::unique(unmatched.begin(), unmatched.end()), unmatched.end());
  report.summary.unmatched_series = std::move(unmatched);
  return report;
}

std::string emit_report(const Report& report, ReportFormat format) {
  if (format == ReportFormat::Text) return emit_text(report);
  json loads = json::array();
  for (const auto& l : report.loads) loads.push_back(load_to_json(l));
  json doc{{"generated_at", format_iso8601(report.generated_at)},
           {"config_digest", report.config_digest},
           {"loads", loads},
           {"summary",
            {{"normal", report.summary.normal},
             {"anomalous", report.summary.anomalous},
             {"indeterminate", report.summary.indeterminate},
             {"unmatched_series", report.summary.unmatched_series}}}};
  return doc.dump(2) + "\n";
}

Report parse_report(std::string_view text) {
  try {
    json doc = json::parse(text);
    Report r;
    r.generated_at = time_from_json(doc.at("generated_at"));
    r.config_digest = doc.at("config_digest").get<std::string>();
    for (const auto& l : doc.at("loads")) r.loads.push_back(load_from_json(l));
    const auto& s = doc.at("summary");
    r.summary.normal = s.at("normal").get<std::size_t>();
    r.summary.anomalous = s.at("anomalous").get<std::size_t>();
    r.summary.indeterminate = s.at("indeterminate").get<std::size_t>();
    r.summary.unmatched_series = s.at("unmatched_series").get<std::vector<std::string>>();
    return r;
  } catch (const json::exception& e) {
    throw InvalidConfig(std::string("malformed report: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw InvalidConfig(std::string("malformed report: ") + e.what());
  }
}

std::string emit_plot_data(const Report& report, PlotKind kind, std::string_view load_id) {
  auto it = std::find_if(report.loads.begin(), report.loads.end(), [&](const LoadReport& l) { return l.load_id == load_id; });
  if (it == report.loads.end()) throw UnknownLoad(std::string(load_id));
  std::string out;
  if (kind == PlotKind::Histogram) {
    out = "bin_lo_min,bin_hi_min,count\n";
    for (const auto& b : it->histogram.bins) {
      out += csv_double(b.lo_min) + "," + csv_double(b.hi_min) + "," + std::to_string(b.count) + "\n";
    }
  } else {
    out = "duration_min,energy_kwh\n";
    for (const auto& p : scatter_points(it->cycles)) {
      out += csv_double(p.duration_min) + "," + csv_double(p.energy_kwh) + "\n";
    }
  }
  return out;
}

int exit_code_for(const Report& report) { return report.summary.anomalous > 0 ? 2 : 0; }

}  // namespace cyclemeter
