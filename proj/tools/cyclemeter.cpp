// cyclemeter: ON-cycle energy analysis for batch process loads.
//
//   cyclemeter analyze  --config plant.json --meters a.csv [b.csv ...] --out reports/
//   cyclemeter simulate --profile cleaning --seed 42 --out cleaning.csv
//   cyclemeter report   --in reports/report.json --plot histogram --load cleaning

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "cyclemeter/errors.hpp"
#include "cyclemeter/meter_ingest.hpp"
#include "cyclemeter/report.hpp"
#include "cyclemeter/synth_plant.hpp"

namespace fs = std::filesystem;
using namespace cyclemeter;

namespace {

constexpr int kExitError = 1;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

// Series for the same load may be split across files.
std::vector<MeterSeries> load_meters(const std::vector<std::string>& files) {
  std::map<std::string, MeterSeries> merged;
  for (const auto& f : files) {
    std::vector<MeterSeries> parsed;
    try {
      parsed = parse_meter_csv(read_file(f));
    } catch (const Error& e) {
      throw Error(f + ": " + e.what());
    }
    for (auto& s : parsed) {
      auto [it, inserted] = merged.try_emplace(s.load_id, s);
      if (inserted) continue;
      auto& samples = it->second.samples;
      samples.insert(samples.end(), s.samples.begin(), s.samples.end());
      std::sort(samples.begin(), samples.end(),
                [](const MeterSample& a, const MeterSample& b) { return a.timestamp < b.timestamp; });
      auto dup = std::adjacent_find(samples.begin(), samples.end(), [](const MeterSample& a, const MeterSample& b) {
        return a.timestamp == b.timestamp;
      });
      if (dup != samples.end()) throw DuplicateTimestamp(s.load_id, format_iso8601(dup->timestamp));
    }
  }
  std::vector<MeterSeries> out;
  for (auto& [id, s] : merged) out.push_back(std::move(s));
  return out;
}

struct AnalyzeArgs {
  std::string config;
  std::vector<std::string> meters;
  std::string out_dir;
  std::string format = "structured";
  double bin_width = kDefaultBinWidthMin;
  bool seed_check = false;
};

int run_analyze_command(const AnalyzeArgs& args) {
  const PlantConfig config = parse_plant_config(read_file(args.config));
  const auto meters = load_meters(args.meters);

  AnalyzeOptions options;
  options.bin_width_min = args.bin_width;
  options.generated_at = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  const Report report = run_analyze(config, meters, options);
  const std::string structured = emit_report(report, ReportFormat::Structured);

  if (args.seed_check) {
    const Report again = run_analyze(config, meters, options);
    if (emit_report(again, ReportFormat::Structured) != structured) {
      std::cerr << "determinism check failed: two runs over the same input differ\n";
      return kExitError;
    }
  }

  const fs::path out_dir(args.out_dir);
  fs::create_directories(out_dir / "plots");
  write_file(out_dir / "report.json", structured);
  for (const auto& l : report.loads) {
    write_file(out_dir / "plots" / (l.load_id + "_histogram.csv"), emit_plot_data(report, PlotKind::Histogram, l.load_id));
    write_file(out_dir / "plots" / (l.load_id + "_scatter.csv"), emit_plot_data(report, PlotKind::Scatter, l.load_id));
  }
  if (args.format == "text") {
    const std::string text = emit_report(report, ReportFormat::Text);
    write_file(out_dir / "report.txt", text);
    std::cout << text;
  } else {
    std::cout << "wrote " << (out_dir / "report.json").string() << ": normal=" << report.summary.normal
              << " anomalous=" << report.summary.anomalous << " indeterminate=" << report.summary.indeterminate << "\n";
  }
  return exit_code_for(report);
}

struct SimulateArgs {
  std::string profile;
  std::uint64_t seed = 0;
  std::string out;
  std::string truth;
};

int run_simulate_command(const SimulateArgs& args) {
  CycleProfile profile;
  if (auto builtin = find_paper_case_profile(args.profile)) {
    profile = *builtin;
  } else if (fs::exists(args.profile)) {
    profile = profile_from_json(read_file(args.profile));
  } else {
    throw Error("'" + args.profile + "' is neither a built-in profile nor a file");
  }
  const auto generated = generate_series(profile, args.seed);
  write_file(args.out, write_meter_csv(std::span(&generated.series, 1)));
  if (!args.truth.empty()) write_file(args.truth, ground_truth_to_json(generated.truth));
  std::cout << "wrote " << generated.series.samples.size() << " samples, " << generated.truth.cycles.size()
            << " cycles for '" << profile.load_id << "' to " << args.out << "\n";
  return 0;
}

struct ReportArgs {
  std::string in;
  std::string plot;
  std::string load;
  std::string out;
};

int run_report_command(const ReportArgs& args) {
  const Report report = parse_report(read_file(args.in));
  const auto kind = args.plot == "histogram" ? PlotKind::Histogram : PlotKind::Scatter;
  const std::string data = emit_plot_data(report, kind, args.load);
  if (args.out.empty()) {
    std::cout << data;
  } else {
    write_file(args.out, data);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ON-cycle energy analysis for batch process loads"};
  app.require_subcommand(1);

  AnalyzeArgs analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Detect cycles, compute statistics and classify every load");
  analyze_cmd->add_option("--config", analyze.config, "Plant configuration (JSON)")->required()->check(CLI::ExistingFile);
  analyze_cmd->add_option("--meters", analyze.meters, "Meter CSV files")->required()->check(CLI::ExistingFile);
  analyze_cmd->add_option("--out", analyze.out_dir, "Output directory")->required();
  analyze_cmd->add_option("--format", analyze.format, "Report format printed and written alongside report.json")
      ->check(CLI::IsMember({"structured", "text"}));
  analyze_cmd->add_option("--bin-width", analyze.bin_width, "Histogram bin width in minutes")
      ->check(CLI::PositiveNumber);
  analyze_cmd->add_flag("--seed-check", analyze.seed_check, "Run the analysis twice and fail unless both reports match");

  SimulateArgs simulate;
  auto* simulate_cmd = app.add_subcommand("simulate", "Generate a synthetic meter series with known cycles");
  simulate_cmd
      ->add_option("--profile", simulate.profile,
                   "Built-in profile (cleaning, shot_peening, trowalising_370, trowalising_510) or profile JSON file")
      ->required();
  simulate_cmd->add_option("--seed", simulate.seed, "Generator seed")->required();
  simulate_cmd->add_option("--out", simulate.out, "Output meter CSV")->required();
  simulate_cmd->add_option("--truth", simulate.truth, "Also write the ground-truth cycles (JSON)");

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Extract plot data from a structured report");
  report_cmd->add_option("--in", report.in, "Structured report (report.json)")->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--plot", report.plot, "Plot data kind")->required()->check(CLI::IsMember({"histogram", "scatter"}));
  report_cmd->add_option("--load", report.load, "Load id")->required();
  report_cmd->add_option("--out", report.out, "Output CSV (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (*analyze_cmd) return run_analyze_command(analyze);
    if (*simulate_cmd) return run_simulate_command(simulate);
    if (*report_cmd) return run_report_command(report);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
