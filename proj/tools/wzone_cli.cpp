// wzone: run scenarios, render the results table, emit heatmaps, calibrate
// channel constants, and verify evidence files.
//
// Exit codes: 0 ok, 1 internal error, 2 config or input error,
// 3 verification failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wzone/wzone.hpp"

namespace {

namespace fs = std::filesystem;
using namespace wzone;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;
constexpr int kExitVerify = 3;

// Input problems the user can fix; reported with exit 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw InputError("cannot write " + out_path);
  out << text;
}

Bytes read_input_file(const std::string& path) {
  if (!fs::is_regular_file(path)) throw InputError("cannot read " + path);
  return read_file_bytes(path);
}

// ---------------------------------------------------------------------------

struct RunOptions {
  std::string scenario;
  std::string scenario_file;
  std::optional<std::uint64_t> seed;
  int iterations = 1000;
  int jobs = 1;
  bool table = false;
  std::string format = "json";
  std::string out;
  std::string emit;
};

ScenarioConfig resolve_scenario(const std::string& name, const std::string& file,
                                const std::optional<std::uint64_t>& seed) {
  ScenarioConfig cfg = file.empty() ? build_scenario(name) : load_scenario_file(file);
  if (seed) cfg.seed = *seed;
  cfg.validate();
  return cfg;
}

// Artifacts of the first iteration: registry, block log, one evidence file
// per admitted claim, and the per-witness run log.
void emit_artifacts(const ScenarioConfig& cfg, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create " + dir.string() + ": " + ec.message());
  const auto nodes = make_witness_nodes(cfg);
  const auto registry = make_registry(cfg, nodes);
  const RunResult run = run_scenario(cfg, nodes, registry, iteration_seed(cfg.seed, 0));

  write_output(registry_to_json(registry).dump(2) + "\n", (dir / "registry.json").string());
  write_file_bytes((dir / "chain.bin").string(), serialize_chain(run.chain));
  std::ostringstream log;
  for (const auto& o : run.outcomes) {
    if (o.evidence)
      write_file_bytes((dir / ("evidence_" + std::to_string(o.interval_index) + ".bin")).string(),
                       serialize_evidence(*o.evidence));
    for (const auto& rec : o.log) log << rec.to_json().dump() << "\n";
  }
  write_output(log.str(), (dir / "run.log").string());
}

int cmd_run(const RunOptions& opt) {
  std::vector<ScenarioConfig> configs;
  if (!opt.scenario.empty() || !opt.scenario_file.empty()) {
    configs.push_back(resolve_scenario(opt.scenario, opt.scenario_file, opt.seed));
  } else if (opt.table) {
    for (const auto& name : builtin_scenario_names()) configs.push_back(resolve_scenario(name, "", opt.seed));
  } else {
    throw InputError("run needs --scenario, --scenario-file, or --table");
  }

  std::vector<Summary> summaries;
  for (const auto& cfg : configs) summaries.push_back(monte_carlo(cfg, opt.iterations, opt.jobs));
  if (!opt.emit.empty()) emit_artifacts(configs.front(), opt.emit);

  std::ostringstream text;
  if (opt.table) {
    std::vector<ReportRow> rows;
    for (const auto& s : summaries) rows.push_back(ReportRow::from(s));
    text << render_table(rows);
  } else if (opt.format == "csv") {
    write_summary_csv(text, summaries);
  } else if (summaries.size() == 1) {
    text << summary_to_json(summaries.front()).dump(2) << "\n";
  } else {
    ordered_json arr = ordered_json::array();
    for (const auto& s : summaries) arr.push_back(summary_to_json(s));
    text << arr.dump(2) << "\n";
  }
  write_output(text.str(), opt.out);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct HeatmapOptions {
  GridSpec grid;
  std::string mode = "analytic";
  int samples = 10000;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out;
  std::string scenario_file;
};

int cmd_heatmap(const HeatmapOptions& opt) {
  ZoneConfig zone;
  if (!opt.scenario_file.empty()) zone = load_scenario_file(opt.scenario_file).zone;
  const HeatmapMode mode = opt.mode == "analytic" ? HeatmapMode::analytic : HeatmapMode::monte_carlo;
  const auto cells = heatmap(zone, opt.grid, mode, opt.samples, opt.seed, opt.jobs);
  std::ostringstream text;
  write_heatmap_csv(text, cells);
  write_output(text.str(), opt.out);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct VerifyOptions {
  std::string evidence;
  std::string registry;
  std::string chain;
};

int cmd_verify(const VerifyOptions& opt) {
  EvidenceObject ev;
  ZoneRegistry registry;
  std::optional<std::vector<Block>> chain;
  try {
    ev = deserialize_evidence(read_input_file(opt.evidence));
    const Bytes reg = read_input_file(opt.registry);
    registry = registry_from_json(ordered_json::parse(reg.begin(), reg.end()));
    if (!opt.chain.empty()) chain = deserialize_chain(read_input_file(opt.chain));
  } catch (const InputError&) {
    throw;
  } catch (const std::exception& e) {
    std::cout << "malformed: " << e.what() << "\n";
    return kExitInput;
  }
  std::optional<std::span<const Block>> blocks;
  if (chain) blocks = std::span<const Block>(*chain);
  const Verdict v = verify_evidence(ev, registry, registry.policies, blocks);
  std::cout << verdict_name(v.code);
  if (!v.detail.empty()) std::cout << ": " << v.detail;
  std::cout << "\n";
  return v.ok() ? kExitOk : kExitVerify;
}

// ---------------------------------------------------------------------------

struct CalibrateOptions {
  std::string target = "edge_admission";
  std::optional<double> value;
  std::optional<double> mp_sigma;
  std::optional<double> d_acc;
  std::string out;
};

int cmd_calibrate(const CalibrateOptions& opt) {
  ZoneConfig zone;
  if (opt.mp_sigma) zone.channel.mp_sigma = *opt.mp_sigma;
  if (opt.d_acc) zone.d_acc = *opt.d_acc;
  zone.validate();
  const bool edge = opt.target == "edge_admission";
  const double target = opt.value.value_or(edge ? 0.359 : 0.973);
  const CalibrationResult r =
      calibrate(edge ? CalibrationTarget::edge_admission : CalibrationTarget::visual_admission, target, zone);
  write_output(calibration_to_json(r).dump(2) + "\n", opt.out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Witnessing-zone proof-of-location simulator and evidence verifier"};
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run Monte Carlo iterations of a scenario");
  run_cmd->add_option("--scenario", run.scenario, "Built-in scenario name")
      ->check(CLI::IsMember(builtin_scenario_names()));
  run_cmd->add_option("--scenario-file", run.scenario_file, "Scenario YAML file");
  run_cmd->add_option("--seed", run.seed, "Master seed (default: file seed, else 0)");
  run_cmd->add_option("--iterations", run.iterations, "Monte Carlo iterations")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--jobs", run.jobs, "Worker threads; output does not depend on it")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  run_cmd->add_flag("--table", run.table, "Render the results table (all six scenarios if none given)");
  run_cmd->add_option("--format", run.format, "Summary format")
      ->capture_default_str()
      ->check(CLI::IsMember({"json", "csv"}));
  run_cmd->add_option("--out", run.out, "Write output here instead of standard output");
  run_cmd->add_option("--emit", run.emit, "Directory for registry, block log, evidence, and run log of iteration 0");
  run_cmd->get_option("--scenario")->excludes(run_cmd->get_option("--scenario-file"));

  HeatmapOptions hm;
  auto* hm_cmd = app.add_subcommand("heatmap", "Admission probability grid as CSV");
  hm_cmd->add_option("--x-min", hm.grid.x_min, "Grid lower x bound (m)")->capture_default_str();
  hm_cmd->add_option("--x-max", hm.grid.x_max, "Grid upper x bound (m)")->capture_default_str();
  hm_cmd->add_option("--y-min", hm.grid.y_min, "Grid lower y bound (m)")->capture_default_str();
  hm_cmd->add_option("--y-max", hm.grid.y_max, "Grid upper y bound (m)")->capture_default_str();
  hm_cmd->add_option("--step", hm.grid.step, "Grid step (m), must be > 0")->capture_default_str();
  hm_cmd->add_option("--mode", hm.mode, "analytic or monte_carlo")
      ->capture_default_str()
      ->check(CLI::IsMember({"analytic", "monte_carlo"}));
  hm_cmd->add_option("--samples", hm.samples, "Simulated claims per cell (monte_carlo)")->capture_default_str();
  hm_cmd->add_option("--seed", hm.seed, "Master seed")->capture_default_str();
  hm_cmd->add_option("--jobs", hm.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  hm_cmd->add_option("--out", hm.out, "CSV output path (default: standard output)");
  hm_cmd->add_option("--scenario-file", hm.scenario_file, "Take zone and channel settings from a scenario file");

  VerifyOptions vf;
  auto* vf_cmd = app.add_subcommand("verify", "Verify an evidence file against a zone registry");
  vf_cmd->add_option("--evidence", vf.evidence, "Evidence file")->required();
  vf_cmd->add_option("--registry", vf.registry, "Registry JSON file")->required();
  vf_cmd->add_option("--chain", vf.chain, "Block log file; enables the block-binding check");

  CalibrateOptions cal;
  auto* cal_cmd = app.add_subcommand("calibrate", "Solve for d_acc or p_det from a target admission rate");
  cal_cmd->add_option("--target", cal.target, "edge_admission or visual_admission")
      ->capture_default_str()
      ->check(CLI::IsMember({"edge_admission", "visual_admission"}));
  cal_cmd->add_option("--value", cal.value, "Target rate (default 0.359 edge, 0.973 visual)");
  cal_cmd->add_option("--mp-sigma", cal.mp_sigma, "Multipath sigma override (m)");
  cal_cmd->add_option("--d-acc", cal.d_acc, "Acceptance distance override (m), used by visual_admission");
  cal_cmd->add_option("--out", cal.out, "JSON output path (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*hm_cmd) return cmd_heatmap(hm);
    if (*vf_cmd) return cmd_verify(vf);
    if (*cal_cmd) return cmd_calibrate(cal);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const DecodeError& e) {
    std::cerr << "error: malformed input: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
