// Benchmark and verification driver: generates instances, runs the solver
// and the baselines, checks the structural properties of the runs, and emits
// machine-readable results.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pardg/pardg.hpp"

namespace {

namespace fs = std::filesystem;

pardg::ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  in >> j;
  return pardg::config_from_json(j);
}

void apply_overrides(pardg::ExperimentConfig& config,
                     const std::optional<std::uint64_t>& seed,
                     const std::vector<double>& epsilons, bool timing) {
  if (seed) config.seed = *seed;
  if (!epsilons.empty()) config.epsilons = epsilons;
  if (timing) config.timing = true;
  pardg::validate_experiment_config(config);
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
}

int run_gen(const pardg::ExperimentConfig& config, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  for (std::uint32_t i = 0; i < config.num_instances; ++i) {
    std::ostringstream body;
    fs::path file;
    if (config.family == pardg::InstanceFamily::QuadraticDr) {
      pardg::QuadraticGenParams params{config.n, config.edge_probability};
      pardg::write_quadratic(
          body, pardg::generate_quadratic_instance(params, config.seed, i));
      file = out_dir / ("instance_" + std::to_string(i) + ".qdr");
    } else {
      pardg::CutGenParams params{
          config.n, config.edge_probability, config.weight_max,
          config.family == pardg::InstanceFamily::DirectedCut,
          config.unit_weights};
      pardg::write_graph(body,
                         pardg::generate_cut_instance(params, config.seed, i));
      file = out_dir / ("instance_" + std::to_string(i) + ".graph");
    }
    write_file(file, body.str());
  }
  std::cout << "wrote " << config.num_instances << " instance files to "
            << out_dir.string() << "\n";
  return 0;
}

int run_run(const pardg::ExperimentConfig& config, const fs::path& out_dir,
            bool verify, bool strict) {
  fs::create_directories(out_dir);
  pardg::ExperimentResult result = pardg::run_experiment(config, verify);

  std::ostringstream csv;
  pardg::write_results_csv(csv, result.rows);
  write_file(out_dir / "results.csv", csv.str());

  auto summary = pardg::emit_summary(result.rows);
  std::ostringstream text;
  pardg::write_summary_text(text, summary);
  write_file(out_dir / "summary.txt", text.str());
  write_file(out_dir / "summary.json",
             pardg::summary_to_json(summary).dump(2) + "\n");
  std::cout << text.str();

  if (verify) {
    std::ostringstream checks;
    pardg::write_reports_jsonl(checks, result.reports);
    write_file(out_dir / "checks.jsonl", checks.str());
    const fs::path trace_dir = out_dir / "traces";
    fs::create_directories(trace_dir);
    for (const auto& [name, trace] : result.traces) {
      std::ostringstream tr;
      pardg::write_trace_csv(tr, trace);
      write_file(trace_dir / (name + ".csv"), tr.str());
    }
    std::size_t failed = 0;
    for (const auto& rep : result.reports) {
      if (!rep.passed) ++failed;
    }
    std::cout << result.reports.size() << " checks, " << failed << " failed\n";
    if (strict && failed > 0) return 1;
  }
  return 0;
}

int run_verify(const pardg::ExperimentConfig& config, const fs::path& out_dir,
               bool strict) {
  fs::create_directories(out_dir);
  pardg::ExperimentResult result = pardg::run_experiment(config, true);
  std::ostringstream checks;
  pardg::write_reports_jsonl(checks, result.reports);
  write_file(out_dir / "checks.jsonl", checks.str());
  std::size_t failed = 0;
  for (const auto& rep : result.reports) {
    if (!rep.passed) {
      ++failed;
      std::cout << "FAIL " << rep.name << " worst_violation "
                << pardg::format_double(rep.worst_violation) << "\n";
    }
  }
  std::cout << result.reports.size() << " checks, " << failed << " failed\n";
  return strict && failed > 0 ? 1 : 0;
}

int run_summary(const std::string& results_path,
                const std::optional<std::string>& json_path) {
  std::ifstream in(results_path);
  if (!in) throw std::runtime_error("cannot open " + results_path);
  auto rows = pardg::read_results_csv(in);
  auto summary = pardg::emit_summary(rows);
  std::ostringstream text;
  pardg::write_summary_text(text, summary);
  std::cout << text.str();
  if (json_path) {
    write_file(*json_path, pardg::summary_to_json(summary).dump(2) + "\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"parallel double greedy benchmark harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::vector<double> epsilons;
  bool strict = false;
  bool verify = false;
  bool timing = false;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* opt = cmd->add_option("--config", config_path, "JSON config file");
    if (needs_config) opt->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "override the config seed");
    cmd->add_option("--epsilon", epsilons, "override the config epsilon list");
  };

  auto* gen = app.add_subcommand("gen", "write instance files");
  add_common(gen, true);

  auto* run = app.add_subcommand("run", "run the configured experiment");
  add_common(run, true);
  run->add_flag("--verify", verify, "also run the property checkers");
  run->add_flag("--strict", strict, "exit nonzero if any check fails");
  run->add_flag("--timing", timing, "record wall times (breaks byte determinism)");

  auto* ver = app.add_subcommand("verify", "run only the property checkers");
  add_common(ver, true);
  ver->add_flag("--strict", strict, "exit nonzero if any check fails");

  std::string results_path;
  std::optional<std::string> summary_json;
  auto* sum = app.add_subcommand("summary", "aggregate a results CSV");
  sum->add_option("--results", results_path, "results.csv path")->required();
  sum->add_option("--json", summary_json, "also write the aggregate as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed() || run->parsed() || ver->parsed()) {
      pardg::ExperimentConfig config = load_config(config_path);
      apply_overrides(config, seed, epsilons, timing);
      if (gen->parsed()) return run_gen(config, out_dir);
      if (run->parsed()) return run_run(config, out_dir, verify, strict);
      return run_verify(config, out_dir, strict);
    }
    return run_summary(results_path, summary_json);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
