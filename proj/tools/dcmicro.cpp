#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dcmicro/corpus.hpp"
#include "dcmicro/errors.hpp"
#include "dcmicro/experiment.hpp"
#include "dcmicro/log.hpp"
#include "dcmicro/parallel.hpp"

namespace {

constexpr int exit_pass = 0;
constexpr int exit_contract = 1;
constexpr int exit_config = 2;

int run(const std::string& config_path, const std::string& out_dir, std::optional<std::uint64_t> seed, bool quiet) {
  using namespace dcmicro;
  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  }
  if (seed) cfg.seed = *seed;
  if (quiet) set_warnings_enabled(false);

  RunResult res;
  try {
    res = run_experiment(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  }
  try {
    write_artifacts(cfg, res, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "cannot write artifacts: " << e.what() << "\n";
    return exit_contract;
  }

  if (res.summary.contains("error")) std::cout << cfg.name << ": error: " << res.summary["error"].get<std::string>() << "\n";
  for (const auto& a : res.assertions)
    std::cout << (a.pass ? "PASS " : "FAIL ") << a.assertion.metric << " " << a.assertion.op << " "
              << a.assertion.expected.dump() << " (actual " << a.actual.dump() << ")\n";
  std::cout << cfg.name << ": " << (res.pass ? "pass" : "FAIL") << "  ->  " << out_dir << "\n";
  return res.pass ? exit_pass : exit_contract;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dcmicro: Denjoy-Carleman classes, almost-analytic extensions and FBI transforms"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "OpenMP threads (0: runtime default, 1: serial reference)")
      ->check(CLI::NonNegativeNumber);

  auto* run_cmd = app.add_subcommand("run", "Run an experiment config");
  std::string config_path, out_dir = "dcmicro_out";
  std::uint64_t seed = 0;
  bool quiet = false;
  run_cmd->add_option("config", config_path, "Experiment config (JSON, comments allowed)")->required();
  run_cmd->add_option("--out", out_dir, "Output directory");
  auto* seed_opt = run_cmd->add_option("--seed", seed, "Overrides the config seed");
  run_cmd->add_flag("--quiet", quiet, "Suppress numerical warnings");

  auto* list_cmd = app.add_subcommand("list", "List corpus functions, members, charts and systems");
  std::string filter;
  list_cmd->add_option("filter", filter, "Substring of the category or name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config;
  }

  if (threads == 1) {
    dcmicro::set_parallel(false);
  } else if (threads > 1) {
    dcmicro::set_threads(threads);
  }

  if (*list_cmd) {
    std::cout << dcmicro::format_corpus_table(dcmicro::list_corpus(filter));
    return exit_pass;
  }
  std::optional<std::uint64_t> s;
  if (*seed_opt) s = seed;
  return run(config_path, out_dir, s, quiet);
}
