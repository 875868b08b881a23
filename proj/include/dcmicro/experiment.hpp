#pragma once

// Config-driven experiments behind the dcmicro CLI.
//
// A config is a JSON document (comments allowed):
//   {"kind": "extend", "name": "...", "sequence": {"kind": "gevrey", "s": 2},
//    "seed": 1, ...kind parameters..., "assert": {"metric": {"<=": 1e-7}, "flag": true}}
// Running it yields CSV tables, a JSON summary and the assertion verdicts.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace dcmicro {

struct Table {
  std::string name;  // file stem
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// RFC 4180: CRLF line ends, fields quoted when they hold ',', '"', CR or LF.
std::string to_csv(const Table& t);
// Shortest round-trip decimal form.
std::string format_number(double x);

struct Assertion {
  std::string metric;
  std::string op;  // "<=", ">=", "<", ">", "=="
  nlohmann::json expected;
};

struct AssertionResult {
  Assertion assertion;
  nlohmann::json actual;
  bool pass = false;
};

struct ExperimentConfig {
  std::string kind;
  std::string name;
  std::uint64_t seed = 0;
  nlohmann::json params;  // the whole document
  std::vector<Assertion> assertions;
};

const std::vector<std::string>& experiment_kinds();

// Throws ConfigError on malformed input, unknown kinds, corpus names or metrics.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

struct RunResult {
  nlohmann::json summary;
  nlohmann::json metrics;
  std::vector<Table> tables;
  std::vector<AssertionResult> assertions;
  bool pass = true;
};

// Numerical failures inside the run are reported as failed contracts, not thrown.
RunResult run_experiment(const ExperimentConfig& cfg);

// Writes <name>.json, one CSV per table and, when an assertion fails, failures.json.
void write_artifacts(const ExperimentConfig& cfg, const RunResult& res, const std::filesystem::path& out_dir);

}  // namespace dcmicro
