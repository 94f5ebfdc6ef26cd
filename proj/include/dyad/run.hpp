#pragma once

#include <string>

#include <json.hpp>

#include "dyad/config.hpp"
#include "dyad/construction.hpp"

namespace dyad::cli {

/// Construction parameters sufficient to reproduce bit-comparable
/// evaluations: model, partition, bump amplitudes, c0, d0, rho, grid M, j_max.
nlohmann::ordered_json construction_manifest(const ConstructedSolution& s);

/// Rebuilds the solution deterministically from its manifest.
ConstructedSolution construction_from_manifest(const nlohmann::json& j);

struct RunOutcome {
  int exit_code = 0;
  std::string metric_name;
  double metric = 0.0;
};

/// Executes one resolved command and writes its artifacts into
/// settings.out_dir: trajectory.csv, report.json, manifest.json (plus
/// per-point directories and summary.csv for sweep).
RunOutcome run_command(const RunSettings& settings, const RawConfig& raw);

/// Whole CLI: parse flags, load config, dispatch; returns the process
/// exit code (0 ok, 1 verification failure, 2 config error, 3 numeric
/// failure).
int main_entry(int argc, char** argv);

}  // namespace dyad::cli
