#pragma once

#include "bsm/config.hpp"

// Config-driven scenario runner: BSM Monte-Carlo, pulse synthesis,
// tomography and threshold sweeps, with every stochastic report embedding
// its closed-form oracle next to the measured frequencies.

namespace bsm {

struct ScenarioReport {
  int exit_code = 0;  // 0 success, 2 config error, 3 goal not met
  std::string message;
  std::vector<std::string> files;  // paths written, relative to out_dir
};

/// Runs cfg.scenario and writes its report files into cfg.out_dir
/// (resolved_config.json is always among them). Throws ConfigError for
/// invalid configs; other failures surface as std::runtime_error.
ScenarioReport run_scenario(const ScenarioConfig& cfg);

}  // namespace bsm
