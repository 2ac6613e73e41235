#pragma once

#include <string>

#include "bsm/readout.hpp"

// Scenario configuration: a single strict-schema JSON file with defaults
// filled in and echoed back for provenance.

namespace bsm {

enum class Scenario { simulate_bsm, optimize_pulse, tomography, sweep };

const char* to_string(Scenario s);

struct TomographyConfig {
  Bell prepared = Bell::phi_plus;
  std::string stage = "after_hadamard";  // bell | after_cnot | after_hadamard
  bool exact = false;
  long shots_per_setting = 10000;
};

struct SweepConfig {
  std::string axis = "n_c";
  std::vector<int> values = {1, 2, 3};
};

struct GrapeConfig {
  std::vector<std::string> stages = {"cnot"};
  double fid_goal = 0.99;
  int max_iters = 4000;
  PulseGrid grid;
  double amp_cap_mw = kMwAmpCap;
  double amp_cap_rf = kRfAmpCap;
};

struct ScenarioConfig {
  StaticParams physics;
  FrameSpec frame{0.0, 0.0};  // resolved to resonant defaults
  ReadoutParams readout;
  Realization mode = Realization::ideal;
  Scenario scenario = Scenario::simulate_bsm;
  long trials = 100000;
  bool seed_set = false;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  TomographyConfig tomography;
  SweepConfig sweep;
  GrapeConfig grape;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses and validates a config file; unknown keys are rejected by name,
/// parse errors are reported with line/column. An empty path yields the
/// defaults (the documented physical constants).
ScenarioConfig validate_config(const std::string& path);

/// Same, from an in-memory JSON text.
ScenarioConfig parse_config_text(const std::string& text);

/// Fully-resolved config as JSON (the provenance echo).
std::string config_to_json(const ScenarioConfig& cfg);

}  // namespace bsm
