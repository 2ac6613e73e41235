#include "bsm/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace bsm {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(where + " must be a JSON object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) fail("unknown key '" + key + "' in " + where);
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) {
    try {
      out = obj.at(key).get<T>();
    } catch (const json::exception&) {
      fail(std::string("bad value type for '") + key + "'");
    }
  }
}

Bell parse_bell(const std::string& s) {
  for (Bell b : {Bell::phi_plus, Bell::phi_minus, Bell::psi_plus, Bell::psi_minus})
    if (s == to_string(b)) return b;
  fail("unknown Bell state '" + s + "'");
}

std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::simulate_bsm: return "simulate-bsm";
    case Scenario::optimize_pulse: return "optimize-pulse";
    case Scenario::tomography: return "tomography";
    case Scenario::sweep: return "sweep";
  }
  return "unknown";
}

ScenarioConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = text.empty() ? json::object() : json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte ? e.byte - 1 : 0);
    fail("config parse error at line " + std::to_string(line) + ", column " +
         std::to_string(col));
  }

  ScenarioConfig cfg;
  check_keys(root, "config",
             {"physics", "readout", "mode", "scenario", "trials", "seed",
              "out_dir", "tomography", "sweep", "grape"});

  if (root.contains("physics")) {
    const json& ph = root["physics"];
    check_keys(ph, "physics",
               {"d0_hz", "q_hz", "a_hz", "mw_carrier_hz", "rf_carrier_hz"});
    double d0 = 2.88e9, q = 4.95e6, a = 2.17e6;
    read(ph, "d0_hz", d0);
    read(ph, "q_hz", q);
    read(ph, "a_hz", a);
    cfg.physics = {kTwoPi * d0, kTwoPi * q, kTwoPi * a};
    cfg.frame = FrameSpec::resonant(cfg.physics);
    double mw = 0, rf = 0;
    read(ph, "mw_carrier_hz", mw);
    read(ph, "rf_carrier_hz", rf);
    if (mw > 0) cfg.frame.omega_mw = kTwoPi * mw;
    if (rf > 0) cfg.frame.omega_rf = kTwoPi * rf;
  } else {
    cfg.frame = FrameSpec::resonant(cfg.physics);
  }
  try {
    cfg.physics.validate();
  } catch (const std::exception& e) {
    fail(std::string("physics out of range: ") + e.what());
  }

  if (root.contains("readout")) {
    const json& rd = root["readout"];
    check_keys(rd, "readout",
               {"lambda_bright", "lambda_dark", "n_reps_bsm", "n_reps_qst",
                "n_c", "p_leak", "recover_plus_only", "p_deph_n", "park_bright",
                "phi_minus_by_elimination", "subrep_sampling"});
    auto& r = cfg.readout;
    read(rd, "lambda_bright", r.lambda_bright);
    read(rd, "lambda_dark", r.lambda_dark);
    read(rd, "n_reps_bsm", r.n_reps_bsm);
    read(rd, "n_reps_qst", r.n_reps_qst);
    read(rd, "n_c", r.n_c);
    read(rd, "p_leak", r.p_leak);
    read(rd, "recover_plus_only", r.recover_plus_only);
    read(rd, "p_deph_n", r.p_deph_n);
    read(rd, "park_bright", r.park_bright);
    read(rd, "phi_minus_by_elimination", r.phi_minus_by_elimination);
    read(rd, "subrep_sampling", r.subrep_sampling);
  }
  try {
    cfg.readout.validate();
  } catch (const std::exception& e) {
    fail(std::string("readout out of range: ") + e.what());
  }

  std::string mode = "ideal";
  read(root, "mode", mode);
  if (mode == "ideal")
    cfg.mode = Realization::ideal;
  else if (mode == "pulse")
    cfg.mode = Realization::pulse;
  else
    fail("mode must be 'ideal' or 'pulse'");

  std::string scenario = "simulate-bsm";
  read(root, "scenario", scenario);
  bool found = false;
  for (Scenario s : {Scenario::simulate_bsm, Scenario::optimize_pulse,
                     Scenario::tomography, Scenario::sweep})
    if (scenario == to_string(s)) {
      cfg.scenario = s;
      found = true;
    }
  if (!found) fail("unknown scenario '" + scenario + "'");

  read(root, "trials", cfg.trials);
  if (cfg.trials < 1) fail("trials must be >= 1");
  if (root.contains("seed")) {
    cfg.seed = root.at("seed").get<std::uint64_t>();
    cfg.seed_set = true;
  }
  read(root, "out_dir", cfg.out_dir);

  if (root.contains("tomography")) {
    const json& tm = root["tomography"];
    check_keys(tm, "tomography",
               {"prepared", "stage", "exact", "shots_per_setting"});
    std::string prepared = "phi_plus";
    read(tm, "prepared", prepared);
    cfg.tomography.prepared = parse_bell(prepared);
    read(tm, "stage", cfg.tomography.stage);
    if (cfg.tomography.stage != "bell" && cfg.tomography.stage != "after_cnot" &&
        cfg.tomography.stage != "after_hadamard")
      fail("tomography stage must be bell | after_cnot | after_hadamard");
    read(tm, "exact", cfg.tomography.exact);
    read(tm, "shots_per_setting", cfg.tomography.shots_per_setting);
    if (!cfg.tomography.exact && cfg.tomography.shots_per_setting < 1)
      fail("shots_per_setting must be >= 1 for sampled tomography");
  }

  if (root.contains("sweep")) {
    const json& sw = root["sweep"];
    check_keys(sw, "sweep", {"axis", "values"});
    read(sw, "axis", cfg.sweep.axis);
    if (cfg.sweep.axis != "n_c") fail("only sweep axis 'n_c' is supported");
    read(sw, "values", cfg.sweep.values);
    if (cfg.sweep.values.empty()) fail("sweep values must be non-empty");
    for (int v : cfg.sweep.values)
      if (v < 1) fail("sweep n_c values must be >= 1");
  }

  if (root.contains("grape")) {
    const json& gr = root["grape"];
    check_keys(gr, "grape",
               {"stages", "fid_goal", "max_iters", "mw_duration_s", "mw_slices",
                "rf_duration_s", "rf_slices", "amp_cap_mw_hz", "amp_cap_rf_hz"});
    read(gr, "stages", cfg.grape.stages);
    static const std::set<std::string> known = {
        "cnot", "hadamard", "map_pp", "map_pm", "map_mp", "map_mm"};
    for (const auto& s : cfg.grape.stages)
      if (!known.count(s)) fail("unknown grape stage '" + s + "'");
    read(gr, "fid_goal", cfg.grape.fid_goal);
    if (cfg.grape.fid_goal <= 0.0 || cfg.grape.fid_goal > 1.0)
      fail("grape fid_goal must lie in (0, 1]");
    read(gr, "max_iters", cfg.grape.max_iters);
    read(gr, "mw_duration_s", cfg.grape.grid.mw_duration);
    read(gr, "mw_slices", cfg.grape.grid.mw_slices);
    read(gr, "rf_duration_s", cfg.grape.grid.rf_duration);
    read(gr, "rf_slices", cfg.grape.grid.rf_slices);
    double cap_mw = 0, cap_rf = 0;
    read(gr, "amp_cap_mw_hz", cap_mw);
    read(gr, "amp_cap_rf_hz", cap_rf);
    if (cap_mw > 0) cfg.grape.amp_cap_mw = kTwoPi * cap_mw;
    if (cap_rf > 0) cfg.grape.amp_cap_rf = kTwoPi * cap_rf;
  }

  return cfg;
}

ScenarioConfig validate_config(const std::string& path) {
  if (path.empty()) return parse_config_text("");
  std::ifstream in(path);
  if (!in) fail("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string config_to_json(const ScenarioConfig& cfg) {
  json j;
  j["physics"] = {{"d0_hz", cfg.physics.d0 / kTwoPi},
                  {"q_hz", cfg.physics.q / kTwoPi},
                  {"a_hz", cfg.physics.a / kTwoPi},
                  {"mw_carrier_hz", cfg.frame.omega_mw / kTwoPi},
                  {"rf_carrier_hz", cfg.frame.omega_rf / kTwoPi}};
  const auto& r = cfg.readout;
  j["readout"] = {{"lambda_bright", r.lambda_bright},
                  {"lambda_dark", r.lambda_dark},
                  {"n_reps_bsm", r.n_reps_bsm},
                  {"n_reps_qst", r.n_reps_qst},
                  {"n_c", r.n_c},
                  {"p_leak", r.p_leak},
                  {"recover_plus_only", r.recover_plus_only},
                  {"p_deph_n", r.p_deph_n},
                  {"park_bright", r.park_bright},
                  {"phi_minus_by_elimination", r.phi_minus_by_elimination},
                  {"subrep_sampling", r.subrep_sampling}};
  j["mode"] = cfg.mode == Realization::ideal ? "ideal" : "pulse";
  j["scenario"] = to_string(cfg.scenario);
  j["trials"] = cfg.trials;
  // out_dir is deliberately not echoed: outputs must be byte-identical for
  // the same seed no matter where they land.
  if (cfg.seed_set) j["seed"] = cfg.seed;
  j["tomography"] = {{"prepared", to_string(cfg.tomography.prepared)},
                     {"stage", cfg.tomography.stage},
                     {"exact", cfg.tomography.exact},
                     {"shots_per_setting", cfg.tomography.shots_per_setting}};
  j["sweep"] = {{"axis", cfg.sweep.axis}, {"values", cfg.sweep.values}};
  j["grape"] = {{"stages", cfg.grape.stages},
                {"fid_goal", cfg.grape.fid_goal},
                {"max_iters", cfg.grape.max_iters},
                {"mw_duration_s", cfg.grape.grid.mw_duration},
                {"mw_slices", cfg.grape.grid.mw_slices},
                {"rf_duration_s", cfg.grape.grid.rf_duration},
                {"rf_slices", cfg.grape.grid.rf_slices},
                {"amp_cap_mw_hz", cfg.grape.amp_cap_mw / kTwoPi},
                {"amp_cap_rf_hz", cfg.grape.amp_cap_rf / kTwoPi}};
  return j.dump(2);
}

}  // namespace bsm
