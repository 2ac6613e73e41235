#include "bsm/scenarios.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include <json.hpp>

namespace bsm {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::ofstream open_out(const fs::path& dir, const std::string& name,
                       ScenarioReport& rep) {
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
  rep.files.push_back(name);
  return out;
}

void write_config_echo(const ScenarioConfig& cfg, const fs::path& dir,
                       ScenarioReport& rep) {
  auto out = open_out(dir, "resolved_config.json", rep);
  out << config_to_json(cfg) << "\n";
}

constexpr std::array<Bell, 4> kPreps = {Bell::phi_plus, Bell::psi_plus,
                                        Bell::psi_minus, Bell::phi_minus};

struct McResult {
  std::array<long, 5> label_counts{};
  // (measurement index, photon count) -> occurrences
  std::map<std::pair<int, long>, long> hist;
  std::array<double, 4> mean_counts{};
};

McResult mc_run(const Mat& rho_dis, Bell prepared, const ReadoutParams& rp,
                long trials, std::uint64_t trial_base, std::ostream* log,
                const std::array<Mat, 4>& maps) {
  McResult res;
  for (long t = 0; t < trials; ++t) {
    Rng rng = trial_rng(rp.seed, trial_base + static_cast<std::uint64_t>(t));
    const BsmOutcome oc = run_bsm(rho_dis, rp, maps, rng);
    res.label_counts[static_cast<int>(oc.label)]++;
    for (int m = 0; m < 4; ++m) {
      res.hist[{m, oc.counts[m]}]++;
      res.mean_counts[m] += static_cast<double>(oc.counts[m]);
    }
    if (log) {
      json line = {{"trial", trial_base + static_cast<std::uint64_t>(t)},
                   {"prepared", to_string(prepared)},
                   {"n1", oc.counts[0]},
                   {"n2", oc.counts[1]},
                   {"n3", oc.counts[2]},
                   {"n4", oc.counts[3]},
                   {"label", to_string(oc.label)}};
      *log << line.dump() << "\n";
    }
  }
  for (auto& m : res.mean_counts) m /= static_cast<double>(trials);
  return res;
}

struct Realized {
  Mat disentangle;
  std::array<Mat, 4> maps;
  std::vector<SynthesisReport> reports;
};

Realized realize_pipeline(const ScenarioConfig& cfg) {
  Realized r;
  if (cfg.mode == Realization::ideal) {
    r.disentangle = disentangle_ideal();
    r.maps = ideal_bsm_maps();
    return r;
  }
  SynthesisOptions opts{cfg.grape.grid, cfg.grape.fid_goal, cfg.grape.max_iters,
                        cfg.grape.amp_cap_mw, cfg.grape.amp_cap_rf};
  SynthesisReport cnot_rep;
  GateStage cnot = cnot_stage(cfg.physics, cfg.frame, opts, &cnot_rep);
  r.reports.push_back(cnot_rep);
  GateStage had = hadamard_N_stage(cfg.physics, cfg.frame, opts, &r.reports);
  r.disentangle = realize_stage(had, Realization::pulse, cfg.physics, cfg.frame) *
                  realize_stage(cnot, Realization::pulse, cfg.physics, cfg.frame);
  for (int i = 0; i < 4; ++i) {
    GateStage st = map_stage(disentangled_basis(bsm_measurement_order()[i]),
                             cfg.physics, cfg.frame, opts, &r.reports);
    r.maps[i] = realize_stage(st, Realization::pulse, cfg.physics, cfg.frame);
  }
  return r;
}

void require_seed(const ScenarioConfig& cfg) {
  if (!cfg.seed_set)
    throw ConfigError("seed is mandatory for stochastic scenarios");
}

ScenarioReport run_simulate(const ScenarioConfig& cfg, const fs::path& dir) {
  ScenarioReport rep;
  require_seed(cfg);
  write_config_echo(cfg, dir, rep);

  ReadoutParams rp = cfg.readout;
  rp.seed = cfg.seed;
  const Realized rz = realize_pipeline(cfg);

  auto outcomes = open_out(dir, "outcomes.jsonl", rep);
  json summary;
  summary["trials_per_preparation"] = cfg.trials;
  summary["mode"] = cfg.mode == Realization::ideal ? "ideal" : "pulse";
  std::vector<McResult> results;
  for (std::size_t pi = 0; pi < kPreps.size(); ++pi) {
    const Bell prep = kPreps[pi];
    const Mat rho = prepare_bell(prep);
    const Mat rho_dis = rz.disentangle * rho * rz.disentangle.adjoint();
    const std::uint64_t base = static_cast<std::uint64_t>(pi) *
                              static_cast<std::uint64_t>(cfg.trials);
    McResult mc = mc_run(rho_dis, prep, rp, cfg.trials, base, &outcomes, rz.maps);
    const auto oracle = cascade_probabilities(rp, prep);
    json entry;
    for (int l = 0; l < 5; ++l) {
      const char* name = to_string(static_cast<BsmLabel>(l));
      entry["frequency"][name] =
          static_cast<double>(mc.label_counts[l]) / static_cast<double>(cfg.trials);
      entry["oracle"][name] = oracle[l];
    }
    for (int m = 0; m < 4; ++m)
      entry["mean_counts"].push_back(mc.mean_counts[m]);
    summary["preparations"][to_string(prep)] = entry;
    results.push_back(std::move(mc));
  }
  {
    auto hist = open_out(dir, "histograms.csv", rep);
    hist << "prepared,measurement,count,occurrences\n";
    for (std::size_t pi = 0; pi < kPreps.size(); ++pi)
      for (const auto& [key, occ] : results[pi].hist)
        hist << to_string(kPreps[pi]) << "," << key.first + 1 << ","
             << key.second << "," << occ << "\n";
  }
  auto sum = open_out(dir, "summary.json", rep);
  sum << summary.dump(2) << "\n";
  rep.message = "simulate-bsm complete";
  return rep;
}

ScenarioReport run_optimize(const ScenarioConfig& cfg, const fs::path& dir) {
  ScenarioReport rep;
  write_config_echo(cfg, dir, rep);
  SynthesisOptions opts{cfg.grape.grid, cfg.grape.fid_goal, cfg.grape.max_iters,
                        cfg.grape.amp_cap_mw, cfg.grape.amp_cap_rf};

  std::vector<SynthesisReport> reports;
  std::vector<std::pair<std::string, const ControlSet*>> exports;
  std::vector<GateStage> stages;
  stages.reserve(cfg.grape.stages.size());
  for (const std::string& name : cfg.grape.stages) {
    if (name == "cnot") {
      SynthesisReport r;
      stages.push_back(cnot_stage(cfg.physics, cfg.frame, opts, &r));
      reports.push_back(r);
    } else if (name == "hadamard") {
      stages.push_back(hadamard_N_stage(cfg.physics, cfg.frame, opts, &reports));
    } else {
      Bell b = Bell::phi_plus;
      if (name == "map_pm") b = Bell::phi_minus;
      if (name == "map_mp") b = Bell::psi_plus;
      if (name == "map_mm") b = Bell::psi_minus;
      stages.push_back(map_stage(disentangled_basis(b), cfg.physics, cfg.frame,
                                 opts, &reports));
    }
  }
  for (const GateStage& st : stages)
    for (std::size_t k = 0; k < st.pulses.size(); ++k) {
      std::string fname = "pulse_" + st.label + "_" +
                          std::to_string(k) + ".json";
      auto out = open_out(dir, fname, rep);
      out << pulse_to_json(st.pulses[k]) << "\n";
    }

  double worst = 1.0;
  json jrep = json::array();
  for (const SynthesisReport& r : reports) {
    worst = std::min(worst, r.fidelity);
    jrep.push_back({{"stage", r.stage},
                    {"fidelity", r.fidelity},
                    {"status", to_string(r.status)},
                    {"iterations", r.iterations}});
  }
  auto out = open_out(dir, "synthesis_report.json", rep);
  out << json{{"fid_goal", cfg.grape.fid_goal}, {"stages", jrep}}.dump(2)
      << "\n";
  if (worst < cfg.grape.fid_goal) {
    rep.exit_code = 3;
    rep.message = "fidelity goal not met; best " + fmt(worst);
  } else {
    rep.message = "all stages converged";
  }
  return rep;
}

ScenarioReport run_tomography(const ScenarioConfig& cfg, const fs::path& dir) {
  ScenarioReport rep;
  if (!cfg.tomography.exact) require_seed(cfg);
  write_config_echo(cfg, dir, rep);

  ReadoutParams rp = cfg.readout;
  rp.seed = cfg.seed;
  Mat u = Mat::Identity(9, 9);
  if (cfg.tomography.stage != "bell") {
    if (cfg.mode == Realization::ideal) {
      u = cfg.tomography.stage == "after_cnot" ? cnot_ideal()
                                               : disentangle_ideal();
    } else {
      SynthesisOptions opts{cfg.grape.grid, cfg.grape.fid_goal,
                            cfg.grape.max_iters, cfg.grape.amp_cap_mw,
                            cfg.grape.amp_cap_rf};
      GateStage cnot = cnot_stage(cfg.physics, cfg.frame, opts);
      u = realize_stage(cnot, Realization::pulse, cfg.physics, cfg.frame);
      if (cfg.tomography.stage == "after_hadamard") {
        GateStage had = hadamard_N_stage(cfg.physics, cfg.frame, opts);
        u = realize_stage(had, Realization::pulse, cfg.physics, cfg.frame) * u;
      }
    }
  }

  const Mat rho0 = prepare_bell(cfg.tomography.prepared);
  const Mat rho = u * rho0 * u.adjoint();
  // Logical target from the ideal chain, for the fidelity report.
  Mat u_ideal = Mat::Identity(9, 9);
  if (cfg.tomography.stage == "after_cnot") u_ideal = cnot_ideal();
  if (cfg.tomography.stage == "after_hadamard") u_ideal = disentangle_ideal();
  const Vec psi = u_ideal * bell_ket(cfg.tomography.prepared);
  Eigen::Vector4cd target;
  for (int l = 0; l < 4; ++l) target(l) = psi(kLogicalIndices[l]);
  target.normalize();

  Rng rng = trial_rng(cfg.seed, 0);
  const TomographyResult tr =
      qst(rho, target, rp, cfg.tomography.shots_per_setting,
          cfg.tomography.exact, rng);

  {
    auto re = open_out(dir, "rho_real.csv", rep);
    auto im = open_out(dir, "rho_imag.csv", rep);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        re << fmt(tr.rho_hat(i, j).real()) << (j == 3 ? "\n" : ",");
        im << fmt(tr.rho_hat(i, j).imag()) << (j == 3 ? "\n" : ",");
      }
    }
  }
  auto out = open_out(dir, "tomography.json", rep);
  out << json{{"prepared", to_string(cfg.tomography.prepared)},
              {"stage", cfg.tomography.stage},
              {"exact", cfg.tomography.exact},
              {"shots_per_setting", cfg.tomography.shots_per_setting},
              {"fidelity", tr.fidelity_to_target},
              {"settings_used", tr.settings_used}}
             .dump(2)
      << "\n";
  rep.message = "tomography fidelity " + fmt(tr.fidelity_to_target);
  return rep;
}

ScenarioReport run_sweep(const ScenarioConfig& cfg, const fs::path& dir) {
  ScenarioReport rep;
  require_seed(cfg);
  write_config_echo(cfg, dir, rep);

  const Realized rz = realize_pipeline(cfg);
  auto csv = open_out(dir, "sweep.csv", rep);
  csv << "n_c,dark_false_positive";
  for (Bell b : kPreps)
    csv << ",correct_" << to_string(b) << ",oracle_" << to_string(b);
  csv << "\n";
  for (std::size_t vi = 0; vi < cfg.sweep.values.size(); ++vi) {
    ReadoutParams rp = cfg.readout;
    rp.seed = cfg.seed;
    rp.n_c = cfg.sweep.values[vi];
    csv << rp.n_c << "," << fmt(poisson_tail(rp.lambda_dark, rp.n_c));
    for (std::size_t pi = 0; pi < kPreps.size(); ++pi) {
      const Bell prep = kPreps[pi];
      const Mat rho = prepare_bell(prep);
      const Mat rho_dis = rz.disentangle * rho * rz.disentangle.adjoint();
      const std::uint64_t base =
          (static_cast<std::uint64_t>(vi) * kPreps.size() + pi) *
          static_cast<std::uint64_t>(cfg.trials);
      McResult mc =
          mc_run(rho_dis, prep, rp, cfg.trials, base, nullptr, rz.maps);
      const auto oracle = cascade_probabilities(rp, prep);
      const int li = static_cast<int>(pi);  // kPreps follows label order
      csv << "," << fmt(static_cast<double>(mc.label_counts[li]) /
                        static_cast<double>(cfg.trials))
          << "," << fmt(oracle[li]);
    }
    csv << "\n";
  }
  rep.message = "sweep complete";
  return rep;
}

}  // namespace

ScenarioReport run_scenario(const ScenarioConfig& cfg) {
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  switch (cfg.scenario) {
    case Scenario::simulate_bsm: return run_simulate(cfg, dir);
    case Scenario::optimize_pulse: return run_optimize(cfg, dir);
    case Scenario::tomography: return run_tomography(cfg, dir);
    case Scenario::sweep: return run_sweep(cfg, dir);
  }
  throw std::logic_error("unreachable scenario");
}

}  // namespace bsm
