#include "bsm/circuits.hpp"

#include <cmath>
#include <stdexcept>

namespace bsm {

namespace {

constexpr cxd kMinusI{0.0, -1.0};

// I3 - 2|0><0| - 2|b><b| on a single qutrit; index 1 is the |0> ancilla.
Mat reflection3(const BrightState& b) {
  const Eigen::Vector3cd bk = bright_ket(b);
  Mat r = Mat::Identity(3, 3);
  r(1, 1) = -1.0;
  r -= 2.0 * bk * bk.adjoint();
  return r;
}

// 3x3 pi pulse on the {i0, i1} pair: [[0, -i], [-i, 0]], identity elsewhere.
Mat pi_swap3(int i0, int i1) {
  Mat u = Mat::Identity(3, 3);
  u(i0, i0) = u(i1, i1) = 0.0;
  u(i0, i1) = u(i1, i0) = kMinusI;
  return u;
}

// Nitrogen operator applied only within the m_s = 0 manifold.
Mat cond_ms0(const Mat& op3) {
  Mat u = Mat::Identity(9, 9);
  u.block(3, 3, 3, 3) = op3;
  return u;
}

// MW pi transfer |ms, mi> <-> |0, mi>, frequency-selective on mi.
Mat cond_mw_pi(int ms, int mi) {
  const int a = basis_index({ms, mi});
  const int b = basis_index({0, mi});
  Mat u = Mat::Identity(9, 9);
  u(a, a) = u(b, b) = 0.0;
  u(a, b) = u(b, a) = kMinusI;
  return u;
}

// Pi transfer |0>_N -> |b>_N within the m_s = 0 manifold.
Mat rf_bright_transfer(const BrightState& b) {
  const Eigen::Vector3cd bk = bright_ket(b);
  Eigen::Vector3cd zero = Eigen::Vector3cd::Zero();
  zero(1) = 1.0;
  Mat u = Mat::Identity(3, 3);
  u -= zero * zero.adjoint() + bk * bk.adjoint();
  u += kMinusI * (bk * zero.adjoint() + zero * bk.adjoint());
  return cond_ms0(u);
}

Mat r0_ideal() { return cond_ms0(reflection3(kBrightH)); }

Mat projector_on(std::initializer_list<int> indices) {
  Mat p = Mat::Zero(9, 9);
  for (int i : indices) p(i, i) = 1.0;
  return p;
}

// All states with m_I = +-1 (shelving and RF-holonomy domain).
Mat nuclear_logical_projector() { return projector_on({0, 2, 3, 5, 6, 8}); }

// Logical subspace plus the m_s = 0 manifold (basis-mapping domain).
Mat readout_domain_projector() { return projector_on({0, 2, 3, 4, 5, 6, 8}); }

double level_energy(const Mat& h_rot, const BasisLabel& b) {
  return std::real(h_rot(basis_index(b), basis_index(b)));
}

// Adds a polarized drive with complex weight, Rabi frequency omega and
// frequency offset delta (quadratures sampled at slice midpoints).
void add_drive(ControlSet& cs, bool mw, int pol, cxd weight, double omega,
               double delta) {
  const int re = mw ? (pol > 0 ? kMwPlusRe : kMwMinusRe)
                    : (pol > 0 ? kRfPlusRe : kRfMinusRe);
  for (int j = 0; j < cs.n_slices; ++j) {
    const double t = (j + 0.5) * cs.dt;
    const cxd w = omega * weight * std::exp(cxd(0, -delta * t));
    cs.amps(re, j) += std::real(w);
    cs.amps(re + 1, j) += std::imag(w);
  }
}

// Nearest duration making the hyperfine free-evolution phase A*T a multiple
// of 2 pi: spectator levels a single-polarization MW pulse cannot reach then
// return to phase identically, instead of capping the subspace fidelity.
double hyperfine_commensurate(double t, const StaticParams& p) {
  const double fa = p.a / kTwoPi;
  const double n = std::max(1.0, std::round(t * fa));
  return n / fa;
}

OptConfig make_cfg(const SynthesisOptions& opts, bool mw_band) {
  OptConfig cfg;
  cfg.fid_goal = opts.fid_goal;
  cfg.max_iters = opts.max_iters;
  cfg.amp_cap_mw = opts.amp_cap_mw;
  cfg.amp_cap_rf = opts.amp_cap_rf;
  cfg.active = {false, false, false, false, false, false, false, false};
  (void)mw_band;
  return cfg;
}

void enable_pol(OptConfig& cfg, bool mw, int pol) {
  const int re = mw ? (pol > 0 ? kMwPlusRe : kMwMinusRe)
                    : (pol > 0 ? kRfPlusRe : kRfMinusRe);
  cfg.active[re] = cfg.active[re + 1] = true;
}

SynthesisReport run_synthesis(const std::string& label, ControlSet cs0,
                              const TargetSpec& target, const OptConfig& cfg,
                              const StaticParams& p, const FrameSpec& f,
                              ControlSet& out) {
  const OptResult r = optimize(cs0, target, cfg, p, f);
  out = r.controls;
  return {label, r.fidelity, r.status, r.iterations};
}

ControlSet synth_shelve(int ms, const StaticParams& p, const FrameSpec& f,
                        const SynthesisOptions& opts, SynthesisReport* rep) {
  const double dur = hyperfine_commensurate(opts.grid.mw_duration, p);
  const double dt = dur / opts.grid.mw_slices;
  ControlSet cs0 = ControlSet::zeros(dt, opts.grid.mw_slices);
  // Hard broadband pi pulse over the first few slices as a seed.
  const int n_hard = 3;
  const double omega = std::min(std::numbers::pi / (n_hard * dt), opts.amp_cap_mw);
  const int re = ms > 0 ? kMwPlusRe : kMwMinusRe;
  for (int j = 0; j < n_hard; ++j) cs0.amps(re, j) = omega;

  OptConfig cfg = make_cfg(opts, true);
  enable_pol(cfg, true, ms);
  const TargetSpec t =
      TargetSpec::subspace(shelve_ideal(ms), nuclear_logical_projector());
  ControlSet out;
  SynthesisReport r = run_synthesis(ms > 0 ? "shelve_plus" : "shelve_minus",
                                    cs0, t, cfg, p, f, out);
  if (rep) *rep = r;
  return out;
}

ControlSet synth_r0(const StaticParams& p, const FrameSpec& f,
                    const SynthesisOptions& opts, SynthesisReport* rep) {
  const double dt = opts.grid.rf_duration / opts.grid.rf_slices;
  ControlSet cs0 = ControlSet::zeros(dt, opts.grid.rf_slices);
  const double omega = kTwoPi / opts.grid.rf_duration;  // 2 pi cycle
  const cxd wp = std::cos(kBrightH.theta / 2.0);
  const cxd wm = std::exp(cxd(0, kBrightH.phi)) * std::sin(kBrightH.theta / 2.0);
  add_drive(cs0, false, +1, wp, omega, 0.0);
  add_drive(cs0, false, -1, wm, omega, 0.0);

  OptConfig cfg = make_cfg(opts, false);
  enable_pol(cfg, false, +1);
  enable_pol(cfg, false, -1);
  const TargetSpec t =
      TargetSpec::subspace(r0_ideal(), nuclear_logical_projector());
  ControlSet out;
  SynthesisReport r = run_synthesis("rf_hadamard", cs0, t, cfg, p, f, out);
  if (rep) *rep = r;
  return out;
}

ControlSet synth_cond_mw(int ms, int mi, const StaticParams& p,
                         const FrameSpec& f, const SynthesisOptions& opts,
                         SynthesisReport* rep) {
  const double dur = hyperfine_commensurate(opts.grid.mw_duration, p);
  const double dt = dur / opts.grid.mw_slices;
  ControlSet cs0 = ControlSet::zeros(dt, opts.grid.mw_slices);
  const Mat h_rot = rotating_hamiltonian(p, f);
  const double delta =
      level_energy(h_rot, {ms, mi}) - level_energy(h_rot, {0, mi});
  add_drive(cs0, true, ms, 1.0, std::numbers::pi / dur, delta);

  OptConfig cfg = make_cfg(opts, true);
  enable_pol(cfg, true, ms);
  const TargetSpec t =
      TargetSpec::subspace(cond_mw_pi(ms, mi), readout_domain_projector());
  ControlSet out;
  SynthesisReport r = run_synthesis("mw_cond", cs0, t, cfg, p, f, out);
  if (rep) *rep = r;
  return out;
}

ControlSet synth_cond_rf(int mi, const StaticParams& p, const FrameSpec& f,
                         const SynthesisOptions& opts, SynthesisReport* rep) {
  const double dt = opts.grid.rf_duration / opts.grid.rf_slices;
  ControlSet cs0 = ControlSet::zeros(dt, opts.grid.rf_slices);
  add_drive(cs0, false, mi, 1.0, std::numbers::pi / opts.grid.rf_duration, 0.0);

  OptConfig cfg = make_cfg(opts, false);
  enable_pol(cfg, false, mi);
  const TargetSpec t = TargetSpec::subspace(cond_ms0(pi_swap3(ord(mi), 1)),
                                            readout_domain_projector());
  ControlSet out;
  SynthesisReport r = run_synthesis("rf_cond", cs0, t, cfg, p, f, out);
  if (rep) *rep = r;
  return out;
}

}  // namespace

const char* to_string(Bell b) {
  switch (b) {
    case Bell::phi_plus: return "phi_plus";
    case Bell::phi_minus: return "phi_minus";
    case Bell::psi_plus: return "psi_plus";
    case Bell::psi_minus: return "psi_minus";
  }
  return "unknown";
}

Eigen::Vector3cd bright_ket(const BrightState& b) {
  Eigen::Vector3cd v = Eigen::Vector3cd::Zero();
  v(0) = std::cos(b.theta / 2.0);
  v(2) = std::exp(cxd(0, b.phi)) * std::sin(b.theta / 2.0);
  return v;
}

Eigen::Vector3cd dark_ket(const BrightState& b) {
  Eigen::Vector3cd v = Eigen::Vector3cd::Zero();
  v(0) = -std::exp(cxd(0, -b.phi)) * std::sin(b.theta / 2.0);
  v(2) = std::cos(b.theta / 2.0);
  return v;
}

Mat holonomy_reflection(const BrightState& b, Slot spin) {
  return embed(reflection3(b), spin);
}

Mat cnot_ideal() {
  Mat u = Mat::Identity(9, 9);
  const int a = basis_index({+1, -1});
  const int b = basis_index({-1, -1});
  u(a, a) = u(b, b) = 0.0;
  u(a, b) = u(b, a) = 1.0;
  return u;
}

Mat shelve_ideal(int ms) {
  if (ms != 1 && ms != -1)
    throw std::invalid_argument("shelve level must be +1 or -1");
  return embed(pi_swap3(ord(ms), 1), Slot::electron);
}

GateStage hadamard_N_sequence() {
  const Mat sp = shelve_ideal(+1);
  const Mat sm = shelve_ideal(-1);
  const Mat r0 = r0_ideal();
  GateStage st;
  st.label = "hadamard_N";
  st.ideal = sm * r0 * sm * sp * r0 * sp;
  return st;
}

Vec bell_ket(Bell which) {
  const double r = 1.0 / std::sqrt(2.0);
  Vec v = Vec::Zero(9);
  switch (which) {
    case Bell::phi_plus:
      v(basis_index({+1, +1})) = r;
      v(basis_index({-1, -1})) = r;
      break;
    case Bell::phi_minus:
      v(basis_index({+1, +1})) = r;
      v(basis_index({-1, -1})) = -r;
      break;
    case Bell::psi_plus:
      v(basis_index({+1, -1})) = r;
      v(basis_index({-1, +1})) = r;
      break;
    case Bell::psi_minus:
      v(basis_index({+1, -1})) = r;
      v(basis_index({-1, +1})) = -r;
      break;
  }
  return v;
}

Mat prepare_bell(Bell which) {
  const bool plus_family =
      (which == Bell::phi_plus || which == Bell::psi_plus);
  const bool phi_family =
      (which == Bell::phi_plus || which == Bell::phi_minus);
  const BrightState b{std::numbers::pi / 2.0,
                      plus_family ? 0.0 : std::numbers::pi};
  const int s_plus = phi_family ? +1 : -1;   // electron target for m_I = +1
  const int s_minus = -s_plus;               // and for m_I = -1
  const Mat u = cond_mw_pi(s_minus, -1) * cond_mw_pi(s_plus, +1) *
                rf_bright_transfer(b);
  const Vec psi = u * basis_ket({0, 0});
  return psi * psi.adjoint();
}

Mat disentangle_ideal() { return hadamard_N_sequence().ideal * cnot_ideal(); }

GateStage map_basis_to_readout(const BasisLabel& target) {
  if (target.ms == 0 || target.mi == 0)
    throw std::invalid_argument("readout mapping target must be a logical basis");
  GateStage st;
  st.label = std::string("map_") + (target.ms > 0 ? "p" : "m") +
             (target.mi > 0 ? "p" : "m");
  const Mat mw = cond_mw_pi(target.ms, target.mi);
  const Mat rf = cond_ms0(pi_swap3(ord(target.mi), 1));
  st.ideal = rf * mw;
  return st;
}

Mat realize_stage(const GateStage& stage, Realization via,
                  const StaticParams& p, const FrameSpec& f) {
  if (via == Realization::ideal) return stage.ideal;
  if (stage.pulses.empty())
    throw std::runtime_error("no pulse realization synthesized for stage " +
                             stage.label);
  Mat u = Mat::Identity(9, 9);
  for (const ControlSet& cs : stage.pulses) u = propagate(cs, p, f) * u;
  return u;
}

GateStage cnot_stage(const StaticParams& p, const FrameSpec& f,
                     const SynthesisOptions& opts, SynthesisReport* report) {
  const double dur = opts.grid.mw_duration;
  const double dt = dur / opts.grid.mw_slices;
  ControlSet cs0 = ControlSet::zeros(dt, opts.grid.mw_slices);
  const Mat h_rot = rotating_hamiltonian(p, f);
  const double omega = kTwoPi / dur;  // 2 pi holonomy cycle
  const cxd wp = std::cos(kBrightX.theta / 2.0);
  const cxd wm = std::exp(cxd(0, kBrightX.phi)) * std::sin(kBrightX.theta / 2.0);
  add_drive(cs0, true, +1, wp, omega,
            level_energy(h_rot, {+1, -1}) - level_energy(h_rot, {0, -1}));
  add_drive(cs0, true, -1, wm, omega,
            level_energy(h_rot, {-1, -1}) - level_energy(h_rot, {0, -1}));

  OptConfig cfg = make_cfg(opts, true);
  enable_pol(cfg, true, +1);
  enable_pol(cfg, true, -1);
  const TargetSpec t = TargetSpec::subspace(cnot_ideal(), logical_projector());

  GateStage st;
  st.label = "cnot";
  st.ideal = cnot_ideal();
  ControlSet out;
  SynthesisReport r = run_synthesis("cnot", cs0, t, cfg, p, f, out);
  st.pulses.push_back(out);
  if (report) *report = r;
  return st;
}

GateStage hadamard_N_stage(const StaticParams& p, const FrameSpec& f,
                           const SynthesisOptions& opts,
                           std::vector<SynthesisReport>* reports) {
  SynthesisReport rp, rm, rr;
  const ControlSet sp = synth_shelve(+1, p, f, opts, &rp);
  const ControlSet sm = synth_shelve(-1, p, f, opts, &rm);
  const ControlSet r0 = synth_r0(p, f, opts, &rr);
  GateStage st = hadamard_N_sequence();
  st.pulses = {sp, r0, sp, sm, r0, sm};
  if (reports) {
    reports->push_back(rp);
    reports->push_back(rm);
    reports->push_back(rr);
  }
  return st;
}

GateStage map_stage(const BasisLabel& target, const StaticParams& p,
                    const FrameSpec& f, const SynthesisOptions& opts,
                    std::vector<SynthesisReport>* reports) {
  SynthesisReport rmw, rrf;
  const ControlSet mw = synth_cond_mw(target.ms, target.mi, p, f, opts, &rmw);
  const ControlSet rf = synth_cond_rf(target.mi, p, f, opts, &rrf);
  GateStage st = map_basis_to_readout(target);
  st.pulses = {mw, rf};
  if (reports) {
    reports->push_back(rmw);
    reports->push_back(rrf);
  }
  return st;
}

}  // namespace bsm
