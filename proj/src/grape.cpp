#include "bsm/grape.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace bsm {

namespace {

using json = nlohmann::json;

// phi(z) = (e^z - 1)/z, series near zero.
cxd phi1(cxd z) {
  if (std::abs(z) < 1e-3)
    return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0)));
  return (std::exp(z) - 1.0) / z;
}

struct SliceEig {
  Mat v;
  Eigen::VectorXd lam;
  Mat u;  // exp(-i G dt)
};

SliceEig decompose_slice(const Mat& g, double dt) {
  Eigen::SelfAdjointEigenSolver<Mat> es(g);
  SliceEig se;
  se.lam = es.eigenvalues();
  se.v = es.eigenvectors();
  Vec phases(9);
  for (int k = 0; k < 9; ++k) phases(k) = std::exp(cxd(0, -se.lam(k) * dt));
  se.u = se.v * phases.asDiagonal() * se.v.adjoint();
  return se;
}

// Loewner matrix of the slice exponential: dU = V (gamma o (V^dag H_k V)) V^dag.
Mat loewner(const Eigen::VectorXd& lam, double dt) {
  Mat g(9, 9);
  for (int a = 0; a < 9; ++a) {
    const cxd eb = std::exp(cxd(0, -lam(a) * dt));
    for (int b = 0; b < 9; ++b) {
      const cxd z = cxd(0, -(lam(b) - lam(a)) * dt);
      g(b, a) = cxd(0, -dt) * eb * phi1(z);
    }
  }
  return g;
}

// g such that Phi = |g|^2 * scale, written as g = Tr(K U).
struct OverlapForm {
  Mat k;
  double scale;
};

OverlapForm overlap_form(const TargetSpec& t) {
  switch (t.kind) {
    case TargetKind::full_unitary:
      return {Mat(t.target.adjoint()), 1.0 / 81.0};
    case TargetKind::subspace_unitary: {
      const double r = std::round(t.projector.trace().real());
      return {Mat(t.projector * t.target.adjoint()), 1.0 / (r * r)};
    }
    case TargetKind::state_transfer:
      return {Mat(t.start * t.final_state.adjoint()), 1.0};
  }
  throw std::logic_error("unreachable");
}

double channel_cap(int k, const OptConfig& cfg) {
  return is_mw_channel(k) ? cfg.amp_cap_mw : cfg.amp_cap_rf;
}

void clip_to_caps(Eigen::MatrixXd& amps, const OptConfig& cfg) {
  for (int k = 0; k < kNumChannels; ++k) {
    const double cap = channel_cap(k, cfg);
    for (int j = 0; j < amps.cols(); ++j)
      amps(k, j) = std::clamp(amps(k, j), -cap, cap);
  }
}

double amp_penalty(const ControlSet& cs, const OptConfig& cfg) {
  if (cfg.penalty_weight == 0.0) return 0.0;
  return cfg.penalty_weight * cs.amps.squaredNorm();
}

}  // namespace

TargetSpec TargetSpec::full(Mat u) {
  TargetSpec t;
  t.kind = TargetKind::full_unitary;
  t.target = std::move(u);
  return t;
}

TargetSpec TargetSpec::subspace(Mat u, Mat p) {
  if (!is_hermitian(p, 1e-12) || max_abs(p * p - p) > 1e-12)
    throw std::invalid_argument("subspace projector must be a Hermitian idempotent");
  TargetSpec t;
  t.kind = TargetKind::subspace_unitary;
  t.target = std::move(u);
  t.projector = std::move(p);
  return t;
}

TargetSpec TargetSpec::transfer(Vec from, Vec to) {
  TargetSpec t;
  t.kind = TargetKind::state_transfer;
  t.start = std::move(from);
  t.final_state = std::move(to);
  return t;
}

const char* to_string(OptStatus s) {
  switch (s) {
    case OptStatus::goal_reached: return "goal_reached";
    case OptStatus::gradient_converged: return "gradient_converged";
    case OptStatus::max_iters: return "max_iters";
    case OptStatus::stalled: return "stalled";
  }
  return "unknown";
}

double pulse_fidelity(const ControlSet& cs, const TargetSpec& t,
                      const StaticParams& p, const FrameSpec& f) {
  const OverlapForm of = overlap_form(t);
  const cxd g = (of.k * propagate(cs, p, f)).trace();
  return std::norm(g) * of.scale;
}

Eigen::MatrixXd pulse_gradient(const ControlSet& cs, const TargetSpec& t,
                               const StaticParams& p, const FrameSpec& f,
                               const std::array<bool, kNumChannels>* active) {
  const int n = cs.n_slices;
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(kNumChannels, n);
  if (n == 0) return grad;

  const Mat h_rot = rotating_hamiltonian(p, f);
  std::vector<SliceEig> slices(n);
  std::vector<Mat> fw(n + 1);  // fw[j] = U_j ... U_1
  fw[0] = Mat::Identity(9, 9);
  for (int j = 0; j < n; ++j) {
    slices[j] = decompose_slice(slice_generator(cs, j, h_rot), cs.dt);
    fw[j + 1] = slices[j].u * fw[j];
  }
  std::vector<Mat> bw(n + 1);  // bw[j] = U_N ... U_{j+1}
  bw[n] = Mat::Identity(9, 9);
  for (int j = n - 1; j >= 0; --j) bw[j] = bw[j + 1] * slices[j].u;

  const OverlapForm of = overlap_form(t);
  const cxd g = (of.k * fw[n]).trace();
  const auto& ops = control_hamiltonians();

  for (int j = 0; j < n; ++j) {
    const SliceEig& se = slices[j];
    const Mat gamma = loewner(se.lam, cs.dt);
    // dg/du = Tr(M_j dU_j) with M_j = fw[j-1] K bw[j], moved to the eigenbasis.
    const Mat m_tilde = se.v.adjoint() * (fw[j] * of.k * bw[j + 1]) * se.v;
    for (int k = 0; k < kNumChannels; ++k) {
      if (active && !(*active)[k]) continue;
      const Mat hk_tilde = se.v.adjoint() * ops[k] * se.v;
      const cxd dg = (m_tilde * gamma.cwiseProduct(hk_tilde)).trace();
      grad(k, j) = 2.0 * of.scale * std::real(std::conj(g) * dg);
    }
  }
  return grad;
}

OptResult optimize(const ControlSet& cs0, const TargetSpec& t,
                   const OptConfig& cfg, const StaticParams& p,
                   const FrameSpec& f) {
  OptResult res;
  res.controls = cs0;
  clip_to_caps(res.controls.amps, cfg);
  res.fidelity = pulse_fidelity(res.controls, t, p, f);
  res.trace.push_back(res.fidelity);
  if (res.fidelity >= cfg.fid_goal) {
    res.status = OptStatus::goal_reached;
    return res;
  }

  double obj = res.fidelity - amp_penalty(res.controls, cfg);
  double step = -1.0;
  res.status = OptStatus::max_iters;

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    Eigen::MatrixXd grad = pulse_gradient(res.controls, t, p, f, &cfg.active);
    if (cfg.penalty_weight != 0.0)
      grad -= 2.0 * cfg.penalty_weight * res.controls.amps;
    int dominant = 0;
    for (int k = 0; k < kNumChannels; ++k) {
      if (!cfg.active[k]) grad.row(k).setZero();
      if (grad.row(k).cwiseAbs().maxCoeff() >
          grad.row(dominant).cwiseAbs().maxCoeff())
        dominant = k;
    }
    const double gmax = grad.cwiseAbs().maxCoeff();
    if (gmax <= cfg.grad_tol) {
      res.status = OptStatus::gradient_converged;
      break;
    }
    if (step < 0) step = cfg.step_init * channel_cap(dominant, cfg) / gmax;

    // Backtracking line search; the larger of two equally improving steps
    // wins because it is probed first.
    bool improved = false;
    ControlSet cand = res.controls;
    for (double s = 2.0 * step; s > step * 1e-12; s *= 0.5) {
      cand.amps = res.controls.amps + s * grad;
      clip_to_caps(cand.amps, cfg);
      const double phi_c = pulse_fidelity(cand, t, p, f);
      const double obj_c = phi_c - amp_penalty(cand, cfg);
      if (obj_c > obj) {
        res.controls = cand;
        res.fidelity = phi_c;
        obj = obj_c;
        step = s;
        improved = true;
        break;
      }
    }
    res.iterations = iter + 1;
    if (!improved) {
      res.status = OptStatus::stalled;
      break;
    }
    res.trace.push_back(res.fidelity);
    if (res.fidelity >= cfg.fid_goal) {
      res.status = OptStatus::goal_reached;
      break;
    }
  }
  return res;
}

std::string pulse_to_json(const ControlSet& cs) {
  json j;
  j["dt"] = cs.dt;
  j["n_slices"] = cs.n_slices;
  j["channels"] = json::array();
  for (int k = 0; k < kNumChannels; ++k) {
    std::vector<double> amps(cs.amps.row(k).begin(), cs.amps.row(k).end());
    j["channels"].push_back({{"name", channel_name(k)}, {"amplitudes", amps}});
  }
  return j.dump(2);
}

ControlSet pulse_from_json(const std::string& text) {
  const json j = json::parse(text);
  ControlSet cs = ControlSet::zeros(j.at("dt").get<double>(),
                                    j.at("n_slices").get<int>());
  for (const auto& ch : j.at("channels")) {
    const int k = channel_from_name(ch.at("name").get<std::string>());
    if (k < 0)
      throw std::invalid_argument("unknown pulse channel: " +
                                  ch.at("name").get<std::string>());
    const auto amps = ch.at("amplitudes").get<std::vector<double>>();
    if (static_cast<int>(amps.size()) != cs.n_slices)
      throw std::invalid_argument("channel length does not match n_slices");
    for (int s = 0; s < cs.n_slices; ++s) cs.amps(k, s) = amps[s];
  }
  return cs;
}

void save_pulse(const std::string& path, const ControlSet& cs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << pulse_to_json(cs) << '\n';
}

ControlSet load_pulse(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return pulse_from_json(text);
}

}  // namespace bsm
