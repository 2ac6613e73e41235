#include "bsm/readout.hpp"

#include <cmath>
#include <stdexcept>

namespace bsm {

namespace {

// m_s = 0 manifold indices {|0,+1>, |0,0>, |0,-1>}.
constexpr int kAncilla[3] = {3, 4, 5};
constexpr int kReadoutIndex = 4;  // |0,0>

Mat ms0_projector() {
  Mat p = Mat::Zero(9, 9);
  for (int i : kAncilla) p(i, i) = 1.0;
  return p;
}

long sample_counts(double lambda, int n_reps, bool subrep, Rng& rng) {
  if (lambda <= 0.0) return 0;
  if (!subrep || n_reps <= 1) {
    std::poisson_distribution<long> pois(lambda);
    return pois(rng);
  }
  std::poisson_distribution<long> pois(lambda / n_reps);
  long total = 0;
  for (int r = 0; r < n_reps; ++r) total += pois(rng);
  return total;
}

void apply_kraus(Mat& rho, const std::vector<Mat>& kraus) {
  Mat out = Mat::Zero(9, 9);
  for (const Mat& k : kraus) out += k * rho * k.adjoint();
  rho = out;
}

// Electron relaxation |0>_e -> |+-1>_e with equal split, m_I preserved.
void apply_leak(Mat& rho) {
  const double r = 1.0 / std::sqrt(2.0);
  Mat up = Mat::Zero(3, 3), down = Mat::Zero(3, 3);
  up(0, 1) = r;    // |+1><0|
  down(2, 1) = r;  // |-1><0|
  Mat keep3 = Mat::Identity(3, 3);
  keep3(1, 1) = 0.0;
  apply_kraus(rho, {embed(up, Slot::electron), embed(down, Slot::electron),
                    embed(keep3, Slot::electron)});
}

// Reinit MW pulse: transfers the |+1,0> level (and |-1,0> when both branches
// are recovered) back into |0,0>; conditioned on m_I = 0 so the awaiting
// logical population is never touched.
void apply_recovery(Mat& rho, bool recover_plus_only) {
  std::vector<int> sources = {basis_index({+1, 0})};
  if (!recover_plus_only) sources.push_back(basis_index({-1, 0}));
  std::vector<Mat> kraus;
  Mat keep = Mat::Identity(9, 9);
  for (int s : sources) {
    Mat k = Mat::Zero(9, 9);
    k(kReadoutIndex, s) = 1.0;
    kraus.push_back(k);
    keep(s, s) = 0.0;
  }
  kraus.push_back(keep);
  apply_kraus(rho, kraus);
}

void apply_nuclear_dephasing(Mat& rho, double p) {
  if (p <= 0.0) return;
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j)
      if (basis_label(i).mi != basis_label(j).mi) rho(i, j) *= 1.0 - p;
}

double poisson_below(double lambda, int n_c) {
  // P(N < n_c)
  double pmf = std::exp(-lambda), cdf = 0.0;
  for (int x = 0; x < n_c; ++x) {
    cdf += pmf;
    pmf *= lambda / (x + 1);
  }
  return cdf;
}

}  // namespace

void ReadoutParams::validate() const {
  if (!(lambda_bright > lambda_dark) || lambda_dark < 0.0)
    throw std::invalid_argument("need lambda_bright > lambda_dark >= 0");
  if (n_c < 1) throw std::invalid_argument("n_c must be >= 1");
  if (n_reps_bsm < 1 || n_reps_qst < 1)
    throw std::invalid_argument("repetition counts must be >= 1");
  for (double pr : {p_leak, p_deph_n})
    if (pr < 0.0 || pr > 1.0)
      throw std::invalid_argument("probabilities must lie in [0, 1]");
}

const char* to_string(BsmLabel l) {
  switch (l) {
    case BsmLabel::phi_plus: return "phi_plus";
    case BsmLabel::psi_plus: return "psi_plus";
    case BsmLabel::psi_minus: return "psi_minus";
    case BsmLabel::phi_minus: return "phi_minus";
    case BsmLabel::inconclusive: return "inconclusive";
  }
  return "unknown";
}

Rng trial_rng(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial),
                    static_cast<std::uint32_t>(trial >> 32), 0x9e3779b9u};
  return Rng(seq);
}

ShotResult single_shot(const Mat& rho, const ReadoutParams& rp, Rng& rng) {
  return single_shot(rho, rp, rp.n_reps_bsm, rng);
}

ShotResult single_shot(const Mat& rho, const ReadoutParams& rp, int n_reps,
                       Rng& rng) {
  rp.validate();
  ShotResult out;
  const Mat p0 = ms0_projector();
  double pop0 = 0.0;
  for (int i : kAncilla) pop0 += std::real(rho(i, i));
  pop0 = std::clamp(pop0, 0.0, 1.0);

  std::bernoulli_distribution branch(pop0);
  const bool bright = branch(rng);
  if (bright) {
    if (rp.park_bright) {
      // The repetitive readout loop cycles the measured population through
      // the |0,0> readout state; it is parked there afterwards.
      Mat parked = Mat::Zero(9, 9);
      parked(kReadoutIndex, kReadoutIndex) = 1.0;
      out.state = parked;
    } else {
      out.state = (p0 * rho * p0) / pop0;
    }
    out.counts = sample_counts(rp.lambda_bright, n_reps, rp.subrep_sampling, rng);
  } else {
    const Mat pc = Mat::Identity(9, 9) - p0;
    const double popc = std::max(1.0 - pop0, 1e-300);
    out.state = (pc * rho * pc) / popc;
    out.counts = sample_counts(rp.lambda_dark, n_reps, rp.subrep_sampling, rng);
  }

  if (rp.p_leak > 0.0) {
    std::bernoulli_distribution leak(rp.p_leak);
    if (leak(rng)) {
      apply_leak(out.state);
      apply_recovery(out.state, rp.recover_plus_only);
    }
  }
  apply_nuclear_dephasing(out.state, rp.p_deph_n);
  return out;
}

BsmLabel classify(const std::array<long, 4>& counts, int n_c,
                  bool phi_minus_by_elimination) {
  for (long n : counts)
    if (n < 0) throw std::invalid_argument("photon counts must be non-negative");
  if (counts[0] >= n_c) return BsmLabel::phi_plus;
  if (counts[1] >= n_c) return BsmLabel::psi_plus;
  if (counts[2] >= n_c) return BsmLabel::psi_minus;
  if (phi_minus_by_elimination) return BsmLabel::phi_minus;
  if (counts[3] >= n_c) return BsmLabel::phi_minus;
  return BsmLabel::inconclusive;
}

const std::array<Bell, 4>& bsm_measurement_order() {
  static const std::array<Bell, 4> order = {Bell::phi_plus, Bell::psi_plus,
                                            Bell::psi_minus, Bell::phi_minus};
  return order;
}

BasisLabel disentangled_basis(Bell b) {
  switch (b) {
    case Bell::phi_plus: return {+1, +1};
    case Bell::phi_minus: return {+1, -1};
    case Bell::psi_plus: return {-1, +1};
    case Bell::psi_minus: return {-1, -1};
  }
  throw std::logic_error("unreachable");
}

std::array<Mat, 4> ideal_bsm_maps() {
  std::array<Mat, 4> maps;
  for (int m = 0; m < 4; ++m)
    maps[m] = map_basis_to_readout(disentangled_basis(bsm_measurement_order()[m]))
                  .ideal;
  return maps;
}

BsmOutcome run_bsm(const Mat& rho, const ReadoutParams& rp,
                   const std::array<Mat, 4>& maps, Rng& rng) {
  BsmOutcome out;
  Mat state = rho;
  for (int m = 0; m < 4; ++m) {
    state = maps[m] * state * maps[m].adjoint();
    ShotResult shot = single_shot(state, rp, rp.n_reps_bsm, rng);
    out.counts[m] = shot.counts;
    state = std::move(shot.state);
  }
  out.label = classify(out.counts, rp.n_c, rp.phi_minus_by_elimination);
  return out;
}

double poisson_tail(double lambda, int n_c) {
  return 1.0 - poisson_below(lambda, n_c);
}

std::array<double, 5> cascade_probabilities(const ReadoutParams& rp,
                                            Bell prepared) {
  rp.validate();
  const auto& order = bsm_measurement_order();
  int match = 0;
  while (order[match] != prepared) ++match;

  // Measurements before the match are dark; the match and everything after
  // stay bright (the measured population remains in the readout ancilla).
  std::array<double, 4> below{};
  for (int m = 0; m < 4; ++m)
    below[m] = poisson_below(m < match ? rp.lambda_dark : rp.lambda_bright,
                             rp.n_c);

  std::array<double, 5> out{};
  double none_yet = 1.0;
  for (int j = 0; j < 4; ++j) {
    if (j == 3 && rp.phi_minus_by_elimination) {
      out[3] = none_yet;  // decided by the first three measurements
      none_yet = 0.0;
      break;
    }
    out[j] = none_yet * (1.0 - below[j]);
    none_yet *= below[j];
  }
  out[4] = none_yet;
  return out;
}

BasisLabel logical_label(int l) {
  return {(l & 2) ? -1 : +1, (l & 1) ? -1 : +1};
}

Eigen::Matrix4cd logical_block(const Mat& rho) {
  Eigen::Matrix4cd out;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      out(a, b) = rho(basis_index(logical_label(a)), basis_index(logical_label(b)));
  return out;
}

namespace {

Eigen::Matrix2cd pauli(int a) {
  Eigen::Matrix2cd m;
  switch (a) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, cxd(0, -1), cxd(0, 1), 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

// Pre-rotation reflection conjugating the measured Pauli to Z.
Mat pre_rotation(int pauli_idx, Slot slot) {
  switch (pauli_idx) {
    case 1: return holonomy_reflection(kBrightH, slot);
    case 2: return holonomy_reflection(kBrightYtoZ, slot);
    default: return Mat::Identity(9, 9);
  }
}

}  // namespace

TomographyResult qst(const Mat& rho_in, const Eigen::Vector4cd& logical_target,
                     const ReadoutParams& rp, long shots_per_setting,
                     bool exact, Rng& rng) {
  rp.validate();
  if (!exact && shots_per_setting <= 0)
    throw std::invalid_argument(
        "insufficient shots for tomography inversion (shots_per_setting <= 0)");
  if (std::abs(logical_target.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("tomography target must be normalized");

  // Pauli expectation table; singles are averaged over the three settings
  // that contain them.
  double t[4][4] = {};
  t[0][0] = 1.0;

  for (int pa = 1; pa <= 3; ++pa) {
    for (int pb = 1; pb <= 3; ++pb) {
      const Mat u = pre_rotation(pa, Slot::electron) *
                    pre_rotation(pb, Slot::nitrogen);
      const Mat rho_rot = u * rho_in * u.adjoint();

      std::array<double, 4> prob{};
      if (exact) {
        for (int l = 0; l < 4; ++l)
          prob[l] = std::real(rho_rot(basis_index(logical_label(l)),
                                      basis_index(logical_label(l))));
      } else {
        // Each logical basis is mapped to |0,0> and read out repeatedly;
        // the mean accumulated counts give a linear probability estimate.
        for (int l = 0; l < 4; ++l) {
          const Mat& m = map_basis_to_readout(logical_label(l)).ideal;
          const Mat rho_m = m * rho_rot * m.adjoint();
          double pop = 0.0;
          for (int i : {3, 4, 5}) pop += std::real(rho_m(i, i));
          pop = std::clamp(pop, 0.0, 1.0);
          std::bernoulli_distribution branch(pop);
          long total = 0;
          for (long s = 0; s < shots_per_setting; ++s) {
            const double lambda =
                branch(rng) ? rp.lambda_bright : rp.lambda_dark;
            total += sample_counts(lambda, rp.n_reps_qst, rp.subrep_sampling,
                                   rng);
          }
          const double mean = static_cast<double>(total) / shots_per_setting;
          prob[l] = std::clamp(
              (mean - rp.lambda_dark) / (rp.lambda_bright - rp.lambda_dark),
              0.0, 1.0);
        }
        const double norm = prob[0] + prob[1] + prob[2] + prob[3];
        if (norm <= 0.0)
          throw std::runtime_error(
              "tomography inversion ill-conditioned: no bright counts");
        for (double& p : prob) p /= norm;
      }

      double corr = 0.0, single_e = 0.0, single_n = 0.0;
      for (int l = 0; l < 4; ++l) {
        const double se = (l & 2) ? -1.0 : 1.0;
        const double sn = (l & 1) ? -1.0 : 1.0;
        corr += se * sn * prob[l];
        single_e += se * prob[l];
        single_n += sn * prob[l];
      }
      t[pa][pb] = corr;
      t[pa][0] += single_e / 3.0;
      t[0][pb] += single_n / 3.0;
    }
  }

  TomographyResult res;
  res.settings_used = 9;
  res.rho_linear.setZero();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      Eigen::Matrix4cd basis = Eigen::Matrix4cd::Zero();
      const Eigen::Matrix2cd sa = pauli(a), sb = pauli(b);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          basis.block(2 * i, 2 * j, 2, 2) = sa(i, j) * sb;
      res.rho_linear += 0.25 * t[a][b] * basis;
    }

  // PSD projection: clip negative eigenvalues, renormalize the trace.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(res.rho_linear);
  Eigen::Vector4d lam = es.eigenvalues().cwiseMax(0.0);
  const double tr = lam.sum();
  if (tr <= 0.0) throw std::runtime_error("tomography projection degenerate");
  lam /= tr;
  res.rho_hat = es.eigenvectors() * lam.asDiagonal() *
                es.eigenvectors().adjoint();

  res.fidelity_to_target = std::clamp(
      std::real(cxd(logical_target.adjoint() * res.rho_hat * logical_target)),
      0.0, 1.0);
  return res;
}

}  // namespace bsm
