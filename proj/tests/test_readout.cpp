#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bsm/readout.hpp"

using namespace bsm;

namespace {

constexpr std::array<Bell, 4> kPreps = {Bell::phi_plus, Bell::psi_plus,
                                        Bell::psi_minus, Bell::phi_minus};

// Brute-force first-match rule, written directly from the cascade definition.
BsmLabel cascade_reference(const std::array<long, 4>& n, int n_c) {
  for (int m = 0; m < 4; ++m)
    if (n[m] >= n_c) return static_cast<BsmLabel>(m);
  return BsmLabel::inconclusive;
}

}  // namespace

TEST_CASE("classify matches the brute-force cascade over the full table") {
  for (int n_c = 1; n_c <= 3; ++n_c) {
    std::array<long, 4> n{};
    for (n[0] = 0; n[0] <= 5; ++n[0])
      for (n[1] = 0; n[1] <= 5; ++n[1])
        for (n[2] = 0; n[2] <= 5; ++n[2])
          for (n[3] = 0; n[3] <= 5; ++n[3])
            CHECK(classify(n, n_c) == cascade_reference(n, n_c));
  }
}

TEST_CASE("classify with Phi- by elimination") {
  CHECK(classify({0, 0, 0, 0}, 1, true) == BsmLabel::phi_minus);
  CHECK(classify({0, 0, 0, 3}, 1, true) == BsmLabel::phi_minus);
  CHECK(classify({0, 2, 0, 0}, 1, true) == BsmLabel::psi_plus);
  CHECK(classify({0, 0, 0, 0}, 1, false) == BsmLabel::inconclusive);
}

TEST_CASE("poisson tail") {
  CHECK(poisson_tail(1.8, 1) == doctest::Approx(1.0 - std::exp(-1.8)));
  CHECK(poisson_tail(0.3, 2) ==
        doctest::Approx(1.0 - std::exp(-0.3) * (1.0 + 0.3)));
  CHECK(poisson_tail(0.3, 1) > poisson_tail(0.3, 2));
  CHECK(poisson_tail(0.3, 2) > poisson_tail(0.3, 3));
}

TEST_CASE("cascade oracle: closed form and frozen values") {
  ReadoutParams rp;
  const double b = 1.0 - std::exp(-1.8);
  const double d = 1.0 - std::exp(-0.3);
  const std::array<double, 4> correct = {b, (1 - d) * b, (1 - d) * (1 - d) * b,
                                         (1 - d) * (1 - d) * (1 - d) * b};
  const std::array<double, 4> frozen = {0.8347, 0.6184, 0.4581, 0.3394};
  for (int i = 0; i < 4; ++i) {
    const auto probs = cascade_probabilities(rp, kPreps[i]);
    double sum = 0.0;
    for (double p : probs) sum += p;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(probs[i] == doctest::Approx(correct[i]).epsilon(1e-12));
    CHECK(std::abs(probs[i] - frozen[i]) < 1e-4);
  }
  // Elimination variant folds all-dark into Phi-.
  ReadoutParams rpe = rp;
  rpe.phi_minus_by_elimination = true;
  const auto pe = cascade_probabilities(rpe, Bell::phi_minus);
  CHECK(pe[3] == doctest::Approx(std::pow(1 - d, 3)).epsilon(1e-12));
}

TEST_CASE("trial RNG streams are deterministic and distinct") {
  Rng a = trial_rng(7, 0), b = trial_rng(7, 0), c = trial_rng(7, 1);
  CHECK(a() == b());
  Rng a2 = trial_rng(7, 0);
  CHECK(a2() != c());
  CHECK(trial_rng(8, 0)() != trial_rng(7, 0)());
}

TEST_CASE("single shot: bright state counts and parking") {
  ReadoutParams rp;
  rp.p_leak = 0.0;
  const Vec psi = basis_ket({0, 0});
  const Mat rho = psi * psi.adjoint();
  Rng rng = trial_rng(11, 0);
  double mean = 0.0;
  const int n = 20000;
  for (int t = 0; t < n; ++t) {
    const ShotResult sr = single_shot(rho, rp, rng);
    mean += static_cast<double>(sr.counts);
    CHECK(is_density_matrix(sr.state));
    // Parked back in the readout state.
    CHECK(fidelity(sr.state, psi) > 1.0 - 1e-10);
  }
  mean /= n;
  CHECK(std::abs(mean - rp.lambda_bright) <
        4.0 * std::sqrt(rp.lambda_bright / n));
}

TEST_CASE("single shot: logical states are dark and untouched") {
  ReadoutParams rp;
  const Vec psi = bell_ket(Bell::phi_plus);
  const Mat rho = psi * psi.adjoint();
  Rng rng = trial_rng(13, 0);
  double mean = 0.0;
  const int n = 20000;
  for (int t = 0; t < n; ++t) {
    const ShotResult sr = single_shot(rho, rp, rng);
    mean += static_cast<double>(sr.counts);
    CHECK(fidelity(sr.state, psi) > 1.0 - 1e-10);
  }
  mean /= n;
  CHECK(std::abs(mean - rp.lambda_dark) < 4.0 * std::sqrt(rp.lambda_dark / n));
}

TEST_CASE("nuclear dephasing knob kills m_I coherences") {
  ReadoutParams rp;
  rp.p_deph_n = 1.0;
  const Vec psi =
      (basis_ket({1, 1}) + basis_ket({1, -1})) / std::sqrt(2.0);
  Rng rng = trial_rng(17, 0);
  const ShotResult sr = single_shot(psi * psi.adjoint(), rp, rng);
  CHECK(std::abs(sr.state(0, 2)) < 1e-12);
  CHECK(sr.state(0, 0).real() == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("subrep sampling preserves the accumulated Poisson statistics") {
  ReadoutParams rp;
  rp.p_leak = 0.0;
  rp.subrep_sampling = true;
  const Vec psi = basis_ket({0, 0});
  const Mat rho = psi * psi.adjoint();
  Rng rng = trial_rng(19, 0);
  double mean = 0.0, m2 = 0.0;
  const int n = 20000;
  for (int t = 0; t < n; ++t) {
    const long c = single_shot(rho, rp, rng).counts;
    mean += c;
    m2 += static_cast<double>(c) * c;
  }
  mean /= n;
  const double var = m2 / n - mean * mean;
  CHECK(std::abs(mean - 1.8) < 4.0 * std::sqrt(1.8 / n));
  CHECK(std::abs(var - 1.8) < 0.1);  // Poisson: var = mean
}

TEST_CASE("Monte-Carlo label frequencies match the oracle within 3 sigma") {
  ReadoutParams rp;
  rp.seed = 42;
  rp.p_leak = 0.0;  // the oracle models the ideal cascade, not the leak knob
  const Mat u = disentangle_ideal();
  const auto maps = ideal_bsm_maps();
  const long trials = 20000;
  for (std::size_t pi = 0; pi < kPreps.size(); ++pi) {
    const Mat rho0 = prepare_bell(kPreps[pi]);
    const Mat rho = u * rho0 * u.adjoint();
    std::array<long, 5> hits{};
    for (long t = 0; t < trials; ++t) {
      Rng rng = trial_rng(rp.seed, pi * trials + t);
      hits[static_cast<int>(run_bsm(rho, rp, maps, rng).label)]++;
    }
    const auto oracle = cascade_probabilities(rp, kPreps[pi]);
    for (int l = 0; l < 5; ++l) {
      const double freq = static_cast<double>(hits[l]) / trials;
      const double sigma =
          std::sqrt(oracle[l] * (1.0 - oracle[l]) / trials);
      CHECK(std::abs(freq - oracle[l]) <= 3.0 * sigma + 1e-9);
    }
  }
}

TEST_CASE("kept-bright: post-match measurements stay at the bright mean") {
  ReadoutParams rp;
  rp.seed = 5;
  rp.p_leak = 0.0;
  const Mat u = disentangle_ideal();
  const auto maps = ideal_bsm_maps();
  const long trials = 10000;
  // Psi+ matches at measurement 2; measurements 3 and 4 must stay bright.
  const Mat rho0 = prepare_bell(Bell::psi_plus);
  const Mat rho = u * rho0 * u.adjoint();
  double post_sum = 0.0;
  long post_n = 0;
  for (long t = 0; t < trials; ++t) {
    Rng rng = trial_rng(rp.seed, t);
    const BsmOutcome oc = run_bsm(rho, rp, maps, rng);
    if (oc.label != BsmLabel::psi_plus) continue;
    post_sum += static_cast<double>(oc.counts[2] + oc.counts[3]);
    post_n += 2;
  }
  const double post_mean = post_sum / static_cast<double>(post_n);
  CHECK(std::abs(post_mean - rp.lambda_bright) < 0.05 * rp.lambda_bright);
}

TEST_CASE("noiseless limit is deterministic and exact") {
  ReadoutParams rp;
  rp.p_leak = 0.0;
  rp.lambda_dark = 0.0;
  rp.lambda_bright = 1e4;  // saturated readout
  rp.seed = 1;
  const Mat u = disentangle_ideal();
  const auto maps = ideal_bsm_maps();
  for (std::size_t pi = 0; pi < kPreps.size(); ++pi) {
    const Mat rho0 = prepare_bell(kPreps[pi]);
    const Mat rho = u * rho0 * u.adjoint();
    for (long t = 0; t < 50; ++t) {
      Rng rng = trial_rng(rp.seed, t);
      CHECK(run_bsm(rho, rp, maps, rng).label ==
            static_cast<BsmLabel>(pi));
    }
  }
}

TEST_CASE("measurement order and disentangled bases") {
  const auto& order = bsm_measurement_order();
  CHECK(order[0] == Bell::phi_plus);
  CHECK(order[1] == Bell::psi_plus);
  CHECK(order[2] == Bell::psi_minus);
  CHECK(order[3] == Bell::phi_minus);
  CHECK(basis_index(disentangled_basis(Bell::phi_plus)) == 0);
  CHECK(basis_index(disentangled_basis(Bell::phi_minus)) == 2);
  CHECK(basis_index(disentangled_basis(Bell::psi_plus)) == 6);
  CHECK(basis_index(disentangled_basis(Bell::psi_minus)) == 8);
  // Each map sends its Bell's basis into the readout state.
  const auto maps = ideal_bsm_maps();
  const Vec readout = basis_ket({0, 0});
  for (int m = 0; m < 4; ++m) {
    const Vec in = basis_ket(disentangled_basis(order[m]));
    CHECK(std::norm(readout.dot(maps[m] * in)) > 1.0 - 1e-10);
  }
}

TEST_CASE("exact tomography inverts the logical state to 1e-10") {
  ReadoutParams rp;
  rp.seed = 3;
  Rng rng = trial_rng(3, 0);
  std::array<Vec, 3> states = {bell_ket(Bell::phi_plus),
                               bell_ket(Bell::psi_minus),
                               basis_ket({1, -1})};
  for (const Vec& psi : states) {
    const Mat rho = psi * psi.adjoint();
    Eigen::Vector4cd target;
    for (int l = 0; l < 4; ++l) target(l) = psi(kLogicalIndices[l]);
    const TomographyResult tr = qst(rho, target, rp, 0, true, rng);
    CHECK((tr.rho_linear - logical_block(rho)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(tr.fidelity_to_target == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(tr.settings_used == 9);
  }
}

TEST_CASE("sampled tomography of Phi+ reaches 0.98 and is always physical") {
  ReadoutParams rp;
  rp.seed = 23;
  Rng rng = trial_rng(23, 0);
  const Vec psi = bell_ket(Bell::phi_plus);
  Eigen::Vector4cd target;
  for (int l = 0; l < 4; ++l) target(l) = psi(kLogicalIndices[l]);
  const TomographyResult tr =
      qst(psi * psi.adjoint(), target, rp, 10000, false, rng);
  CHECK(tr.fidelity_to_target >= 0.98);
  // PSD and unit trace after projection.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(tr.rho_hat);
  CHECK(es.eigenvalues().minCoeff() >= -1e-12);
  CHECK(std::abs(tr.rho_hat.trace().real() - 1.0) < 1e-12);
  CHECK((tr.rho_hat - tr.rho_hat.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("parameter validation") {
  ReadoutParams rp;
  rp.lambda_dark = 2.0;  // exceeds lambda_bright
  CHECK_THROWS_AS(rp.validate(), std::invalid_argument);
  ReadoutParams rp2;
  rp2.n_c = 0;
  CHECK_THROWS_AS(rp2.validate(), std::invalid_argument);
  ReadoutParams rp3;
  rp3.p_leak = 1.5;
  CHECK_THROWS_AS(rp3.validate(), std::invalid_argument);
  CHECK_NOTHROW(ReadoutParams{}.validate());
}
