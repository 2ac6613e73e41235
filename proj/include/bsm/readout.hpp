#pragma once

#include <array>
#include <cstdint>
#include <random>

#include "bsm/circuits.hpp"

// Stochastic single-shot readout of the |0,0> readout ancilla, the
// threshold-cascade Bell state discrimination with its closed-form Poisson
// oracle, and logical two-qubit state tomography.

namespace bsm {

struct ReadoutParams {
  double lambda_bright = 1.8;  // mean accumulated counts, matching basis
  double lambda_dark = 0.3;    // mean accumulated counts otherwise
  int n_reps_bsm = 25;
  int n_reps_qst = 30;
  int n_c = 1;                 // photon-count threshold
  double p_leak = 0.1;         // per-measurement |0>_e -> |+-1>_e relaxation
  bool recover_plus_only = true;
  double p_deph_n = 0.0;       // nuclear-coherence dephasing per measurement
  // Bright-branch population is recycled into |0,0> by the repetitive
  // readout loop; keeps post-match measurements bright.
  bool park_bright = true;
  bool phi_minus_by_elimination = false;
  bool subrep_sampling = false;  // sample per-sub-repetition Poisson draws
  std::uint64_t seed = 0;

  void validate() const;  // throws std::invalid_argument
};

enum class BsmLabel : int {
  phi_plus = 0,
  psi_plus = 1,
  psi_minus = 2,
  phi_minus = 3,
  inconclusive = 4,
};

const char* to_string(BsmLabel l);

struct BsmOutcome {
  std::array<long, 4> counts{};
  BsmLabel label = BsmLabel::inconclusive;
};

using Rng = std::mt19937_64;

/// Deterministic per-trial stream; results do not depend on how trials are
/// distributed over workers.
Rng trial_rng(std::uint64_t seed, std::uint64_t trial);

struct ShotResult {
  long counts = 0;
  Mat state;
};

/// One accumulated repetitive measurement of the m_s = 0 manifold:
/// bright/dark branch selection, Poisson counts, leak and reinit channels.
ShotResult single_shot(const Mat& rho, const ReadoutParams& rp, Rng& rng);
ShotResult single_shot(const Mat& rho, const ReadoutParams& rp, int n_reps,
                       Rng& rng);

/// First-match threshold cascade over (n1..n4).
BsmLabel classify(const std::array<long, 4>& counts, int n_c,
                  bool phi_minus_by_elimination = false);

/// Measurement order: Phi+, Psi+, Psi-, Phi-.
const std::array<Bell, 4>& bsm_measurement_order();

/// Computational basis holding each Bell state after disentanglement.
BasisLabel disentangled_basis(Bell b);

/// Ideal basis-to-readout mapping unitaries in measurement order.
std::array<Mat, 4> ideal_bsm_maps();

/// Full single-shot BSM of an already-disentangled state.
BsmOutcome run_bsm(const Mat& rho, const ReadoutParams& rp,
                   const std::array<Mat, 4>& maps, Rng& rng);

/// Closed-form label distribution (Phi+, Psi+, Psi-, Phi-, inconclusive)
/// for an ideally prepared and disentangled Bell state; the independent
/// oracle for run_bsm.
std::array<double, 5> cascade_probabilities(const ReadoutParams& rp,
                                            Bell prepared);

/// P(Poisson(lambda) >= n_c), the per-condition trigger probability.
double poisson_tail(double lambda, int n_c);

struct TomographyResult {
  Eigen::Matrix4cd rho_linear;  // raw linear inversion
  Eigen::Matrix4cd rho_hat;     // after PSD projection + renormalization
  double fidelity_to_target = 0.0;
  int settings_used = 0;
};

/// Two-qubit QST over the 9 local {X,Y,Z} x {X,Y,Z} settings, realized by
/// holonomic pre-rotations and readout through the |0,0> ancilla. With
/// shots_per_setting <= 0 and exact = true the exact outcome probabilities
/// are inverted instead of sampled.
TomographyResult qst(const Mat& rho_in, const Eigen::Vector4cd& logical_target,
                     const ReadoutParams& rp, long shots_per_setting,
                     bool exact, Rng& rng);

/// Logical 4-dim index (electron major, bit 0 <-> m = +1) to basis label.
BasisLabel logical_label(int l);

/// Restriction of a 9-dim density matrix to the logical 4-dim subspace.
Eigen::Matrix4cd logical_block(const Mat& rho);

}  // namespace bsm
