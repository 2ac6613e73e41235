#pragma once

#include <array>
#include <string>
#include <vector>

#include "bsm/hamiltonian.hpp"

// Gradient ascent pulse engineering: optimizes piecewise-constant control
// amplitudes toward a target unitary (optionally restricted to a subspace)
// or a state transfer. Gradients are exact, computed from the Frechet
// derivative of each slice exponential via eigendecomposition.

namespace bsm {

enum class TargetKind { full_unitary, subspace_unitary, state_transfer };

struct TargetSpec {
  TargetKind kind = TargetKind::full_unitary;
  Mat target;     // unitary target (unitary kinds)
  Mat projector;  // subspace projector (subspace kind)
  Vec start;      // state-transfer initial state
  Vec final_state;

  static TargetSpec full(Mat u);
  static TargetSpec subspace(Mat u, Mat p);  // validates P^2 = P, P = P^dag
  static TargetSpec transfer(Vec from, Vec to);
};

struct OptConfig {
  int max_iters = 1000;
  double step_init = 0.2;     // first-move fraction of the amplitude cap
  double fid_goal = 0.999;
  double grad_tol = 1e-15;    // on the max-norm of the raw gradient
  double amp_cap_mw = kMwAmpCap;
  double amp_cap_rf = kRfAmpCap;
  double penalty_weight = 0.0;  // quadratic amplitude penalty
  std::array<bool, kNumChannels> active = {true, true, true, true,
                                           true, true, true, true};
};

enum class OptStatus { goal_reached, gradient_converged, max_iters, stalled };

const char* to_string(OptStatus s);

struct OptResult {
  ControlSet controls;
  std::vector<double> trace;  // per-iteration fidelity, monotone
  double fidelity = 0.0;
  OptStatus status = OptStatus::max_iters;
  int iterations = 0;
};

/// Fidelity of the propagated pulse against the target:
/// subspace: |Tr(P U_t^dag U P)|^2 / rank(P)^2; transfer: |<to|U|from>|^2.
double pulse_fidelity(const ControlSet& cs, const TargetSpec& t,
                      const StaticParams& p, const FrameSpec& f);

/// Exact dPhi/du_k(j), kNumChannels x n_slices. An optional channel mask
/// skips (and zeroes) inactive rows.
Eigen::MatrixXd pulse_gradient(const ControlSet& cs, const TargetSpec& t,
                               const StaticParams& p, const FrameSpec& f,
                               const std::array<bool, kNumChannels>* active = nullptr);

/// Gradient ascent with backtracking line search; amplitudes are clipped to
/// the per-band caps after each step and the fidelity trace never decreases.
OptResult optimize(const ControlSet& cs0, const TargetSpec& t,
                   const OptConfig& cfg, const StaticParams& p,
                   const FrameSpec& f);

// Pulse JSON schema: {"dt": s, "n_slices": n,
//   "channels": [{"name": ..., "amplitudes": [rad/s, ...]}, ...]}
std::string pulse_to_json(const ControlSet& cs);
ControlSet pulse_from_json(const std::string& text);
void save_pulse(const std::string& path, const ControlSet& cs);
ControlSet load_pulse(const std::string& path);

}  // namespace bsm
