#pragma once

#include <string>
#include <vector>

#include "bsm/grape.hpp"

// Holonomic gate parametrization and the measurement-circuit stages: Bell
// preparation, nuclear-conditioned CNOT, nitrogen Hadamard with electron
// shelving, the full disentanglement and the basis-to-readout mappings.
// Every stage exists as an ideal unitary; pulse realizations are GRAPE
// syntheses attached on demand.

namespace bsm {

enum class Bell { phi_plus, phi_minus, psi_plus, psi_minus };

const char* to_string(Bell b);

/// |b> = cos(theta/2)|+1> + e^{i phi} sin(theta/2)|-1> in span{|+1>, |-1>}.
struct BrightState {
  double theta;
  double phi;
};

// Bright-state parameters whose logical reflections give X and H.
inline constexpr BrightState kBrightX{std::numbers::pi / 2.0, std::numbers::pi};
inline constexpr BrightState kBrightH{3.0 * std::numbers::pi / 4.0,
                                      std::numbers::pi};
// Reflection conjugating Y to Z (tomography pre-rotation).
inline constexpr BrightState kBrightYtoZ{3.0 * std::numbers::pi / 4.0,
                                         3.0 * std::numbers::pi / 2.0};

Eigen::Vector3cd bright_ket(const BrightState& b);
Eigen::Vector3cd dark_ket(const BrightState& b);

/// Ideal unitary of a 2 pi Rabi cycle through the |0> ancilla on one spin:
/// |0> -> -|0>, |b> -> -|b>, |d> -> |d>. Restricted to span{|+1>, |-1>}
/// this is the reflection I - 2|b><b|.
Mat holonomy_reflection(const BrightState& b, Slot spin);

/// Flips the electron logical qubit exactly when m_I = -1; identity on
/// m_I in {+1, 0} and on the m_s = 0 levels.
Mat cnot_ideal();

/// Pi transfer |ms>_e <-> |0>_e (all m_I), with the physical -i pulse phase.
Mat shelve_ideal(int ms);

struct GateStage {
  std::string label;
  Mat ideal;
  std::vector<ControlSet> pulses;  // empty until synthesized
};

/// Shelve |+1>_e, RF holonomy on nitrogen in the m_s = 0 manifold,
/// unshelve; repeat for |-1>_e. Net logical action: I_e (x) H_N (the
/// shelving phases cancel between the two branches, up to a global sign).
GateStage hadamard_N_sequence();

/// Logical Bell state as a density matrix, built from an RF transfer
/// |0>_N -> |b_N> followed by two m_I-conditioned MW transfers.
Mat prepare_bell(Bell which);

/// The four Bell states as 9-dim kets (phase convention of the definitions).
Vec bell_ket(Bell which);

/// hadamard_N_sequence composed after cnot_ideal: maps the four Bell states
/// onto the four computational bases.
Mat disentangle_ideal();

/// Stage moving |target> -> |0,0> via an m_I-conditioned MW transfer then an
/// electron-conditioned RF transfer; all other logical bases stay outside
/// the m_s = 0 manifold. Throws if target is an ancilla level.
GateStage map_basis_to_readout(const BasisLabel& target);

enum class Realization { ideal, pulse };

/// Ideal unitary or the propagated product of the stage's pulses.
/// Throws std::runtime_error if pulse mode is requested before synthesis.
Mat realize_stage(const GateStage& stage, Realization via,
                  const StaticParams& p, const FrameSpec& f);

// ---- pulse synthesis -------------------------------------------------------

struct PulseGrid {
  double mw_duration = 2e-6;
  int mw_slices = 100;
  double rf_duration = 500e-6;
  int rf_slices = 100;
};

struct SynthesisOptions {
  PulseGrid grid;
  double fid_goal = 0.999;
  int max_iters = 4000;
  double amp_cap_mw = kMwAmpCap;
  double amp_cap_rf = kRfAmpCap;
};

struct SynthesisReport {
  std::string stage;
  double fidelity = 0.0;
  OptStatus status = OptStatus::max_iters;
  int iterations = 0;
};

/// CNOT stage with a GRAPE pulse realization (logical-subspace target).
GateStage cnot_stage(const StaticParams& p, const FrameSpec& f,
                     const SynthesisOptions& opts, SynthesisReport* report = nullptr);

/// Attach GRAPE pulses to hadamard_N_sequence (shelves + RF holonomies).
GateStage hadamard_N_stage(const StaticParams& p, const FrameSpec& f,
                           const SynthesisOptions& opts,
                           std::vector<SynthesisReport>* reports = nullptr);

/// Attach GRAPE pulses to map_basis_to_readout.
GateStage map_stage(const BasisLabel& target, const StaticParams& p,
                    const FrameSpec& f, const SynthesisOptions& opts,
                    std::vector<SynthesisReport>* reports = nullptr);

}  // namespace bsm
