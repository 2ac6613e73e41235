#pragma once

#include <array>
#include <numbers>
#include <string>

#include "bsm/hilbert.hpp"

// Static Hamiltonian of the coupled electron-nitrogen system, rotating-frame
// picture for the MW/RF drives, and piecewise-constant pulse propagation.
// All energies are angular frequencies in rad/s.

namespace bsm {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct StaticParams {
  double d0 = kTwoPi * 2.88e9;  // zero-field splitting
  double q = kTwoPi * 4.95e6;   // nuclear quadrupole splitting
  double a = kTwoPi * 2.17e6;   // hyperfine coupling

  void validate() const;  // throws std::invalid_argument on nonpositive values
};

struct FrameSpec {
  double omega_mw;  // MW carrier, rad/s
  double omega_rf;  // RF carrier, rad/s

  static FrameSpec resonant(const StaticParams& p) { return {p.d0, p.q}; }
};

// Control channel layout: {Re, Im} x {sigma+, sigma-} x {MW, RF}.
enum Channel : int {
  kMwPlusRe = 0,
  kMwPlusIm = 1,
  kMwMinusRe = 2,
  kMwMinusIm = 3,
  kRfPlusRe = 4,
  kRfPlusIm = 5,
  kRfMinusRe = 6,
  kRfMinusIm = 7,
};
inline constexpr int kNumChannels = 8;

inline constexpr double kMwAmpCap = kTwoPi * 10e6;  // rad/s
inline constexpr double kRfAmpCap = kTwoPi * 50e3;  // rad/s

inline bool is_mw_channel(int k) { return k < 4; }

const char* channel_name(int k);
int channel_from_name(const std::string& name);  // -1 if unknown

/// Piecewise-constant control amplitudes, kNumChannels x n_slices, rad/s.
struct ControlSet {
  double dt = 0.0;
  int n_slices = 0;
  Eigen::MatrixXd amps;  // kNumChannels x n_slices

  static ControlSet zeros(double dt, int n_slices);
  double duration() const { return dt * n_slices; }
};

/// Diagonal Hamiltonian D0 Sz^2 - Q Iz^2 - A Sz Iz on the 9-dim space.
Mat static_hamiltonian(const StaticParams& p);

/// Interaction-picture Hamiltonian for carriers (omega_mw, omega_rf):
/// (D0 - omega_mw) Sz^2 - (Q - omega_rf) Iz^2 - A Sz Iz. Diagonal; vanishes
/// apart from the hyperfine term at resonant carriers.
Mat rotating_hamiltonian(const StaticParams& p, const FrameSpec& f);

/// RWA drive generators, one per channel; Hermitian, traceless, unit
/// coupling so the amplitudes carry the Rabi angular frequency.
const std::array<Mat, kNumChannels>& control_hamiltonians();

/// Generator of slice j: H_rot + sum_k u_k(j) H_k.
Mat slice_generator(const ControlSet& cs, int j, const Mat& h_rot);

/// U = U_N ... U_1 with U_j = exp(-i dt (H_rot + sum_k u_k(j) H_k)).
Mat propagate(const ControlSet& cs, const StaticParams& p, const FrameSpec& f);

}  // namespace bsm
