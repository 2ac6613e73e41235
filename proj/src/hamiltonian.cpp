#include "bsm/hamiltonian.hpp"

#include <stdexcept>
#include <string>

namespace bsm {

void StaticParams::validate() const {
  if (!(d0 > 0) || !(q > 0) || !(a > 0))
    throw std::invalid_argument("StaticParams must be strictly positive");
}

const char* channel_name(int k) {
  static constexpr const char* kNames[kNumChannels] = {
      "mw_plus_re", "mw_plus_im", "mw_minus_re", "mw_minus_im",
      "rf_plus_re", "rf_plus_im", "rf_minus_re", "rf_minus_im"};
  return kNames[k];
}

int channel_from_name(const std::string& name) {
  for (int k = 0; k < kNumChannels; ++k)
    if (name == channel_name(k)) return k;
  return -1;
}

ControlSet ControlSet::zeros(double dt, int n_slices) {
  ControlSet cs;
  cs.dt = dt;
  cs.n_slices = n_slices;
  cs.amps = Eigen::MatrixXd::Zero(kNumChannels, n_slices);
  return cs;
}

Mat static_hamiltonian(const StaticParams& p) {
  p.validate();
  Mat h = Mat::Zero(9, 9);
  for (int i = 0; i < 9; ++i) {
    const BasisLabel b = basis_label(i);
    h(i, i) = p.d0 * b.ms * b.ms - p.q * b.mi * b.mi - p.a * b.ms * b.mi;
  }
  return h;
}

Mat rotating_hamiltonian(const StaticParams& p, const FrameSpec& f) {
  p.validate();
  const double de = p.d0 - f.omega_mw;
  const double dn = p.q - f.omega_rf;
  Mat h = Mat::Zero(9, 9);
  for (int i = 0; i < 9; ++i) {
    const BasisLabel b = basis_label(i);
    h(i, i) = de * b.ms * b.ms - dn * b.mi * b.mi - p.a * b.ms * b.mi;
  }
  return h;
}

namespace {

std::array<Mat, kNumChannels> build_control_hamiltonians() {
  std::array<Mat, kNumChannels> out;
  // |+1><0| and |-1><0| on a single qutrit in the (+1, 0, -1) ordering.
  Mat ladder_plus = Mat::Zero(3, 3), ladder_minus = Mat::Zero(3, 3);
  ladder_plus(0, 1) = 1.0;
  ladder_minus(2, 1) = 1.0;
  const auto quad = [](const Mat& ladder, bool imag) {
    const Mat e = imag ? Mat(cxd(0, 1) * ladder) : ladder;
    return Mat(0.5 * (e + e.adjoint()));
  };
  out[kMwPlusRe] = embed(quad(ladder_plus, false), Slot::electron);
  out[kMwPlusIm] = embed(quad(ladder_plus, true), Slot::electron);
  out[kMwMinusRe] = embed(quad(ladder_minus, false), Slot::electron);
  out[kMwMinusIm] = embed(quad(ladder_minus, true), Slot::electron);
  out[kRfPlusRe] = embed(quad(ladder_plus, false), Slot::nitrogen);
  out[kRfPlusIm] = embed(quad(ladder_plus, true), Slot::nitrogen);
  out[kRfMinusRe] = embed(quad(ladder_minus, false), Slot::nitrogen);
  out[kRfMinusIm] = embed(quad(ladder_minus, true), Slot::nitrogen);
  return out;
}

}  // namespace

const std::array<Mat, kNumChannels>& control_hamiltonians() {
  static const std::array<Mat, kNumChannels> ops = build_control_hamiltonians();
  return ops;
}

Mat slice_generator(const ControlSet& cs, int j, const Mat& h_rot) {
  Mat g = h_rot;
  const auto& ops = control_hamiltonians();
  for (int k = 0; k < kNumChannels; ++k) {
    const double u = cs.amps(k, j);
    if (u != 0.0) g += u * ops[k];
  }
  return g;
}

Mat propagate(const ControlSet& cs, const StaticParams& p, const FrameSpec& f) {
  const Mat h_rot = rotating_hamiltonian(p, f);
  Mat u = Mat::Identity(9, 9);
  for (int j = 0; j < cs.n_slices; ++j)
    u = expm_propagator(slice_generator(cs, j, h_rot), cs.dt) * u;
  return u;
}

}  // namespace bsm
