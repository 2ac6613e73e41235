#include "bsm/hilbert.hpp"

#include <cmath>
#include <stdexcept>

namespace bsm {

int ord(int m) {
  switch (m) {
    case 1: return 0;
    case 0: return 1;
    case -1: return 2;
  }
  throw std::invalid_argument("spin projection must be +1, 0 or -1");
}

int m_from_ord(int o) {
  static constexpr int kM[3] = {1, 0, -1};
  if (o < 0 || o > 2) throw std::invalid_argument("ordinal out of range");
  return kM[o];
}

int basis_index(const BasisLabel& b) { return 3 * ord(b.ms) + ord(b.mi); }

BasisLabel basis_label(int index) {
  if (index < 0 || index > 8) throw std::invalid_argument("basis index out of range");
  return {m_from_ord(index / 3), m_from_ord(index % 3)};
}

Vec basis_ket(const BasisLabel& b) {
  Vec v = Vec::Zero(9);
  v(basis_index(b)) = 1.0;
  return v;
}

Spin1 spin1_operators() {
  const double r = 1.0 / std::sqrt(2.0);
  Mat sx = Mat::Zero(3, 3), sy = Mat::Zero(3, 3), sz = Mat::Zero(3, 3);
  sx(0, 1) = sx(1, 0) = sx(1, 2) = sx(2, 1) = r;
  sy(0, 1) = cxd(0, -r);
  sy(1, 0) = cxd(0, r);
  sy(1, 2) = cxd(0, -r);
  sy(2, 1) = cxd(0, r);
  sz(0, 0) = 1.0;
  sz(2, 2) = -1.0;
  return {sx, sy, sz};
}

Mat embed(const Mat& op3, Slot slot) {
  if (op3.rows() != 3 || op3.cols() != 3)
    throw std::invalid_argument("embed expects a 3x3 operator");
  const Mat id = Mat::Identity(3, 3);
  const Mat& a = (slot == Slot::electron) ? op3 : id;
  const Mat& b = (slot == Slot::electron) ? id : op3;
  Mat out(9, 9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      out.block(3 * i, 3 * j, 3, 3) = a(i, j) * b;
  return out;
}

Mat expm_propagator(const Mat& h, double t) {
  if (!is_hermitian(h, 1e-9 * std::max(1.0, max_abs(h))))
    throw std::invalid_argument("expm_propagator requires a Hermitian generator");
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  const Eigen::VectorXd lam = es.eigenvalues();
  const Mat& v = es.eigenvectors();
  Vec phases(lam.size());
  for (Eigen::Index k = 0; k < lam.size(); ++k)
    phases(k) = std::exp(cxd(0, -lam(k) * t));
  return v * phases.asDiagonal() * v.adjoint();
}

double fidelity(const Mat& rho, const Vec& psi) {
  if (std::abs(psi.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("fidelity target must be normalized");
  const double f = std::real(cxd(psi.adjoint() * rho * psi));
  return std::clamp(f, 0.0, 1.0);
}

Mat partial_trace(const Mat& rho, Slot keep) {
  Mat out = Mat::Zero(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        out(i, j) += (keep == Slot::electron) ? rho(3 * i + k, 3 * j + k)
                                              : rho(3 * k + i, 3 * k + j);
  return out;
}

bool is_hermitian(const Mat& m, double tol) {
  return max_abs(m - m.adjoint()) <= tol;
}

bool is_unitary(const Mat& u, double tol) {
  const Mat id = Mat::Identity(u.rows(), u.cols());
  return max_abs(u.adjoint() * u - id) <= tol;
}

bool is_density_matrix(const Mat& rho, double tol) {
  if (!is_hermitian(rho, tol)) return false;
  if (std::abs(rho.trace().real() - 1.0) > tol) return false;
  Eigen::SelfAdjointEigenSolver<Mat> es(rho);
  return es.eigenvalues().minCoeff() >= -tol;
}

Mat logical_projector() {
  Mat p = Mat::Zero(9, 9);
  for (int idx : kLogicalIndices) p(idx, idx) = 1.0;
  return p;
}

double max_abs(const Mat& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace bsm
