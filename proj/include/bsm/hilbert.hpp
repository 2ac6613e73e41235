#pragma once

#include <Eigen/Dense>
#include <complex>

// Dense complex linear algebra for the electron-nitrogen double-qutrit
// system: spin-1 operators, tensor embedding, Hermitian propagators and
// state metrics. Everything lives in a fixed 9-dimensional Hilbert space
// with electron as the major index.

namespace bsm {

using cxd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-10;

enum class Slot { electron, nitrogen };

/// Spin projection labels (m_s, m_I), each in {+1, 0, -1}.
struct BasisLabel {
  int ms;
  int mi;
};

// Index map: index = 3*ord(ms) + ord(mi), ord(+1)=0, ord(0)=1, ord(-1)=2.
int ord(int m);
int m_from_ord(int o);
int basis_index(const BasisLabel& b);
BasisLabel basis_label(int index);

/// Basis vector |ms, mi> in the 9-dimensional joint space.
Vec basis_ket(const BasisLabel& b);

struct Spin1 {
  Mat sx, sy, sz;
};

/// Standard spin-1 matrices in the (+1, 0, -1) ordering; S^2 = 2 I.
Spin1 spin1_operators();

/// op (x) I3 for the electron slot, I3 (x) op for the nitrogen slot.
Mat embed(const Mat& op3, Slot slot);

/// exp(-i H t) for Hermitian H via eigendecomposition (exact at dim <= 9).
/// Throws std::invalid_argument if H is not Hermitian.
Mat expm_propagator(const Mat& h, double t);

/// State fidelity <psi|rho|psi>. Throws if psi is not normalized.
double fidelity(const Mat& rho, const Vec& psi);

/// Reduced density matrix on the kept qutrit.
Mat partial_trace(const Mat& rho, Slot keep);

bool is_hermitian(const Mat& m, double tol = kHermitianTol);
bool is_unitary(const Mat& u, double tol = kUnitaryTol);
bool is_density_matrix(const Mat& rho, double tol = 1e-9);

/// Projector onto the logical subspace span{|+-1, +-1>}.
Mat logical_projector();

/// Logical-subspace indices in the 9-dim space: {0, 2, 6, 8}.
inline constexpr int kLogicalIndices[4] = {0, 2, 6, 8};

double max_abs(const Mat& m);

}  // namespace bsm
