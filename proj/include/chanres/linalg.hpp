#pragma once

// Dense complex matrix kernel shared by every other header.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "chanres/error.hpp"

namespace chanres {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr double kHermitianTol = 1e-10;

inline void require_square(const ComplexMatrix& a, const char* what = "matrix") {
  if (a.rows() != a.cols()) {
    fail(ErrorCode::NonSquare, std::string(what) + " is " + std::to_string(a.rows()) + "x" +
                                   std::to_string(a.cols()));
  }
}

/// max_ij |A_ij - conj(A_ji)|
inline double hermiticity_defect(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) return INFINITY;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const ComplexMatrix& a, double tol = kHermitianTol) {
  return a.rows() == a.cols() && (a.size() == 0 || hermiticity_defect(a) <= tol);
}

inline ComplexMatrix hermitian_part(const ComplexMatrix& a) {
  return (a + a.adjoint()) * 0.5;
}

/// Re Tr(A^dagger B); for Hermitian arguments this is Tr(AB).
inline double real_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a.conjugate().cwiseProduct(b)).sum().real();
}

struct HermEig {
  RealVector values;      // descending
  ComplexMatrix vectors;  // columns are the matching orthonormal eigenvectors
};

/// Eigendecomposition A = V diag(values) V^dagger of a Hermitian matrix.
///
/// The input is checked against kHermitianTol and symmetrized before the
/// decomposition, so Choi matrices assembled with round-off are accepted.
inline HermEig herm_eig(const ComplexMatrix& a, double tol = kHermitianTol) {
  require_square(a);
  if (hermiticity_defect(a) > tol) {
    fail(ErrorCode::NotHermitian,
         "symmetry defect " + std::to_string(hermiticity_defect(a)) + " exceeds tolerance");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(a));
  if (solver.info() != Eigen::Success) {
    fail(ErrorCode::NoConvergence, "Hermitian eigensolver did not converge");
  }
  const Eigen::Index n = a.rows();
  HermEig out{RealVector(n), ComplexMatrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = solver.eigenvalues()(n - 1 - k);
    out.vectors.col(k) = solver.eigenvectors().col(n - 1 - k);
  }
  return out;
}

inline RealVector herm_eigenvalues(const ComplexMatrix& a) {
  require_square(a);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(a), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    fail(ErrorCode::NoConvergence, "Hermitian eigensolver did not converge");
  }
  return solver.eigenvalues().reverse();
}

inline double min_eigenvalue(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  return herm_eigenvalues(a).minCoeff();
}

inline double max_eigenvalue(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  return herm_eigenvalues(a).maxCoeff();
}

/// Sum of singular values. Hermitian inputs take the eigenvalue path.
inline double trace_norm(const ComplexMatrix& a) {
  require_square(a);
  if (a.size() == 0) return 0.0;
  if (hermiticity_defect(a) <= 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff())) {
    return herm_eigenvalues(a).cwiseAbs().sum();
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues().sum();
}

/// Largest singular value.
inline double operator_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  if (is_hermitian(a, 1e-12)) return herm_eigenvalues(a).cwiseAbs().maxCoeff();
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues()(0);
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

enum class Subsystem { A, B };

/// Traces out one factor of a (dim_a * dim_b)-dimensional operator.
inline ComplexMatrix partial_trace(const ComplexMatrix& x, int dim_a, int dim_b, Subsystem traced) {
  if (dim_a <= 0 || dim_b <= 0 || x.rows() != dim_a * dim_b || x.cols() != dim_a * dim_b) {
    fail(ErrorCode::DimensionMismatch, "partial_trace: operator is not (dA*dB)^2");
  }
  if (traced == Subsystem::B) {
    ComplexMatrix out = ComplexMatrix::Zero(dim_a, dim_a);
    for (int i = 0; i < dim_a; ++i)
      for (int j = 0; j < dim_a; ++j)
        out(i, j) = x.block(i * dim_b, j * dim_b, dim_b, dim_b).trace();
    return out;
  }
  ComplexMatrix out = ComplexMatrix::Zero(dim_b, dim_b);
  for (int i = 0; i < dim_a; ++i) out += x.block(i * dim_b, i * dim_b, dim_b, dim_b);
  return out;
}

/// Transposes one tensor factor: (|i k><j l|)^{T_B} = |i l><j k|.
inline ComplexMatrix partial_transpose(const ComplexMatrix& x, int dim_a, int dim_b,
                                       Subsystem which) {
  if (dim_a <= 0 || dim_b <= 0 || x.rows() != dim_a * dim_b || x.cols() != dim_a * dim_b) {
    fail(ErrorCode::DimensionMismatch, "partial_transpose: operator is not (dA*dB)^2");
  }
  ComplexMatrix out(x.rows(), x.cols());
  for (int i = 0; i < dim_a; ++i)
    for (int j = 0; j < dim_a; ++j)
      for (int k = 0; k < dim_b; ++k)
        for (int l = 0; l < dim_b; ++l) {
          if (which == Subsystem::B)
            out(i * dim_b + l, j * dim_b + k) = x(i * dim_b + k, j * dim_b + l);
          else
            out(j * dim_b + k, i * dim_b + l) = x(i * dim_b + k, j * dim_b + l);
        }
  return out;
}

/// Orthonormal basis of the real vector space of n x n Hermitian matrices
/// under Re Tr(A B): diagonal units, then (E_kl + E_lk)/sqrt2 and
/// i(E_kl - E_lk)/sqrt2 for k < l.
inline std::vector<ComplexMatrix> hermitian_basis(int n) {
  std::vector<ComplexMatrix> basis;
  basis.reserve(static_cast<std::size_t>(n) * n);
  const double s = 1.0 / std::sqrt(2.0);
  for (int k = 0; k < n; ++k) {
    ComplexMatrix e = ComplexMatrix::Zero(n, n);
    e(k, k) = 1.0;
    basis.push_back(std::move(e));
  }
  for (int k = 0; k < n; ++k) {
    for (int l = k + 1; l < n; ++l) {
      ComplexMatrix re = ComplexMatrix::Zero(n, n);
      re(k, l) = s;
      re(l, k) = s;
      basis.push_back(std::move(re));
      ComplexMatrix im = ComplexMatrix::Zero(n, n);
      im(k, l) = Complex(0, s);
      im(l, k) = Complex(0, -s);
      basis.push_back(std::move(im));
    }
  }
  return basis;
}

/// Matrix unit |i><j| in dimension n.
inline ComplexMatrix matrix_unit(int n, int i, int j) {
  ComplexMatrix e = ComplexMatrix::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

/// f applied to the spectrum of a Hermitian matrix.
template <typename F>
ComplexMatrix spectral_apply(const ComplexMatrix& a, F&& f) {
  const HermEig eig = herm_eig(a, 1e-8);
  RealVector mapped(eig.values.size());
  for (Eigen::Index k = 0; k < mapped.size(); ++k) mapped(k) = f(eig.values(k));
  return eig.vectors * mapped.asDiagonal() * eig.vectors.adjoint();
}

/// Square root of a PSD matrix; small negative eigenvalues are clipped.
inline ComplexMatrix psd_sqrt(const ComplexMatrix& a) {
  return spectral_apply(a, [](double v) { return v > 0 ? std::sqrt(v) : 0.0; });
}

inline double off_diagonal_mass(const ComplexMatrix& a) {
  double s = 0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (i != j) s += std::abs(a(i, j));
  return s;
}

inline ComplexMatrix diagonal_part(const ComplexMatrix& a) {
  ComplexMatrix d = ComplexMatrix::Zero(a.rows(), a.cols());
  d.diagonal() = a.diagonal();
  return d;
}

}  // namespace chanres
