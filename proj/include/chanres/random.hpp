#pragma once

// Seeded samplers for states, unitaries and channels.
//
// Normal deviates are produced with Box-Muller on top of the raw 64-bit
// engine output so that a seed reproduces the same numbers on every
// standard library, not only on the one that produced a report.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "chanres/linalg.hpp"

namespace chanres {

class Rng {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  Complex complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re * M_SQRT1_2, im * M_SQRT1_2};
  }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline ComplexMatrix ginibre(Rng& rng, int rows, int cols) {
  ComplexMatrix g(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) g(i, j) = rng.complex_normal();
  return g;
}

/// Haar-distributed unitary (QR of a Ginibre matrix with the phase fix).
inline ComplexMatrix haar_unitary(Rng& rng, int d) {
  const ComplexMatrix g = ginibre(rng, d, d);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(d, d);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < d; ++k) {
    const Complex diag = r(k, k);
    const double mag = std::abs(diag);
    if (mag > 0) q.col(k) *= diag / mag;
  }
  return q;
}

/// Haar-random unit vector.
inline ComplexVector haar_pure_vector(Rng& rng, int d) {
  ComplexVector v(d);
  for (int i = 0; i < d; ++i) v(i) = rng.complex_normal();
  return v / v.norm();
}

/// Random mixed state G G^dagger / Tr from a d x rank Ginibre matrix
/// (Hilbert-Schmidt measure when rank == d).
inline ComplexMatrix random_density_matrix(Rng& rng, int d, int rank = -1) {
  if (rank <= 0) rank = d;
  const ComplexMatrix g = ginibre(rng, d, rank);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return hermitian_part(rho);
}

/// Kraus operators of a random CPTP map: Gaussian seeds stacked into a
/// (n_kraus*d_out) x d_in isometry via V (V^dagger V)^{-1/2}.
inline std::vector<ComplexMatrix> random_kraus(Rng& rng, int d_in, int d_out, int n_kraus) {
  const ComplexMatrix v = ginibre(rng, n_kraus * d_out, d_in);
  const ComplexMatrix gram = v.adjoint() * v;
  const ComplexMatrix inv_sqrt =
      spectral_apply(gram, [](double x) { return 1.0 / std::sqrt(x); });
  const ComplexMatrix iso = v * inv_sqrt;
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(n_kraus);
  for (int k = 0; k < n_kraus; ++k) kraus.push_back(iso.block(k * d_out, 0, d_out, d_in));
  return kraus;
}

}  // namespace chanres
