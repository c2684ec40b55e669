#pragma once

// States, channels and the coherence-free channel classes.
//
// Choi convention: J = sum_ij |i><j| (x) N(|i><j|), input factor first, so
// the (i, j) block of J is N(|i><j|) and N(rho) = Tr_in[(rho^T (x) I) J].

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chanres/linalg.hpp"
#include "chanres/random.hpp"

namespace chanres {

inline constexpr double kStateTol = 1e-10;
inline constexpr double kChannelTol = 1e-9;
inline constexpr double kMembershipTol = 1e-8;

class DensityMatrix {
 public:
  /// Validates positivity and unit trace; the stored matrix is symmetrized.
  static DensityMatrix from_matrix(const ComplexMatrix& m, double tol = kStateTol) {
    require_square(m, "density matrix");
    if (m.rows() == 0) fail(ErrorCode::InvalidState, "empty matrix", "dim");
    if (hermiticity_defect(m) > tol) {
      fail(ErrorCode::InvalidState, "matrix is not Hermitian", "hermitian");
    }
    ComplexMatrix h = hermitian_part(m);
    if (std::abs(h.trace().real() - 1.0) > tol) {
      fail(ErrorCode::InvalidState, "trace " + std::to_string(h.trace().real()) + " != 1",
           "unit_trace");
    }
    const double lmin = min_eigenvalue(h);
    if (lmin < -tol) {
      fail(ErrorCode::InvalidState, "negative eigenvalue " + std::to_string(lmin), "positive");
    }
    return DensityMatrix(std::move(h));
  }

  static DensityMatrix pure(const ComplexVector& psi) {
    const double n = psi.norm();
    if (n == 0) fail(ErrorCode::InvalidState, "zero vector", "unit_trace");
    const ComplexVector v = psi / n;
    return DensityMatrix(v * v.adjoint());
  }

  static DensityMatrix basis(int d, int i) { return DensityMatrix(matrix_unit(d, i, i)); }

  static DensityMatrix maximally_mixed(int d) {
    return DensityMatrix(ComplexMatrix::Identity(d, d) / static_cast<double>(d));
  }

  /// |psi> = sum_i |i> / sqrt(d)
  static DensityMatrix maximally_coherent(int d) {
    return pure(ComplexVector::Ones(d));
  }

  static DensityMatrix plus() { return maximally_coherent(2); }

  static DensityMatrix random(Rng& rng, int d, int rank = -1) {
    return DensityMatrix(random_density_matrix(rng, d, rank));
  }

  static DensityMatrix random_pure(Rng& rng, int d) { return pure(haar_pure_vector(rng, d)); }

  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }
  bool is_diagonal(double tol = kMembershipTol) const {
    return (m_ - diagonal_part(m_)).cwiseAbs().maxCoeff() <= tol;
  }

 private:
  explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

/// Hermiticity-preserving linear map stored by its Choi matrix.
struct LinearMap {
  int dim_in = 0;
  int dim_out = 0;
  ComplexMatrix choi;

  /// Image of |i><j|.
  ComplexMatrix block(int i, int j) const {
    return choi.block(i * dim_out, j * dim_out, dim_out, dim_out);
  }

  ComplexMatrix apply(const ComplexMatrix& x) const {
    if (x.rows() != dim_in || x.cols() != dim_in) {
      fail(ErrorCode::DimensionMismatch, "map input dimension " + std::to_string(dim_in) +
                                             " does not match operator of size " +
                                             std::to_string(x.rows()));
    }
    ComplexMatrix out = ComplexMatrix::Zero(dim_out, dim_out);
    for (int i = 0; i < dim_in; ++i)
      for (int j = 0; j < dim_in; ++j)
        if (x(i, j) != Complex(0)) out += x(i, j) * block(i, j);
    return out;
  }

  bool is_unital(double tol = kChannelTol) const {
    return (apply(ComplexMatrix::Identity(dim_in, dim_in)) -
            ComplexMatrix::Identity(dim_out, dim_out))
               .cwiseAbs()
               .maxCoeff() <= tol;
  }
};

inline ComplexMatrix kraus_to_choi(const std::vector<ComplexMatrix>& kraus) {
  if (kraus.empty()) fail(ErrorCode::InvalidChannel, "empty Kraus list", "kraus_nonempty");
  const auto d_out = kraus.front().rows();
  const auto d_in = kraus.front().cols();
  ComplexMatrix choi = ComplexMatrix::Zero(d_in * d_out, d_in * d_out);
  for (const auto& k : kraus) {
    if (k.rows() != d_out || k.cols() != d_in) {
      fail(ErrorCode::DimensionMismatch, "Kraus operators have inconsistent shapes");
    }
    ComplexVector v(d_in * d_out);
    for (Eigen::Index i = 0; i < d_in; ++i) v.segment(i * d_out, d_out) = k.col(i);
    choi += v * v.adjoint();
  }
  return choi;
}

/// Kraus operators from the eigendecomposition of a PSD Choi matrix; one
/// operator per eigenvalue above 1e-10.
inline std::vector<ComplexMatrix> choi_to_kraus(const ComplexMatrix& choi, int dim_in, int dim_out,
                                                double tol = kChannelTol) {
  if (choi.rows() != dim_in * dim_out || choi.cols() != dim_in * dim_out) {
    fail(ErrorCode::DimensionMismatch, "Choi matrix size does not match dim_in*dim_out");
  }
  const HermEig eig = herm_eig(choi, 1e-8);
  if (eig.values.minCoeff() < -tol) {
    fail(ErrorCode::NotPSD, "Choi matrix has eigenvalue " + std::to_string(eig.values.minCoeff()),
         "choi_psd");
  }
  std::vector<ComplexMatrix> kraus;
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    if (eig.values(k) <= 1e-10) continue;
    const ComplexVector v = std::sqrt(eig.values(k)) * eig.vectors.col(k);
    ComplexMatrix op(dim_out, dim_in);
    for (int i = 0; i < dim_in; ++i) op.col(i) = v.segment(i * dim_out, dim_out);
    kraus.push_back(std::move(op));
  }
  return kraus;
}

class QuantumChannel {
 public:
  static QuantumChannel from_choi(const ComplexMatrix& choi, int dim_in, int dim_out,
                                  double tol = kChannelTol, std::string name = {}) {
    if (dim_in <= 0 || dim_out <= 0 || choi.rows() != dim_in * dim_out ||
        choi.cols() != dim_in * dim_out) {
      fail(ErrorCode::InvalidChannel, "Choi matrix size does not match dim_in*dim_out",
           "choi_shape");
    }
    if (hermiticity_defect(choi) > tol) {
      fail(ErrorCode::InvalidChannel, "Choi matrix is not Hermitian", "choi_hermitian");
    }
    QuantumChannel ch;
    ch.map_ = LinearMap{dim_in, dim_out, hermitian_part(choi)};
    ch.name_ = std::move(name);
    ch.validate(tol);
    return ch;
  }

  static QuantumChannel from_kraus(const std::vector<ComplexMatrix>& kraus,
                                   double tol = kChannelTol, std::string name = {}) {
    const ComplexMatrix choi = kraus_to_choi(kraus);
    const int d_in = static_cast<int>(kraus.front().cols());
    const int d_out = static_cast<int>(kraus.front().rows());
    ComplexMatrix completeness = ComplexMatrix::Zero(d_in, d_in);
    for (const auto& k : kraus) completeness += k.adjoint() * k;
    if ((completeness - ComplexMatrix::Identity(d_in, d_in)).cwiseAbs().maxCoeff() > tol) {
      fail(ErrorCode::InvalidChannel, "sum K^dagger K != I", "kraus_completeness");
    }
    QuantumChannel ch = from_choi(choi, d_in, d_out, tol, std::move(name));
    ch.kraus_ = kraus;
    return ch;
  }

  int dim_in() const { return map_.dim_in; }
  int dim_out() const { return map_.dim_out; }
  const ComplexMatrix& choi() const { return map_.choi; }
  const std::optional<std::vector<ComplexMatrix>>& kraus() const { return kraus_; }
  const LinearMap& as_map() const { return map_; }
  const std::string& name() const { return name_; }
  QuantumChannel& set_name(std::string name) {
    name_ = std::move(name);
    return *this;
  }

  ComplexMatrix block(int i, int j) const { return map_.block(i, j); }

  /// Linear extension to arbitrary (not necessarily Hermitian) operators.
  ComplexMatrix apply(const ComplexMatrix& x) const { return map_.apply(x); }

  /// Kraus factors, computed from the Choi matrix when none were supplied.
  std::vector<ComplexMatrix> kraus_or_derived() const {
    if (kraus_) return *kraus_;
    return choi_to_kraus(map_.choi, dim_in(), dim_out());
  }

 private:
  QuantumChannel() = default;

  void validate(double tol) const {
    const double lmin = min_eigenvalue(map_.choi);
    if (lmin < -tol) {
      fail(ErrorCode::InvalidChannel, "Choi matrix has eigenvalue " + std::to_string(lmin),
           "choi_psd");
    }
    const ComplexMatrix tr_out = partial_trace(map_.choi, dim_in(), dim_out(), Subsystem::B);
    if ((tr_out - ComplexMatrix::Identity(dim_in(), dim_in())).cwiseAbs().maxCoeff() > tol) {
      fail(ErrorCode::InvalidChannel, "Tr_out(J) != I", "trace_preserving");
    }
  }

  LinearMap map_;
  std::optional<std::vector<ComplexMatrix>> kraus_;
  std::string name_;
};

inline DensityMatrix apply_channel(const QuantumChannel& n, const DensityMatrix& rho) {
  if (rho.dim() != n.dim_in()) {
    fail(ErrorCode::DimensionMismatch, "state dimension " + std::to_string(rho.dim()) +
                                           " != channel input " + std::to_string(n.dim_in()));
  }
  return DensityMatrix::from_matrix(n.apply(rho.matrix()), kChannelTol);
}

/// sum_k K rho K^dagger; used as an independent route to the Choi action.
inline ComplexMatrix apply_kraus(const std::vector<ComplexMatrix>& kraus, const ComplexMatrix& x) {
  ComplexMatrix out = ComplexMatrix::Zero(kraus.front().rows(), kraus.front().rows());
  for (const auto& k : kraus) out += k * x * k.adjoint();
  return out;
}

// ---------------------------------------------------------------------------
// Named channels

inline QuantumChannel identity_channel(int d) {
  return QuantumChannel::from_kraus({ComplexMatrix::Identity(d, d)}, kChannelTol, "identity");
}

inline QuantumChannel unitary_channel(const ComplexMatrix& u, std::string name = "unitary") {
  require_square(u, "unitary");
  if ((u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() >
      1e-10) {
    fail(ErrorCode::NotUnitary, "U^dagger U != I");
  }
  return QuantumChannel::from_kraus({u}, kChannelTol, std::move(name));
}

inline ComplexMatrix hadamard_matrix() {
  ComplexMatrix h(2, 2);
  h << 1, 1, 1, -1;
  return h / std::sqrt(2.0);
}

inline QuantumChannel hadamard_channel() { return unitary_channel(hadamard_matrix(), "hadamard"); }

/// Completely dephasing map: Kraus operators |i><i|.
inline QuantumChannel dephasing_channel(int d) {
  std::vector<ComplexMatrix> kraus;
  for (int i = 0; i < d; ++i) kraus.push_back(matrix_unit(d, i, i));
  return QuantumChannel::from_kraus(kraus, kChannelTol, "dephasing");
}

/// Constant channel tau -> sigma, J = I (x) sigma.
///
/// When sigma is diagonal the Kraus set {sqrt(q_j)|j><i|} is attached; each
/// operator has at most one nonzero entry, which certifies SIO (and IO).
inline QuantumChannel replacement_channel(const DensityMatrix& sigma, int dim_in = -1) {
  const int d_out = sigma.dim();
  if (dim_in <= 0) dim_in = d_out;
  if (sigma.is_diagonal(1e-14)) {
    std::vector<ComplexMatrix> kraus;
    for (int j = 0; j < d_out; ++j) {
      const double q = sigma.matrix()(j, j).real();
      if (q <= 0) continue;
      for (int i = 0; i < dim_in; ++i) {
        ComplexMatrix k = ComplexMatrix::Zero(d_out, dim_in);
        k(j, i) = std::sqrt(q);
        kraus.push_back(std::move(k));
      }
    }
    return QuantumChannel::from_kraus(kraus, kChannelTol, "replacement");
  }
  return QuantumChannel::from_choi(kron(ComplexMatrix::Identity(dim_in, dim_in), sigma.matrix()),
                                   dim_in, d_out, kChannelTol, "replacement");
}

inline QuantumChannel random_channel(Rng& rng, int d, int n_kraus = -1) {
  if (n_kraus <= 0) n_kraus = d * d;
  return QuantumChannel::from_kraus(random_kraus(rng, d, d, n_kraus), kChannelTol, "random");
}

inline QuantumChannel random_unitary_channel(Rng& rng, int d) {
  return unitary_channel(haar_unitary(rng, d), "haar_unitary");
}

// ---------------------------------------------------------------------------
// Channel algebra

/// Choi matrix of the map x -> f(x) built from the images of |i><j|.
template <typename F>
ComplexMatrix choi_from_action(int dim_in, int dim_out, F&& f) {
  ComplexMatrix choi = ComplexMatrix::Zero(dim_in * dim_out, dim_in * dim_out);
  for (int i = 0; i < dim_in; ++i)
    for (int j = 0; j < dim_in; ++j)
      choi.block(i * dim_out, j * dim_out, dim_out, dim_out) = f(matrix_unit(dim_in, i, j));
  return choi;
}

/// outer o inner (inner is applied first).
inline QuantumChannel compose(const QuantumChannel& outer, const QuantumChannel& inner) {
  if (inner.dim_out() != outer.dim_in()) {
    fail(ErrorCode::DimensionMismatch, "compose: inner output != outer input");
  }
  const ComplexMatrix choi = choi_from_action(
      inner.dim_in(), outer.dim_out(), [&](const ComplexMatrix& x) { return outer.apply(inner.apply(x)); });
  return QuantumChannel::from_choi(choi, inner.dim_in(), outer.dim_out(), kChannelTol,
                                   outer.name() + "*" + inner.name());
}

inline QuantumChannel tensor(const QuantumChannel& a, const QuantumChannel& b) {
  const int din = a.dim_in() * b.dim_in();
  const int dout = a.dim_out() * b.dim_out();
  ComplexMatrix choi = ComplexMatrix::Zero(din * dout, din * dout);
  for (int i1 = 0; i1 < a.dim_in(); ++i1)
    for (int i2 = 0; i2 < b.dim_in(); ++i2)
      for (int j1 = 0; j1 < a.dim_in(); ++j1)
        for (int j2 = 0; j2 < b.dim_in(); ++j2) {
          const int i = i1 * b.dim_in() + i2;
          const int j = j1 * b.dim_in() + j2;
          choi.block(i * dout, j * dout, dout, dout) = kron(a.block(i1, j1), b.block(i2, j2));
        }
  return QuantumChannel::from_choi(choi, din, dout, kChannelTol, a.name() + "(x)" + b.name());
}

inline QuantumChannel mixture(const std::vector<double>& weights,
                              const std::vector<QuantumChannel>& channels) {
  if (weights.size() != channels.size() || channels.empty()) {
    fail(ErrorCode::DimensionMismatch, "mixture: weights and channels differ in length");
  }
  ComplexMatrix choi = ComplexMatrix::Zero(channels[0].choi().rows(), channels[0].choi().cols());
  for (std::size_t k = 0; k < channels.size(); ++k) {
    if (channels[k].choi().rows() != choi.rows()) {
      fail(ErrorCode::DimensionMismatch, "mixture: channel dimensions differ");
    }
    choi += weights[k] * channels[k].choi();
  }
  return QuantumChannel::from_choi(choi, channels[0].dim_in(), channels[0].dim_out(), kChannelTol,
                                   "mixture");
}

/// Map M with Tr[M(A) B] = Tr[A N(B)]; for Kraus form this is A -> sum K^dagger A K.
inline LinearMap adjoint_channel(const QuantumChannel& n) {
  const int din = n.dim_in();
  const int dout = n.dim_out();
  // M(A)_{lk} = Tr[A N(|k><l|)]
  const ComplexMatrix choi = choi_from_action(dout, din, [&](const ComplexMatrix& a) {
    ComplexMatrix out(din, din);
    for (int k = 0; k < din; ++k)
      for (int l = 0; l < din; ++l) out(l, k) = (a * n.block(k, l)).trace();
    return out;
  });
  return LinearMap{dout, din, choi};
}

// ---------------------------------------------------------------------------
// Class membership

/// Every N(|i><i|) is diagonal.
inline bool is_mio(const QuantumChannel& n, double tol = kMembershipTol) {
  for (int i = 0; i < n.dim_in(); ++i) {
    const ComplexMatrix b = n.block(i, i);
    if ((b - diagonal_part(b)).cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

/// MIO and every N(|i><j|), i != j, has zero diagonal.
inline bool is_dio(const QuantumChannel& n, double tol = kMembershipTol) {
  if (!is_mio(n, tol)) return false;
  for (int i = 0; i < n.dim_in(); ++i)
    for (int j = 0; j < n.dim_in(); ++j)
      if (i != j && n.block(i, j).diagonal().cwiseAbs().maxCoeff() > tol) return false;
  return true;
}

/// Kraus-wise IO condition: each K maps every |a><a| to a diagonal operator.
/// Linearity reduces "all incoherent states" to the basis projectors.
inline bool kraus_certifies_io(const std::vector<ComplexMatrix>& kraus, double tol = kMembershipTol) {
  for (const auto& k : kraus) {
    const int d = static_cast<int>(k.cols());
    for (int a = 0; a < d; ++a) {
      const ComplexMatrix img = k * matrix_unit(d, a, a) * k.adjoint();
      if ((img - diagonal_part(img)).cwiseAbs().maxCoeff() > tol) return false;
    }
  }
  return true;
}

/// Kraus-wise SIO condition Delta(K X K^dagger) = K Delta(X) K^dagger, checked
/// on the operator basis |a><b| (sufficient by linearity).
inline bool kraus_certifies_sio(const std::vector<ComplexMatrix>& kraus,
                                double tol = kMembershipTol) {
  for (const auto& k : kraus) {
    const int d = static_cast<int>(k.cols());
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        const ComplexMatrix x = matrix_unit(d, a, b);
        const ComplexMatrix lhs = diagonal_part(k * x * k.adjoint());
        const ComplexMatrix rhs = k * diagonal_part(x) * k.adjoint();
        if ((lhs - rhs).cwiseAbs().maxCoeff() > tol) return false;
      }
  }
  return true;
}

enum class ClassTag { MIO, DIO, SIO, IO };

inline const char* to_string(ClassTag tag) {
  switch (tag) {
    case ClassTag::MIO: return "MIO";
    case ClassTag::DIO: return "DIO";
    case ClassTag::SIO: return "SIO";
    case ClassTag::IO: return "IO";
  }
  return "?";
}

struct AffineConstraint {
  ComplexMatrix g;  // Hermitian
  double target;    // Tr[g J] = target
};

/// Convex Choi-space description of MIO or DIO on d-dimensional systems:
/// trace preservation plus the class conditions, each as Tr[G_k J] = g_k.
struct FreeChannelClass {
  ClassTag tag = ClassTag::MIO;
  int dim = 0;
  std::vector<AffineConstraint> affine_constraints;

  static FreeChannelClass mio(int d) { return make(ClassTag::MIO, d); }
  static FreeChannelClass dio(int d) { return make(ClassTag::DIO, d); }
  static FreeChannelClass of(ClassTag tag, int d) {
    if (tag != ClassTag::MIO && tag != ClassTag::DIO) {
      fail(ErrorCode::UnsupportedCombination,
           std::string("no convex Choi characterization for ") + to_string(tag));
    }
    return make(tag, d);
  }

  bool contains(const QuantumChannel& n, double tol = kMembershipTol) const {
    if (n.dim_in() != dim || n.dim_out() != dim) return false;
    return tag == ClassTag::DIO ? is_dio(n, tol) : is_mio(n, tol);
  }

  double max_violation(const ComplexMatrix& choi) const {
    double v = 0;
    for (const auto& c : affine_constraints) v = std::max(v, std::abs(real_inner(c.g, choi) - c.target));
    return v;
  }

  /// Strictly positive member: the replacement channel onto I/d.
  ComplexMatrix interior_choi() const {
    return ComplexMatrix::Identity(dim * dim, dim * dim) / static_cast<double>(dim);
  }

 private:
  static FreeChannelClass make(ClassTag tag, int d) {
    FreeChannelClass cls;
    cls.tag = tag;
    cls.dim = d;
    const int n = d * d;
    auto idx = [d](int in, int out) { return in * d + out; };
    // Re/Im of J_pq as Re Tr[G J].
    auto re_entry = [n](int p, int q) {
      ComplexMatrix g = ComplexMatrix::Zero(n, n);
      g(q, p) += 0.5;
      g(p, q) += 0.5;
      return g;
    };
    auto im_entry = [n](int p, int q) {
      ComplexMatrix g = ComplexMatrix::Zero(n, n);
      g(q, p) += Complex(0, -0.5);
      g(p, q) += Complex(0, 0.5);
      return g;
    };
    // Tr_out J = I
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) {
        ComplexMatrix re = ComplexMatrix::Zero(n, n);
        ComplexMatrix im = ComplexMatrix::Zero(n, n);
        for (int k = 0; k < d; ++k) {
          re += re_entry(idx(i, k), idx(j, k));
          if (i != j) im += im_entry(idx(i, k), idx(j, k));
        }
        if (i == j) re = hermitian_part(re);
        cls.affine_constraints.push_back({re, i == j ? 1.0 : 0.0});
        if (i != j) cls.affine_constraints.push_back({im, 0.0});
      }
    }
    // MIO: off-diagonal entries of each diagonal block vanish.
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < d; ++k)
        for (int l = k + 1; l < d; ++l) {
          cls.affine_constraints.push_back({re_entry(idx(i, k), idx(i, l)), 0.0});
          cls.affine_constraints.push_back({im_entry(idx(i, k), idx(i, l)), 0.0});
        }
    if (tag == ClassTag::DIO) {
      // Diagonals of off-diagonal blocks vanish.
      for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
          for (int k = 0; k < d; ++k) {
            cls.affine_constraints.push_back({re_entry(idx(i, k), idx(j, k)), 0.0});
            cls.affine_constraints.push_back({im_entry(idx(i, k), idx(j, k)), 0.0});
          }
    }
    return cls;
  }
};

}  // namespace chanres
