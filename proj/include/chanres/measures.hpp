#pragma once

// Distances between states and the resource measures they induce relative
// to the incoherent set (exact) or the PPT set (outer relaxation of the
// separable set, so values are lower bounds).

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "chanres/convex.hpp"
#include "chanres/objects.hpp"

namespace chanres {

enum class DistanceMeasure { TraceDistance, FidelityDistance, MaxRelativeEntropy };

inline const char* to_string(DistanceMeasure d) {
  switch (d) {
    case DistanceMeasure::TraceDistance: return "trace";
    case DistanceMeasure::FidelityDistance: return "fidelity";
    case DistanceMeasure::MaxRelativeEntropy: return "dmax";
  }
  return "?";
}

struct FreeStateSet {
  enum class Kind { Incoherent, SeparablePPT };

  Kind kind = Kind::Incoherent;
  int dim_a = 0;
  int dim_b = 1;

  static FreeStateSet incoherent(int d) { return {Kind::Incoherent, d, 1}; }
  static FreeStateSet separable_ppt(int da, int db) { return {Kind::SeparablePPT, da, db}; }

  int dim() const { return dim_a * dim_b; }

  /// Values over the PPT set only bound the separable-set quantity from below.
  bool is_relaxation() const { return kind == Kind::SeparablePPT; }

  /// Pure extreme points; only the incoherent set has a finite list.
  std::vector<DensityMatrix> extreme_points() const {
    if (kind != Kind::Incoherent) {
      fail(ErrorCode::UnsupportedFreeSet, "separable extreme points are not enumerable");
    }
    std::vector<DensityMatrix> pts;
    for (int i = 0; i < dim(); ++i) pts.push_back(DensityMatrix::basis(dim(), i));
    return pts;
  }
};

struct MeasureOptions {
  double tol = 1e-6;
  bool qubit_fast_path = true;
  bool cross_validate = false;  // run the solver next to the qubit fast path
};

// ---------------------------------------------------------------------------
// Distances

/// Tr|sqrt(rho) sqrt(sigma)|
inline double fidelity(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  Eigen::JacobiSVD<ComplexMatrix> svd(psd_sqrt(rho) * psd_sqrt(sigma));
  return std::min(1.0, svd.singularValues().sum());
}

/// log2 min{t : rho <= t sigma}; +inf when supp(rho) is not inside supp(sigma).
inline double max_relative_entropy(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  const HermEig eig = herm_eig(sigma, 1e-8);
  const double cutoff = 1e-12 * std::max(1.0, eig.values(0));
  Eigen::Index rank = 0;
  while (rank < eig.values.size() && eig.values(rank) > cutoff) ++rank;
  const ComplexMatrix vs = eig.vectors.leftCols(rank);
  const ComplexMatrix outside = rho - vs * (vs.adjoint() * rho * vs) * vs.adjoint();
  if (outside.cwiseAbs().maxCoeff() > 1e-9) return std::numeric_limits<double>::infinity();
  RealVector inv_sqrt(rank);
  for (Eigen::Index k = 0; k < rank; ++k) inv_sqrt(k) = 1.0 / std::sqrt(eig.values(k));
  const ComplexMatrix m = inv_sqrt.asDiagonal() * (vs.adjoint() * rho * vs) * inv_sqrt.asDiagonal();
  return std::log2(std::max(max_eigenvalue(hermitian_part(m)), 1e-300));
}

inline double distance(DistanceMeasure d, const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) fail(ErrorCode::DimensionMismatch, "distance: state dimensions differ");
  switch (d) {
    case DistanceMeasure::TraceDistance:
      return 0.5 * trace_norm(rho.matrix() - sigma.matrix());
    case DistanceMeasure::FidelityDistance: {
      const double f = fidelity(rho.matrix(), sigma.matrix());
      return std::sqrt(std::max(0.0, 1.0 - f * f));
    }
    case DistanceMeasure::MaxRelativeEntropy:
      return std::max(0.0, max_relative_entropy(rho.matrix(), sigma.matrix()));
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Coherence measures

/// Sum of absolute off-diagonal entries.
inline double c_l1(const DensityMatrix& rho) { return off_diagonal_mass(rho.matrix()); }

/// Tr[W rho] - max_i W_ii: lower bound on min over diagonal states sigma of
/// ||rho - sigma||_1 for any Hermitian W with ||W||_inf <= 1.
inline double incoherent_dual_bound(const ComplexMatrix& rho, const ComplexMatrix& w) {
  return real_inner(w, rho) - w.diagonal().real().maxCoeff();
}

/// Tr sigma = 1 and vanishing off-diagonal entries.
inline std::vector<AffineConstraint> incoherent_state_constraints(int d) {
  std::vector<AffineConstraint> cons;
  cons.push_back({ComplexMatrix::Identity(d, d), 1.0});
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      ComplexMatrix re = ComplexMatrix::Zero(d, d);
      re(i, j) = re(j, i) = 0.5;
      ComplexMatrix im = ComplexMatrix::Zero(d, d);
      im(i, j) = Complex(0, 0.5);
      im(j, i) = Complex(0, -0.5);
      cons.push_back({re, 0.0});
      cons.push_back({im, 0.0});
    }
  return cons;
}

struct CoherenceResult {
  double value = 0;          // C_1 = (1/2) min ||rho - sigma||_1
  ComplexMatrix closest;     // diagonal minimizer sigma*
  CertifiedSolution certificate;  // in trace-norm units (twice C_1)
};

inline CertifiedSolution closest_incoherent_solve(const DensityMatrix& rho, double tol) {
  const int d = rho.dim();
  ConvexProblem p;
  p.target = rho.matrix();
  p.var_dim = d;
  p.map = [](const ComplexMatrix& x) { return x; };
  p.adjoint = p.map;
  p.affine_constraints = incoherent_state_constraints(d);
  p.var_trace_bound = 1.0;
  p.interior = ComplexMatrix::Identity(d, d) / static_cast<double>(d);
  SolverOptions opt;
  opt.tol = tol;
  opt.record_trace = false;
  return minimize_trace_norm(p, opt);
}

inline void require_certified(const CertifiedSolution& s, double tol, const char* what) {
  if (s.gap > tol) {
    fail(ErrorCode::MaxIterations, std::string(what) + ": certified gap " + std::to_string(s.gap) +
                                       " exceeds tolerance " + std::to_string(tol));
  }
}

/// Trace-norm coherence. Qubits use the closed form |rho_01| with an exact
/// dual certificate; other dimensions solve the certified program.
inline CoherenceResult c_trace(const DensityMatrix& rho, const MeasureOptions& opt = {}) {
  const int d = rho.dim();
  CoherenceResult out;
  if (d == 2 && opt.qubit_fast_path) {
    const Complex c = rho.matrix()(0, 1);
    const double r = std::abs(c);
    out.value = r;
    out.closest = diagonal_part(rho.matrix());
    ComplexMatrix w = ComplexMatrix::Zero(2, 2);
    if (r > 0) {
      w(0, 1) = c / r;
      w(1, 0) = std::conj(c) / r;
    }
    auto& cert = out.certificate;
    cert.minimizer = out.closest;
    cert.parameters = hermitian_coordinates(out.closest);
    cert.primal_value = trace_norm(rho.matrix() - out.closest);
    cert.dual_certificate = w;
    cert.dual_bound = std::min(cert.primal_value, incoherent_dual_bound(rho.matrix(), w));
    cert.gap = cert.primal_value - cert.dual_bound;
    cert.converged = true;
    if (opt.cross_validate) {
      const CertifiedSolution s = closest_incoherent_solve(rho, opt.tol);
      if (std::abs(s.primal_value - cert.primal_value) > opt.tol) {
        fail(ErrorCode::AssertionMismatch, "qubit closed form disagrees with solver");
      }
    }
    return out;
  }
  out.certificate = closest_incoherent_solve(rho, opt.tol);
  require_certified(out.certificate, opt.tol, "c_trace");
  out.value = 0.5 * out.certificate.primal_value;
  out.closest = out.certificate.minimizer;
  return out;
}

struct RobustnessResult {
  double value = 0;  // C_R = min Tr D - 1 over diagonal D >= rho
  double lower_bound = 0;
  double gap = 0;
  RealVector diagonal;  // the feasible D attaining `value`
};

/// Robustness of coherence via min{Tr D - 1 : D diagonal, D >= rho}, solved
/// over the slack S = D - rho >= 0 whose off-diagonal entries are pinned.
inline RobustnessResult c_robustness(const DensityMatrix& rho, const MeasureOptions& opt = {}) {
  const int d = rho.dim();
  const ComplexMatrix& r = rho.matrix();
  SdpProblem sdp;
  sdp.block_dims = {d};
  sdp.cost = {ComplexMatrix::Identity(d, d)};
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      ComplexMatrix re = ComplexMatrix::Zero(d, d);
      re(i, j) = re(j, i) = 0.5;
      ComplexMatrix im = ComplexMatrix::Zero(d, d);
      im(i, j) = Complex(0, 0.5);
      im(j, i) = Complex(0, -0.5);
      sdp.constraints.push_back({{{0, re}}, -r(i, j).real()});
      sdp.constraints.push_back({{{0, im}}, -r(i, j).imag()});
    }
  RobustnessResult out;
  out.value = std::numeric_limits<double>::infinity();
  out.lower_bound = 0.0;
  if (rho.is_diagonal(0.0)) {
    out.value = 0.0;
    out.diagonal = r.diagonal().real();
    return out;
  }
  const SdpSolver solver(std::move(sdp));
  auto observe = [&](int, const SdpState& s) {
    // Feasible D: diagonal of S + rho, shifted up until D >= rho.
    RealVector diag = (s.x[0] + r).diagonal().real();
    ComplexMatrix dm = ComplexMatrix::Zero(d, d);
    dm.diagonal() = diag.cast<Complex>();
    const double lmin = min_eigenvalue(dm - r);
    if (lmin < 0) diag.array() += -lmin * (1 + 1e-12) + 1e-15;
    const double value = diag.sum() - 1.0;
    if (value < out.value) {
      out.value = value;
      out.diagonal = diag;
    }
    // Tr S at an optimum equals C_R <= current value.
    out.lower_bound = std::max(out.lower_bound, solver.rigorous_bound(s.y, {out.value}));
  };
  solver.solve({}, observe);
  out.lower_bound = std::min(out.lower_bound, out.value);
  out.gap = out.value - out.lower_bound;
  if (out.gap > opt.tol) {
    fail(ErrorCode::MaxIterations, "c_robustness: certified gap " + std::to_string(out.gap));
  }
  return out;
}

struct FidelityBound {
  double achieved = 0;  // fidelity with `closest`, a feasible free state
  double upper = 1;     // certified upper bound on the maximum
  ComplexMatrix closest;
};

namespace detail {

/// Golden-section maximization of the concave map p -> F(rho, diag(p, 1-p)).
inline FidelityBound qubit_max_incoherent_fidelity(const ComplexMatrix& rho) {
  auto f = [&](double p) {
    ComplexMatrix s = ComplexMatrix::Zero(2, 2);
    s(0, 0) = p;
    s(1, 1) = 1 - p;
    return fidelity(rho, s);
  };
  const double g = (std::sqrt(5.0) - 1) / 2;
  double a = 0, b = 1;
  double c = b - g * (b - a), e = a + g * (b - a);
  double fc = f(c), fe = f(e);
  for (int k = 0; k < 200 && b - a > 1e-14; ++k) {
    if (fc < fe) {
      a = c;
      c = e;
      fc = fe;
      e = a + g * (b - a);
      fe = f(e);
    } else {
      b = e;
      e = c;
      fe = fc;
      c = b - g * (b - a);
      fc = f(c);
    }
  }
  FidelityBound out;
  const double p = 0.5 * (a + b);
  out.closest = ComplexMatrix::Zero(2, 2);
  out.closest(0, 0) = p;
  out.closest(1, 1) = 1 - p;
  out.achieved = f(p);
  out.upper = out.achieved;
  return out;
}

}  // namespace detail

/// Maximum fidelity between rho and the free set, from
/// max Re Tr[X V] s.t. [[Lambda, X], [X^dagger, sigma]] >= 0 where
/// rho = V Lambda V^dagger restricted to its support.
inline FidelityBound max_free_fidelity(const DensityMatrix& rho, const FreeStateSet& set,
                                       const MeasureOptions& opt = {}) {
  const int d = rho.dim();
  if (set.dim() != d) fail(ErrorCode::DimensionMismatch, "free set and state dimensions differ");
  if (set.kind == FreeStateSet::Kind::Incoherent && d == 2 && opt.qubit_fast_path) {
    return detail::qubit_max_incoherent_fidelity(rho.matrix());
  }
  const HermEig eig = herm_eig(rho.matrix(), 1e-8);
  int r = 0;
  while (r < d && eig.values(r) > 1e-12) ++r;
  const ComplexMatrix v = eig.vectors.leftCols(r);
  const int n = r + d;

  SdpProblem sdp;
  sdp.block_dims = {n};
  ComplexMatrix cost = ComplexMatrix::Zero(n, n);
  cost.block(0, r, r, d) = -0.5 * v.adjoint();
  cost.block(r, 0, d, r) = -0.5 * v;
  sdp.cost = {cost};
  auto embed = [n](const ComplexMatrix& m, int off) {
    ComplexMatrix e = ComplexMatrix::Zero(n, n);
    e.block(off, off, m.rows(), m.cols()) = m;
    return e;
  };
  for (const auto& e : hermitian_basis(r)) {
    ComplexMatrix lam = ComplexMatrix::Zero(r, r);
    lam.diagonal() = eig.values.head(r).cast<Complex>();
    sdp.constraints.push_back({{{0, embed(e, 0)}}, real_inner(e, lam)});
  }
  std::vector<double> trace_bounds = {2.0};
  if (set.kind == FreeStateSet::Kind::Incoherent) {
    for (const auto& c : incoherent_state_constraints(d)) {
      sdp.constraints.push_back({{{0, embed(c.g, r)}}, c.target});
    }
  } else {
    sdp.block_dims.push_back(d);
    sdp.cost.push_back(ComplexMatrix::Zero(d, d));
    sdp.constraints.push_back({{{0, embed(ComplexMatrix::Identity(d, d), r)}}, 1.0});
    for (const auto& f : hermitian_basis(d)) {
      const ComplexMatrix pt = partial_transpose(f, set.dim_a, set.dim_b, Subsystem::B);
      sdp.constraints.push_back({{{1, f}, {0, embed(-pt, r)}}, 0.0});
    }
    trace_bounds.push_back(1.0);
  }
  const SdpSolver solver(std::move(sdp));
  FidelityBound out;
  out.achieved = -1;
  out.upper = 1;
  auto feasible_sigma = [&](const ComplexMatrix& y) {
    ComplexMatrix s = hermitian_part(y.block(r, r, d, d));
    if (set.kind == FreeStateSet::Kind::Incoherent) {
      s = diagonal_part(s);
      for (int i = 0; i < d; ++i) s(i, i) = std::max(0.0, s(i, i).real());
      const double t = s.trace().real();
      return t > 0 ? ComplexMatrix(s / t) : ComplexMatrix(ComplexMatrix::Identity(d, d) / double(d));
    }
    const ComplexMatrix mixed = ComplexMatrix::Identity(d, d) / double(d);
    s /= s.trace().real();
    auto violation = [&](const ComplexMatrix& x) {
      return std::max(-min_eigenvalue(x),
                      -min_eigenvalue(partial_transpose(x, set.dim_a, set.dim_b, Subsystem::B)));
    };
    if (violation(s) <= 0) return s;
    double lo = 0, hi = 1;
    for (int k = 0; k < 60; ++k) {
      const double t = 0.5 * (lo + hi);
      (violation((1 - t) * s + t * mixed) <= 0 ? hi : lo) = t;
    }
    return ComplexMatrix((1 - hi) * s + hi * mixed);
  };
  auto observe = [&](int, const SdpState& s) {
    const ComplexMatrix sigma = feasible_sigma(s.x[0]);
    const double f = fidelity(rho.matrix(), sigma);
    if (f > out.achieved) {
      out.achieved = f;
      out.closest = sigma;
    }
    const double lb = solver.rigorous_bound(s.y, trace_bounds);
    out.upper = std::min(out.upper, -lb);
  };
  solver.solve({}, observe);
  out.upper = std::max(out.upper, out.achieved);
  return out;
}

struct OmegaResult {
  double value = 0;  // attained by a feasible free state (upper bound on the minimum)
  double gap = 0;
  bool lower_bound_semantics = false;  // PPT relaxation of the separable set
  ComplexMatrix closest;
};

struct PptBound {
  double value = 0;  // min over PPT states of ||rho - sigma||_1
  double gap = 0;
  bool is_lower_bound = true;  // Sep is contained in PPT, so value <= E_1
  ComplexMatrix closest;
};

/// min over PPT states of ||rho_AB - sigma||_1, a certified lower bound on
/// the separable-set trace distance E_1.
inline PptBound e1_ppt_bound(const DensityMatrix& rho, int dim_a, int dim_b,
                             const MeasureOptions& opt = {}) {
  const int n = dim_a * dim_b;
  if (rho.dim() != n) fail(ErrorCode::DimensionMismatch, "state is not dA*dB dimensional");
  ConvexProblem p;
  p.target = rho.matrix();
  p.var_dim = n;
  p.map = [](const ComplexMatrix& x) { return x; };
  p.adjoint = p.map;
  p.affine_constraints.push_back({ComplexMatrix::Identity(n, n), 1.0});
  ConeConstraint ppt;
  ppt.dim = n;
  ppt.map = [dim_a, dim_b](const ComplexMatrix& x) {
    return partial_transpose(x, dim_a, dim_b, Subsystem::B);
  };
  ppt.adjoint = ppt.map;
  ppt.offset = ComplexMatrix::Zero(n, n);
  ppt.trace_bound = 1.0;
  p.cone_constraints.push_back(ppt);
  p.var_trace_bound = 1.0;
  p.interior = ComplexMatrix::Identity(n, n) / static_cast<double>(n);
  SolverOptions sopt;
  sopt.tol = opt.tol;
  sopt.record_trace = false;
  const CertifiedSolution s = minimize_trace_norm(p, sopt);
  require_certified(s, opt.tol, "e1_ppt_bound");
  return {s.primal_value, s.gap, true, s.minimizer};
}

/// omega_D(rho) = min over the free set of D(rho, sigma).
inline OmegaResult omega(DistanceMeasure dm, const FreeStateSet& set, const DensityMatrix& rho,
                         const MeasureOptions& opt = {}) {
  if (set.dim() != rho.dim()) fail(ErrorCode::DimensionMismatch, "free set and state dimensions differ");
  OmegaResult out;
  out.lower_bound_semantics = set.is_relaxation();
  switch (dm) {
    case DistanceMeasure::TraceDistance: {
      if (set.kind == FreeStateSet::Kind::Incoherent) {
        const CoherenceResult c = c_trace(rho, opt);
        out.value = c.value;
        out.gap = 0.5 * c.certificate.gap;
        out.closest = c.closest;
      } else {
        const PptBound b = e1_ppt_bound(rho, set.dim_a, set.dim_b, opt);
        out.value = 0.5 * b.value;
        out.gap = 0.5 * b.gap;
        out.closest = b.closest;
      }
      return out;
    }
    case DistanceMeasure::FidelityDistance: {
      // sqrt(1 - F^2) blows up solver error near F = 1, so free inputs short-circuit.
      if (set.kind == FreeStateSet::Kind::Incoherent && rho.matrix().isDiagonal(kChannelTol)) {
        out.value = 0.0;
        out.gap = 0.0;
        out.closest = rho.matrix();
        return out;
      }
      const FidelityBound f = max_free_fidelity(rho, set, opt);
      out.value = std::sqrt(std::max(0.0, 1 - f.achieved * f.achieved));
      out.gap = out.value - std::sqrt(std::max(0.0, 1 - f.upper * f.upper));
      out.closest = f.closest;
      if (out.gap > std::sqrt(opt.tol)) {
        fail(ErrorCode::MaxIterations, "fidelity measure: certified gap " + std::to_string(out.gap));
      }
      return out;
    }
    case DistanceMeasure::MaxRelativeEntropy: {
      if (set.kind != FreeStateSet::Kind::Incoherent) {
        fail(ErrorCode::UnsupportedCombination, "max-relative entropy over the PPT set");
      }
      // min_sigma D_max(rho||sigma) = log2(1 + C_R(rho)), attained at D / Tr D.
      const RobustnessResult r = c_robustness(rho, opt);
      out.value = std::log2(1 + r.value);
      out.gap = out.value - std::log2(1 + r.lower_bound);
      out.closest = ComplexMatrix::Zero(rho.dim(), rho.dim());
      out.closest.diagonal() = (r.diagonal / r.diagonal.sum()).cast<Complex>();
      return out;
    }
  }
  return out;
}

}  // namespace chanres
