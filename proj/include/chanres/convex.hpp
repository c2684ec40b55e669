#pragma once

// Certified trace-norm minimization over spectrahedra, PSD projection and
// Dykstra alternating projections onto channel classes.

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "chanres/linalg.hpp"
#include "chanres/objects.hpp"
#include "chanres/sdp.hpp"

namespace chanres {

using MatrixMap = std::function<ComplexMatrix(const ComplexMatrix&)>;

/// Psi(X) + offset >= 0, with Psi Hermiticity preserving.
struct ConeConstraint {
  int dim = 0;
  MatrixMap map;
  MatrixMap adjoint;
  ComplexMatrix offset;
  double trace_bound = std::numeric_limits<double>::infinity();  // on Tr[Psi(X)+offset]
};

/// minimize ||target - map(X)||_1 over Hermitian X >= 0 with
/// Re Tr[G_k X] = g_k and the extra cone constraints.
struct ConvexProblem {
  ComplexMatrix target;
  int var_dim = 0;
  MatrixMap map;
  MatrixMap adjoint;
  std::vector<AffineConstraint> affine_constraints;
  std::vector<ConeConstraint> cone_constraints;
  double var_trace_bound = std::numeric_limits<double>::infinity();  // on Tr X at an optimum
  std::optional<ComplexMatrix> interior;                              // feasible, ideally strictly
};

struct IterationRecord {
  int iteration = 0;
  double primal = 0;
  double dual_bound = 0;
  double gap = 0;
};

struct CertifiedSolution {
  double primal_value = 0;  // objective at `minimizer`, which is exactly feasible
  double dual_bound = 0;    // rigorous lower bound on the optimum
  double gap = 0;           // primal_value - dual_bound
  ComplexMatrix minimizer;
  RealVector parameters;          // coordinates of minimizer in hermitian_basis
  ComplexMatrix dual_certificate;  // W with ||W||_inf <= 1
  RealVector multipliers;
  int iterations = 0;
  bool converged = false;
  std::vector<IterationRecord> trace;

  std::string trace_csv() const {
    std::ostringstream os;
    os << "iteration,primal,dual_bound,gap\n";
    char buf[128];
    for (const auto& r : trace) {
      std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g,%.12g\n", r.iteration, r.primal,
                    r.dual_bound, r.gap);
      os << buf;
    }
    return os.str();
  }
};

struct SolverOptions {
  double tol = 1e-6;
  int max_iterations = 200;
  bool record_trace = true;
};

inline RealVector hermitian_coordinates(const ComplexMatrix& x) {
  const auto basis = hermitian_basis(static_cast<int>(x.rows()));
  RealVector c(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) c(k) = real_inner(basis[k], x);
  return c;
}

/// Nearest PSD matrix in Frobenius norm: eigenvalues clipped at zero.
inline ComplexMatrix project_psd(const ComplexMatrix& a) {
  return spectral_apply(a, [](double v) { return v > 0 ? v : 0.0; });
}

/// Orthogonal projector onto {X Hermitian : Re Tr[G_k X] = g_k}.
class AffineProjector {
 public:
  AffineProjector(int dim, const std::vector<AffineConstraint>& cons) : dim_(dim) {
    const Eigen::Index len = 2 * static_cast<Eigen::Index>(dim) * dim;
    const auto m = static_cast<Eigen::Index>(cons.size());
    if (m == 0) return;
    RealMatrix cmat(len, m);
    RealVector b(m);
    for (Eigen::Index k = 0; k < m; ++k) {
      vectorize_into(hermitian_part(cons[k].g), cmat.col(k));
      b(k) = cons[k].target;
    }
    Eigen::JacobiSVD<RealMatrix> svd(cmat, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& sv = svd.singularValues();
    int rank = 0;
    while (rank < sv.size() && sv(rank) > 1e-9 * sv(0)) ++rank;
    const RealVector coeffs = svd.matrixV().leftCols(rank).transpose() * b;
    if ((b - svd.matrixV().leftCols(rank) * coeffs).norm() > 1e-8 * (1 + b.norm())) {
      fail(ErrorCode::Infeasible, "affine constraints are inconsistent");
    }
    basis_ = svd.matrixU().leftCols(rank);
    rhs_ = coeffs.cwiseQuotient(sv.head(rank));
  }

  ComplexMatrix project(const ComplexMatrix& x) const {
    if (basis_.cols() == 0) return hermitian_part(x);
    RealVector v(2 * x.size());
    vectorize_into(hermitian_part(x), v);
    v += basis_ * (rhs_ - basis_.transpose() * v);
    return hermitian_part(unvectorize(v, dim_));
  }

  double residual(const ComplexMatrix& x) const {
    if (basis_.cols() == 0) return 0.0;
    RealVector v(2 * x.size());
    vectorize_into(hermitian_part(x), v);
    return (basis_.transpose() * v - rhs_).cwiseAbs().maxCoeff();
  }

 private:
  int dim_;
  RealMatrix basis_;
  RealVector rhs_;
};

struct DykstraResult {
  ComplexMatrix point;
  int iterations = 0;
  bool converged = false;
};

/// Dykstra alternating projections onto PSD cone intersected with an affine
/// subspace; converges to the Frobenius-nearest point of the intersection.
/// Stops once the affine iterate has lambda_min >= -psd_tol.
inline DykstraResult dykstra_project(const ComplexMatrix& start, const AffineProjector& affine,
                                     double psd_tol = 1e-12, int max_iterations = 100000) {
  DykstraResult out;
  ComplexMatrix x = affine.project(start);
  ComplexMatrix p = ComplexMatrix::Zero(start.rows(), start.cols());
  ComplexMatrix q = p;
  for (int it = 1; it <= max_iterations; ++it) {
    const ComplexMatrix y = project_psd(x + p);
    p = x + p - y;
    const ComplexMatrix x_next = affine.project(y + q);
    q = y + q - x_next;
    const double change = (x_next - x).norm();
    x = x_next;
    out.iterations = it;
    if (min_eigenvalue(x) >= -psd_tol || change < 1e-15) {
      out.converged = min_eigenvalue(x) >= -psd_tol;
      break;
    }
  }
  out.point = x;
  return out;
}

namespace detail {

inline double cone_violation(const ConvexProblem& p, const ComplexMatrix& x) {
  double v = -min_eigenvalue(x);
  for (const auto& c : p.cone_constraints) v = std::max(v, -min_eigenvalue(c.map(x) + c.offset));
  return v;
}

/// Moves an approximately feasible X onto the feasible set: affine
/// projection, then the smallest mixing weight toward a feasible anchor that
/// restores positivity of every cone.
inline ComplexMatrix repair(const ConvexProblem& p, const AffineProjector& affine,
                            const ComplexMatrix& anchor, const ComplexMatrix& x) {
  constexpr double kPsdSlack = 1e-13;
  const ComplexMatrix xa = affine.project(x);
  if (cone_violation(p, xa) <= kPsdSlack) return xa;
  double lo = 0.0, hi = 1.0;
  for (int k = 0; k < 60; ++k) {
    const double t = 0.5 * (lo + hi);
    if (cone_violation(p, (1 - t) * xa + t * anchor) <= kPsdSlack)
      hi = t;
    else
      lo = t;
  }
  return (1 - hi) * xa + hi * anchor;
}

}  // namespace detail

/// Certified minimization of ||A - L(X)||_1.
///
/// The trace norm is lifted to min Tr P + Tr N with P - N = A - L(X),
/// P, N >= 0. Every iterate is repaired to an exactly feasible point, so the
/// reported primal value is an upper bound; the dual iterate is turned into
/// a rigorous lower bound, so `gap` bounds the error of `primal_value`.
inline CertifiedSolution minimize_trace_norm(const ConvexProblem& p, const SolverOptions& opt = {}) {
  if (opt.tol < 1e-8) fail(ErrorCode::Infeasible, "requested tolerance below 1e-8");
  require_square(p.target, "target");
  const int n = p.var_dim;
  const int m = static_cast<int>(p.target.rows());
  const AffineProjector affine(n, p.affine_constraints);

  // Phase 1: a feasible anchor for the repair step.
  ComplexMatrix anchor;
  if (p.interior) {
    anchor = *p.interior;
    if (affine.residual(anchor) > 1e-9 || detail::cone_violation(p, anchor) > 1e-12) {
      fail(ErrorCode::Infeasible, "supplied interior point is not feasible");
    }
  } else {
    if (!p.cone_constraints.empty()) {
      fail(ErrorCode::Infeasible, "problems with extra cones need an interior point");
    }
    const DykstraResult d = dykstra_project(ComplexMatrix::Identity(n, n), affine, opt.tol / 10);
    if (!d.converged) fail(ErrorCode::Infeasible, "alternating projections found no feasible point");
    anchor = project_psd(d.point);
    if (affine.residual(anchor) > opt.tol / 10) {
      fail(ErrorCode::Infeasible, "alternating projections found no feasible point");
    }
  }

  // Blocks: X, P, N, cone slacks.
  SdpProblem sdp;
  sdp.block_dims = {n, m, m};
  sdp.cost = {ComplexMatrix::Zero(n, n), ComplexMatrix::Identity(m, m),
              ComplexMatrix::Identity(m, m)};
  for (const auto& c : p.cone_constraints) {
    sdp.block_dims.push_back(c.dim);
    sdp.cost.push_back(ComplexMatrix::Zero(c.dim, c.dim));
  }
  for (const auto& c : p.affine_constraints) sdp.constraints.push_back({{{0, c.g}}, c.target});
  for (const auto& e : hermitian_basis(m)) {
    sdp.constraints.push_back(
        {{{0, p.adjoint(e)}, {1, e}, {2, -e}}, real_inner(e, p.target)});
  }
  for (std::size_t j = 0; j < p.cone_constraints.size(); ++j) {
    const auto& c = p.cone_constraints[j];
    for (const auto& f : hermitian_basis(c.dim)) {
      sdp.constraints.push_back(
          {{{static_cast<int>(3 + j), f}, {0, -c.adjoint(f)}}, real_inner(f, c.offset)});
    }
  }
  const SdpSolver solver(std::move(sdp));

  CertifiedSolution best;
  best.primal_value = std::numeric_limits<double>::infinity();
  best.dual_bound = 0.0;  // a norm is nonnegative
  best.minimizer = anchor;
  best.multipliers = RealVector::Zero(solver.num_constraints());
  best.dual_certificate = ComplexMatrix::Zero(m, m);
  {
    const double v = trace_norm(p.target - p.map(anchor));
    best.primal_value = v;
  }

  std::vector<double> bounds(solver.num_blocks(), std::numeric_limits<double>::infinity());
  bounds[0] = p.var_trace_bound;
  for (std::size_t j = 0; j < p.cone_constraints.size(); ++j) bounds[3 + j] = p.cone_constraints[j].trace_bound;

  auto observe = [&](int it, const SdpState& s) {
    const ComplexMatrix x = detail::repair(p, affine, anchor, s.x[0]);
    const double value = trace_norm(p.target - p.map(x));
    if (value < best.primal_value) {
      best.primal_value = value;
      best.minimizer = x;
    }
    // At an optimum Tr P + Tr N equals the optimal value.
    bounds[1] = bounds[2] = best.primal_value;
    const double lb = solver.rigorous_bound(s.y, bounds);
    if (lb > best.dual_bound) {
      best.dual_bound = lb;
      best.multipliers = s.y;
      best.dual_certificate = solver.adjoint_block(s.y, 1);
    }
    best.iterations = it;
    if (opt.record_trace) {
      best.trace.push_back({it, best.primal_value, best.dual_bound,
                            best.primal_value - best.dual_bound});
    }
  };

  SdpOptions sopt;
  sopt.max_iterations = opt.max_iterations;
  const SdpResult res = solver.solve(sopt, observe);
  (void)res;

  best.dual_bound = std::min(best.dual_bound, best.primal_value);
  best.gap = std::max(0.0, best.primal_value - best.dual_bound);
  best.converged = best.gap <= opt.tol;
  best.dual_certificate =
      spectral_apply(best.dual_certificate, [](double v) { return std::clamp(v, -1.0, 1.0); });
  best.parameters = hermitian_coordinates(best.minimizer);
  return best;
}

/// Nearest (Frobenius) member of an MIO/DIO class, via Dykstra on the Choi
/// matrix followed by a minimal mix with the interior point I/d to remove
/// residual negativity.
inline QuantumChannel project_channel_class(const QuantumChannel& n, const FreeChannelClass& cls,
                                            double tol = kMembershipTol) {
  if (n.dim_in() != cls.dim || n.dim_out() != cls.dim) {
    fail(ErrorCode::DimensionMismatch, "channel and class dimensions differ");
  }
  if (cls.contains(n, tol)) return n;
  const AffineProjector affine(cls.dim * cls.dim, cls.affine_constraints);
  const DykstraResult d = dykstra_project(n.choi(), affine, 1e-12, 100000);
  ConvexProblem shape;
  shape.var_dim = cls.dim * cls.dim;
  const ComplexMatrix choi = detail::repair(shape, affine, cls.interior_choi(), d.point);
  QuantumChannel out = QuantumChannel::from_choi(choi, cls.dim, cls.dim, kChannelTol,
                                                 std::string(to_string(cls.tag)) + "-projected");
  if (!cls.contains(out, tol)) {
    fail(ErrorCode::NoConvergence, "projection did not reach the channel class");
  }
  return out;
}

}  // namespace chanres
