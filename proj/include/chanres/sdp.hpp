#pragma once

// Primal-dual interior-point solver for small Hermitian block SDPs
//
//   minimize   sum_b Re Tr(C_b X_b)
//   subject to sum_b Re Tr(A_ib X_b) = b_i,   X_b >= 0,
//
// with dual  maximize b.y  s.t.  Z_b = C_b - sum_i y_i A_ib >= 0.
//
// Search directions are HKM with Mehrotra predictor-corrector. Constraints
// are first replaced by an orthonormal basis of their span (thin SVD of the
// vectorized constraint matrices), which removes redundant rows such as the
// trace-preservation conditions implied by the DIO conditions.

#include <cmath>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "chanres/linalg.hpp"

namespace chanres {

/// Real coordinates of a square matrix: [Re entries..., Im entries...] in
/// column-major order. The Euclidean inner product equals Re Tr(A^dagger B).
inline void vectorize_into(const ComplexMatrix& m, Eigen::Ref<RealVector> out) {
  const Eigen::Index n = m.size();
  for (Eigen::Index k = 0; k < n; ++k) {
    out(k) = m.data()[k].real();
    out(n + k) = m.data()[k].imag();
  }
}

inline ComplexMatrix unvectorize(const Eigen::Ref<const RealVector>& v, int n) {
  ComplexMatrix m(n, n);
  const Eigen::Index sz = static_cast<Eigen::Index>(n) * n;
  for (Eigen::Index k = 0; k < sz; ++k) m.data()[k] = Complex(v(k), v(sz + k));
  return m;
}

struct SdpConstraint {
  std::vector<std::pair<int, ComplexMatrix>> terms;  // (block, Hermitian coefficient)
  double rhs = 0.0;
};

struct SdpProblem {
  std::vector<int> block_dims;
  std::vector<ComplexMatrix> cost;
  std::vector<SdpConstraint> constraints;
};

struct SdpOptions {
  double gap_tol = 1e-10;   // relative duality gap
  double feas_tol = 1e-11;  // relative residuals
  int max_iterations = 200;
  double step_fraction = 0.98;
};

struct SdpState {
  std::vector<ComplexMatrix> x;
  std::vector<ComplexMatrix> z;
  RealVector y;
};

struct SdpResult {
  SdpState state;
  double primal_objective = 0;
  double dual_objective = 0;
  double primal_infeasibility = 0;
  double dual_infeasibility = 0;
  int iterations = 0;
  bool converged = false;
};

class SdpSolver {
 public:
  using Observer = std::function<void(int iteration, const SdpState& state)>;

  explicit SdpSolver(SdpProblem problem) : problem_(std::move(problem)) { reduce_constraints(); }

  int num_blocks() const { return static_cast<int>(problem_.block_dims.size()); }
  int num_constraints() const { return static_cast<int>(rhs_.size()); }
  const SdpProblem& problem() const { return problem_; }

  /// C_b - A*(y)_b for the reduced constraint system.
  ComplexMatrix dual_slack(const RealVector& y, int block) const {
    return problem_.cost[block] - adjoint_block(y, block);
  }

  /// sum_i y_i A_ib.
  ComplexMatrix adjoint_block(const RealVector& y, int block) const {
    const int n = problem_.block_dims[block];
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (int i = 0; i < num_constraints(); ++i) out += y(i) * a_[i][block];
    return out;
  }

  double dual_objective(const RealVector& y) const { return rhs_.dot(y); }

  /// Lower bound on the optimal value valid for any y: b.y plus, per block,
  /// min(0, lambda_min(C_b - A*(y)_b)) times an upper bound on Tr X_b at an
  /// optimum. Returns -inf when a needed trace bound is infinite.
  double rigorous_bound(const RealVector& y, const std::vector<double>& trace_bounds) const {
    double bound = dual_objective(y);
    for (int b = 0; b < num_blocks(); ++b) {
      const double lmin = min_eigenvalue(dual_slack(y, b));
      if (lmin >= 0) continue;
      if (!std::isfinite(trace_bounds[b])) return -std::numeric_limits<double>::infinity();
      bound += lmin * trace_bounds[b];
    }
    return bound;
  }

  SdpResult solve(const SdpOptions& opt = {}, const Observer& observer = {}) const {
    const int nb = num_blocks();
    const int m = num_constraints();
    int n_total = 0;
    for (int d : problem_.block_dims) n_total += d;

    double c_norm = 0;
    for (const auto& c : problem_.cost) c_norm += c.squaredNorm();
    c_norm = std::sqrt(c_norm);
    const double b_norm = rhs_.norm();

    const double x_scale = std::max(1.0, rhs_.size() ? rhs_.cwiseAbs().maxCoeff() : 1.0);
    const double z_scale = std::max(1.0, c_norm);

    SdpState s;
    for (int b = 0; b < nb; ++b) {
      const int n = problem_.block_dims[b];
      s.x.push_back(x_scale * ComplexMatrix::Identity(n, n));
      s.z.push_back(z_scale * ComplexMatrix::Identity(n, n));
    }
    s.y = RealVector::Zero(m);

    SdpResult result;
    std::vector<ComplexMatrix> rd(nb), zinv(nb), k(nb), dx(nb), dz(nb), corr(nb);
    RealMatrix schur(m, m);

    for (int it = 0;; ++it) {
      const RealVector rp = rhs_ - apply(s.x);
      double rd_norm = 0, pobj = 0, mu = 0;
      for (int b = 0; b < nb; ++b) {
        rd[b] = problem_.cost[b] - s.z[b] - adjoint_block(s.y, b);
        rd_norm += rd[b].squaredNorm();
        pobj += real_inner(problem_.cost[b], s.x[b]);
        mu += real_inner(s.x[b], s.z[b]);
      }
      rd_norm = std::sqrt(rd_norm);
      mu /= n_total;
      const double dobj = dual_objective(s.y);
      result.primal_objective = pobj;
      result.dual_objective = dobj;
      result.primal_infeasibility = rp.norm() / (1 + b_norm);
      result.dual_infeasibility = rd_norm / (1 + c_norm);
      result.iterations = it;

      if (observer) observer(it, s);

      const bool small_gap = std::abs(pobj - dobj) <= opt.gap_tol * (1 + std::abs(pobj) + std::abs(dobj));
      if (small_gap && result.primal_infeasibility <= opt.feas_tol &&
          result.dual_infeasibility <= opt.feas_tol) {
        result.converged = true;
        break;
      }
      if (it >= opt.max_iterations) break;

      bool ok = true;
      for (int b = 0; b < nb && ok; ++b) {
        Eigen::LLT<ComplexMatrix> llt(s.z[b]);
        if (llt.info() != Eigen::Success) {
          ok = false;
          break;
        }
        zinv[b] = llt.solve(ComplexMatrix::Identity(s.z[b].rows(), s.z[b].cols()));
        zinv[b] = hermitian_part(zinv[b]);
      }
      if (!ok) break;

      // Schur complement M_ij = sum_b Re Tr(A_ib X_b A_jb Z_b^{-1}).
      schur.setZero();
      for (int b = 0; b < nb; ++b) {
        for (int j = 0; j < m; ++j) {
          if (a_zero_[j][b]) continue;
          const ComplexMatrix g = s.x[b] * a_[j][b] * zinv[b];
          for (int i = j; i < m; ++i) {
            if (a_zero_[i][b]) continue;
            schur(i, j) += real_inner(a_[i][b], g);
          }
        }
      }
      schur.triangularView<Eigen::StrictlyUpper>() = schur.transpose().eval();
      Eigen::LLT<RealMatrix> chol(schur);
      if (chol.info() != Eigen::Success) {
        const double reg = 1e-14 * std::max(1.0, schur.diagonal().cwiseAbs().maxCoeff());
        chol.compute(schur + reg * RealMatrix::Identity(m, m));
        if (chol.info() != Eigen::Success) break;
      }

      auto direction = [&](double sigma_mu, bool with_corr) {
        for (int b = 0; b < nb; ++b) {
          k[b] = sigma_mu * zinv[b] - s.x[b] - s.x[b] * rd[b] * zinv[b];
          if (with_corr) k[b] -= corr[b] * zinv[b];
        }
        const RealVector dy = chol.solve(rp - apply(k));
        for (int b = 0; b < nb; ++b) {
          dz[b] = rd[b] - adjoint_block(dy, b);
          ComplexMatrix d = sigma_mu * zinv[b] - s.x[b] - s.x[b] * dz[b] * zinv[b];
          if (with_corr) d -= corr[b] * zinv[b];
          dx[b] = hermitian_part(d);
        }
        return dy;
      };
      auto step_lengths = [&]() {
        double ap = 1.0, ad = 1.0;
        for (int b = 0; b < nb; ++b) {
          ap = std::min(ap, opt.step_fraction * max_step(s.x[b], dx[b]));
          ad = std::min(ad, opt.step_fraction * max_step(s.z[b], dz[b]));
        }
        return std::pair<double, double>{ap, ad};
      };

      direction(0.0, false);
      auto [ap_aff, ad_aff] = step_lengths();
      double mu_aff = 0;
      for (int b = 0; b < nb; ++b) {
        mu_aff += real_inner(s.x[b] + ap_aff * dx[b], s.z[b] + ad_aff * dz[b]);
        corr[b] = dx[b] * dz[b];
      }
      mu_aff /= n_total;
      const double ratio = mu > 0 ? std::clamp(mu_aff / mu, 0.0, 1.0) : 0.0;
      const double sigma = ratio * ratio * ratio;

      const RealVector dy = direction(sigma * mu, true);
      auto [ap, ad] = step_lengths();
      if (ap < 1e-12 && ad < 1e-12) break;
      for (int b = 0; b < nb; ++b) {
        s.x[b] = hermitian_part(s.x[b] + ap * dx[b]);
        s.z[b] = hermitian_part(s.z[b] + ad * dz[b]);
      }
      s.y += ad * dy;
    }
    result.state = std::move(s);
    return result;
  }

 private:
  RealVector apply(const std::vector<ComplexMatrix>& x) const {
    RealVector out = RealVector::Zero(num_constraints());
    for (int i = 0; i < num_constraints(); ++i)
      for (int b = 0; b < num_blocks(); ++b)
        if (!a_zero_[i][b]) out(i) += real_inner(a_[i][b], x[b]);
    return out;
  }

  /// Largest t with X + t dX >= 0 (inf if unbounded).
  static double max_step(const ComplexMatrix& x, const ComplexMatrix& dx) {
    Eigen::LLT<ComplexMatrix> llt(x);
    if (llt.info() != Eigen::Success) return 0.0;
    const auto l = llt.matrixL();
    ComplexMatrix w = l.solve(dx);
    w = l.solve(w.adjoint().eval());
    const double lmin = min_eigenvalue(hermitian_part(w));
    return lmin >= 0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
  }

  void reduce_constraints() {
    const int nb = num_blocks();
    if (static_cast<int>(problem_.cost.size()) != nb) {
      fail(ErrorCode::DimensionMismatch, "SDP cost list does not match block list");
    }
    std::vector<Eigen::Index> offset(nb + 1, 0);
    for (int b = 0; b < nb; ++b)
      offset[b + 1] = offset[b] + 2 * static_cast<Eigen::Index>(problem_.block_dims[b]) *
                                      problem_.block_dims[b];
    const Eigen::Index len = offset[nb];
    const auto m0 = static_cast<Eigen::Index>(problem_.constraints.size());
    RealMatrix cmat = RealMatrix::Zero(len, m0);
    RealVector b0(m0);
    for (Eigen::Index i = 0; i < m0; ++i) {
      const auto& con = problem_.constraints[i];
      for (const auto& [blk, mat] : con.terms) {
        const int n = problem_.block_dims[blk];
        if (mat.rows() != n || mat.cols() != n) {
          fail(ErrorCode::DimensionMismatch, "SDP constraint term has wrong block size");
        }
        RealVector v(2 * n * n);
        vectorize_into(hermitian_part(mat), v);
        cmat.col(i).segment(offset[blk], v.size()) += v;
      }
      b0(i) = con.rhs;
    }
    Eigen::JacobiSVD<RealMatrix> svd(cmat, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    int rank = 0;
    while (rank < sv.size() && sv(rank) > 1e-9 * smax) ++rank;

    const RealVector coeffs = svd.matrixV().leftCols(rank).transpose() * b0;
    // Inconsistent right-hand sides mean the affine set is empty.
    RealVector resid = b0 - svd.matrixV().leftCols(rank) * coeffs;
    if (resid.norm() > 1e-8 * (1 + b0.norm())) {
      fail(ErrorCode::Infeasible, "equality constraints are inconsistent");
    }
    rhs_.resize(rank);
    a_.assign(rank, std::vector<ComplexMatrix>(nb));
    a_zero_.assign(rank, std::vector<bool>(nb, false));
    for (int k = 0; k < rank; ++k) {
      rhs_(k) = coeffs(k) / sv(k);
      for (int b = 0; b < nb; ++b) {
        const int n = problem_.block_dims[b];
        const RealVector seg = svd.matrixU().col(k).segment(offset[b], 2 * n * n);
        a_[k][b] = hermitian_part(unvectorize(seg, n));
        a_zero_[k][b] = seg.cwiseAbs().maxCoeff() < 1e-15;
      }
    }
  }

  SdpProblem problem_;
  std::vector<std::vector<ComplexMatrix>> a_;  // reduced constraints, [constraint][block]
  std::vector<std::vector<bool>> a_zero_;
  RealVector rhs_;
};

}  // namespace chanres
