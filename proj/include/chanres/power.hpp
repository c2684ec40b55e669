#pragma once

// Resource generating power Omega_D(N) = max over free rho of omega_D(N(rho))
// and the increasing power max over all rho of omega_D(N(rho)) - omega_D(rho).
//
// omega_D o N is convex (quasi-convex for D_max, being log2(1 + C_R)) on the
// incoherent simplex, so the generating power is attained at a basis state
// and is computed from d certified evaluations.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "chanres/measures.hpp"
#include "chanres/random.hpp"

namespace chanres {

struct PowerReport {
  double generating = 0;
  double increasing_lower_bound = 0;
  DensityMatrix maximizing_free_state = DensityMatrix::basis(1, 0);
  int maximizing_index = 0;
  DistanceMeasure measure = DistanceMeasure::TraceDistance;
  double certificate_gap = 0;
  std::vector<double> per_basis_state;  // omega_D(N(|i><i|))
};

inline PowerReport generating_power(const QuantumChannel& n,
                                    DistanceMeasure dm = DistanceMeasure::TraceDistance,
                                    std::optional<FreeStateSet> set = std::nullopt,
                                    const MeasureOptions& opt = {}) {
  const FreeStateSet free_set = set.value_or(FreeStateSet::incoherent(n.dim_in()));
  if (free_set.dim() != n.dim_in()) {
    fail(ErrorCode::DimensionMismatch, "free set does not match channel input");
  }
  const auto points = free_set.extreme_points();
  const FreeStateSet out_set = FreeStateSet::incoherent(n.dim_out());
  PowerReport rep;
  rep.measure = dm;
  rep.generating = -1;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const OmegaResult w = omega(dm, out_set, apply_channel(n, points[i]), opt);
    rep.per_basis_state.push_back(w.value);
    rep.certificate_gap = std::max(rep.certificate_gap, w.gap);
    if (w.value > rep.generating) {
      rep.generating = w.value;
      rep.maximizing_index = static_cast<int>(i);
      rep.maximizing_free_state = points[i];
    }
  }
  // A basis state has omega = 0, so it is a feasible point of the increasing
  // power search with the same value.
  rep.increasing_lower_bound = rep.generating;
  return rep;
}

struct IncreasingSearchResult {
  double value = 0;         // best omega(N(rho)) - omega(rho) found
  double random_start_best = -INFINITY;  // best over the Haar-random starts alone
  DensityMatrix argmax = DensityMatrix::basis(1, 0);
  int evaluations = 0;
};

struct SearchOptions {
  int restarts = 32;
  int iterations = 500;
  double initial_step = 0.2;
  double min_step = 1e-10;
  MeasureOptions measure;
};

namespace detail {

inline double increase_objective(const QuantumChannel& n, DistanceMeasure dm,
                                 const ComplexVector& psi, const MeasureOptions& opt) {
  const DensityMatrix rho = DensityMatrix::pure(psi);
  const FreeStateSet in_set = FreeStateSet::incoherent(n.dim_in());
  const FreeStateSet out_set = FreeStateSet::incoherent(n.dim_out());
  return omega(dm, out_set, apply_channel(n, rho), opt).value - omega(dm, in_set, rho, opt).value;
}

/// Projected gradient ascent on the unit sphere with central differences and
/// step halving on rejection.
template <typename F>
std::pair<ComplexVector, double> sphere_ascent(F&& f, ComplexVector psi, const SearchOptions& opt,
                                               int& evaluations) {
  const int d = static_cast<int>(psi.size());
  psi.normalize();
  double value = f(psi);
  ++evaluations;
  double step = opt.initial_step;
  constexpr double h = 1e-6;
  for (int it = 0; it < opt.iterations && step > opt.min_step; ++it) {
    ComplexVector grad = ComplexVector::Zero(d);
    for (int k = 0; k < 2 * d; ++k) {
      const Complex unit = k < d ? Complex(1, 0) : Complex(0, 1);
      ComplexVector up = psi, dn = psi;
      up(k % d) += h * unit;
      dn(k % d) -= h * unit;
      const double g = (f(up.normalized()) - f(dn.normalized())) / (2 * h);
      evaluations += 2;
      if (k < d)
        grad(k % d) = Complex(g, grad(k % d).imag());
      else
        grad(k % d) = Complex(grad(k % d).real(), g);
    }
    // Tangent component (real inner product on C^d).
    grad -= (psi.adjoint() * grad)(0).real() * psi;
    const double gn = grad.norm();
    if (gn < 1e-14) break;
    const ComplexVector candidate = (psi + step * grad / gn).normalized();
    const double cv = f(candidate);
    ++evaluations;
    if (cv > value) {
      psi = candidate;
      value = cv;
      step = std::min(1.0, step * 1.5);
    } else {
      step *= 0.5;
    }
  }
  return {psi, value};
}

}  // namespace detail

/// Multistart search for the increasing power. Starts are the basis states
/// (where the maximum sits for contractive metrics) followed by
/// `restarts` Haar-random pure states.
inline IncreasingSearchResult increasing_power_search(const QuantumChannel& n, DistanceMeasure dm,
                                                      Rng& rng, const SearchOptions& opt = {}) {
  if (n.dim_in() != n.dim_out()) {
    fail(ErrorCode::DimensionMismatch, "increasing power needs equal input and output dimension");
  }
  const int d = n.dim_in();
  auto f = [&](const ComplexVector& psi) { return detail::increase_objective(n, dm, psi, opt.measure); };
  IncreasingSearchResult out;
  out.value = -INFINITY;
  auto consider = [&](const ComplexVector& start, bool random_start) {
    auto [psi, v] = detail::sphere_ascent(f, start, opt, out.evaluations);
    if (random_start) out.random_start_best = std::max(out.random_start_best, v);
    if (v > out.value) {
      out.value = v;
      out.argmax = DensityMatrix::pure(psi);
    }
  };
  for (int i = 0; i < d; ++i) consider(ComplexVector::Unit(d, i), false);
  for (int r = 0; r < opt.restarts; ++r) consider(haar_pure_vector(rng, d), true);
  return out;
}

/// max_i |U_i1 U_i2| for a qubit unitary.
inline double qubit_unitary_power(const ComplexMatrix& u) {
  if (u.rows() != 2 || u.cols() != 2) fail(ErrorCode::DimensionMismatch, "expected a 2x2 unitary");
  if ((u.adjoint() * u - ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() > 1e-10) {
    fail(ErrorCode::NotUnitary, "U^dagger U != I");
  }
  return std::max(std::abs(u(0, 0) * u(0, 1)), std::abs(u(1, 0) * u(1, 1)));
}

struct ClauseResult {
  std::string clause;
  bool pass = false;
  double lhs = 0;  // must satisfy lhs <= rhs (+ slack)
  double rhs = 0;
  std::string witness;
};

struct PropertySuiteReport {
  std::vector<ClauseResult> clauses;
  bool all_pass() const {
    return std::all_of(clauses.begin(), clauses.end(), [](const auto& c) { return c.pass; });
  }
  double max_violation() const {
    double v = 0;
    for (const auto& c : clauses) v = std::max(v, c.lhs - c.rhs);
    return v;
  }
};

/// Checks the five structural properties of the trace-distance generating
/// power on (N1, N2) with free channels M1, M2 and mixing weight p:
///  (i)   Omega >= 0, and Omega(M) = 0 for members
///  (ii)  Omega(M1 o N1 o M2) <= Omega(N1)
///  (iii) Omega(p N1 + (1-p) N2) <= p Omega(N1) + (1-p) Omega(N2)
///  (iv)  Omega(N1 (x) N2) >= max(Omega(N1), Omega(N2))
///  (v)   Omega(N1 (x) N2) <= Omega(N1) + Omega(N2)
/// Tensor clauses use the incoherent set of the product basis.
inline PropertySuiteReport property_suite(const QuantumChannel& n1, const QuantumChannel& n2,
                                          const QuantumChannel& m1, const QuantumChannel& m2,
                                          double p, double slack = 1e-6,
                                          const MeasureOptions& opt = {}) {
  if (!is_mio(m1) || !is_mio(m2)) {
    fail(ErrorCode::InvalidChannel, "free witnesses must be MIO", "is_mio");
  }
  auto omega1 = [&](const QuantumChannel& c) {
    return generating_power(c, DistanceMeasure::TraceDistance, std::nullopt, opt).generating;
  };
  PropertySuiteReport rep;
  auto add = [&](std::string name, double lhs, double rhs, std::string witness) {
    rep.clauses.push_back({std::move(name), lhs <= rhs + slack, lhs, rhs, std::move(witness)});
  };
  const double w1 = omega1(n1), w2 = omega1(n2), wm1 = omega1(m1), wm2 = omega1(m2);
  add("i.nonnegative.N1", -w1, 0.0, n1.name());
  add("i.nonnegative.N2", -w2, 0.0, n2.name());
  add("i.free.M1", wm1, 0.0, m1.name());
  add("i.free.M2", wm2, 0.0, m2.name());
  add("ii.composition", omega1(compose(m1, compose(n1, m2))), w1,
      m1.name() + "*" + n1.name() + "*" + m2.name());
  add("iii.convexity", omega1(mixture({p, 1 - p}, {n1, n2})), p * w1 + (1 - p) * w2,
      "p=" + std::to_string(p));
  const double wt = omega1(tensor(n1, n2));
  add("iv.tensor_lower", std::max(w1, w2), wt, n1.name() + "(x)" + n2.name());
  add("v.tensor_upper", wt, w1 + w2, n1.name() + "(x)" + n2.name());
  return rep;
}

}  // namespace chanres
