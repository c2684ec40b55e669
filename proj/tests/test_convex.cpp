#include <gtest/gtest.h>

#include "chanres/convex.hpp"
#include "chanres/discrimination.hpp"
#include "oracles.hpp"

using namespace chanres;

namespace {

ConvexProblem closest_diagonal(const ComplexMatrix& rho) {
  const int d = static_cast<int>(rho.rows());
  ConvexProblem p;
  p.target = rho;
  p.var_dim = d;
  p.map = [](const ComplexMatrix& x) { return x; };
  p.adjoint = p.map;
  p.affine_constraints = incoherent_state_constraints(d);
  p.var_trace_bound = 1;
  p.interior = ComplexMatrix::Identity(d, d) / static_cast<double>(d);
  return p;
}

}  // namespace

TEST(SdpSolver, SmallLinearProgram) {
  // min x1 + 2 x2 s.t. x1 + x2 = 1, x >= 0 as a diagonal 2x2 block -> 1.
  SdpProblem p;
  p.block_dims = {1, 1};
  p.cost = {ComplexMatrix::Constant(1, 1, 1.0), ComplexMatrix::Constant(1, 1, 2.0)};
  p.constraints.push_back({{{0, ComplexMatrix::Constant(1, 1, 1.0)}, {1, ComplexMatrix::Constant(1, 1, 1.0)}}, 1.0});
  const SdpSolver s(p);
  const SdpResult r = s.solve();
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.primal_objective, 1.0, 1e-8);
  EXPECT_NEAR(r.dual_objective, 1.0, 1e-8);
}

TEST(SdpSolver, MinEigenvalueProgram) {
  // min Tr[C X] s.t. Tr X = 1, X >= 0 equals lambda_min(C).
  Rng rng(1);
  const ComplexMatrix c = oracle::random_hermitian(rng, 4);
  SdpProblem p;
  p.block_dims = {4};
  p.cost = {c};
  p.constraints.push_back({{{0, ComplexMatrix::Identity(4, 4)}}, 1.0});
  const SdpResult r = SdpSolver(p).solve();
  EXPECT_NEAR(r.primal_objective, min_eigenvalue(c), 1e-8);
}

TEST(SdpSolver, InconsistentConstraintsInfeasible) {
  SdpProblem p;
  p.block_dims = {1};
  p.cost = {ComplexMatrix::Constant(1, 1, 1.0)};
  p.constraints.push_back({{{0, ComplexMatrix::Constant(1, 1, 1.0)}}, 1.0});
  p.constraints.push_back({{{0, ComplexMatrix::Constant(1, 1, 1.0)}}, 2.0});
  try {
    SdpSolver s(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Infeasible);
  }
}

TEST(MinimizeTraceNorm, TargetFeasibleGivesZero) {
  const ComplexMatrix diag = DensityMatrix::maximally_mixed(3).matrix();
  const CertifiedSolution s = minimize_trace_norm(closest_diagonal(diag));
  EXPECT_NEAR(s.primal_value, 0.0, 1e-7);
  EXPECT_LE(s.gap, 1e-6);
}

TEST(MinimizeTraceNorm, PlusStateAgainstGrid) {
  const ComplexMatrix plus = DensityMatrix::plus().matrix();
  const CertifiedSolution s = minimize_trace_norm(closest_diagonal(plus));
  EXPECT_NEAR(s.primal_value, 1.0, 1e-6);
  EXPECT_NEAR(s.primal_value, oracle::qubit_min_distance_to_diagonal(plus), 1e-4);
  EXPECT_LE((s.minimizer - 0.5 * ComplexMatrix::Identity(2, 2)).norm(), 1e-4);
  EXPECT_LE(s.gap, 1e-6);
}

TEST(MinimizeTraceNorm, CertificateSoundAgainstGrid) {
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const ComplexMatrix rho = random_density_matrix(rng, 2);
    const CertifiedSolution s = minimize_trace_norm(closest_diagonal(rho));
    const double truth = oracle::qubit_min_distance_to_diagonal(rho);
    EXPECT_LE(s.dual_bound, truth + 1e-9);
    EXPECT_GE(s.primal_value, truth - 1e-9);
    EXPECT_LE(s.gap, 1e-6);
    EXPECT_LE(operator_norm(s.dual_certificate), 1 + 1e-9);
    EXPECT_GE(s.gap, -1e-9);
    // independent dual bound from the certificate
    EXPECT_LE(incoherent_dual_bound(rho, s.dual_certificate), truth + 1e-9);
  }
}

TEST(MinimizeTraceNorm, MonotoneTraceAndCsv) {
  Rng rng(3);
  const ComplexMatrix rho = random_density_matrix(rng, 3);
  const CertifiedSolution s = minimize_trace_norm(closest_diagonal(rho));
  ASSERT_FALSE(s.trace.empty());
  for (std::size_t k = 1; k < s.trace.size(); ++k) {
    EXPECT_LE(s.trace[k].primal, s.trace[k - 1].primal);
    EXPECT_GE(s.trace[k].dual_bound, s.trace[k - 1].dual_bound);
  }
  const std::string csv = s.trace_csv();
  EXPECT_EQ(csv.rfind("iteration,primal,dual_bound,gap\n", 0), 0u);
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), s.trace.size() + 1);
}

TEST(MinimizeTraceNorm, ScaleEquivariance) {
  Rng rng(4);
  const ComplexMatrix rho = random_density_matrix(rng, 3);
  ConvexProblem p = closest_diagonal(rho);
  const double v1 = minimize_trace_norm(p).primal_value;
  // Scaling target and feasible set together scales the value.
  p.target = 3.0 * rho;
  for (auto& c : p.affine_constraints) c.target *= 3.0;
  p.interior = *p.interior * 3.0;
  p.var_trace_bound = 3.0;
  const CertifiedSolution s3 = minimize_trace_norm(p);
  EXPECT_NEAR(s3.primal_value, 3.0 * v1, 1e-6);
}

TEST(MinimizeTraceNorm, HadamardAgainstMio) {
  const QuantumChannel h = hadamard_channel();
  const DensityMatrix probe = DensityMatrix::basis(2, 0);
  const CertifiedSolution s = minimize_trace_norm(
      class_game_problem(h.apply(probe.matrix()), FreeChannelClass::mio(2), probe));
  EXPECT_NEAR(s.primal_value, 1.0, 1e-6);
  EXPECT_LE(s.gap, 1e-6);
  EXPECT_TRUE(FreeChannelClass::mio(2).contains(QuantumChannel::from_choi(s.minimizer, 2, 2)));
}

TEST(MinimizeTraceNorm, RejectsTinyTolerance) {
  SolverOptions o;
  o.tol = 1e-9;
  EXPECT_THROW(minimize_trace_norm(closest_diagonal(DensityMatrix::plus().matrix()), o), Error);
}

TEST(ProjectPsd, Examples) {
  ComplexMatrix d(2, 2);
  d << 1, 0, 0, -1;
  ComplexMatrix expect = ComplexMatrix::Zero(2, 2);
  expect(0, 0) = 1;
  EXPECT_LE((project_psd(d) - expect).norm(), 1e-14);
  Rng rng(5);
  const ComplexMatrix rho = random_density_matrix(rng, 3);
  EXPECT_LE((project_psd(rho) - rho).norm(), 1e-12);
  const ComplexMatrix h = oracle::random_hermitian(rng, 4);
  const ComplexMatrix p = project_psd(h);
  EXPECT_LE((project_psd(p) - p).norm(), 1e-12);
  // Oracle: clip through an independent Eigen solve.
  Eigen::ComplexEigenSolver<ComplexMatrix> ces(h);
  ComplexMatrix clip = ComplexMatrix::Zero(4, 4);
  for (int k = 0; k < 4; ++k) {
    if (ces.eigenvalues()(k).real() > 0) {
      const ComplexVector v = ces.eigenvectors().col(k).normalized();
      clip += ces.eigenvalues()(k).real() * v * v.adjoint();
    }
  }
  EXPECT_LE((p - clip).norm(), 1e-12);
}

TEST(ProjectChannelClass, FixedPointAndMembership) {
  const QuantumChannel delta = dephasing_channel(2);
  EXPECT_LE((project_channel_class(delta, FreeChannelClass::mio(2)).choi() - delta.choi()).norm(), 1e-15);
  EXPECT_TRUE(is_mio(project_channel_class(hadamard_channel(), FreeChannelClass::mio(2))));
  Rng rng(6);
  for (int t = 0; t < 5; ++t) {
    const QuantumChannel m = project_channel_class(random_channel(rng, 3), FreeChannelClass::dio(3));
    const QuantumChannel dm = compose(dephasing_channel(3), m), md = compose(m, dephasing_channel(3));
    EXPECT_LE((dm.choi() - md.choi()).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Dykstra, ReachesFeasibleSet) {
  const auto cls = FreeChannelClass::dio(2);
  const AffineProjector proj(4, cls.affine_constraints);
  Rng rng(7);
  const DykstraResult r = dykstra_project(oracle::random_hermitian(rng, 4), proj);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(proj.residual(r.point), 1e-9);
  EXPECT_GE(min_eigenvalue(r.point), -1e-12);
}
