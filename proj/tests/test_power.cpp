#include <gtest/gtest.h>

#include "chanres/convex.hpp"
#include "chanres/harness.hpp"
#include "chanres/power.hpp"

using namespace chanres;

TEST(GeneratingPower, Examples) {
  EXPECT_NEAR(generating_power(dephasing_channel(3)).generating, 0.0, 1e-6);
  EXPECT_NEAR(generating_power(identity_channel(2)).generating, 0.0, 1e-9);
  const PowerReport h = generating_power(hadamard_channel());
  EXPECT_NEAR(h.generating, 0.5, 1e-9);
  EXPECT_GE(h.increasing_lower_bound, h.generating - 1e-9);
  EXPECT_TRUE(h.maximizing_free_state.is_diagonal());
}

TEST(GeneratingPower, ArgmaxReproducesValue) {
  Rng rng(1);
  for (int t = 0; t < 5; ++t) {
    const QuantumChannel n = random_channel(rng, 3);
    const PowerReport r = generating_power(n);
    const double again =
        omega(DistanceMeasure::TraceDistance, FreeStateSet::incoherent(3), apply_channel(n, r.maximizing_free_state)).value;
    EXPECT_NEAR(again, r.generating, 1e-9);
    EXPECT_GE(r.generating, 0.0);
  }
}

TEST(GeneratingPower, OtherMeasuresAndSets) {
  const PowerReport f = generating_power(hadamard_channel(), DistanceMeasure::FidelityDistance);
  EXPECT_NEAR(f.generating, std::sqrt(0.5), 1e-6);
  const PowerReport dm = generating_power(hadamard_channel(), DistanceMeasure::MaxRelativeEntropy);
  EXPECT_NEAR(dm.generating, 1.0, 1e-6);  // log2(1 + C_R(|+>)) = 1
  try {
    generating_power(identity_channel(4), DistanceMeasure::TraceDistance, FreeStateSet::separable_ppt(2, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedFreeSet);
  }
}

TEST(GeneratingPower, ZeroOnlyForMio) {
  Rng rng(2);
  for (int t = 0; t < 5; ++t) {
    const QuantumChannel m = random_mio_channel(rng, 3);
    EXPECT_NEAR(generating_power(m).generating, 0.0, 1e-6);
    const QuantumChannel n = random_channel(rng, 3);
    const double w = generating_power(n).generating;
    EXPECT_EQ(w <= 1e-6, is_mio(n, 1e-6));
  }
}

TEST(GeneratingPower, PermutationInvariance) {
  Rng rng(3);
  ComplexMatrix perm = ComplexMatrix::Zero(3, 3);
  perm(1, 0) = perm(2, 1) = perm(0, 2) = 1.0;
  const QuantumChannel p = unitary_channel(perm), pinv = unitary_channel(perm.adjoint());
  for (int t = 0; t < 3; ++t) {
    const QuantumChannel n = random_channel(rng, 3);
    EXPECT_NEAR(generating_power(compose(p, compose(n, pinv))).generating, generating_power(n).generating, 1e-7);
  }
}

TEST(IncreasingPower, MatchesGeneratingPower) {
  Rng rng(4);
  SearchOptions opt;
  opt.restarts = 4;
  EXPECT_NEAR(increasing_power_search(dephasing_channel(2), DistanceMeasure::TraceDistance, rng, opt).value, 0.0, 1e-9);
  EXPECT_NEAR(increasing_power_search(hadamard_channel(), DistanceMeasure::TraceDistance, rng, opt).value, 0.5, 1e-3);
  for (int t = 0; t < 5; ++t) {
    const QuantumChannel n = random_channel(rng, 2);
    const IncreasingSearchResult s = increasing_power_search(n, DistanceMeasure::TraceDistance, rng, opt);
    EXPECT_NEAR(s.value, generating_power(n).generating, 1e-3);
    EXPECT_LE(s.random_start_best, s.value + 1e-12);
  }
}

TEST(QubitUnitaryPower, ClosedForm) {
  EXPECT_NEAR(qubit_unitary_power(hadamard_matrix()), 0.5, 1e-15);
  EXPECT_NEAR(qubit_unitary_power(ComplexMatrix::Identity(2, 2)), 0.0, 1e-15);
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const ComplexMatrix u = haar_unitary(rng, 2);
    EXPECT_NEAR(qubit_unitary_power(u), generating_power(unitary_channel(u)).generating, 1e-6);
  }
  try {
    qubit_unitary_power(2 * ComplexMatrix::Identity(2, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotUnitary);
  }
}

TEST(PropertySuite, AllClausesHold) {
  Rng rng(6);
  for (int t = 0; t < 5; ++t) {
    const PropertySuiteReport r =
        property_suite(random_channel(rng, 2), random_channel(rng, 2), random_mio_channel(rng, 2),
                       random_mio_channel(rng, 2), rng.uniform());
    EXPECT_TRUE(r.all_pass());
    EXPECT_EQ(r.clauses.size(), 8u);
    EXPECT_LE(r.max_violation(), 1e-6);
  }
}

TEST(PropertySuite, ReportsViolationWithWitness) {
  // A tiny negative slack makes the tight clause (i.free) fail on purpose.
  const PropertySuiteReport r = property_suite(hadamard_channel(), hadamard_channel(), dephasing_channel(2),
                                               dephasing_channel(2), 0.5, -1e-3);
  EXPECT_FALSE(r.all_pass());
  bool named = false;
  for (const auto& c : r.clauses)
    if (!c.pass) named = named || !c.witness.empty();
  EXPECT_TRUE(named);
  EXPECT_THROW(property_suite(hadamard_channel(), hadamard_channel(), hadamard_channel(), dephasing_channel(2), 0.5),
               Error);
}
