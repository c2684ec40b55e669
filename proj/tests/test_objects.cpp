#include <gtest/gtest.h>

#include "chanres/channel_json.hpp"
#include "chanres/convex.hpp"
#include "chanres/objects.hpp"

using namespace chanres;

namespace {

std::string invariant_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.invariant();
  }
  return "<no throw>";
}

ComplexMatrix choi_of_identity(int d) {
  ComplexMatrix j = ComplexMatrix::Zero(d * d, d * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) j(a * d + a, b * d + b) = 1.0;
  return j;
}

}  // namespace

TEST(DensityMatrix, ValidationNamesInvariant) {
  ComplexMatrix m = ComplexMatrix::Identity(2, 2);
  EXPECT_EQ(invariant_of([&] { DensityMatrix::from_matrix(m); }), "unit_trace");
  ComplexMatrix neg(2, 2);
  neg << 1.5, 0, 0, -0.5;
  EXPECT_EQ(invariant_of([&] { DensityMatrix::from_matrix(neg); }), "positive");
  ComplexMatrix nh(2, 2);
  nh << 0.5, 0.3, 0.1, 0.5;
  EXPECT_EQ(invariant_of([&] { DensityMatrix::from_matrix(nh); }), "hermitian");
  EXPECT_NO_THROW(DensityMatrix::from_matrix(0.5 * m));
}

TEST(ApplyChannel, IdentityAndDephasing) {
  Rng rng(1);
  const DensityMatrix rho = DensityMatrix::random(rng, 3);
  EXPECT_LE((apply_channel(identity_channel(3), rho).matrix() - rho.matrix()).norm(), 1e-12);
  const DensityMatrix out = apply_channel(dephasing_channel(2), DensityMatrix::plus());
  EXPECT_LE((out.matrix() - 0.5 * ComplexMatrix::Identity(2, 2)).norm(), 1e-14);
}

TEST(ApplyChannel, KrausAgreesWithChoi) {
  Rng rng(2);
  for (int d : {2, 3}) {
    for (int t = 0; t < 5; ++t) {
      const QuantumChannel n = random_channel(rng, d, 3);
      const DensityMatrix rho = DensityMatrix::random(rng, d);
      const ComplexMatrix via_choi = LinearMap{d, d, n.choi()}.apply(rho.matrix());
      EXPECT_LE((via_choi - apply_kraus(*n.kraus(), rho.matrix())).cwiseAbs().maxCoeff(), 1e-9);
      // Choi convention: N(rho) = Tr_in[(rho^T (x) I) J]
      const ComplexMatrix alt = partial_trace(kron(rho.matrix().transpose(), ComplexMatrix::Identity(d, d)) * n.choi(), d, d, Subsystem::A);
      EXPECT_LE((via_choi - alt).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(ApplyChannel, DimensionMismatch) {
  try {
    apply_channel(identity_channel(2), DensityMatrix::maximally_mixed(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(ChoiKraus, KnownChoiMatrices) {
  EXPECT_LE((identity_channel(2).choi() - choi_of_identity(2)).norm(), 1e-14);
  ComplexMatrix delta = ComplexMatrix::Zero(4, 4);
  delta(0, 0) = delta(3, 3) = 1.0;
  EXPECT_LE((dephasing_channel(2).choi() - delta).norm(), 1e-14);
  EXPECT_EQ(choi_to_kraus(choi_of_identity(2), 2, 2).size(), 1u);
}

TEST(ChoiKraus, RoundTripOnOperatorBasis) {
  Rng rng(3);
  const QuantumChannel n = random_channel(rng, 2, 3);
  const auto kraus = choi_to_kraus(n.choi(), 2, 2);
  EXPECT_EQ(kraus.size(), 3u);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const ComplexMatrix x = matrix_unit(2, i, j);
      EXPECT_LE((apply_kraus(kraus, x) - n.apply(x)).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(ChoiKraus, NotPsdThrows) {
  ComplexMatrix bad = ComplexMatrix::Identity(4, 4);
  bad(0, 0) = -1;
  try {
    choi_to_kraus(bad, 2, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotPSD);
  }
}

TEST(QuantumChannel, ValidationNamesInvariant) {
  ComplexMatrix j = choi_of_identity(2);
  EXPECT_EQ(invariant_of([&] { QuantumChannel::from_choi(2 * j, 2, 2); }), "trace_preserving");
  ComplexMatrix np = ComplexMatrix::Identity(4, 4) * 0.5;
  np(0, 3) = np(3, 0) = 1.0;
  EXPECT_EQ(invariant_of([&] { QuantumChannel::from_choi(np, 2, 2); }), "choi_psd");
  EXPECT_EQ(invariant_of([&] { QuantumChannel::from_kraus({2.0 * ComplexMatrix::Identity(2, 2)}); }),
            "kraus_completeness");
}

TEST(Dephasing, IdempotentSelfAdjointFixesDiagonal) {
  for (int d : {2, 3, 4}) {
    const QuantumChannel delta = dephasing_channel(d);
    EXPECT_LE((compose(delta, delta).choi() - delta.choi()).norm(), 1e-12);
    EXPECT_LE((adjoint_channel(delta).choi - delta.choi()).cwiseAbs().maxCoeff(), 1e-12);
    ComplexMatrix diag = ComplexMatrix::Zero(d, d);
    for (int i = 0; i < d; ++i) diag(i, i) = (i + 1.0) / (d * (d + 1) / 2.0);
    EXPECT_LE((delta.apply(diag) - diag).norm(), 1e-14);
  }
}

TEST(Adjoint, IdentityOnBasisAndUnitality) {
  Rng rng(4);
  for (int t = 0; t < 5; ++t) {
    const QuantumChannel n = random_channel(rng, 3);
    const LinearMap m = adjoint_channel(n);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c)
          for (int e = 0; e < 3; ++e) {
            const ComplexMatrix x = matrix_unit(3, a, b), y = matrix_unit(3, c, e);
            EXPECT_LE(std::abs((m.apply(x) * y).trace() - (x * n.apply(y)).trace()), 1e-10);
          }
    EXPECT_TRUE(m.is_unital());
  }
  // A non-trace-preserving map has a non-unital adjoint.
  const LinearMap half{2, 2, 0.5 * identity_channel(2).choi()};
  QuantumChannel id = identity_channel(2);
  (void)id;
  EXPECT_FALSE(half.is_unital());
}

TEST(Adjoint, UnitaryConjugation) {
  Rng rng(5);
  const ComplexMatrix u = haar_unitary(rng, 2);
  const LinearMap m = adjoint_channel(unitary_channel(u));
  const ComplexMatrix x = ginibre(rng, 2, 2);
  EXPECT_LE((m.apply(x) - u.adjoint() * x * u).norm(), 1e-12);
}

TEST(Replacement, MapsEverythingToSigma) {
  Rng rng(6);
  const QuantumChannel r0 = replacement_channel(DensityMatrix::basis(2, 0));
  const DensityMatrix rho = DensityMatrix::random(rng, 2);
  EXPECT_LE((apply_channel(r0, rho).matrix() - matrix_unit(2, 0, 0)).norm(), 1e-12);
  const QuantumChannel mixed = replacement_channel(DensityMatrix::maximally_mixed(2));
  EXPECT_TRUE(is_mio(mixed));
  EXPECT_TRUE(is_dio(mixed));
  ASSERT_TRUE(mixed.kraus().has_value());
  EXPECT_TRUE(kraus_certifies_sio(*mixed.kraus()));
  EXPECT_TRUE(kraus_certifies_io(*mixed.kraus()));
  EXPECT_FALSE(is_mio(replacement_channel(DensityMatrix::plus())));
}

TEST(Membership, Examples) {
  EXPECT_TRUE(is_mio(dephasing_channel(3)));
  EXPECT_TRUE(is_dio(dephasing_channel(3)));
  EXPECT_FALSE(is_mio(hadamard_channel()));
  EXPECT_FALSE(is_dio(hadamard_channel()));
  EXPECT_TRUE(kraus_certifies_sio(*dephasing_channel(2).kraus()));
  EXPECT_FALSE(kraus_certifies_io(*hadamard_channel().kraus()));
}

TEST(Membership, DioImpliesMioAndDefiningProperties) {
  Rng rng(7);
  for (int d : {2, 3}) {
    for (int t = 0; t < 5; ++t) {
      const QuantumChannel n = random_channel(rng, d);
      EXPECT_TRUE(!is_dio(n) || is_mio(n));
      const QuantumChannel m = project_channel_class(n, FreeChannelClass::mio(d));
      EXPECT_TRUE(is_mio(m));
      RealVector p(d);
      for (int i = 0; i < d; ++i) p(i) = rng.uniform();
      p /= p.sum();
      const ComplexMatrix diag = p.cast<Complex>().asDiagonal();
      EXPECT_LE(off_diagonal_mass(m.apply(diag)), 1e-8);

      const QuantumChannel dio = project_channel_class(n, FreeChannelClass::dio(d));
      EXPECT_TRUE(is_dio(dio));
      EXPECT_TRUE(is_mio(dio));
      const ComplexMatrix rho = random_density_matrix(rng, d);
      EXPECT_LE(trace_norm(diagonal_part(dio.apply(rho)) - dio.apply(diagonal_part(rho))), 1e-8);
    }
  }
}

TEST(FreeChannelClass, ConstraintsEncodeMembership) {
  Rng rng(8);
  for (int d : {2, 3}) {
    const auto mio = FreeChannelClass::mio(d), dio = FreeChannelClass::dio(d);
    EXPECT_GT(dio.affine_constraints.size(), mio.affine_constraints.size());
    EXPECT_LE(mio.max_violation(dephasing_channel(d).choi()), 1e-12);
    EXPECT_LE(dio.max_violation(dephasing_channel(d).choi()), 1e-12);
    EXPECT_LE(dio.max_violation(dio.interior_choi()), 1e-12);
    const QuantumChannel n = random_channel(rng, d);
    EXPECT_GT(mio.max_violation(n.choi()), 1e-6);
    EXPECT_GT(dio.max_violation(n.choi()), 1e-6);
  }
  try {
    FreeChannelClass::of(ClassTag::SIO, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedCombination);
  }
}

TEST(ChannelAlgebra, RandomChannelsAreCptp) {
  Rng rng(9);
  for (int t = 0; t < 10; ++t) {
    const QuantumChannel a = random_channel(rng, 2), b = random_channel(rng, 2);
    for (const QuantumChannel& c : {a, compose(a, b), tensor(a, b), mixture({0.3, 0.7}, {a, b})}) {
      EXPECT_GE(min_eigenvalue(c.choi()), -1e-9);
      const ComplexMatrix tr_out = partial_trace(c.choi(), c.dim_in(), c.dim_out(), Subsystem::B);
      EXPECT_LE((tr_out - ComplexMatrix::Identity(c.dim_in(), c.dim_in())).cwiseAbs().maxCoeff(), 1e-9);
    }
    const ComplexMatrix rho = random_density_matrix(rng, 2), sigma = random_density_matrix(rng, 2);
    EXPECT_LE((tensor(a, b).apply(kron(rho, sigma)) - kron(a.apply(rho), b.apply(sigma))).norm(), 1e-12);
    EXPECT_LE((compose(a, b).apply(rho) - a.apply(b.apply(rho))).norm(), 1e-12);
  }
  EXPECT_THROW(unitary_channel(2 * ComplexMatrix::Identity(2, 2)), Error);
}

TEST(ChannelJson, RoundTripAndErrors) {
  Rng rng(10);
  const QuantumChannel n = random_channel(rng, 2, 2);
  const QuantumChannel back = channel_from_json(channel_to_json(n));
  EXPECT_LE((back.choi() - n.choi()).norm(), 1e-12);

  nlohmann::json choi_spec = channel_to_json(dephasing_channel(2));
  choi_spec["repr"] = "choi";
  choi_spec["data"] = detail::matrix_to_json(dephasing_channel(2).choi());
  EXPECT_TRUE(is_dio(channel_from_json(choi_spec)));

  EXPECT_EQ(invariant_of([] { channel_from_json_text(R"({"dim_in":2,"repr":"kraus","data":[]})"); }),
            "dim_out");
  EXPECT_EQ(invariant_of([] { channel_from_json_text("{\"dim_in\":"); }), "json");
  EXPECT_EQ(invariant_of([] {
              channel_from_json_text(R"({"dim_in":1,"dim_out":1,"repr":"kraus","data":[[[[2,0]]]]})");
            }),
            "kraus_completeness");
  EXPECT_EQ(invariant_of([] {
              channel_from_json_text(R"({"dim_in":1,"dim_out":1,"repr":"nope","data":[]})");
            }),
            "repr");
}
