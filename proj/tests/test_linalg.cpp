#include <gtest/gtest.h>

#include "groveropt/linalg.hpp"
#include "oracles.hpp"

using namespace groveropt;

namespace {

CMatrix random_skew(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  CMatrix g(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double re = normal(rng);
      g(i, j) = Complex(re, normal(rng));
    }
  return 0.5 * (g - g.adjoint());
}

CMatrix random_hermitian(int n, std::uint64_t seed) {
  return Complex(0, 1) * random_skew(n, seed);
}

CMatrix traceless(const CMatrix& x) {
  return x - (x.trace() / double(x.rows())) * CMatrix::Identity(x.rows(), x.cols());
}

}  // namespace

TEST(Frobenius, InnerIsRealPartOfTraceProduct) {
  const CMatrix a = random_hermitian(5, 1) + random_skew(5, 2);
  const CMatrix b = random_skew(5, 3);
  EXPECT_NEAR(frobenius_inner(a, b), (a.adjoint() * b).trace().real(), 1e-12);
  EXPECT_NEAR(frobenius_norm(a), std::sqrt(frobenius_inner(a, a)), 1e-12);
}

TEST(Frobenius, ShapeMismatchThrows) {
  EXPECT_THROW(frobenius_inner(CMatrix::Zero(2, 2), CMatrix::Zero(3, 3)), std::invalid_argument);
  EXPECT_THROW(commutator(CMatrix::Zero(2, 2), CMatrix::Zero(3, 3)), std::invalid_argument);
}

TEST(Commutator, AntisymmetricAndSkewForHermitianPairs) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const CMatrix a = random_hermitian(6, 2 * s);
    const CMatrix b = random_hermitian(6, 2 * s + 1);
    const CMatrix c = commutator(a, b);
    EXPECT_LT((c + commutator(b, a)).norm(), 1e-12);
    EXPECT_LT(skew_hermitian_residual(c), 1e-12);
    EXPECT_LT(std::abs(c.trace()), 1e-12);
  }
}

TEST(Structure, Predicates) {
  EXPECT_TRUE(is_unitary(CMatrix::Identity(3, 3)));
  EXPECT_FALSE(is_unitary(CMatrix(2.0 * CMatrix::Identity(3, 3))));
  const CMatrix p = oracle::marked_projector(4, {1, 3});
  EXPECT_TRUE(is_projector(p));
  EXPECT_FALSE(is_projector(CMatrix(0.5 * p)));
  EXPECT_TRUE(is_hermitian(random_hermitian(4, 7)));
  EXPECT_FALSE(is_hermitian(random_skew(4, 7)));
}

TEST(ProjectorExponential, MatchesPadeExponential) {
  const oracle::Vector psi = oracle::uniform_ket(5);
  const CMatrix p = psi * psi.adjoint();
  for (double theta : {-3.0, -0.4, 0.0, 1.1, 2.9}) {
    EXPECT_LT((projector_exponential(p, theta) - oracle::phase_factor(p, theta)).norm(), 1e-12);
  }
}

TEST(ProjectorExponential, RejectsNonProjector) {
  EXPECT_THROW(projector_exponential(CMatrix(2.0 * CMatrix::Identity(2, 2)), 1.0),
               std::invalid_argument);
}

TEST(ExpmSkew, MatchesPadeExponential) {
  for (int n : {1, 2, 5, 16}) {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const CMatrix x = random_skew(n, 100 * n + s);
      const double t = 0.3 + 0.7 * s;
      const CMatrix e = expm_skew(x, t);
      EXPECT_LT((e - oracle::expm(t * x)).norm(), 1e-10) << "n=" << n << " s=" << s;
      EXPECT_TRUE(is_unitary(e));
    }
  }
}

TEST(ExpmSkew, ZeroTimeIsIdentityAndGroupLaw) {
  const CMatrix x = random_skew(6, 11);
  EXPECT_EQ(expm_skew(x, 0.0), CMatrix::Identity(6, 6));
  EXPECT_LT((expm_skew(x, 0.4) * expm_skew(x, 0.9) - expm_skew(x, 1.3)).norm(), 1e-12);
}

TEST(ExpmSkew, RejectsNonSkew) {
  EXPECT_THROW(expm_skew(random_hermitian(3, 1), 1.0), std::invalid_argument);
}

TEST(RandomUnitary, UnitaryAndSeeded) {
  for (int n : {1, 3, 8, 32}) {
    const CMatrix u = random_unitary(n, 42);
    EXPECT_LT(unitary_residual(u), 1e-12);
    EXPECT_EQ(u, random_unitary(n, 42));
  }
  EXPECT_NE(random_unitary(4, 1), random_unitary(4, 2));
}

TEST(RandomUnitary, SinglePrecisionInstantiation) {
  const auto u = random_unitary<float>(6, 3);
  EXPECT_LT(unitary_residual(u), 1e-5f);
  const CMatrixT<float> x = (u - u.adjoint()) * 0.5f;
  EXPECT_LT(unitary_residual(expm_skew(x, 0.7f)), 1e-5f);
}

TEST(ZeroDiagonalSimilarity, HermitianAndSkewInputs) {
  for (int n : {2, 3, 8, 16}) {
    for (std::uint64_t s = 0; s < 6; ++s) {
      const CMatrix x = traceless(s % 2 ? random_skew(n, s) : random_hermitian(n, s));
      const auto sim = zero_diagonal_similarity(x);
      EXPECT_LT(unitary_residual(sim.w), 1e-12);
      EXPECT_LT(sim.reduced.diagonal().cwiseAbs().maxCoeff(), 1e-12 * (1 + x.norm()));
      EXPECT_LT((sim.w.adjoint() * x * sim.w - sim.reduced).norm(), 1e-12 * (1 + x.norm()));
    }
  }
}

TEST(ZeroDiagonalSimilarity, AlreadyZeroDiagonalIsUntouched) {
  CMatrix x(2, 2);
  x << 0, 1, -1, 0;
  const auto sim = zero_diagonal_similarity(x);
  EXPECT_LT((sim.w - CMatrix::Identity(2, 2)).norm(), 1e-15);
}

TEST(ZeroDiagonalSimilarity, RejectsUnsupportedInput) {
  EXPECT_THROW(zero_diagonal_similarity(random_skew(4, 1) + CMatrix(CMatrix::Identity(4, 4))),
               std::invalid_argument);
  CMatrix general(2, 2);
  general << 1, 2, 3, -1;
  EXPECT_THROW(zero_diagonal_similarity(general), std::invalid_argument);
}
