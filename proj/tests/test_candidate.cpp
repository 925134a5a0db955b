#include <gtest/gtest.h>

#include <numbers>

#include "groveropt/candidate.hpp"
#include "oracles.hpp"

using namespace groveropt;
using std::numbers::pi;

TEST(Expression, Evaluation) {
  Bindings b;
  b.t = 2;
  b.x = 3;
  b.y = -1;
  b.big_a = 0.5;
  b.big_r = 4;
  EXPECT_DOUBLE_EQ(Expression::parse("A + pi/2").eval(b), 0.5 + pi / 2);
  EXPECT_DOUBLE_EQ(Expression::parse("1 + 2*3").eval(b), 7);
  EXPECT_DOUBLE_EQ(Expression::parse("(1 + 2)*3").eval(b), 9);
  EXPECT_DOUBLE_EQ(Expression::parse("-t*R/2").eval(b), -4);
  EXPECT_DOUBLE_EQ(Expression::parse("--x").eval(b), 3);
  EXPECT_DOUBLE_EQ(Expression::parse("x - y - t").eval(b), 2);
  EXPECT_DOUBLE_EQ(Expression::parse("x / (1 + 1)").eval(b), 1.5);
  EXPECT_DOUBLE_EQ(Expression::parse(" 2.5e-1 * y ").eval(b), -0.25);
  EXPECT_EQ(Expression::parse("A + pi/2").text(), "A + pi/2");
}

TEST(Expression, RejectsOutsideTheLanguage) {
  for (const char* bad : {"", "x +", "x / y", "x / 0", "x / (1 - 1)", "sin(x)", "2 ** 3",
                          "(x", "x)", "z", "1 2"}) {
    EXPECT_THROW(Expression::parse(bad), CandidateError) << bad;
  }
}

TEST(Candidate, BuiltinProductMatchesOracleCurve) {
  const SearchInstance inst = make_instance(8, {1});
  const CandidateProduct c = builtin_product5();
  ASSERT_EQ(c.factors.size(), 5u);
  for (auto [x, y, t] : {std::tuple{1.0, 0.0, 0.3}, std::tuple{-2.0, 0.5, 1.0},
                         std::tuple{0.2, -0.7, -2.0}}) {
    const CMatrix want = oracle::product5(inst.h, inst.psi0_ket, x, y, t);
    EXPECT_LT((c.evaluate(inst, x, y, t) - want).norm(), 1e-12);
  }
}

TEST(CheckVelocity, BuiltinPassesOnSeedGrid) {
  const SearchInstance inst = make_instance(4, {0});
  const std::vector<std::pair<double, double>> seeds = {
      {1, 0}, {0, 1}, {1, 1}, {-2, 0.5}, {0, 0}};
  const VelocityReport r = check_velocity(inst, builtin_product5(), seeds, 1e-6, 1e-4);
  EXPECT_TRUE(r.verdict);
  ASSERT_EQ(r.seeds.size(), seeds.size());
  for (const auto& s : r.seeds) {
    EXPECT_TRUE(s.p1 && s.p2 && s.p3);
    EXPECT_LE(s.p2_err, kP2Tol);
  }
}

TEST(CheckVelocity, SingleFactorFailsWheneverYIsNonzero) {
  const SearchInstance inst = make_instance(4, {0});
  const VelocityReport r =
      check_velocity(inst, builtin_single_factor(), {{0, 1}, {1, 1}, {-2, 0.5}}, 1e-6, 1e-4);
  EXPECT_FALSE(r.verdict);
  for (const auto& s : r.seeds) {
    EXPECT_TRUE(s.p2);
    EXPECT_FALSE(s.p3);
  }
}

TEST(CheckVelocity, SwappedProductKeepsP2ButFailsP3) {
  const SearchInstance inst = make_instance(4, {0});
  const VelocityReport r =
      check_velocity(inst, builtin_swapped_product5(), {{1, 0}, {0, 1}}, 1e-6, 1e-4);
  EXPECT_FALSE(r.verdict);
  for (const auto& s : r.seeds) {
    EXPECT_TRUE(s.p2);
    EXPECT_FALSE(s.p3);
  }
}

TEST(CheckVelocity, InvalidArguments) {
  const SearchInstance inst = make_instance(4, {0});
  EXPECT_THROW(check_velocity(inst, builtin_product5(), {{1, 0}}, 0.0, 1e-4),
               std::invalid_argument);
  EXPECT_THROW(check_velocity(inst, builtin_product5(), {{1, 0}}, 1e-6, -1.0),
               std::invalid_argument);
  EXPECT_THROW(check_velocity(inst, builtin_product5(), {}, 1e-6, 1e-4), std::invalid_argument);
  EXPECT_THROW(check_velocity(inst, CandidateProduct{"empty", {}}, {{1, 0}}, 1e-6, 1e-4),
               CandidateError);
}
