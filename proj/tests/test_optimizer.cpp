#include <gtest/gtest.h>

#include "groveropt/optimizer.hpp"
#include "oracles.hpp"

using namespace groveropt;

TEST(Bounds, BaselineExamples) {
  EXPECT_EQ(baseline_iteration_bound(10, 0.1), 2000);
  EXPECT_EQ(baseline_iteration_bound(1, 1), 2);
  EXPECT_EQ(baseline_iteration_bound(0.5, 0.05), 400);
  EXPECT_THROW(baseline_iteration_bound(0, 0.1), std::invalid_argument);
  EXPECT_THROW(baseline_iteration_bound(1, 0), std::invalid_argument);
}

TEST(Bounds, PlExamples) {
  EXPECT_EQ(pl_iteration_bound(10, 0.01), 277);
  EXPECT_EQ(pl_iteration_bound(1, std::exp(-1.0)), 6);
  EXPECT_EQ(pl_iteration_bound(2, 0.1), 28);
  EXPECT_THROW(pl_iteration_bound(1, 1.0), std::invalid_argument);
  EXPECT_THROW(pl_iteration_bound(1, 2.0), std::invalid_argument);
  EXPECT_THROW(pl_iteration_bound(-1, 0.5), std::invalid_argument);
}

TEST(Bounds, AgreeWithExtendedPrecisionProperty) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> l(0.1, 50), e(1e-4, 0.9);
  for (int i = 0; i < 500; ++i) {
    const double li = l(rng), ei = e(rng);
    EXPECT_EQ(baseline_iteration_bound(li, ei),
              oracle::ceil_ld(2.0L * li / ((long double)ei * ei)));
    EXPECT_EQ(pl_iteration_bound(li, ei), oracle::ceil_ld(6.0L * li * std::log(1.0L / ei)));
  }
}

TEST(Lipschitz, PositiveAndReproducible) {
  const SearchInstance inst = make_instance(2, {1});
  const double a = estimate_lipschitz(inst, 50, 7);
  EXPECT_GT(a, 0);
  EXPECT_TRUE(std::isfinite(a));
  EXPECT_EQ(a, estimate_lipschitz(inst, 50, 7));
}

TEST(Lipschitz, MoreSamplesNeverLower) {
  const SearchInstance inst = make_instance(16, {0});
  double prev = 0;
  for (int s : {10, 20, 40, 80, 160}) {
    const double l = estimate_lipschitz(inst, s, 3);
    EXPECT_GE(l, prev);
    prev = l;
  }
}

TEST(Lipschitz, Preconditions) {
  EXPECT_THROW(estimate_lipschitz(make_instance(4, {0}), 1, 0), std::invalid_argument);
  const SearchInstance optimal =
      make_instance(CMatrix(oracle::marked_projector(2, {0})), CVector(CVector::Unit(2, 0)));
  EXPECT_THROW(estimate_lipschitz(optimal, 10, 0), DegenerateInstance);
}

TEST(Run, ZeroIterations) {
  OptimizerConfig cfg;
  cfg.max_iters = 0;
  cfg.l_rie = 2.0;
  const Trace t = run(make_instance(16, {0}), cfg);
  EXPECT_EQ(t.outcome, Outcome::max_iters);
  ASSERT_EQ(t.records.size(), 1u);
  EXPECT_EQ(t.records[0].k, 0);
  EXPECT_DOUBLE_EQ(t.records[0].q, 1.0 / 16);
}

TEST(Run, OneShotPlaneEngineLargeInstance) {
  OptimizerConfig cfg;
  cfg.retraction = RetractionKind::exp_exact;
  cfg.step.kind = StepPolicyKind::one_shot;
  cfg.engine = Engine::plane;
  cfg.criterion = StopCriterion::gap;
  cfg.epsilon = 1e-10;
  const Trace t = run(make_instance(1024, {0}), cfg);
  EXPECT_EQ(t.outcome, Outcome::converged_gap);
  EXPECT_EQ(t.iterations(), 1);
  EXPECT_LE(t.records.back().gap, 1e-10);
}

TEST(Run, FixedInverseLipschitzStepWithinBaselineBound) {
  const SearchInstance inst = make_instance(16, {0});
  const double l = estimate_lipschitz(inst, 200, 0);
  OptimizerConfig cfg;
  cfg.step = {StepPolicyKind::fixed, 1.0 / l};
  cfg.epsilon = 0.1;
  const Trace t = run(inst, cfg);
  EXPECT_EQ(t.outcome, Outcome::converged_grad);
  EXPECT_LE(t.iterations(), baseline_iteration_bound(l, 0.1));
}

TEST(Run, RecordsSatisfyTraceInvariants) {
  for (RetractionKind kind : {RetractionKind::exp_exact, RetractionKind::product5}) {
    OptimizerConfig cfg;
    cfg.retraction = kind;
    cfg.l_rie = 2.5;
    cfg.epsilon = 1e-8;
    cfg.max_iters = 40;
    const SearchInstance inst = make_instance(32, {0, 1});
    const Trace t = run(inst, cfg);
    EXPECT_EQ(t.instance.n, 32);
    EXPECT_EQ(t.instance.m, 2);
    for (std::size_t k = 0; k < t.records.size(); ++k) {
      const auto& r = t.records[k];
      EXPECT_EQ(r.k, static_cast<int>(k));
      // Squared form; the square root amplifies cancellation in 1 - q near the optimum.
      EXPECT_NEAR(r.grad_norm * r.grad_norm, 2 * r.q * (1 - r.q), 1e-12);
      EXPECT_LE(r.plane_residual, 1e-8);
      EXPECT_DOUBLE_EQ(r.gap, 1 - r.q);
      if (k > 0) {
        EXPECT_GE(r.f, t.records[k - 1].f - 1e-9);
        EXPECT_DOUBLE_EQ(r.t, 1 / 2.5);
      }
    }
  }
}

TEST(Run, MonotoneAscentUnderEstimatedStepProperty) {
  for (auto [n, m] : {std::pair{16, 1}, std::pair{64, 1}, std::pair{64, 4}}) {
    std::vector<int> marked;
    for (int i = 0; i < m; ++i) marked.push_back(i);
    OptimizerConfig cfg;
    cfg.epsilon = 1e-9;
    cfg.criterion = StopCriterion::gap;
    cfg.max_iters = 60;
    const Trace t = run(make_instance(n, marked), cfg);
    ASSERT_TRUE(t.l_rie.has_value());
    EXPECT_NE(t.outcome, Outcome::smoothness_violation);
    for (std::size_t k = 1; k < t.records.size(); ++k) {
      EXPECT_GE(t.records[k].f, t.records[k - 1].f - 1e-9);
    }
  }
}

TEST(Run, BothEnginesNeverAbort) {
  for (RetractionKind kind : {RetractionKind::exp_exact, RetractionKind::product5}) {
    for (auto step : {StepPolicy{StepPolicyKind::fixed, 0.7},
                      StepPolicy{StepPolicyKind::inverse_lipschitz, 0},
                      StepPolicy{StepPolicyKind::one_shot, 0}}) {
      if (step.kind == StepPolicyKind::one_shot && kind != RetractionKind::exp_exact) continue;
      OptimizerConfig cfg;
      cfg.retraction = kind;
      cfg.step = step;
      cfg.engine = Engine::both;
      cfg.epsilon = 1e-9;
      cfg.max_iters = 30;
      const Trace t = run(make_instance(64, {0}), cfg);
      EXPECT_NE(t.outcome, Outcome::engine_mismatch) << t.diagnostic;
    }
  }
}

TEST(Run, DeterministicPerSeed) {
  OptimizerConfig cfg;
  cfg.seed = 11;
  cfg.epsilon = 1e-6;
  const SearchInstance inst = make_instance(16, {3});
  const Trace a = run(inst, cfg);
  const Trace b = run(inst, cfg);
  ASSERT_EQ(a.records.size(), b.records.size());
  EXPECT_EQ(a.l_rie, b.l_rie);
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    EXPECT_EQ(a.records[k].q, b.records[k].q);
    EXPECT_EQ(a.records[k].x, b.records[k].x);
  }
}

TEST(Run, DivergenceGuardStopsOversizedSteps) {
  OptimizerConfig cfg;
  cfg.step = {StepPolicyKind::fixed, 40.0};
  cfg.retraction = RetractionKind::exp_exact;
  cfg.max_iters = 50;
  const Trace t = run(make_instance(16, {0}), cfg);
  EXPECT_EQ(t.outcome, Outcome::smoothness_violation);
  EXPECT_FALSE(t.diagnostic.empty());
}

TEST(Run, MinimizeDescendsToZero) {
  OptimizerConfig cfg;
  cfg.minimize = true;
  cfg.criterion = StopCriterion::gap;
  cfg.epsilon = 1e-6;
  cfg.l_rie = 2.0;
  const Trace t = run(make_instance(16, {0}), cfg);
  EXPECT_EQ(t.outcome, Outcome::converged_gap);
  EXPECT_LE(t.records.back().q, 1e-6);

  cfg.step.kind = StepPolicyKind::one_shot;
  cfg.retraction = RetractionKind::exp_exact;
  const Trace one = run(make_instance(16, {0}), cfg);
  EXPECT_EQ(one.iterations(), 1);
}

TEST(Run, DegenerateInstances) {
  const CMatrix h = oracle::marked_projector(2, {0});
  OptimizerConfig cfg;
  const Trace done = run(make_instance(h, CVector(CVector::Unit(2, 0))), cfg);
  EXPECT_EQ(done.outcome, Outcome::converged_grad);
  EXPECT_EQ(done.records.size(), 1u);

  cfg.criterion = StopCriterion::gap;
  const Trace stuck = run(make_instance(h, CVector(CVector::Unit(2, 1))), cfg);
  EXPECT_EQ(stuck.outcome, Outcome::degenerate);
  EXPECT_FALSE(stuck.diagnostic.empty());
}

TEST(Run, InvalidConfigs) {
  const SearchInstance inst = make_instance(4, {0});
  OptimizerConfig cfg;
  cfg.epsilon = 0;
  EXPECT_THROW(run(inst, cfg), std::invalid_argument);
  cfg = {};
  cfg.step = {StepPolicyKind::fixed, 0};
  EXPECT_THROW(run(inst, cfg), std::invalid_argument);
  cfg = {};
  cfg.l_rie = -1;
  EXPECT_THROW(run(inst, cfg), std::invalid_argument);
  cfg = {};
  cfg.retraction = RetractionKind::product5;
  cfg.step.kind = StepPolicyKind::one_shot;
  EXPECT_THROW(run(inst, cfg), std::invalid_argument);
}

TEST(PlCertificate, OneShotTraceIsCertified) {
  OptimizerConfig cfg;
  cfg.retraction = RetractionKind::exp_exact;
  cfg.step.kind = StepPolicyKind::one_shot;
  cfg.criterion = StopCriterion::gap;
  cfg.epsilon = 1e-3;
  cfg.l_rie = 1.0;
  const Trace t = run(make_instance(16, {0}), cfg);
  const PlCertificate c = pl_gap_certificate(t);
  EXPECT_EQ(c.iterations, 1);
  EXPECT_TRUE(c.within_bound);
  EXPECT_TRUE(c.certified);
}

TEST(PlCertificate, FixedStepRunWithinBound) {
  const SearchInstance inst = make_instance(64, {0});
  OptimizerConfig cfg;
  cfg.criterion = StopCriterion::gap;
  cfg.epsilon = 1e-3;
  const Trace t = run(inst, cfg);
  ASSERT_EQ(t.outcome, Outcome::converged_gap);
  const PlCertificate c = pl_gap_certificate(t);
  EXPECT_EQ(c.bound, pl_iteration_bound(*t.l_rie, 1e-3));
  EXPECT_TRUE(c.within_bound);
  EXPECT_TRUE(c.mu_stable);
  EXPECT_GE(c.mu, 2 * inst.q0 * (1 - 1e-9));
  EXPECT_LT(c.decay_ratio, 1.0);
  // Pointwise: grad^2 = 2 q gap >= 2 q0 gap while q >= q0.
  for (const auto& r : t.records) {
    EXPECT_GE(r.grad_norm * r.grad_norm, 2 * inst.q0 * r.gap - 1e-12);
  }
}

TEST(PlCertificate, NeedsTwoRecords) {
  OptimizerConfig cfg;
  cfg.max_iters = 0;
  cfg.l_rie = 1.0;
  EXPECT_THROW(pl_gap_certificate(run(make_instance(4, {0}), cfg)), std::invalid_argument);
}

TEST(Enums, RoundTrip) {
  for (auto k : {StepPolicyKind::fixed, StepPolicyKind::one_shot,
                 StepPolicyKind::inverse_lipschitz}) {
    EXPECT_EQ(parse_step_policy(to_string(k)), k);
  }
  for (auto e : {Engine::dense, Engine::plane, Engine::both}) {
    EXPECT_EQ(parse_engine(to_string(e)), e);
  }
  for (auto o : {Outcome::converged_grad, Outcome::converged_gap, Outcome::max_iters,
                 Outcome::degenerate, Outcome::smoothness_violation, Outcome::engine_mismatch}) {
    EXPECT_EQ(parse_outcome(to_string(o)), o);
  }
  EXPECT_EQ(parse_step_policy("one-shot"), StepPolicyKind::one_shot);
  EXPECT_THROW(parse_engine("gpu"), std::invalid_argument);
}
