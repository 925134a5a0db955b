#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "groveropt/plane_dynamics.hpp"

namespace groveropt {

enum class StepPolicyKind { fixed, one_shot, inverse_lipschitz };

struct StepPolicy {
  StepPolicyKind kind = StepPolicyKind::inverse_lipschitz;
  double t = 0;  // used by `fixed` only
};

enum class Engine { dense, plane, both };

/// Baseline runs stop on the gradient norm, PL runs on the optimality gap.
enum class StopCriterion { gradient, gap };

struct OptimizerConfig {
  RetractionKind retraction = RetractionKind::product5;
  StepPolicy step;
  double epsilon = 1e-6;
  int max_iters = 1000;
  std::optional<double> l_rie;
  std::uint64_t seed = 0;
  Engine engine = Engine::dense;
  StopCriterion criterion = StopCriterion::gradient;
  bool minimize = false;
  int lipschitz_samples = 200;
};

struct IterationRecord {
  int k = 0;
  double q = 0;
  double f = 0;
  double grad_norm = 0;
  double x = 0;
  double y = 0;
  double t = 0;  // step that produced this iterate, 0 for k = 0
  double plane_residual = 0;
  double gap = 0;  // 1 - q
};

enum class Outcome {
  converged_grad,
  converged_gap,
  max_iters,
  degenerate,
  smoothness_violation,
  engine_mismatch
};

struct InstanceSummary {
  int n = 0;
  int m = 0;
  double q0 = 0;
  double c0 = 0;
};

struct Trace {
  OptimizerConfig config;
  InstanceSummary instance;
  std::optional<double> l_rie;  // effective constant, when one was needed or supplied
  std::vector<IterationRecord> records;
  Outcome outcome = Outcome::max_iters;
  std::string diagnostic;

  int iterations() const { return records.empty() ? 0 : records.back().k; }
};

std::string to_string(StepPolicyKind kind);
std::string to_string(Engine engine);
std::string to_string(StopCriterion c);
std::string to_string(Outcome outcome);
StepPolicyKind parse_step_policy(std::string_view text);
Engine parse_engine(std::string_view text);
StopCriterion parse_criterion(std::string_view text);
Outcome parse_outcome(std::string_view text);

/// Safety factor applied to the estimate when no explicit L is configured.
inline constexpr double kLipschitzSafety = 1.1;

/// Empirical Lipschitz constant of the pullback gradient of f through the 5-factor
/// retraction, restricted to tangents in W U with norm up to 1/sqrt(2) (the largest
/// gradient norm). Base points cycle through exp-reachable states, random products of the
/// two factor types, and Haar-random states. Sample i depends only on (seed, i), so a
/// larger sample count never lowers the estimate.
double estimate_lipschitz(const SearchInstance& inst, int samples, std::uint64_t seed);

/// ceil(2 L / eps^2).
long baseline_iteration_bound(double l, double eps);
/// ceil(6 L ln(1 / eps)).
long pl_iteration_bound(double l, double eps);

/// Riemannian gradient ascent (descent with `minimize`).
Trace run(const SearchInstance& inst, const OptimizerConfig& config);

struct PlCertificate {
  double mu = 0;        // min over records of grad_norm^2 / gap
  double mu_floor = 0;  // 2 q0
  bool mu_stable = false;
  double decay_ratio = 0;  // fitted per-iteration gap contraction
  long bound = 0;
  int iterations = -1;  // first k with gap <= eps, -1 if never
  bool within_bound = false;
  bool certified = false;
};

PlCertificate pl_gap_certificate(const Trace& trace);

/// Per-sample seed derivation shared by the randomized routines.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace groveropt
