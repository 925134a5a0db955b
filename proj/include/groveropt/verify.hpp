#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "groveropt/candidate.hpp"
#include "groveropt/optimizer.hpp"

namespace groveropt {

struct SuiteFailure {
  std::string digest;  // identifies the failing input
  double observed = 0;
  double expected = 0;
  double tolerance = 0;
  std::string what;
};

struct SuiteReport {
  std::string suite;
  int trials = 0;
  std::vector<SuiteFailure> failures;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<std::string> notes;

  bool passed() const { return failures.empty(); }
  void metric(const std::string& key, double value) { metrics.emplace_back(key, value); }
  /// Records a failure unless |observed - expected| <= tolerance.
  bool expect_near(const std::string& digest, const std::string& what, double observed,
                   double expected, double tolerance);
  /// Records a failure unless observed <= bound.
  bool expect_le(const std::string& digest, const std::string& what, double observed,
                 double bound);
};

/// Concatenates several reports under one suite name.
SuiteReport merge_reports(const std::string& suite, const std::vector<SuiteReport>& parts);

struct FdCheck {
  double h = 0;
  double finite_difference = 0;  // (f(e^{hD} U) - f(U)) / h
  double analytic = 0;           // <grad(U), D>
  double error = 0;
};

FdCheck fd_gradient_check(const SearchInstance& inst, const CMatrix& u, const CMatrix& direction,
                          double h);

/// Errors at h = 1e-4, 1e-5, 1e-6 plus the error ratio when h is halved from 1e-5.
struct FdSweep {
  std::vector<FdCheck> checks;
  double halving_ratio = 0;
  bool linear_decay = false;  // ratio in [0.3, 0.7], or both errors below the 1e-9 floor
};

FdSweep fd_gradient_sweep(const SearchInstance& inst, const CMatrix& u, const CMatrix& direction);

/// Random skew-Hermitian matrix with unit Frobenius norm; traceless when requested.
CMatrix random_skew_hermitian(int n, std::uint64_t seed, bool traceless = false);

/// Gradient norm identity ||[H, psi_U]|| = sqrt(2 f (1 - f)) on Haar unitaries, cycling dims.
SuiteReport norm_identity_suite(const std::vector<int>& dims, int m, int trials,
                                std::uint64_t seed);

/// Directional derivatives against finite differences at h = 1e-5 with O(h) decay, plus
/// stationarity at the maximizer and at a minimizer. `inject_fault` negates the gradient.
SuiteReport fd_gradient_suite(const SearchInstance& inst, int trials, std::uint64_t seed,
                              bool inject_fault = false);

SuiteReport gradient_suite(const SearchInstance& inst, int trials, std::uint64_t seed,
                           bool inject_fault = false);

/// Random mixed schedules of exp, product5 and raw factor steps; the ket must stay in the
/// Grover plane and every gradient must stay in span{X0, Y0}. `inject_fault` applies one
/// small generic unitary midway.
SuiteReport plane_invariance_suite(const SearchInstance& inst, int steps, std::uint64_t seed,
                                   bool inject_fault = false);

/// Dense and plane engines on the same step schedule, for both retraction kinds.
SuiteReport engine_equivalence_suite(const SearchInstance& inst, int steps, std::uint64_t seed);

struct CommutatorPair {
  CMatrix a;
  CMatrix b;
};

/// Hermitian A, B with [A, B] = X for traceless skew-Hermitian X.
CommutatorPair commutator_decompose(const CMatrix& x);

SuiteReport commutator_suite(const std::vector<int>& dims, int trials, std::uint64_t seed,
                             bool inject_fault = false);

/// Both first- and second-order retraction bounds over Haar U and unit tangent directions at
/// each scale; tightness of both ratios at the smallest scale. `inject_fault` tightens the
/// second-order constant by 10%, which a tight bound must violate.
SuiteReport bounds_suite(const SearchInstance& inst, int trials, const std::vector<double>& scales,
                         std::uint64_t seed, bool inject_fault = false);

struct ComplexityCell {
  int n = 0;
  int m = 0;
  double eps = 0;
};

enum class ComplexityMode { baseline, pl };

/// One run against its iteration bound, using the effective constant for both the step
/// and the bound.
struct ComplexityResult {
  ComplexityCell cell;
  ComplexityMode mode = ComplexityMode::baseline;
  double l_hat = 0;
  double l_rie = 0;
  long bound = 0;
  int iterations = -1;
  Outcome outcome = Outcome::max_iters;
  PlCertificate certificate;  // PL mode only
  bool ok = false;
};

/// `l_hat` skips the estimate when the caller already has one for this instance.
ComplexityResult complexity_run(const ComplexityCell& cell, ComplexityMode mode,
                                std::uint64_t seed, int lipschitz_samples = 200,
                                std::optional<double> l_hat = std::nullopt);

/// The shipped baseline and PL matrices.
std::vector<ComplexityCell> baseline_cells();
std::vector<ComplexityCell> pl_cells();

SuiteReport complexity_suite(const std::vector<ComplexityCell>& baseline,
                             const std::vector<ComplexityCell>& pl, std::uint64_t seed,
                             int lipschitz_samples = 200);

struct ScalingResult {
  std::vector<int> dims;
  std::vector<double> l_hat;
  double slope = 0;
};

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

ScalingResult lipschitz_scaling(const std::vector<int>& dims, int m, int samples,
                                std::uint64_t seed);

SuiteReport lipschitz_scaling_suite(const std::vector<int>& dims, int m, int samples,
                                    std::uint64_t seed);

/// Seed grid used by the candidate tester.
std::vector<std::pair<double, double>> candidate_seed_grid();

/// The built-in product must pass; each shipped negative candidate must fail.
SuiteReport candidate_suite(const SearchInstance& inst, const CandidateProduct& positive,
                            const std::vector<CandidateProduct>& negatives, double h, double eps);

}  // namespace groveropt
