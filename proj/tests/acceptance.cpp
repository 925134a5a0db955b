// Acceptance run: one [PASS]/[FAIL] line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "groveropt/verify.hpp"

using namespace groveropt;

namespace {

struct Verdict {
  bool ok = false;
  std::string detail;
};

double metric(const SuiteReport& r, const std::string& key) {
  for (const auto& [k, v] : r.metrics) {
    if (k == key) return v;
  }
  return NAN;
}

std::string first_failure(const SuiteReport& r) {
  if (r.passed()) return "";
  const auto& f = r.failures.front();
  std::ostringstream s;
  s << "; first failure " << f.what << " at " << f.digest << ": " << f.observed;
  return s.str();
}

int failures = 0;

void criterion(const char* id, const char* title, double limit_s,
               const std::function<Verdict()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs > limit_s) {
    v.ok = false;
    v.detail += "; runtime limit exceeded";
  }
  if (!v.ok) ++failures;
  std::printf("[%s] %s %s: %s (%.2f s, limit %.0f s)\n", v.ok ? "PASS" : "FAIL", id, title,
              v.detail.c_str(), secs, limit_s);
  std::fflush(stdout);
}

std::vector<int> first(int m) {
  std::vector<int> marked;
  for (int i = 0; i < m; ++i) marked.push_back(i);
  return marked;
}

}  // namespace

int main() {
  const std::uint64_t seed = 1;

  criterion("AC1", "one-shot optimality", 1, [] {
    double worst = 0;
    for (auto [n, engine] : {std::pair{2, Engine::dense}, std::pair{4, Engine::dense},
                             std::pair{1024, Engine::plane}}) {
      OptimizerConfig cfg;
      cfg.retraction = RetractionKind::exp_exact;
      cfg.step.kind = StepPolicyKind::one_shot;
      cfg.engine = engine;
      cfg.criterion = StopCriterion::gap;
      cfg.epsilon = 1e-10;
      cfg.max_iters = 1;
      const Trace t = run(make_instance(n, {0}), cfg);
      worst = std::max(worst, t.records.back().gap);
    }
    std::ostringstream s;
    s << "max 1-f after one step = " << worst << " <= 1e-10";
    return Verdict{worst <= 1e-10, s.str()};
  });

  criterion("AC2", "gradient norm identity", 10, [&] {
    const SuiteReport r = norm_identity_suite({4, 16, 64}, 1, 500, seed);
    std::ostringstream s;
    s << r.trials << " unitaries, max error = " << metric(r, "max_abs_error") << " <= 1e-9"
      << first_failure(r);
    return Verdict{r.passed() && r.trials == 500, s.str()};
  });

  criterion("AC3", "plane invariance", 30, [&] {
    const SuiteReport r = plane_invariance_suite(make_instance(64, {0}), 200, seed);
    std::ostringstream s;
    s << "200 steps at N=64, max ket residual = " << metric(r, "max_ket_residual")
      << ", max tangent residual = " << metric(r, "max_tangent_residual") << " <= 1e-9"
      << first_failure(r);
    return Verdict{r.passed(), s.str()};
  });

  criterion("AC4", "retraction bounds and tightness", 30, [&] {
    const SuiteReport r = bounds_suite(make_instance(4, {0}), 200, {10, 1, 1e-2, 1e-4}, seed);
    const double limit = metric(r, "limit_ratio2");
    const double tight = metric(r, "smallest_scale_max_ratio2");
    const bool within = std::abs(tight - limit) <= 0.01 * limit;
    std::ostringstream s;
    s << r.failures.size() << " violations; ratio2 at 1e-4 = " << tight << " vs 1/(4c0) = "
      << limit << first_failure(r);
    return Verdict{r.passed() && within && std::abs(limit - 0.4082482904638631) < 1e-12,
                   s.str()};
  });

  criterion("AC5", "retraction candidate tester", 10, [] {
    const SuiteReport r =
        candidate_suite(make_instance(4, {0}), builtin_product5(),
                        {builtin_single_factor(), builtin_swapped_product5()}, 1e-6, 1e-4);
    return Verdict{r.passed(), r.passed() ? "5-factor product passes, both negatives fail"
                                          : "candidate verdicts wrong" + first_failure(r)};
  });

  criterion("AC6", "plane and dense engines agree", 30, [&] {
    const SuiteReport r = engine_equivalence_suite(make_instance(64, {0}), 50, seed);
    std::ostringstream s;
    s << "max |dq| exp = " << metric(r, "max_dq_exp") << ", product5 = "
      << metric(r, "max_dq_product5") << " <= 1e-9" << first_failure(r);
    return Verdict{r.passed(), s.str()};
  });

  // Both complexity criteria share the Lipschitz estimate per instance.
  std::map<std::pair<int, int>, double> l_cache;
  auto l_hat = [&](int n, int m) {
    auto it = l_cache.find({n, m});
    if (it != l_cache.end()) return it->second;
    const double l = estimate_lipschitz(make_instance(n, first(m)), 200, seed);
    l_cache[{n, m}] = l;
    return l;
  };

  criterion("AC7", "baseline complexity", 120, [&] {
    bool ok = true;
    std::ostringstream s;
    for (const ComplexityCell& c : baseline_cells()) {
      const ComplexityResult r =
          complexity_run(c, ComplexityMode::baseline, seed, 200, l_hat(c.n, c.m));
      ok = ok && r.ok;
      s << "(" << c.n << "," << c.m << "," << c.eps << "): " << r.iterations << "/" << r.bound
        << (r.ok ? "" : " FAILED") << "  ";
    }
    return Verdict{ok, s.str()};
  });

  criterion("AC8", "PL certificate", 120, [&] {
    bool ok = true;
    std::ostringstream s;
    for (const ComplexityCell& c : pl_cells()) {
      const ComplexityResult r = complexity_run(c, ComplexityMode::pl, seed, 200, l_hat(c.n, c.m));
      ok = ok && r.ok;
      s << "(" << c.n << "," << c.m << "," << c.eps << "): " << r.iterations << "/" << r.bound
        << " mu=" << r.certificate.mu << (r.ok ? "" : " FAILED") << "  ";
    }
    return Verdict{ok, s.str()};
  });

  criterion("AC9", "Lipschitz scaling", 120, [&] {
    const ScalingResult r = lipschitz_scaling({16, 64, 256}, 1, 200, seed);
    std::ostringstream s;
    s << "L_hat = " << r.l_hat[0] << ", " << r.l_hat[1] << ", " << r.l_hat[2]
      << "; slope = " << r.slope << " (0.5 +- 0.15)";
    return Verdict{std::abs(r.slope - 0.5) <= 0.15, s.str()};
  });

  criterion("AC10", "su(n) commutator decomposition", 10, [&] {
    const SuiteReport r = commutator_suite({2, 8, 16}, 50, seed);
    std::ostringstream s;
    s << r.trials << " matrices, max residual = " << metric(r, "max_residual") << " <= 1e-10"
      << first_failure(r);
    return Verdict{r.passed(), s.str()};
  });

  criterion("AC11", "finite-difference gradient", 10, [&] {
    const SuiteReport r = fd_gradient_suite(make_instance(16, {0}), 100, seed);
    std::ostringstream s;
    s << "max error at h=1e-5 = " << metric(r, "max_error_h1e-5")
      << " <= 1e-5, worst halving ratio = " << metric(r, "max_halving_ratio")
      << first_failure(r);
    return Verdict{r.passed(), s.str()};
  });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
