#include "groveropt/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

namespace groveropt {

namespace {

std::string digest(std::initializer_list<std::pair<const char*, double>> fields) {
  std::ostringstream out;
  out.precision(6);
  bool first = true;
  for (const auto& [k, v] : fields) {
    out << (first ? "" : " ") << k << "=" << v;
    first = false;
  }
  return out.str();
}

std::vector<int> first_marked(int m) {
  std::vector<int> marked(m);
  std::iota(marked.begin(), marked.end(), 0);
  return marked;
}

// Unit coordinates: (x, y) with ||x X0 + y Y0|| = 1.
TangentCoords unit_coords(const Eigen::Matrix2d& gram, double angle) {
  Eigen::Vector2d d(std::cos(angle), std::sin(angle));
  d /= std::sqrt(d.dot(gram * d));
  return {d(0), d(1), 0.0};
}

}  // namespace

bool SuiteReport::expect_near(const std::string& dig, const std::string& what, double observed,
                              double expected, double tolerance) {
  if (std::abs(observed - expected) <= tolerance) {
    return true;
  }
  failures.push_back({dig, observed, expected, tolerance, what});
  return false;
}

bool SuiteReport::expect_le(const std::string& dig, const std::string& what, double observed,
                            double bound) {
  if (observed <= bound) {
    return true;
  }
  failures.push_back({dig, observed, bound, 0.0, what});
  return false;
}

SuiteReport merge_reports(const std::string& suite, const std::vector<SuiteReport>& parts) {
  SuiteReport out;
  out.suite = suite;
  for (const auto& p : parts) {
    out.trials += p.trials;
    for (auto f : p.failures) {
      f.what = p.suite + ": " + f.what;
      out.failures.push_back(std::move(f));
    }
    for (const auto& [k, v] : p.metrics) {
      out.metrics.emplace_back(p.suite + "." + k, v);
    }
    for (const auto& n : p.notes) {
      out.notes.push_back(p.suite + ": " + n);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// gradient

FdCheck fd_gradient_check(const SearchInstance& inst, const CMatrix& u, const CMatrix& direction,
                          double h) {
  if (!(h > 0.0)) {
    throw std::invalid_argument("fd_gradient_check: h must be positive");
  }
  FdCheck c;
  c.h = h;
  const double f0 = objective(inst, u);
  const double f1 = objective(inst, expm_skew(direction, h) * u);
  c.finite_difference = (f1 - f0) / h;
  c.analytic = frobenius_inner(gradient(inst, u), direction);
  c.error = std::abs(c.finite_difference - c.analytic);
  return c;
}

FdSweep fd_gradient_sweep(const SearchInstance& inst, const CMatrix& u, const CMatrix& direction) {
  FdSweep s;
  for (double h : {1e-4, 1e-5, 1e-6}) {
    s.checks.push_back(fd_gradient_check(inst, u, direction, h));
  }
  const double e1 = s.checks[1].error;
  const double e2 = fd_gradient_check(inst, u, direction, 5e-6).error;
  constexpr double kFloor = 1e-9;
  s.halving_ratio = e1 > 0 ? e2 / e1 : 0.0;
  s.linear_decay = (e1 <= kFloor && e2 <= kFloor) ||
                   (s.halving_ratio >= 0.3 && s.halving_ratio <= 0.7);
  return s;
}

CMatrix random_skew_hermitian(int n, std::uint64_t seed, bool traceless) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix g(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  }
  CMatrix x = 0.5 * (g - g.adjoint());
  if (traceless) {
    x -= (x.trace() / static_cast<double>(n)) * CMatrix::Identity(n, n);
  }
  return x / x.norm();
}

SuiteReport norm_identity_suite(const std::vector<int>& dims, int m, int trials,
                                std::uint64_t seed) {
  if (dims.empty()) {
    throw std::invalid_argument("norm_identity_suite: no dimensions");
  }
  SuiteReport r;
  r.suite = "norm_identity";
  r.trials = trials;
  std::map<int, SearchInstance> cache;
  double worst = 0;
  for (int i = 0; i < trials; ++i) {
    const int n = dims[static_cast<std::size_t>(i) % dims.size()];
    auto it = cache.find(n);
    if (it == cache.end()) {
      it = cache.emplace(n, make_instance(n, first_marked(m))).first;
    }
    const SearchInstance& inst = it->second;
    const CMatrix u = random_unitary(n, derive_seed(seed, static_cast<std::uint64_t>(i)));
    const double f = objective(inst, u);
    const double g = gradient(inst, u).norm();
    const double target = std::sqrt(2.0 * f * (1.0 - f));
    worst = std::max(worst, std::abs(g - target));
    r.expect_near(digest({{"n", n}, {"trial", i}}), "gradient norm identity", g, target, 1e-9);
  }
  r.metric("max_abs_error", worst);
  return r;
}

SuiteReport fd_gradient_suite(const SearchInstance& inst, int trials, std::uint64_t seed,
                              bool inject_fault) {
  SuiteReport r;
  r.suite = "fd_gradient";
  r.trials = trials;
  const double sign = inject_fault ? -1.0 : 1.0;
  double worst = 0;
  double worst_ratio = 0;
  for (int i = 0; i < trials; ++i) {
    const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(i));
    const CMatrix u = random_unitary(inst.n, s);
    const CMatrix d = random_skew_hermitian(inst.n, derive_seed(s, 1));
    FdSweep sweep = fd_gradient_sweep(inst, u, d);
    if (inject_fault) {
      for (auto& c : sweep.checks) {
        c.analytic *= sign;
        c.error = std::abs(c.finite_difference - c.analytic);
      }
    }
    const FdCheck& at = sweep.checks[1];
    const std::string dig = digest({{"n", inst.n}, {"trial", i}});
    worst = std::max(worst, at.error);
    worst_ratio = std::max(worst_ratio, sweep.halving_ratio);
    r.expect_le(dig, "finite-difference error at h=1e-5", at.error, 1e-5);
    if (!sweep.linear_decay) {
      r.failures.push_back({dig, sweep.halving_ratio, 0.5, 0.2, "O(h) decay ratio"});
    }
  }
  r.metric("max_error_h1e-5", worst);
  r.metric("max_halving_ratio", worst_ratio);

  if (!inst.degenerate()) {
    // Stationary points: derivative vanishes along every direction.
    const CMatrix eye = CMatrix::Identity(inst.n, inst.n);
    const CMatrix top = exp_step(inst, eye, one_shot_step(inst));
    const double t_min = -std::asin(std::sqrt(inst.q0)) / inst.gamma0;
    const CMatrix bottom = exp_step(inst, eye, t_min);
    for (const auto& [name, u, kind] :
         {std::tuple{"maximizer", top, Stationarity::maximum},
          std::tuple{"minimizer", bottom, Stationarity::minimum}}) {
      for (int j = 0; j < 5; ++j) {
        const CMatrix d = random_skew_hermitian(inst.n, derive_seed(seed, 1000 + j));
        const FdCheck c = fd_gradient_check(inst, u, d, 1e-5);
        r.expect_near(digest({{"dir", j}}), std::string(name) + " directional derivative",
                      sign * c.analytic, 0.0, 1e-9);
        r.expect_le(digest({{"dir", j}}), std::string(name) + " finite difference",
                    std::abs(c.finite_difference), 1e-4);
      }
      const Stationarity got = classify_stationary(inst, u, 1e-6);
      if (got != kind) {
        r.failures.push_back({name, 0, 0, 0, "classified as " + to_string(got)});
      }
    }
  }
  return r;
}

SuiteReport gradient_suite(const SearchInstance& inst, int trials, std::uint64_t seed,
                           bool inject_fault) {
  return merge_reports("gradient", {norm_identity_suite({inst.n}, inst.m, trials, seed),
                                    fd_gradient_suite(inst, trials, seed, inject_fault)});
}

// ---------------------------------------------------------------------------
// plane invariance

SuiteReport plane_invariance_suite(const SearchInstance& inst, int steps, std::uint64_t seed,
                                   bool inject_fault) {
  SuiteReport r;
  r.suite = "plane_invariance";
  r.trials = steps;
  const BaseDirections dirs = base_directions(inst);
  const GroverPlane plane = grover_plane(inst);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  CMatrix u = CMatrix::Identity(inst.n, inst.n);
  double worst_ket = 0;
  double worst_tangent = 0;
  const char* names[] = {"exp", "product5", "raw_h", "raw_psi0"};
  for (int k = 1; k <= steps; ++k) {
    const int kind = static_cast<int>(unit(rng) * 4.0) % 4;
    const double t = 4.0 * unit(rng) - 2.0;
    const double theta = (2.0 * unit(rng) - 1.0) * std::numbers::pi;
    switch (kind) {
      case 0:
        u = exp_step(inst, u, t);
        break;
      case 1: {
        const CMatrix g = gradient_at_ket(inst, u * inst.psi0_ket);
        try {
          u = product5_retraction(inst, u, tangent_coords(dirs, t * g));
        } catch (const std::invalid_argument& e) {
          r.failures.push_back({digest({{"step", k}}), 0, 0, 0, e.what()});
          r.notes.push_back("schedule stopped at step " + std::to_string(k));
          k = steps;
          continue;
        }
        break;
      }
      case 2:
        apply_factor(inst, Generator::h, theta, u);
        break;
      default:
        apply_factor(inst, Generator::psi0, theta, u);
        break;
    }
    if (inject_fault && k == steps / 2 + 1) {
      u = expm_skew(random_skew_hermitian(inst.n, derive_seed(seed, 77)), 1e-3) * u;
      r.notes.push_back("fault injected after step " + std::to_string(k));
    }
    const CVector ket = u * inst.psi0_ket;
    const double ket_res = plane.residual(ket);
    const double tan_res = tangent_coords(dirs, gradient_at_ket(inst, ket)).residual;
    worst_ket = std::max(worst_ket, ket_res);
    worst_tangent = std::max(worst_tangent, tan_res);
    const std::string dig = digest({{"step", k}}) + " kind=" + names[kind];
    r.expect_le(dig, "ket plane residual", ket_res, 1e-9);
    r.expect_le(dig, "gradient tangent residual", tan_res, 1e-9);
  }
  r.metric("max_ket_residual", worst_ket);
  r.metric("max_tangent_residual", worst_tangent);
  return r;
}

SuiteReport engine_equivalence_suite(const SearchInstance& inst, int steps, std::uint64_t seed) {
  SuiteReport r;
  r.suite = "engine_equivalence";
  r.trials = 2 * steps;
  const BaseDirections dirs = base_directions(inst);
  const PlaneReduction red = reduce_instance(inst);
  for (RetractionKind kind : {RetractionKind::exp_exact, RetractionKind::product5}) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(kind)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    CMatrix u = CMatrix::Identity(inst.n, inst.n);
    PlaneState s = red.initial;
    double worst = 0;
    for (int k = 1; k <= steps; ++k) {
      const double t = (unit(rng) < 0.25 ? -1.0 : 1.0) * (0.1 + 1.4 * unit(rng));
      if (kind == RetractionKind::exp_exact) {
        u = exp_step(inst, u, t);
      } else {
        const CMatrix g = gradient_at_ket(inst, u * inst.psi0_ket);
        u = product5_retraction(inst, u, tangent_coords(dirs, t * g));
      }
      s = plane_step(s, t, kind, red.reduced);
      const double dq = std::abs(objective_at_ket(inst, u * inst.psi0_ket) - s.q);
      worst = std::max(worst, dq);
      r.expect_le(digest({{"step", k}, {"t", t}}) + " kind=" + to_string(kind), "|dq|", dq,
                  1e-9);
    }
    r.metric("max_dq_" + to_string(kind), worst);
  }
  return r;
}

// ---------------------------------------------------------------------------
// commutators

CommutatorPair commutator_decompose(const CMatrix& x) {
  detail::require_square(x, "commutator_decompose");
  const double scale = 1.0 + x.norm();
  if (skew_hermitian_residual(x) > kStructuralTol * scale) {
    throw std::invalid_argument("commutator_decompose: input is not skew-Hermitian");
  }
  if (std::abs(x.trace()) > kStructuralTol * scale) {
    throw std::invalid_argument("commutator_decompose: input is not traceless");
  }
  const Eigen::Index n = x.rows();
  CommutatorPair out{CMatrix::Zero(n, n), CMatrix::Zero(n, n)};
  if (x.norm() == 0.0) {
    return out;
  }
  const DiagonalSimilarity<double> sim = zero_diagonal_similarity(x);
  CMatrix a = CMatrix::Zero(n, n);
  CMatrix b = CMatrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    a(j, j) = static_cast<double>(j);
    for (Eigen::Index k = 0; k < n; ++k) {
      if (j != k) {
        b(j, k) = sim.reduced(j, k) / static_cast<double>(j - k);
      }
    }
  }
  a = sim.w * a * sim.w.adjoint();
  b = sim.w * b * sim.w.adjoint();
  out.a = 0.5 * (a + a.adjoint());
  out.b = 0.5 * (b + b.adjoint());
  return out;
}

SuiteReport commutator_suite(const std::vector<int>& dims, int trials, std::uint64_t seed,
                             bool inject_fault) {
  SuiteReport r;
  r.suite = "commutator";
  r.trials = trials * static_cast<int>(dims.size());
  double worst = 0;
  double worst_herm = 0;
  for (int n : dims) {
    for (int i = 0; i < trials; ++i) {
      const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(n) * 100003 + i);
      // Entry scale of a standard complex Gaussian matrix.
      const CMatrix x = static_cast<double>(n) * random_skew_hermitian(n, s, true);
      CommutatorPair p = commutator_decompose(x);
      if (inject_fault) {
        p.b(0, 0) += 1e-6;
      }
      const double res = (commutator(p.a, p.b) - x).norm();
      const double herm = std::max(hermitian_residual(p.a), hermitian_residual(p.b));
      worst = std::max(worst, res);
      worst_herm = std::max(worst_herm, herm);
      const std::string dig = digest({{"n", n}, {"trial", i}});
      r.expect_le(dig, "reconstruction residual", res, 1e-10);
      r.expect_le(dig, "hermiticity residual", herm, 1e-12);
    }
  }
  r.metric("max_residual", worst);
  r.metric("max_hermitian_residual", worst_herm);
  return r;
}

// ---------------------------------------------------------------------------
// retraction bounds

SuiteReport bounds_suite(const SearchInstance& inst, int trials, const std::vector<double>& scales,
                         std::uint64_t seed, bool inject_fault) {
  SuiteReport r;
  r.suite = "retraction_bounds";
  r.trials = trials * static_cast<int>(scales.size());
  const BaseDirections dirs = base_directions(inst);
  const double limit2 = 1.0 / (4.0 * inst.c0);
  const double bound2 = (inject_fault ? 0.9 : 1.0) * limit2;
  double smallest = std::numeric_limits<double>::infinity();
  for (double s : scales) {
    if (s > 0.0) smallest = std::min(smallest, s);
  }
  double max_r1 = 0, max_r2 = 0;
  double tight_min_r1 = std::numeric_limits<double>::infinity();
  double tight_max_r1 = 0, tight_max_r2 = 0;
  double tight_min_r2 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < trials; ++i) {
    const std::uint64_t ts = derive_seed(seed, static_cast<std::uint64_t>(i));
    std::mt19937_64 rng(ts);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    const CMatrix u = random_unitary(inst.n, derive_seed(ts, 1));
    const TangentCoords coords = unit_coords(dirs.gram, angle(rng));
    for (double scale : scales) {
      if (!(scale > 0.0)) {
        r.notes.push_back("scale " + std::to_string(scale) +
                          " skipped: ratios are undefined for a zero tangent");
        continue;
      }
      const BoundsRatios b = bounds_ratios(inst, dirs, u, coords, scale);
      const std::string dig = digest({{"trial", i}, {"scale", scale}});
      r.expect_le(dig, "first-order ratio", b.ratio1, 1.0 + 1e-9);
      r.expect_le(dig, "second-order ratio", b.ratio2, bound2 + 1e-6);
      max_r1 = std::max(max_r1, b.ratio1);
      max_r2 = std::max(max_r2, b.ratio2);
      if (scale == smallest) {
        tight_min_r1 = std::min(tight_min_r1, b.ratio1);
        tight_max_r1 = std::max(tight_max_r1, b.ratio1);
        tight_max_r2 = std::max(tight_max_r2, b.ratio2);
        tight_min_r2 = std::min(tight_min_r2, b.ratio2);
      }
    }
  }
  if (std::isfinite(smallest) && trials > 0) {
    const std::string dig = digest({{"scale", smallest}});
    r.expect_le(dig, "first-order tightness (min ratio1 >= 0.999999)", 0.999999 - tight_min_r1,
                0.0);
    r.expect_le(dig, "second-order tightness (max ratio2 >= 0.99 / (4 c0))",
                0.99 * limit2 - tight_max_r2, 0.0);
  }
  r.metric("limit_ratio2", limit2);
  r.metric("max_ratio1", max_r1);
  r.metric("max_ratio2", max_r2);
  r.metric("smallest_scale", smallest);
  r.metric("smallest_scale_min_ratio1", tight_min_r1);
  r.metric("smallest_scale_max_ratio1", tight_max_r1);
  r.metric("smallest_scale_min_ratio2", tight_min_r2);
  r.metric("smallest_scale_max_ratio2", tight_max_r2);
  return r;
}

// ---------------------------------------------------------------------------
// complexity

std::vector<ComplexityCell> baseline_cells() {
  std::vector<ComplexityCell> out;
  for (auto [n, m] : {std::pair{16, 1}, std::pair{64, 1}, std::pair{64, 4}}) {
    for (double eps : {0.1, 0.05}) {
      out.push_back({n, m, eps});
    }
  }
  return out;
}

std::vector<ComplexityCell> pl_cells() {
  std::vector<ComplexityCell> out;
  for (auto [n, m] : {std::pair{16, 1}, std::pair{64, 1}, std::pair{64, 4}}) {
    for (double eps : {1e-2, 1e-3}) {
      out.push_back({n, m, eps});
    }
  }
  return out;
}

ComplexityResult complexity_run(const ComplexityCell& cell, ComplexityMode mode,
                                std::uint64_t seed, int lipschitz_samples,
                                std::optional<double> l_hat) {
  const SearchInstance inst = make_instance(cell.n, first_marked(cell.m));
  ComplexityResult res;
  res.cell = cell;
  res.mode = mode;
  res.l_hat = l_hat ? *l_hat : estimate_lipschitz(inst, lipschitz_samples, seed);
  res.l_rie = kLipschitzSafety * res.l_hat;

  OptimizerConfig cfg;
  cfg.step.kind = StepPolicyKind::inverse_lipschitz;
  cfg.l_rie = res.l_rie;
  cfg.epsilon = cell.eps;
  cfg.seed = seed;
  if (mode == ComplexityMode::baseline) {
    res.bound = baseline_iteration_bound(res.l_rie, cell.eps);
    cfg.criterion = StopCriterion::gradient;
  } else {
    res.bound = pl_iteration_bound(res.l_rie, cell.eps);
    cfg.criterion = StopCriterion::gap;
  }
  cfg.max_iters = static_cast<int>(std::min<long>(res.bound, 1'000'000));
  const Trace trace = run(inst, cfg);
  res.outcome = trace.outcome;
  if (mode == ComplexityMode::baseline) {
    if (trace.outcome == Outcome::converged_grad) {
      res.iterations = trace.iterations();
    }
    // The certificate bounds the minimum over k = 0 .. T-1.
    res.ok = res.iterations >= 0 && res.iterations <= res.bound - 1;
  } else {
    if (trace.outcome == Outcome::converged_gap) {
      res.iterations = trace.iterations();
    }
    res.certificate = trace.records.size() >= 2 ? pl_gap_certificate(trace) : PlCertificate{};
    res.ok = res.iterations >= 0 && res.iterations <= res.bound && res.certificate.mu > 0 &&
             res.certificate.mu_stable;
  }
  return res;
}

SuiteReport complexity_suite(const std::vector<ComplexityCell>& baseline,
                             const std::vector<ComplexityCell>& pl, std::uint64_t seed,
                             int lipschitz_samples) {
  SuiteReport r;
  r.suite = "complexity";
  std::map<std::pair<int, int>, double> l_cache;
  auto l_for = [&](const ComplexityCell& c) {
    const auto key = std::pair{c.n, c.m};
    auto it = l_cache.find(key);
    if (it == l_cache.end()) {
      const SearchInstance inst = make_instance(c.n, first_marked(c.m));
      it = l_cache.emplace(key, estimate_lipschitz(inst, lipschitz_samples, seed)).first;
    }
    return it->second;
  };
  auto cell_tag = [](const ComplexityCell& c) {
    return "n" + std::to_string(c.n) + "_m" + std::to_string(c.m);
  };

  for (const auto& cell : baseline) {
    const ComplexityResult res = complexity_run(cell, ComplexityMode::baseline, seed,
                                                lipschitz_samples, l_for(cell));
    ++r.trials;
    const std::string dig = digest({{"n", cell.n}, {"m", cell.m}, {"eps", cell.eps}});
    if (!res.ok) {
      r.failures.push_back({dig, static_cast<double>(res.iterations),
                            static_cast<double>(res.bound - 1), 0.0,
                            "baseline: min gradient norm not below eps within the bound (" +
                                to_string(res.outcome) + ")"});
    }
    std::ostringstream eps;
    eps << cell.eps;
    const std::string key = "baseline_" + cell_tag(cell) + "_eps" + eps.str();
    r.metric(key + ".iterations", res.iterations);
    r.metric(key + ".bound", static_cast<double>(res.bound));
  }
  for (const auto& cell : pl) {
    const ComplexityResult res =
        complexity_run(cell, ComplexityMode::pl, seed, lipschitz_samples, l_for(cell));
    ++r.trials;
    const std::string dig = digest({{"n", cell.n}, {"m", cell.m}, {"eps", cell.eps}});
    if (!res.ok) {
      r.failures.push_back({dig, static_cast<double>(res.iterations),
                            static_cast<double>(res.bound), 0.0,
                            "PL: gap not below eps within the bound or PL constant unstable (" +
                                to_string(res.outcome) + ")"});
    }
    std::ostringstream eps;
    eps << cell.eps;
    const std::string key = "pl_" + cell_tag(cell) + "_eps" + eps.str();
    r.metric(key + ".iterations", res.iterations);
    r.metric(key + ".bound", static_cast<double>(res.bound));
    r.metric(key + ".mu", res.certificate.mu);
    r.metric(key + ".decay_ratio", res.certificate.decay_ratio);
  }

  // One-shot comparison and the textbook reference count, for context only.
  std::vector<std::pair<int, int>> instances;
  for (const auto& c : baseline) instances.emplace_back(c.n, c.m);
  for (const auto& c : pl) instances.emplace_back(c.n, c.m);
  std::sort(instances.begin(), instances.end());
  instances.erase(std::unique(instances.begin(), instances.end()), instances.end());
  for (auto [n, m] : instances) {
    const SearchInstance inst = make_instance(n, first_marked(m));
    OptimizerConfig cfg;
    cfg.retraction = RetractionKind::exp_exact;
    cfg.step.kind = StepPolicyKind::one_shot;
    cfg.engine = Engine::plane;
    cfg.criterion = StopCriterion::gap;
    cfg.epsilon = 1e-10;
    cfg.max_iters = 1;
    const Trace t = run(inst, cfg);
    ++r.trials;
    const std::string tag = "n" + std::to_string(n) + "_m" + std::to_string(m);
    const double gap = t.records.back().gap;
    if (t.outcome != Outcome::converged_gap || t.iterations() != 1) {
      r.failures.push_back({digest({{"n", n}, {"m", m}}), gap, 0.0, 1e-10,
                            "one-shot: not optimal after exactly one step"});
    }
    r.metric("one_shot_" + tag + ".gap", gap);
    r.metric("reference_count_" + tag,
             std::round(std::numbers::pi / 4.0 * std::sqrt(static_cast<double>(n) / m)));
    r.metric("l_hat_" + tag, l_for({n, m, 0.0}));
  }
  r.notes.push_back(
      "reference_count is round(pi/4 sqrt(N/M)), reported for comparison and not asserted");
  return r;
}

// ---------------------------------------------------------------------------
// Lipschitz scaling

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("loglog_slope: need at least two matching points");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw std::invalid_argument("loglog_slope: values must be positive");
    }
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom <= 0.0) {
    throw std::invalid_argument("loglog_slope: x values must not all be equal");
  }
  return (n * sxy - sx * sy) / denom;
}

ScalingResult lipschitz_scaling(const std::vector<int>& dims, int m, int samples,
                                std::uint64_t seed) {
  ScalingResult out;
  out.dims = dims;
  std::vector<double> ratio;
  for (int n : dims) {
    const SearchInstance inst = make_instance(n, first_marked(m));
    out.l_hat.push_back(estimate_lipschitz(inst, samples, seed));
    ratio.push_back(static_cast<double>(n) / m);
  }
  out.slope = loglog_slope(ratio, out.l_hat);
  return out;
}

SuiteReport lipschitz_scaling_suite(const std::vector<int>& dims, int m, int samples,
                                    std::uint64_t seed) {
  SuiteReport r;
  r.suite = "lipschitz_scaling";
  r.trials = static_cast<int>(dims.size());
  const ScalingResult s = lipschitz_scaling(dims, m, samples, seed);
  for (std::size_t i = 0; i < dims.size(); ++i) {
    r.metric("l_hat_n" + std::to_string(dims[i]), s.l_hat[i]);
  }
  r.metric("slope", s.slope);
  r.expect_near(digest({{"m", m}, {"samples", samples}}), "log-log slope of L against N/M",
                s.slope, 0.5, 0.15);
  return r;
}

// ---------------------------------------------------------------------------
// candidates

std::vector<std::pair<double, double>> candidate_seed_grid() {
  return {{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {-2.0, 0.5}, {0.0, 0.0}};
}

SuiteReport candidate_suite(const SearchInstance& inst, const CandidateProduct& positive,
                            const std::vector<CandidateProduct>& negatives, double h, double eps) {
  SuiteReport r;
  r.suite = "candidate_p123";
  const auto seeds = candidate_seed_grid();
  auto max_err = [](const VelocityReport& rep) {
    double e = 0;
    for (const auto& s : rep.seeds) e = std::max(e, s.err);
    return e;
  };
  const VelocityReport pos = check_velocity(inst, positive, seeds, h, eps);
  ++r.trials;
  r.metric(positive.name + ".max_err", max_err(pos));
  if (!pos.verdict) {
    r.failures.push_back({positive.name, max_err(pos), 0.0, eps,
                          "positive candidate failed P1-P3"});
  }
  for (const auto& neg : negatives) {
    const VelocityReport rep = check_velocity(inst, neg, seeds, h, eps);
    ++r.trials;
    r.metric(neg.name + ".max_err", max_err(rep));
    if (rep.verdict) {
      r.failures.push_back({neg.name, max_err(rep), 0.0, eps,
                            "negative control passed; the tester cannot discriminate"});
    }
  }
  return r;
}

}  // namespace groveropt
