#include "groveropt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace groveropt {

std::string to_string(StepPolicyKind kind) {
  switch (kind) {
    case StepPolicyKind::fixed:
      return "fixed";
    case StepPolicyKind::one_shot:
      return "one_shot";
    case StepPolicyKind::inverse_lipschitz:
      return "inv_lipschitz";
  }
  return "unknown";
}

std::string to_string(Engine engine) {
  switch (engine) {
    case Engine::dense:
      return "dense";
    case Engine::plane:
      return "plane";
    case Engine::both:
      return "both";
  }
  return "unknown";
}

std::string to_string(StopCriterion c) { return c == StopCriterion::gradient ? "grad" : "gap"; }

std::string to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::converged_grad:
      return "converged_grad";
    case Outcome::converged_gap:
      return "converged_gap";
    case Outcome::max_iters:
      return "max_iters";
    case Outcome::degenerate:
      return "degenerate";
    case Outcome::smoothness_violation:
      return "smoothness_violation";
    case Outcome::engine_mismatch:
      return "engine_mismatch";
  }
  return "unknown";
}

StepPolicyKind parse_step_policy(std::string_view text) {
  if (text == "fixed") return StepPolicyKind::fixed;
  if (text == "one_shot" || text == "one-shot") return StepPolicyKind::one_shot;
  if (text == "inv_lipschitz" || text == "inv-lipschitz" || text == "inverse_lipschitz") {
    return StepPolicyKind::inverse_lipschitz;
  }
  throw std::invalid_argument("unknown step policy '" + std::string(text) + "'");
}

Engine parse_engine(std::string_view text) {
  if (text == "dense") return Engine::dense;
  if (text == "plane") return Engine::plane;
  if (text == "both") return Engine::both;
  throw std::invalid_argument("unknown engine '" + std::string(text) + "'");
}

StopCriterion parse_criterion(std::string_view text) {
  if (text == "grad" || text == "gradient") return StopCriterion::gradient;
  if (text == "gap") return StopCriterion::gap;
  throw std::invalid_argument("unknown stop criterion '" + std::string(text) + "'");
}

Outcome parse_outcome(std::string_view text) {
  for (Outcome o : {Outcome::converged_grad, Outcome::converged_gap, Outcome::max_iters,
                    Outcome::degenerate, Outcome::smoothness_violation,
                    Outcome::engine_mismatch}) {
    if (text == to_string(o)) return o;
  }
  throw std::invalid_argument("unknown outcome '" + std::string(text) + "'");
}

namespace {

// ceil that ignores relative roundoff below 1e-12.
long robust_ceil(double v) {
  return static_cast<long>(std::ceil(v - 1e-12 * std::max(1.0, std::abs(v))));
}

}  // namespace

long baseline_iteration_bound(double l, double eps) {
  if (!(l > 0.0) || !(eps > 0.0)) {
    throw std::invalid_argument("baseline_iteration_bound: l and eps must be positive");
  }
  return robust_ceil(2.0 * l / (eps * eps));
}

long pl_iteration_bound(double l, double eps) {
  if (!(l > 0.0) || !(eps > 0.0)) {
    throw std::invalid_argument("pl_iteration_bound: l and eps must be positive");
  }
  if (eps >= 1.0) {
    throw std::invalid_argument("pl_iteration_bound: eps must be < 1");
  }
  return robust_ceil(6.0 * l * std::log(1.0 / eps));
}

namespace {

struct DenseEngine {
  const SearchInstance& inst;
  BaseDirections dirs;
  GroverPlane plane;
  CMatrix u;

  explicit DenseEngine(const SearchInstance& i)
      : inst(i), dirs(base_directions(i)), plane(grover_plane(i)),
        u(CMatrix::Identity(i.n, i.n)) {}

  IterationRecord observe() const {
    const CVector ket = u * inst.psi0_ket;
    const CMatrix g = gradient_at_ket(inst, ket);
    const TangentCoords c = tangent_coords(dirs, g);
    IterationRecord r;
    r.f = objective_at_ket(inst, ket);
    r.q = r.f;
    r.grad_norm = g.norm();
    r.x = c.x;
    r.y = c.y;
    r.plane_residual = plane.residual(ket);
    r.gap = 1.0 - r.q;
    return r;
  }

  void step(RetractionKind kind, double t) {
    if (kind == RetractionKind::exp_exact) {
      u = exp_step(inst, u, t);
    } else {
      const CMatrix g = gradient_at_ket(inst, u * inst.psi0_ket);
      TangentCoords c = tangent_coords(dirs, t * g);
      u = product5_retraction(inst, u, c);
    }
  }
};

struct PlaneEngine {
  PlaneReduction red;
  PlaneState state;

  explicit PlaneEngine(const SearchInstance& i) : red(reduce_instance(i)), state(red.initial) {}

  IterationRecord observe() const {
    IterationRecord r;
    r.q = state.q;
    r.f = state.q;
    r.grad_norm = std::sqrt(2.0 * state.q * (1.0 - state.q));
    r.x = state.x;
    r.y = state.y;
    r.plane_residual = 0.0;
    r.gap = 1.0 - state.q;
    return r;
  }

  void step(RetractionKind kind, double t) { state = plane_step(state, t, kind, red.reduced); }
};

bool criterion_met(const OptimizerConfig& cfg, const IterationRecord& r) {
  if (cfg.criterion == StopCriterion::gradient) {
    return r.grad_norm <= cfg.epsilon;
  }
  return cfg.minimize ? r.q <= cfg.epsilon : r.gap <= cfg.epsilon;
}

Outcome converged_outcome(const OptimizerConfig& cfg) {
  return cfg.criterion == StopCriterion::gradient ? Outcome::converged_grad
                                                  : Outcome::converged_gap;
}

double choose_step(const OptimizerConfig& cfg, const std::optional<double>& l, double q) {
  double t = 0.0;
  switch (cfg.step.kind) {
    case StepPolicyKind::fixed:
      t = cfg.step.t;
      break;
    case StepPolicyKind::inverse_lipschitz:
      t = 1.0 / *l;
      break;
    case StepPolicyKind::one_shot: {
      const double gamma = std::sqrt(q * (1.0 - q));
      if (gamma <= 0.0) {
        return 0.0;
      }
      // Rotate the plane angle asin(sqrt(q)) to pi/2 (ascent) or to 0 (descent).
      const double angle = std::asin(std::sqrt(q));
      return cfg.minimize ? angle / gamma : (std::acos(std::sqrt(q))) / gamma;
    }
  }
  return t;
}

void validate(const OptimizerConfig& cfg) {
  if (!(cfg.epsilon > 0.0)) {
    throw std::invalid_argument("optimizer: epsilon must be positive");
  }
  if (cfg.max_iters < 0) {
    throw std::invalid_argument("optimizer: max_iters must be non-negative");
  }
  if (cfg.step.kind == StepPolicyKind::fixed && !(cfg.step.t > 0.0 && std::isfinite(cfg.step.t))) {
    throw std::invalid_argument("optimizer: fixed step t must be positive and finite");
  }
  if (cfg.l_rie && !(*cfg.l_rie > 0.0 && std::isfinite(*cfg.l_rie))) {
    throw std::invalid_argument("optimizer: l_rie must be positive and finite");
  }
  if (cfg.lipschitz_samples < 2) {
    throw std::invalid_argument("optimizer: lipschitz_samples must be >= 2");
  }
  // The closed-form step rotates along the exponential curve; the product curve leaves
  // the geodesic, so the same t has no meaning there.
  if (cfg.step.kind == StepPolicyKind::one_shot && cfg.retraction != RetractionKind::exp_exact) {
    throw std::invalid_argument("optimizer: the one_shot step policy requires the exp retraction");
  }
}

}  // namespace

Trace run(const SearchInstance& inst, const OptimizerConfig& config) {
  validate(config);
  Trace trace;
  trace.config = config;
  trace.instance = {inst.n, inst.m, inst.q0, inst.c0};
  trace.l_rie = config.l_rie;

  if (inst.degenerate()) {
    IterationRecord r;
    r.q = r.f = inst.q0;
    r.grad_norm = inst.c0;
    r.gap = 1.0 - inst.q0;
    trace.records.push_back(r);
    if (criterion_met(config, r)) {
      trace.outcome = converged_outcome(config);
    } else {
      trace.outcome = Outcome::degenerate;
      trace.diagnostic = "gamma0 = 0: the gradient vanishes at the start and the plane is undefined";
    }
    return trace;
  }

  if (config.step.kind == StepPolicyKind::inverse_lipschitz && !trace.l_rie) {
    trace.l_rie = kLipschitzSafety * estimate_lipschitz(inst, config.lipschitz_samples, config.seed);
  }

  const bool use_dense = config.engine != Engine::plane;
  const bool use_plane = config.engine != Engine::dense;
  std::optional<DenseEngine> dense;
  std::optional<PlaneEngine> plane;
  if (use_dense) dense.emplace(inst);
  if (use_plane) plane.emplace(inst);

  auto observe = [&]() {
    IterationRecord r = use_plane ? plane->observe() : dense->observe();
    if (use_dense && use_plane) {
      const IterationRecord d = dense->observe();
      r.f = d.f;
      r.plane_residual = d.plane_residual;
    }
    return r;
  };

  const double sign = config.minimize ? -1.0 : 1.0;
  IterationRecord current = observe();
  trace.records.push_back(current);
  for (int k = 0;; ++k) {
    if (criterion_met(config, current)) {
      trace.outcome = converged_outcome(config);
      break;
    }
    if (k >= config.max_iters) {
      trace.outcome = Outcome::max_iters;
      break;
    }
    const double t = sign * choose_step(config, trace.l_rie, current.q);
    if (use_dense) dense->step(config.retraction, t);
    if (use_plane) plane->step(config.retraction, t);

    IterationRecord next = observe();
    next.k = k + 1;
    next.t = t;
    trace.records.push_back(next);

    if (use_dense && use_plane) {
      const double dq = std::abs(next.q - next.f);
      if (dq > 1e-9) {
        std::ostringstream msg;
        msg << "dense and plane engines disagree at k = " << next.k << ": |dq| = " << dq;
        trace.outcome = Outcome::engine_mismatch;
        trace.diagnostic = msg.str();
        break;
      }
    }
    if (config.step.kind != StepPolicyKind::one_shot) {
      const double change = sign * (next.f - current.f);
      if (change < -1e-9) {
        std::ostringstream msg;
        msg << "objective moved against the step direction by " << -change << " at k = "
            << next.k << "; the step exceeds the smoothness region";
        trace.outcome = Outcome::smoothness_violation;
        trace.diagnostic = msg.str();
        break;
      }
    }
    current = next;
  }
  return trace;
}

PlCertificate pl_gap_certificate(const Trace& trace) {
  if (trace.records.size() < 2) {
    throw std::invalid_argument("pl_gap_certificate: need at least two records");
  }
  if (!trace.l_rie) {
    throw std::invalid_argument("pl_gap_certificate: trace carries no Lipschitz constant");
  }
  const double eps = trace.config.epsilon;
  PlCertificate c;
  c.mu_floor = 2.0 * trace.instance.q0;
  c.bound = pl_iteration_bound(*trace.l_rie, eps);

  c.mu = std::numeric_limits<double>::infinity();
  bool monotone = true;
  std::vector<std::pair<double, double>> log_gaps;
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const auto& r = trace.records[i];
    if (i > 0 && r.q < trace.records[i - 1].q - 1e-9) {
      monotone = false;
    }
    if (r.gap > 1e-14) {
      c.mu = std::min(c.mu, r.grad_norm * r.grad_norm / r.gap);
      log_gaps.emplace_back(r.k, std::log(r.gap));
    }
    if (c.iterations < 0 && r.gap <= eps) {
      c.iterations = r.k;
    }
  }
  if (!std::isfinite(c.mu)) {
    c.mu = c.mu_floor;  // every record already at the optimum
  }
  c.mu_stable = monotone && c.mu > 0.0 && c.mu >= c.mu_floor * (1.0 - 1e-9) - 1e-12;

  if (log_gaps.size() >= 2) {
    double sk = 0, sl = 0, skk = 0, skl = 0;
    const double n = static_cast<double>(log_gaps.size());
    for (const auto& [k, lg] : log_gaps) {
      sk += k;
      sl += lg;
      skk += k * k;
      skl += k * lg;
    }
    const double denom = n * skk - sk * sk;
    c.decay_ratio = denom > 0 ? std::exp((n * skl - sk * sl) / denom) : 0.0;
  } else {
    c.decay_ratio = 0.0;
  }
  c.within_bound = c.iterations >= 0 && c.iterations <= c.bound;
  c.certified = c.within_bound && c.mu_stable && c.decay_ratio < 1.0;
  return c;
}

}  // namespace groveropt
