#include <cmath>
#include <numbers>
#include <random>

#include "groveropt/optimizer.hpp"

namespace groveropt {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 over (seed, index)
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

constexpr double kTangentRadius = 0.7071067811865476;  // 1/sqrt(2)
constexpr double kPairOffset = 1e-2;
constexpr double kFdStep = 1e-5;

double raw_objective(const SearchInstance& inst, const CVector& ket) {
  return ket.dot(inst.h * ket).real();
}

double pullback_value(const SearchInstance& inst, const CVector& base, double x, double y) {
  const RetractionParams p = product5_params(x, y);
  CVector v = base;
  apply_factor(inst, Generator::h, -p.a2, v);
  apply_factor(inst, Generator::psi0, p.b2, v);
  apply_factor(inst, Generator::h, p.a2 - p.a1, v);
  apply_factor(inst, Generator::psi0, p.b1, v);
  apply_factor(inst, Generator::h, p.a1, v);
  return raw_objective(inst, v);
}

// Gradient of the pullback in W coordinates: G^{-1} times the coordinate partials.
Eigen::Vector2d pullback_gradient(const SearchInstance& inst, const Eigen::Matrix2d& gram,
                                  const CVector& base, const Eigen::Vector2d& xy) {
  const double dx = kFdStep / std::sqrt(gram(0, 0));
  const double dy = kFdStep / std::sqrt(gram(1, 1));
  Eigen::Vector2d partial;
  partial(0) = (pullback_value(inst, base, xy(0) + dx, xy(1)) -
                pullback_value(inst, base, xy(0) - dx, xy(1))) /
               (2 * dx);
  partial(1) = (pullback_value(inst, base, xy(0), xy(1) + dy) -
                pullback_value(inst, base, xy(0), xy(1) - dy)) /
               (2 * dy);
  return gram.ldlt().solve(partial);
}

Eigen::Vector2d random_tangent(std::mt19937_64& rng, const Eigen::Matrix2d& gram, double norm) {
  std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
  const double a = angle(rng);
  Eigen::Vector2d d(std::cos(a), std::sin(a));
  return d * (norm / std::sqrt(d.dot(gram * d)));
}

CVector sample_base(const SearchInstance& inst, const PlaneReduction& red,
                    const GroverPlane& plane, int kind, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  switch (kind) {
    case 0: {
      const double t = unit(rng) * one_shot_step(inst.q0);
      const PlaneState s = plane_step(red.initial, t, RetractionKind::exp_exact, red.reduced);
      return plane.lift(s.ket);
    }
    case 1: {
      CVector v = inst.psi0_ket;
      const int length = 1 + static_cast<int>(unit(rng) * 6.0);
      for (int j = 0; j < length; ++j) {
        const double theta = (2 * unit(rng) - 1) * std::numbers::pi;
        apply_factor(inst, j % 2 == 0 ? Generator::h : Generator::psi0, theta, v);
      }
      return v;
    }
    default: {
      std::normal_distribution<double> normal(0.0, 1.0);
      CVector v(inst.n);
      for (int i = 0; i < inst.n; ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        v(i) = Complex(re, im);
      }
      return v / v.norm();
    }
  }
}

}  // namespace

double estimate_lipschitz(const SearchInstance& inst, int samples, std::uint64_t seed) {
  if (samples < 2) {
    throw std::invalid_argument("estimate_lipschitz: need at least 2 samples");
  }
  if (inst.degenerate()) {
    throw DegenerateInstance("estimate_lipschitz: degenerate instance");
  }
  const BaseDirections dirs = base_directions(inst);
  const PlaneReduction red = reduce_instance(inst);
  const GroverPlane plane = grover_plane(inst);
  const Eigen::Matrix2d& gram = dirs.gram;

  double best = 0.0;
  for (int i = 0; i < samples; ++i) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const CVector base = sample_base(inst, red, plane, i % 3, rng);
    const Eigen::Vector2d eta = random_tangent(rng, gram, kTangentRadius * std::sqrt(unit(rng)));
    const Eigen::Vector2d delta = random_tangent(rng, gram, kPairOffset);
    const Eigen::Vector2d g1 = pullback_gradient(inst, gram, base, eta);
    const Eigen::Vector2d g2 = pullback_gradient(inst, gram, base, eta + delta);
    const Eigen::Vector2d dg = g1 - g2;
    const double ratio = std::sqrt(dg.dot(gram * dg)) / std::sqrt(delta.dot(gram * delta));
    best = std::max(best, ratio);
  }
  return best;
}

}  // namespace groveropt
