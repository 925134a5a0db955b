#include "groveropt/plane_dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace groveropt {

namespace {

double inner2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  return a.conjugate().cwiseProduct(b).sum().real();
}

void apply_reduced_factor(const Eigen::Matrix2cd& projector, double theta,
                          Eigen::Vector2cd& ket) {
  const Complex c = std::polar(1.0, theta) - 1.0;
  ket += c * (projector * ket);
}

void refresh_coords(const ReducedInstance& reduced, PlaneState& s) {
  const Eigen::Vector2d xy = reduced_coords(reduced, reduced_gradient(reduced, s.ket));
  s.x = xy(0);
  s.y = xy(1);
}

double reduced_q(const ReducedInstance& reduced, const Eigen::Vector2cd& ket) {
  return std::clamp(ket.dot(reduced.h2 * ket).real(), 0.0, 1.0);
}

}  // namespace

Eigen::Matrix2cd reduced_gradient(const ReducedInstance& reduced, const Eigen::Vector2cd& ket) {
  const Eigen::Vector2cd hk = reduced.h2 * ket;
  return hk * ket.adjoint() - ket * hk.adjoint();
}

Eigen::Vector2d reduced_coords(const ReducedInstance& reduced, const Eigen::Matrix2cd& z) {
  const Eigen::Vector2d rhs(inner2(reduced.x0, z), inner2(reduced.y0, z));
  return reduced.gram.ldlt().solve(rhs);
}

PlaneReduction reduce_instance(const SearchInstance& inst) {
  if (inst.degenerate()) {
    throw DegenerateInstance("reduce_instance: degenerate instance");
  }
  const GroverPlane plane = grover_plane(inst);
  PlaneReduction out;
  ReducedInstance& r = out.reduced;
  r.h2 = 0.5 * (plane.h2 + plane.h2.adjoint());
  r.p2 = 0.5 * (plane.p2 + plane.p2.adjoint());
  r.x0 = r.h2 * r.p2 - r.p2 * r.h2;
  const Eigen::Matrix2cd hx = r.h2 * r.x0 - r.x0 * r.h2;
  r.y0 = Complex(0, 1) * hx;
  r.gram << inner2(r.x0, r.x0), inner2(r.x0, r.y0), inner2(r.y0, r.x0), inner2(r.y0, r.y0);

  PlaneState& s = out.initial;
  s.ket = Eigen::Vector2cd(1.0, 0.0);
  s.q = inst.q0;
  s.phi = std::asin(std::sqrt(inst.q0));
  refresh_coords(r, s);
  return out;
}

PlaneState plane_step(const PlaneState& state, double t, RetractionKind kind,
                      const ReducedInstance& reduced) {
  if (t == 0.0) {
    return state;
  }
  PlaneState next = state;
  if (kind == RetractionKind::exp_exact) {
    // Frozen generator G = [h2, |k><k|] satisfies G^2 = -gamma^2 I on the plane, so the
    // step is a rotation; the plane angle advances at the signed rate sin(phi) cos(phi),
    // which equals gamma(q) for phi in [0, pi/2].
    const double gamma = std::sqrt(state.q * (1.0 - state.q));
    if (gamma > 0.0) {
      const Eigen::Matrix2cd g = reduced_gradient(reduced, state.ket);
      next.ket = std::cos(t * gamma) * state.ket + (std::sin(t * gamma) / gamma) * (g * state.ket);
    }
    next.phi = state.phi + t * std::sin(state.phi) * std::cos(state.phi);
    const double s = std::sin(next.phi);
    next.q = std::clamp(s * s, 0.0, 1.0);
  } else {
    const RetractionParams p = product5_params(t * state.x, t * state.y);
    apply_reduced_factor(reduced.h2, -p.a2, next.ket);
    apply_reduced_factor(reduced.p2, p.b2, next.ket);
    apply_reduced_factor(reduced.h2, p.a2 - p.a1, next.ket);
    apply_reduced_factor(reduced.p2, p.b1, next.ket);
    apply_reduced_factor(reduced.h2, p.a1, next.ket);
    next.q = reduced_q(reduced, next.ket);
    next.phi = std::asin(std::sqrt(next.q));
  }
  refresh_coords(reduced, next);
  return next;
}

std::vector<PlaneState> plane_trajectory(
    const SearchInstance& inst, const std::vector<std::pair<double, RetractionKind>>& schedule) {
  const PlaneReduction red = reduce_instance(inst);
  std::vector<PlaneState> out;
  out.reserve(schedule.size() + 1);
  out.push_back(red.initial);
  for (const auto& [t, kind] : schedule) {
    out.push_back(plane_step(out.back(), t, kind, red.reduced));
  }
  return out;
}

}  // namespace groveropt
