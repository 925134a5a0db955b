#pragma once

#include <utility>
#include <vector>

#include "groveropt/retractions.hpp"

namespace groveropt {

/// Two-dimensional stand-in for the dense iterate: everything the update needs is a
/// 2-component ket in the Grover plane basis {e1, e2}.
struct PlaneState {
  double x = 0;  // tangent coordinates of the current gradient generator
  double y = 0;
  double q = 0;
  double phi = 0;  // sin^2(phi) = q; continues past pi/2 under exp updates
  Eigen::Vector2cd ket = Eigen::Vector2cd::Zero();
};

/// The 2x2 compressions that drive the recursion.
struct ReducedInstance {
  Eigen::Matrix2cd h2;
  Eigen::Matrix2cd p2;
  Eigen::Matrix2cd x0;  // [h2, p2]
  Eigen::Matrix2cd y0;  // i[h2, x0]
  Eigen::Matrix2d gram;
};

struct PlaneReduction {
  ReducedInstance reduced;
  PlaneState initial;
};

PlaneReduction reduce_instance(const SearchInstance& inst);

/// One O(1) update. exp_exact rotates the plane angle at rate gamma(q); product5 multiplies
/// the five reduced factors for the tangent t * grad.
PlaneState plane_step(const PlaneState& state, double t, RetractionKind kind,
                      const ReducedInstance& reduced);

std::vector<PlaneState> plane_trajectory(const SearchInstance& inst,
                                         const std::vector<std::pair<double, RetractionKind>>& schedule);

/// Gradient generator [h2, |k><k|] and its coordinates for a reduced ket.
Eigen::Matrix2cd reduced_gradient(const ReducedInstance& reduced, const Eigen::Vector2cd& ket);
Eigen::Vector2d reduced_coords(const ReducedInstance& reduced, const Eigen::Matrix2cd& z);

}  // namespace groveropt
