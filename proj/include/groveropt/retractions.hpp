#pragma once

#include <string>
#include <string_view>

#include "groveropt/problem.hpp"

namespace groveropt {

enum class RetractionKind { exp_exact, product5 };

std::string to_string(RetractionKind kind);
/// Accepts "exp", "exp_exact" and "product5".
RetractionKind parse_retraction_kind(std::string_view text);

/// The two admissible factor generators: e^{i theta H} and e^{i theta psi0}.
enum class Generator { h, psi0 };

std::string to_string(Generator gen);

/// Angles of the length-5 product for a tangent target x X0 + y Y0.
struct RetractionParams {
  double a1 = 0;
  double a2 = 0;
  double b1 = 0;
  double b2 = 0;
  double big_a = 0;  // atan2(y, x), 0 at the origin
  double big_r = 0;  // hypot(x, y)
};

RetractionParams product5_params(double x, double y);

/// Residual above which tangent coordinates are rejected as out of span{X0, Y0}.
inline constexpr double kCoordsTol = 1e-8;

/// M <- e^{i theta G} M, using the rank structure of the generator.
void apply_factor(const SearchInstance& inst, Generator gen, double theta, CMatrix& m);
void apply_factor(const SearchInstance& inst, Generator gen, double theta, CVector& v);

/// U+ = exp(t [H, psi_U]) U.
CMatrix exp_step(const SearchInstance& inst, const CMatrix& u, double t);

/// arccos(sqrt(q)) / sqrt(q (1 - q)): the step that rotates a state with success
/// probability q onto the target in one exponential update.
double one_shot_step(double q);
double one_shot_step(const SearchInstance& inst);

/// gamma(t; x, y) = e^{i a1 H} e^{i t b1 psi0} e^{i (a2 - a1) H} e^{i t b2 psi0} e^{-i a2 H}.
CMatrix product5_curve_factor(const SearchInstance& inst, double x, double y, double t);

/// R_U(eta) for eta = (x X0 + y Y0) U.
CMatrix product5_retraction(const SearchInstance& inst, const CMatrix& u,
                            const TangentCoords& coords);

/// gamma(t; x, y) U.
CMatrix retraction_curve(const SearchInstance& inst, const CMatrix& u, double x, double y,
                         double t);

struct BoundsRatios {
  double ratio1 = 0;  // ||R_U(s eta) - U|| / ||s eta||
  double ratio2 = 0;  // ||R_U(s eta) - U - s eta|| / ||s eta||^2
  double eta_norm = 0;
};

BoundsRatios bounds_ratios(const SearchInstance& inst, const CMatrix& u,
                           const TangentCoords& coords, double scale);
BoundsRatios bounds_ratios(const SearchInstance& inst, const BaseDirections& dirs,
                           const CMatrix& u, const TangentCoords& coords, double scale);

}  // namespace groveropt
