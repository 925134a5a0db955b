#include "groveropt/retractions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace groveropt {

std::string to_string(RetractionKind kind) {
  return kind == RetractionKind::exp_exact ? "exp" : "product5";
}

RetractionKind parse_retraction_kind(std::string_view text) {
  if (text == "exp" || text == "exp_exact") {
    return RetractionKind::exp_exact;
  }
  if (text == "product5") {
    return RetractionKind::product5;
  }
  throw std::invalid_argument("unknown retraction '" + std::string(text) +
                              "' (expected exp or product5)");
}

std::string to_string(Generator gen) { return gen == Generator::h ? "H" : "psi0"; }

RetractionParams product5_params(double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw std::invalid_argument("product5_params: non-finite coordinates");
  }
  RetractionParams p;
  p.big_r = std::hypot(x, y);
  p.big_a = (x == 0.0 && y == 0.0) ? 0.0 : std::atan2(y, x);
  p.a1 = p.big_a + std::numbers::pi / 2;
  p.a2 = p.big_a - std::numbers::pi / 2;
  p.b1 = -p.big_r / 2;
  p.b2 = p.big_r / 2;
  return p;
}

void apply_factor(const SearchInstance& inst, Generator gen, double theta, CMatrix& m) {
  const Complex c = std::polar(1.0, theta) - 1.0;
  if (c == Complex(0, 0)) {
    return;
  }
  if (gen == Generator::psi0) {
    const Eigen::Matrix<Complex, 1, Eigen::Dynamic> row = inst.psi0_ket.adjoint() * m;
    m.noalias() += (c * inst.psi0_ket) * row;
  } else {
    const CMatrix hm = inst.h * m;
    m += c * hm;
  }
}

void apply_factor(const SearchInstance& inst, Generator gen, double theta, CVector& v) {
  const Complex c = std::polar(1.0, theta) - 1.0;
  if (c == Complex(0, 0)) {
    return;
  }
  if (gen == Generator::psi0) {
    v += (c * inst.psi0_ket.dot(v)) * inst.psi0_ket;
  } else {
    const CVector hv = inst.h * v;
    v += c * hv;
  }
}

CMatrix exp_step(const SearchInstance& inst, const CMatrix& u, double t) {
  if (!std::isfinite(t)) {
    throw std::invalid_argument("exp_step: non-finite step");
  }
  require_unitary(u, "exp_step");
  if (t == 0.0) {
    return u;
  }
  const CMatrix g = gradient_at_ket(inst, u * inst.psi0_ket);
  return expm_skew(g, t) * u;
}

double one_shot_step(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    if (q >= 1.0 && q <= 1.0 + 1e-12) {
      return 0.0;
    }
    throw DegenerateInstance("one_shot_step: needs 0 < q < 1");
  }
  return std::acos(std::sqrt(q)) / std::sqrt(q * (1.0 - q));
}

double one_shot_step(const SearchInstance& inst) {
  if (inst.degenerate()) {
    throw DegenerateInstance("one_shot_step: degenerate instance");
  }
  return one_shot_step(inst.q0);
}

namespace {

template <typename Target>
void apply_product5(const SearchInstance& inst, const RetractionParams& p, double t,
                    Target& target) {
  // Rightmost factor first.
  apply_factor(inst, Generator::h, -p.a2, target);
  apply_factor(inst, Generator::psi0, t * p.b2, target);
  apply_factor(inst, Generator::h, p.a2 - p.a1, target);
  apply_factor(inst, Generator::psi0, t * p.b1, target);
  apply_factor(inst, Generator::h, p.a1, target);
}

}  // namespace

CMatrix product5_curve_factor(const SearchInstance& inst, double x, double y, double t) {
  CMatrix g = CMatrix::Identity(inst.n, inst.n);
  apply_product5(inst, product5_params(x, y), t, g);
  return g;
}

CMatrix retraction_curve(const SearchInstance& inst, const CMatrix& u, double x, double y,
                         double t) {
  if (inst.degenerate()) {
    throw DegenerateInstance("retraction_curve: degenerate instance");
  }
  require_unitary(u, "retraction_curve");
  CMatrix out = u;
  apply_product5(inst, product5_params(x, y), t, out);
  return out;
}

CMatrix product5_retraction(const SearchInstance& inst, const CMatrix& u,
                            const TangentCoords& coords) {
  if (!(coords.residual <= kCoordsTol)) {
    throw std::invalid_argument("product5_retraction: tangent lies outside span{X0, Y0} "
                                "(residual " + std::to_string(coords.residual) + ")");
  }
  return retraction_curve(inst, u, coords.x, coords.y, 1.0);
}

BoundsRatios bounds_ratios(const SearchInstance& inst, const BaseDirections& dirs,
                           const CMatrix& u, const TangentCoords& coords, double scale) {
  if (!(scale > 0.0)) {
    throw std::invalid_argument("bounds_ratios: scale must be positive");
  }
  const CMatrix z = scale * (coords.x * dirs.x0 + coords.y * dirs.y0);
  const CMatrix eta = z * u;
  BoundsRatios r;
  r.eta_norm = eta.norm();
  if (r.eta_norm == 0.0) {
    throw std::invalid_argument("bounds_ratios: zero tangent vector");
  }
  const CMatrix ru = product5_retraction(
      inst, u, TangentCoords{scale * coords.x, scale * coords.y, coords.residual});
  r.ratio1 = (ru - u).norm() / r.eta_norm;
  r.ratio2 = (ru - u - eta).norm() / (r.eta_norm * r.eta_norm);
  return r;
}

BoundsRatios bounds_ratios(const SearchInstance& inst, const CMatrix& u,
                           const TangentCoords& coords, double scale) {
  return bounds_ratios(inst, base_directions(inst), u, coords, scale);
}

}  // namespace groveropt
