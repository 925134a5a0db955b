#include "groveropt/problem.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace groveropt {

namespace {

void populate_scalars(SearchInstance& inst) {
  const CVector hk = inst.h * inst.psi0_ket;
  const double q = inst.psi0_ket.dot(hk).real();
  inst.q0 = std::clamp(q, 0.0, 1.0);
  inst.gamma0 = std::sqrt(inst.q0 * (1.0 - inst.q0));
  // ||[H, psi0]||_F^2 = 2 q0 (1 - q0) for a projector and a pure state; avoids O(N^3) work.
  inst.c0 = std::sqrt(2.0) * inst.gamma0;
}

}  // namespace

SearchInstance make_instance(int n, std::vector<int> marked) {
  if (n < 2) {
    throw std::invalid_argument("make_instance: n must be >= 2");
  }
  std::set<int> seen;
  for (int idx : marked) {
    if (idx < 0 || idx >= n) {
      throw std::invalid_argument("make_instance: marked index " + std::to_string(idx) +
                                  " out of range [0, " + std::to_string(n) + ")");
    }
    if (!seen.insert(idx).second) {
      throw std::invalid_argument("make_instance: duplicate marked index " +
                                  std::to_string(idx));
    }
  }
  const int m = static_cast<int>(marked.size());
  if (m == 0 || m == n) {
    throw DegenerateInstance("make_instance: degenerate instance (M = " + std::to_string(m) +
                             ", N = " + std::to_string(n) + "), need 1 <= M <= N-1");
  }

  SearchInstance inst;
  inst.n = n;
  inst.m = m;
  inst.marked = std::move(marked);
  inst.h = CMatrix::Zero(n, n);
  for (int idx : inst.marked) {
    inst.h(idx, idx) = 1.0;
  }
  inst.psi0_ket = CVector::Constant(n, Complex(1.0 / std::sqrt(static_cast<double>(n)), 0));
  inst.psi0 = inst.psi0_ket * inst.psi0_ket.adjoint();
  populate_scalars(inst);
  return inst;
}

SearchInstance make_instance(CMatrix h, CVector psi0_ket) {
  if (h.rows() != h.cols() || h.rows() < 2) {
    throw std::invalid_argument("make_instance: h must be square with n >= 2");
  }
  if (psi0_ket.size() != h.rows()) {
    throw std::invalid_argument("make_instance: psi0 dimension does not match h");
  }
  if (!h.allFinite() || !psi0_ket.allFinite()) {
    throw std::invalid_argument("make_instance: non-finite entries");
  }
  if (!is_projector(h)) {
    throw std::invalid_argument("make_instance: h is not an orthogonal projector");
  }
  if (std::abs(psi0_ket.norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("make_instance: psi0 is not a unit vector");
  }
  const double trace = h.trace().real();
  const double m = std::round(trace);
  if (std::abs(trace - m) > 1e-10) {
    throw std::invalid_argument("make_instance: trace of h is not an integer");
  }

  SearchInstance inst;
  inst.n = static_cast<int>(h.rows());
  inst.m = static_cast<int>(m);
  inst.h = std::move(h);
  inst.psi0_ket = std::move(psi0_ket);
  inst.psi0 = inst.psi0_ket * inst.psi0_ket.adjoint();
  populate_scalars(inst);
  return inst;
}

void require_unitary(const CMatrix& u, const char* what, double tol) {
  if (!is_unitary(u, tol)) {
    throw std::invalid_argument(std::string(what) + ": matrix is not unitary");
  }
}

double objective_at_ket(const SearchInstance& inst, const CVector& ket) {
  const double f = ket.dot(inst.h * ket).real();
  if (f < -1e-9 || f > 1.0 + 1e-9) {
    throw InvariantViolation("objective: value " + std::to_string(f) + " outside [0, 1]");
  }
  return std::clamp(f, 0.0, 1.0);
}

CMatrix gradient_at_ket(const SearchInstance& inst, const CVector& ket) {
  const CVector hk = inst.h * ket;
  return hk * ket.adjoint() - ket * hk.adjoint();
}

double objective(const SearchInstance& inst, const CMatrix& u) {
  require_unitary(u, "objective");
  return objective_at_ket(inst, u * inst.psi0_ket);
}

CMatrix gradient(const SearchInstance& inst, const CMatrix& u) {
  require_unitary(u, "gradient");
  return gradient_at_ket(inst, u * inst.psi0_ket);
}

BaseDirections base_directions(const SearchInstance& inst) {
  if (inst.degenerate()) {
    throw DegenerateInstance("base_directions: gamma0 = 0, directions vanish");
  }
  BaseDirections d;
  d.x0 = commutator(inst.h, inst.psi0);
  d.y0 = Complex(0, 1) * commutator(inst.h, d.x0);
  d.gram(0, 0) = frobenius_inner(d.x0, d.x0);
  d.gram(0, 1) = frobenius_inner(d.x0, d.y0);
  d.gram(1, 0) = d.gram(0, 1);
  d.gram(1, 1) = frobenius_inner(d.y0, d.y0);
  return d;
}

GroverPlane grover_plane(const SearchInstance& inst) {
  if (inst.degenerate()) {
    throw DegenerateInstance("grover_plane: gamma0 = 0, plane undefined");
  }
  GroverPlane p;
  p.e1 = inst.psi0_ket;
  p.e2 = inst.h * inst.psi0_ket - inst.q0 * inst.psi0_ket;
  // Second Gram-Schmidt pass against e1 to clean up cancellation.
  p.e2 -= p.e1 * p.e1.dot(p.e2);
  p.e2 /= p.e2.norm();
  const auto e = p.basis();
  p.h2 = e.adjoint() * inst.h * e;
  p.p2 = e.adjoint() * inst.psi0 * e;
  return p;
}

Eigen::Matrix<Complex, Eigen::Dynamic, 2> GroverPlane::basis() const {
  Eigen::Matrix<Complex, Eigen::Dynamic, 2> e(e1.size(), 2);
  e.col(0) = e1;
  e.col(1) = e2;
  return e;
}

Eigen::Vector2cd GroverPlane::compress(const CVector& ket) const {
  return {e1.dot(ket), e2.dot(ket)};
}

CVector GroverPlane::lift(const Eigen::Vector2cd& coords) const {
  return coords(0) * e1 + coords(1) * e2;
}

double GroverPlane::residual(const CVector& ket) const {
  return (ket - lift(compress(ket))).norm();
}

TangentCoords tangent_coords(const BaseDirections& dirs, const CMatrix& z) {
  if (skew_hermitian_residual(z) > 1e-9 * (1.0 + z.norm())) {
    throw std::invalid_argument("tangent_coords: input is not skew-Hermitian");
  }
  Eigen::LDLT<Eigen::Matrix2d> ldlt(dirs.gram);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      dirs.gram.determinant() <= 1e-24) {
    throw DegenerateInstance("tangent_coords: Gram matrix is singular");
  }
  const Eigen::Vector2d rhs(frobenius_inner(dirs.x0, z), frobenius_inner(dirs.y0, z));
  const Eigen::Vector2d xy = ldlt.solve(rhs);
  TangentCoords c;
  c.x = xy(0);
  c.y = xy(1);
  c.residual = (z - c.x * dirs.x0 - c.y * dirs.y0).norm();
  return c;
}

TangentCoords tangent_coords(const SearchInstance& inst, const CMatrix& z) {
  return tangent_coords(base_directions(inst), z);
}

std::string to_string(Stationarity s) {
  switch (s) {
    case Stationarity::interior:
      return "interior";
    case Stationarity::minimum:
      return "min";
    case Stationarity::maximum:
      return "max";
  }
  return "unknown";
}

Stationarity classify_stationary(const SearchInstance& inst, const CMatrix& u, double tol) {
  require_unitary(u, "classify_stationary");
  const CVector ket = u * inst.psi0_ket;
  const double g = gradient_at_ket(inst, ket).norm();
  if (g > tol) {
    return Stationarity::interior;
  }
  // From ||grad||^2 = 2 f (1 - f): min(f, 1 - f) <= ||grad||^2.
  const double f = objective_at_ket(inst, ket);
  const double delta = tol * tol + 1e-9;
  if (f <= delta) {
    return Stationarity::minimum;
  }
  if (1.0 - f <= delta) {
    return Stationarity::maximum;
  }
  throw InvariantViolation("classify_stationary: gradient norm " + std::to_string(g) +
                         " <= tol but f = " + std::to_string(f) + " is not near {0, 1}");
}

}  // namespace groveropt
