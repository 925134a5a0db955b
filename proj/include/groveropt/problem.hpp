#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "groveropt/linalg.hpp"

namespace groveropt {

/// Thrown when an operation needs gamma0 > 0 (a well-defined Grover plane).
class DegenerateInstance : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Thrown when a numerical observation contradicts a result the library relies on.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// gamma0 at or below this value makes the plane and the one-shot step undefined.
inline constexpr double kDegenerateTol = 1e-10;

struct SearchInstance {
  int n = 0;
  int m = 0;                // rank of h
  std::vector<int> marked;  // empty for explicitly supplied projectors
  CMatrix h;
  CVector psi0_ket;
  CMatrix psi0;
  double q0 = 0;
  double gamma0 = 0;
  double c0 = 0;

  bool degenerate() const { return gamma0 <= kDegenerateTol; }
};

/// Diagonal marked-set projector with the uniform superposition as initial state.
SearchInstance make_instance(int n, std::vector<int> marked);

/// Explicit (H, |psi0>). Degenerate pairs are accepted and flagged.
SearchInstance make_instance(CMatrix h, CVector psi0_ket);

struct BaseDirections {
  CMatrix x0;  // [H, psi0]
  CMatrix y0;  // i[H, X0]
  Eigen::Matrix2d gram;
};

struct GroverPlane {
  CVector e1;  // |psi0>
  CVector e2;  // (H - q0)|psi0>, normalized
  Eigen::Matrix2cd h2;
  Eigen::Matrix2cd p2;

  /// N x 2 matrix [e1 e2].
  Eigen::Matrix<Complex, Eigen::Dynamic, 2> basis() const;
  Eigen::Vector2cd compress(const CVector& ket) const;
  CVector lift(const Eigen::Vector2cd& coords) const;
  /// Norm of the component of `ket` orthogonal to span{e1, e2}.
  double residual(const CVector& ket) const;
};

struct TangentCoords {
  double x = 0;
  double y = 0;
  double residual = 0;
};

enum class Stationarity { interior, minimum, maximum };

std::string to_string(Stationarity s);

/// f(U) = Tr(H U psi0 U^H), clamped to [0, 1].
double objective(const SearchInstance& inst, const CMatrix& u);

/// Skew-Hermitian gradient generator [H, psi_U]. The tangent vector at U is this times U.
CMatrix gradient(const SearchInstance& inst, const CMatrix& u);

// Ket-level forms, for callers that track |psi_U> = U|psi0> instead of U.
double objective_at_ket(const SearchInstance& inst, const CVector& ket);
CMatrix gradient_at_ket(const SearchInstance& inst, const CVector& ket);

BaseDirections base_directions(const SearchInstance& inst);
GroverPlane grover_plane(const SearchInstance& inst);

/// Least-squares (x, y) with z ~ x X0 + y Y0, solved through the 2x2 Gram system.
TangentCoords tangent_coords(const SearchInstance& inst, const CMatrix& z);
TangentCoords tangent_coords(const BaseDirections& dirs, const CMatrix& z);

Stationarity classify_stationary(const SearchInstance& inst, const CMatrix& u, double tol);

/// Defaults to a slightly relaxed unitarity check for matrices produced by long products.
void require_unitary(const CMatrix& u, const char* what, double tol = 1e-8);

}  // namespace groveropt
