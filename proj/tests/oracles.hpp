// Independent reference computations. Nothing here calls the library's numerical kernels:
// exponentials go through Eigen's Pade-based MatrixFunctions and the objective is built
// from full density matrices.
#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline Matrix marked_projector(int n, const std::vector<int>& marked) {
  Matrix h = Matrix::Zero(n, n);
  for (int i : marked) h(i, i) = 1.0;
  return h;
}

inline Vector uniform_ket(int n) { return Vector::Constant(n, 1.0 / std::sqrt(double(n))); }

inline Matrix expm(const Matrix& a) { return a.exp(); }

inline double objective(const Matrix& h, const Vector& psi0, const Matrix& u) {
  const Matrix rho = u * psi0 * psi0.adjoint() * u.adjoint();
  return (h * rho).trace().real();
}

/// [H, U psi0 U^H]
inline Matrix gradient(const Matrix& h, const Vector& psi0, const Matrix& u) {
  const Matrix rho = u * psi0 * psi0.adjoint() * u.adjoint();
  return h * rho - rho * h;
}

/// e^{i theta P} by Pade, not by the projector closed form.
inline Matrix phase_factor(const Matrix& p, double theta) {
  return expm(Complex(0, theta) * p);
}

/// The five-factor product for tangent coordinates (x, y), built from scratch.
inline Matrix product5(const Matrix& h, const Vector& psi0, double x, double y, double t = 1.0) {
  const Matrix p = psi0 * psi0.adjoint();
  const double a = (x == 0.0 && y == 0.0) ? 0.0 : std::atan2(y, x);
  const double r = std::hypot(x, y);
  const double a1 = a + std::numbers::pi / 2;
  const double a2 = a - std::numbers::pi / 2;
  return phase_factor(h, a1) * phase_factor(p, -t * r / 2) * phase_factor(h, a2 - a1) *
         phase_factor(p, t * r / 2) * phase_factor(h, -a2);
}

inline double q0(int n, int m) { return double(m) / n; }
inline double gamma0(int n, int m) { return std::sqrt(q0(n, m) * (1 - q0(n, m))); }
inline double c0(int n, int m) { return std::sqrt(2.0 * m * (n - m)) / n; }
inline double one_shot(int n, int m) { return std::acos(std::sqrt(q0(n, m))) / gamma0(n, m); }

/// Plane angle after an exact exponential step from the uniform start: rotation by t * gamma0
/// toward the marked direction, measured from the unmarked axis.
inline double exp_step_q(int n, int m, double t) {
  const double phi = std::asin(std::sqrt(q0(n, m))) + t * gamma0(n, m);
  return std::sin(phi) * std::sin(phi);
}

/// Integer ceiling computed in long double arithmetic.
inline long ceil_ld(long double v) { return static_cast<long>(std::ceil(v - 1e-15L * v)); }

}  // namespace oracle
