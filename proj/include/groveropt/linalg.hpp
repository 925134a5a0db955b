#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

namespace groveropt {

template <typename Real>
using CMatrixT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using CVectorT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;
using CMatrix = CMatrixT<double>;
using CVector = CVectorT<double>;

/// Default tolerance for the structural is_* predicates.
inline constexpr double kStructuralTol = 1e-10;

namespace detail {

template <typename DA, typename DB>
void require_same_shape(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b,
                        const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(what) + ": shape mismatch");
  }
}

template <typename D>
void require_square(const Eigen::MatrixBase<D>& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw std::invalid_argument(std::string(what) + ": expected a nonempty square matrix");
  }
}

}  // namespace detail

/// Re Tr(A^H B). Every norm in this library is the norm induced by this product.
template <typename DA, typename DB>
typename DA::RealScalar frobenius_inner(const Eigen::MatrixBase<DA>& a,
                                        const Eigen::MatrixBase<DB>& b) {
  detail::require_same_shape(a, b, "frobenius_inner");
  return a.conjugate().cwiseProduct(b).sum().real();
}

template <typename D>
typename D::RealScalar frobenius_norm(const Eigen::MatrixBase<D>& a) {
  return a.norm();
}

template <typename DA, typename DB>
typename DA::PlainObject commutator(const Eigen::MatrixBase<DA>& a,
                                    const Eigen::MatrixBase<DB>& b) {
  detail::require_square(a, "commutator");
  detail::require_same_shape(a, b, "commutator");
  return a * b - b * a;
}

// Structural residuals, all in Frobenius norm.

template <typename D>
typename D::RealScalar unitary_residual(const Eigen::MatrixBase<D>& a) {
  detail::require_square(a, "unitary_residual");
  using Plain = typename D::PlainObject;
  return (a.adjoint() * a - Plain::Identity(a.rows(), a.cols())).norm();
}

template <typename D>
typename D::RealScalar hermitian_residual(const Eigen::MatrixBase<D>& a) {
  detail::require_square(a, "hermitian_residual");
  return (a - a.adjoint()).norm();
}

template <typename D>
typename D::RealScalar skew_hermitian_residual(const Eigen::MatrixBase<D>& a) {
  detail::require_square(a, "skew_hermitian_residual");
  return (a + a.adjoint()).norm();
}

template <typename D>
typename D::RealScalar idempotent_residual(const Eigen::MatrixBase<D>& a) {
  detail::require_square(a, "idempotent_residual");
  return (a * a - a).norm();
}

template <typename D>
bool is_unitary(const Eigen::MatrixBase<D>& a, double tol = kStructuralTol) {
  return a.rows() == a.cols() && a.rows() > 0 && unitary_residual(a) <= tol;
}

template <typename D>
bool is_hermitian(const Eigen::MatrixBase<D>& a, double tol = kStructuralTol) {
  return a.rows() == a.cols() && a.rows() > 0 && hermitian_residual(a) <= tol;
}

/// Orthogonal projector: Hermitian and idempotent.
template <typename D>
bool is_projector(const Eigen::MatrixBase<D>& a, double tol = kStructuralTol) {
  return is_hermitian(a, tol) && idempotent_residual(a) <= tol;
}

/// exp(i theta P) for an orthogonal projector P, via the closed form I + (e^{i theta} - 1) P.
template <typename D>
typename D::PlainObject projector_exponential(const Eigen::MatrixBase<D>& p,
                                              typename D::RealScalar theta) {
  if (!is_projector(p)) {
    throw std::invalid_argument("projector_exponential: input is not an orthogonal projector");
  }
  using Plain = typename D::PlainObject;
  using Scalar = typename D::Scalar;
  const Scalar phase = std::polar(typename D::RealScalar(1), theta) - Scalar(1);
  return Plain::Identity(p.rows(), p.cols()) + phase * p;
}

/// exp(t X) for skew-Hermitian X, through the Hermitian eigendecomposition of iX.
template <typename D>
typename D::PlainObject expm_skew(const Eigen::MatrixBase<D>& x, typename D::RealScalar t) {
  using Plain = typename D::PlainObject;
  using Scalar = typename D::Scalar;
  using Real = typename D::RealScalar;
  detail::require_square(x, "expm_skew");
  const Real scale = Real(1) + x.norm();
  if (skew_hermitian_residual(x) > kStructuralTol * scale) {
    throw std::invalid_argument("expm_skew: input is not skew-Hermitian");
  }
  if (t == Real(0)) {
    return Plain::Identity(x.rows(), x.cols());
  }
  // X = -iK with K = iX Hermitian, so exp(tX) = V diag(exp(-i t lambda)) V^H.
  const Plain k = Scalar(0, 1) * x;
  const Plain k_sym = Real(0.5) * (k + k.adjoint());
  Eigen::SelfAdjointEigenSolver<Plain> es(k_sym);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("expm_skew: eigendecomposition failed");
  }
  const auto& lambda = es.eigenvalues();
  CVectorT<Real> phases(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    phases(i) = std::polar(Real(1), -t * lambda(i));
  }
  const auto& v = es.eigenvectors();
  return v * phases.asDiagonal() * v.adjoint();
}

/// Haar-distributed unitary from a seeded complex Ginibre matrix (QR with phase fix).
template <typename Real = double>
CMatrixT<Real> random_unitary(Eigen::Index n, std::uint64_t seed) {
  if (n < 1) {
    throw std::invalid_argument("random_unitary: n must be >= 1");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<Real> normal(Real(0), Real(1));
  CMatrixT<Real> g(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const Real re = normal(rng);
      const Real im = normal(rng);
      g(i, j) = std::complex<Real>(re, im);
    }
  }
  Eigen::HouseholderQR<CMatrixT<Real>> qr(g);
  CMatrixT<Real> q = qr.householderQ();
  const CMatrixT<Real> r = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    const Real mag = std::abs(r(j, j));
    if (mag > Real(0)) {
      q.col(j) *= r(j, j) / mag;
    }
  }
  return q;
}

template <typename Real>
struct DiagonalSimilarity {
  CMatrixT<Real> w;        // unitary
  CMatrixT<Real> reduced;  // W^H X W, zero diagonal
};

/// Unitary W with W^H X W having zero diagonal, for traceless X that is Hermitian or
/// skew-Hermitian. Each pass picks the largest remaining diagonal entry and a partner of
/// opposite sign, then rotates within that coordinate pair so the first entry vanishes.
template <typename D>
DiagonalSimilarity<typename D::RealScalar> zero_diagonal_similarity(
    const Eigen::MatrixBase<D>& x) {
  using Real = typename D::RealScalar;
  using Scalar = std::complex<Real>;
  using Plain = CMatrixT<Real>;
  detail::require_square(x, "zero_diagonal_similarity");
  const Eigen::Index n = x.rows();
  const Real scale = Real(1) + x.norm();
  if (std::abs(x.trace()) > kStructuralTol * scale) {
    throw std::invalid_argument("zero_diagonal_similarity: matrix is not traceless");
  }

  // Work with a Hermitian K such that X = phase * K.
  Scalar phase(1, 0);
  if (hermitian_residual(x) <= kStructuralTol * scale) {
    phase = Scalar(1, 0);
  } else if (skew_hermitian_residual(x) <= kStructuralTol * scale) {
    phase = Scalar(0, 1);
  } else {
    throw std::invalid_argument(
        "zero_diagonal_similarity: only Hermitian or skew-Hermitian input is supported");
  }
  Plain k = x.template cast<Scalar>() / phase;
  k = Real(0.5) * (k + k.adjoint()).eval();

  Plain w = Plain::Identity(n, n);
  const Real zero_tol = std::numeric_limits<Real>::epsilon() * scale * Real(n);
  for (Eigen::Index pass = 0; pass < n; ++pass) {
    Eigen::Index j = 0;
    Real dj_mag = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Real d = std::abs(k(i, i).real());
      if (d > dj_mag) {
        dj_mag = d;
        j = i;
      }
    }
    if (dj_mag <= zero_tol) {
      break;
    }
    const Real dj = k(j, j).real();
    Eigen::Index m = -1;
    Real best = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Real d = k(i, i).real();
      if (i != j && d * dj < 0 && std::abs(d) > best) {
        best = std::abs(d);
        m = i;
      }
    }
    if (m < 0) {
      break;  // remaining diagonal is roundoff-level
    }
    const Real dm = k(m, m).real();
    const Real c = std::sqrt(dm / (dm - dj));
    const Real s = std::sqrt(-dj / (dm - dj));
    const Scalar kjm = k(j, m);
    const Scalar e = std::abs(kjm) > Real(0) ? Scalar(0, 1) * std::conj(kjm) / std::abs(kjm)
                                             : Scalar(1, 0);
    // Columns v = c e_j + s e e_m and u = -s e_j + c e e_m.
    Plain g = Plain::Identity(n, n);
    g(j, j) = c;
    g(m, j) = s * e;
    g(j, m) = -s;
    g(m, m) = c * e;
    k = (g.adjoint() * k * g).eval();
    k(j, j) = Scalar(k(j, j).real(), 0);
    k(m, m) = Scalar(k(m, m).real(), 0);
    w = (w * g).eval();
  }
  Plain reduced = w.adjoint() * x.template cast<Scalar>() * w;
  return {std::move(w), std::move(reduced)};
}

}  // namespace groveropt
