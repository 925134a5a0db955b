#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "groveropt/retractions.hpp"

namespace groveropt {

/// Thrown for malformed candidate products or coefficient expressions.
class CandidateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Values of the symbols a coefficient expression may reference.
struct Bindings {
  double t = 0;
  double x = 0;
  double y = 0;
  double big_a = 0;  // A
  double big_r = 0;  // R
};

/// Real-valued coefficient expression over the symbols t, x, y, A, R and the constant pi.
/// Grammar: numbers, symbols, unary minus, parentheses, + - *, and division by a nonzero
/// constant subexpression.
class Expression {
 public:
  struct Node;

  static Expression parse(const std::string& text);

  double eval(const Bindings& b) const;
  const std::string& text() const { return text_; }

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

struct CandidateFactor {
  Generator gen;
  Expression coef;
};

/// Ordered product of factors e^{i theta_j G_j}, written left to right.
struct CandidateProduct {
  std::string name;
  std::vector<CandidateFactor> factors;

  /// The product itself, without the trailing U.
  CMatrix evaluate(const SearchInstance& inst, double x, double y, double t) const;
};

/// The length-5 product written in the expression language.
CandidateProduct builtin_product5();
/// e^{i t x H}; cannot produce any Y0 component.
CandidateProduct builtin_single_factor();
/// product5 with the two psi0 coefficients exchanged; its velocity has the wrong sign.
CandidateProduct builtin_swapped_product5();

struct SeedResult {
  double x = 0;
  double y = 0;
  bool p1 = false;
  bool p2 = false;
  bool p3 = false;
  double p2_err = 0;  // ||gamma(0) - I||
  double err = 0;     // ||(gamma(h) - I)/h - (x X0 + y Y0)||
};

struct VelocityReport {
  std::string candidate;
  double h = 0;
  double eps = 0;
  std::vector<SeedResult> seeds;
  bool verdict = false;
};

/// P2 demands an exact identity at t = 0, up to the roundoff of five unit-modulus factors.
inline constexpr double kP2Tol = 1e-13;

/// Finite-difference property test of a candidate against P1 (factor syntax), P2
/// (gamma(0) = I) and P3 (initial velocity x X0 + y Y0), one record per seed.
VelocityReport check_velocity(const SearchInstance& inst, const CandidateProduct& cand,
                              const std::vector<std::pair<double, double>>& seeds, double h,
                              double eps);

}  // namespace groveropt
