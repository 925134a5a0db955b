#include "groveropt/candidate.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <variant>

namespace groveropt {

enum class Symbol { t, x, y, big_a, big_r };

struct Expression::Node {
  struct Constant {
    double value;
  };
  struct Variable {
    Symbol sym;
  };
  struct Negate {
    std::shared_ptr<const Node> operand;
  };
  struct Binary {
    char op;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
  };
  std::variant<Constant, Variable, Negate, Binary> data;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

double eval_node(const Expression::Node& node, const Bindings& b) {
  using Node = Expression::Node;
  return std::visit(
      [&](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Node::Constant>) {
          return n.value;
        } else if constexpr (std::is_same_v<T, Node::Variable>) {
          switch (n.sym) {
            case Symbol::t:
              return b.t;
            case Symbol::x:
              return b.x;
            case Symbol::y:
              return b.y;
            case Symbol::big_a:
              return b.big_a;
            case Symbol::big_r:
              return b.big_r;
          }
          return 0.0;
        } else if constexpr (std::is_same_v<T, Node::Negate>) {
          return -eval_node(*n.operand, b);
        } else {
          const double l = eval_node(*n.lhs, b);
          const double r = eval_node(*n.rhs, b);
          switch (n.op) {
            case '+':
              return l + r;
            case '-':
              return l - r;
            case '*':
              return l * r;
            default:
              return l / r;
          }
        }
      },
      node.data);
}

bool is_constant(const Expression::Node& node) {
  using Node = Expression::Node;
  return std::visit(
      [](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Node::Constant>) {
          return true;
        } else if constexpr (std::is_same_v<T, Node::Variable>) {
          return false;
        } else if constexpr (std::is_same_v<T, Node::Negate>) {
          return is_constant(*n.operand);
        } else {
          return is_constant(*n.lhs) && is_constant(*n.rhs);
        }
      },
      node.data);
}

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != text_.size()) {
      fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    }
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw CandidateError("coefficient expression \"" + text_ + "\" at offset " +
                         std::to_string(pos_) + ": " + what);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static NodePtr make(Expression::Node node) {
    return std::make_shared<const Expression::Node>(std::move(node));
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make({Expression::Node::Binary{'+', lhs, term()}});
      } else if (accept('-')) {
        lhs = make({Expression::Node::Binary{'-', lhs, term()}});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make({Expression::Node::Binary{'*', lhs, unary()}});
      } else if (accept('/')) {
        const std::size_t at = pos_;
        NodePtr rhs = unary();
        if (!is_constant(*rhs)) {
          pos_ = at;
          fail("division is only allowed by a constant");
        }
        if (eval_node(*rhs, Bindings{}) == 0.0) {
          pos_ = at;
          fail("division by zero");
        }
        lhs = make({Expression::Node::Binary{'/', lhs, rhs}});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) {
      return make({Expression::Node::Negate{unary()}});
    }
    if (accept('+')) {
      return unary();
    }
    return primary();
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= text_.size()) {
      fail("unexpected end of expression");
    }
    if (accept('(')) {
      NodePtr e = expr();
      if (!accept(')')) {
        fail("expected ')'");
      }
      return e;
    }
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = text_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) {
        fail("malformed number");
      }
      pos_ += static_cast<std::size_t>(end - begin);
      return make({Expression::Node::Constant{v}});
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      }
      const std::string id = text_.substr(start, pos_ - start);
      if (id == "pi") return make({Expression::Node::Constant{std::numbers::pi}});
      if (id == "t") return make({Expression::Node::Variable{Symbol::t}});
      if (id == "x") return make({Expression::Node::Variable{Symbol::x}});
      if (id == "y") return make({Expression::Node::Variable{Symbol::y}});
      if (id == "A") return make({Expression::Node::Variable{Symbol::big_a}});
      if (id == "R") return make({Expression::Node::Variable{Symbol::big_r}});
      pos_ = start;
      fail("unknown symbol '" + id + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

Bindings bindings_for(double x, double y, double t) {
  const RetractionParams p = product5_params(x, y);
  return Bindings{t, x, y, p.big_a, p.big_r};
}

}  // namespace

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.text_ = text;
  e.root_ = Parser(text).parse();
  return e;
}

double Expression::eval(const Bindings& b) const { return eval_node(*root_, b); }

CMatrix CandidateProduct::evaluate(const SearchInstance& inst, double x, double y,
                                   double t) const {
  const Bindings b = bindings_for(x, y, t);
  CMatrix g = CMatrix::Identity(inst.n, inst.n);
  // Leftmost factor is outermost, so apply right to left.
  for (auto it = factors.rbegin(); it != factors.rend(); ++it) {
    const double theta = it->coef.eval(b);
    if (!std::isfinite(theta)) {
      throw CandidateError("candidate '" + name + "': non-finite coefficient '" +
                           it->coef.text() + "'");
    }
    apply_factor(inst, it->gen, theta, g);
  }
  return g;
}

CandidateProduct builtin_product5() {
  return {"product5",
          {{Generator::h, Expression::parse("A + pi/2")},
           {Generator::psi0, Expression::parse("-t*R/2")},
           {Generator::h, Expression::parse("(A - pi/2) - (A + pi/2)")},
           {Generator::psi0, Expression::parse("t*R/2")},
           {Generator::h, Expression::parse("-(A - pi/2)")}}};
}

CandidateProduct builtin_single_factor() {
  return {"single_factor", {{Generator::h, Expression::parse("t*x")}}};
}

CandidateProduct builtin_swapped_product5() {
  return {"product5_swapped",
          {{Generator::h, Expression::parse("A + pi/2")},
           {Generator::psi0, Expression::parse("t*R/2")},
           {Generator::h, Expression::parse("(A - pi/2) - (A + pi/2)")},
           {Generator::psi0, Expression::parse("-t*R/2")},
           {Generator::h, Expression::parse("-(A - pi/2)")}}};
}

VelocityReport check_velocity(const SearchInstance& inst, const CandidateProduct& cand,
                              const std::vector<std::pair<double, double>>& seeds, double h,
                              double eps) {
  if (!(h > 0.0) || !(eps > 0.0)) {
    throw std::invalid_argument("check_velocity: h and eps must be positive");
  }
  if (seeds.empty()) {
    throw std::invalid_argument("check_velocity: empty seed set");
  }
  if (cand.factors.empty()) {
    throw CandidateError("check_velocity: candidate has no factors");
  }
  const BaseDirections dirs = base_directions(inst);
  const CMatrix identity = CMatrix::Identity(inst.n, inst.n);

  VelocityReport report;
  report.candidate = cand.name;
  report.h = h;
  report.eps = eps;
  report.verdict = true;
  for (const auto& [x, y] : seeds) {
    SeedResult r;
    r.x = x;
    r.y = y;
    // P1: every coefficient evaluates to a finite real angle at this seed.
    r.p1 = true;
    for (const auto& f : cand.factors) {
      for (double t : {0.0, h}) {
        if (!std::isfinite(f.coef.eval(bindings_for(x, y, t)))) {
          r.p1 = false;
        }
      }
    }
    if (r.p1) {
      r.p2_err = (cand.evaluate(inst, x, y, 0.0) - identity).norm();
      r.p2 = r.p2_err <= kP2Tol;
      const CMatrix velocity = (cand.evaluate(inst, x, y, h) - identity) / h;
      r.err = (velocity - (x * dirs.x0 + y * dirs.y0)).norm();
      r.p3 = r.err <= eps;
    } else {
      r.p2_err = r.err = std::numeric_limits<double>::infinity();
    }
    report.verdict = report.verdict && r.p1 && r.p2 && r.p3;
    report.seeds.push_back(r);
  }
  return report;
}

}  // namespace groveropt
