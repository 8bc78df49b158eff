#pragma once

#include <cctype>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "discq/rational.hpp"

namespace discq {

// Polynomial expression ASTs over named variables. Nodes are immutable and
// shared; constant folding happens at construction and nowhere else.
class Expr {
 public:
  enum class Kind { Constant, Variable, Sum, Product, Power, Negate };

  struct Node {
    Kind kind;
    Rat value;                                 // Constant
    std::size_t var = 0;                       // Variable
    std::vector<std::shared_ptr<const Node>> kids;
    unsigned exponent = 0;                     // Power
  };
  using NodePtr = std::shared_ptr<const Node>;

  Expr() : Expr(Rat(0), 0) {}
  Expr(Rat c, std::size_t dim) : node_(constant_node(std::move(c))), dim_(dim) {}

  static Expr constant(Rat c, std::size_t dim) { return Expr(std::move(c), dim); }

  static Expr variable(std::size_t index, std::size_t dim) {
    if (index >= dim) throw DimensionMismatch("variable index out of range");
    auto n = std::make_shared<Node>();
    n->kind = Kind::Variable;
    n->var = index;
    return Expr(std::move(n), dim);
  }

  std::size_t dim() const { return dim_; }
  const NodePtr& node() const { return node_; }

  bool is_constant() const { return node_->kind == Kind::Constant; }
  const Rat& constant_value() const { return node_->value; }

  friend Expr operator+(const Expr& a, const Expr& b) { return sum({a, b}); }
  friend Expr operator-(const Expr& a, const Expr& b) { return sum({a, negate(b)}); }
  friend Expr operator*(const Expr& a, const Expr& b) { return product({a, b}); }
  friend Expr operator-(const Expr& a) { return negate(a); }

  static Expr sum(const std::vector<Expr>& terms) {
    std::size_t dim = common_dim(terms);
    std::vector<NodePtr> kids;
    Rat folded(0);
    for (const Expr& t : terms) collect(t.node_, Kind::Sum, folded, kids, /*product=*/false);
    if (kids.empty()) return Expr(folded, dim);
    if (folded != 0) kids.push_back(constant_node(folded));
    if (kids.size() == 1) return Expr(kids[0], dim);
    auto n = std::make_shared<Node>();
    n->kind = Kind::Sum;
    n->kids = std::move(kids);
    return Expr(std::move(n), dim);
  }

  static Expr product(const std::vector<Expr>& factors) {
    std::size_t dim = common_dim(factors);
    std::vector<NodePtr> kids;
    Rat folded(1);
    for (const Expr& f : factors) collect(f.node_, Kind::Product, folded, kids, /*product=*/true);
    if (folded == 0 || kids.empty()) return Expr(folded, dim);
    if (folded != 1) kids.insert(kids.begin(), constant_node(folded));
    if (kids.size() == 1) return Expr(kids[0], dim);
    auto n = std::make_shared<Node>();
    n->kind = Kind::Product;
    n->kids = std::move(kids);
    return Expr(std::move(n), dim);
  }

  static Expr power(const Expr& base, unsigned exponent) {
    if (exponent == 0) return Expr(Rat(1), base.dim_);
    if (exponent == 1) return base;
    if (base.is_constant()) {
      Rat v(1);
      for (unsigned k = 0; k < exponent; ++k) v *= base.constant_value();
      return Expr(v, base.dim_);
    }
    auto n = std::make_shared<Node>();
    n->kind = Kind::Power;
    n->kids = {base.node_};
    n->exponent = exponent;
    return Expr(std::move(n), base.dim_);
  }

  static Expr negate(const Expr& e) {
    if (e.is_constant()) return Expr(-e.constant_value(), e.dim_);
    if (e.node_->kind == Kind::Negate) return Expr(e.node_->kids[0], e.dim_);
    auto n = std::make_shared<Node>();
    n->kind = Kind::Negate;
    n->kids = {e.node_};
    return Expr(std::move(n), e.dim_);
  }

  template <typename Scalar>
  Scalar eval(const std::vector<Scalar>& x) const {
    if (x.size() != dim_) throw DimensionMismatch("eval: point dimension mismatch");
    return eval_node<Scalar>(node_, x);
  }

  /// Exact symbolic partial derivative with respect to variable i.
  Expr derivative(std::size_t i) const {
    if (i >= dim_) throw DimensionMismatch("derivative: variable index");
    return Expr(diff_node(node_, i, dim_).node_, dim_);
  }

  std::string to_string(const std::vector<std::string>& names) const {
    if (names.size() != dim_) throw DimensionMismatch("to_string: name count");
    return print_node(node_, names, 0);
  }

  friend bool structurally_equal(const Expr& a, const Expr& b) {
    return a.dim_ == b.dim_ && node_equal(a.node_, b.node_);
  }

 private:
  Expr(NodePtr n, std::size_t dim) : node_(std::move(n)), dim_(dim) {}

  static NodePtr constant_node(Rat c) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Constant;
    n->value = std::move(c);
    return n;
  }

  static std::size_t common_dim(const std::vector<Expr>& es) {
    std::size_t dim = es.empty() ? 0 : es[0].dim_;
    for (const Expr& e : es)
      if (e.dim_ != dim) throw DimensionMismatch("mixed expression dimensions");
    return dim;
  }

  static void collect(const NodePtr& n, Kind flatten, Rat& folded, std::vector<NodePtr>& kids,
                      bool product) {
    if (n->kind == Kind::Constant) {
      if (product)
        folded *= n->value;
      else
        folded += n->value;
      return;
    }
    if (n->kind == flatten) {
      for (const auto& k : n->kids) collect(k, flatten, folded, kids, product);
      return;
    }
    kids.push_back(n);
  }

  template <typename Scalar>
  static Scalar eval_node(const NodePtr& n, const std::vector<Scalar>& x) {
    switch (n->kind) {
      case Kind::Constant:
        if constexpr (std::is_same_v<Scalar, double>)
          return n->value.get_d();
        else
          return n->value;
      case Kind::Variable:
        return x[n->var];
      case Kind::Sum: {
        Scalar s{};
        for (const auto& k : n->kids) s += eval_node<Scalar>(k, x);
        return s;
      }
      case Kind::Product: {
        Scalar p = eval_node<Scalar>(n->kids[0], x);
        for (std::size_t i = 1; i < n->kids.size(); ++i) p *= eval_node<Scalar>(n->kids[i], x);
        return p;
      }
      case Kind::Power: {
        Scalar b = eval_node<Scalar>(n->kids[0], x);
        Scalar p = b;
        for (unsigned k = 1; k < n->exponent; ++k) p *= b;
        return p;
      }
      case Kind::Negate:
        return -eval_node<Scalar>(n->kids[0], x);
    }
    return Scalar{};
  }

  static Expr diff_node(const NodePtr& n, std::size_t i, std::size_t dim) {
    switch (n->kind) {
      case Kind::Constant:
        return Expr(Rat(0), dim);
      case Kind::Variable:
        return Expr(Rat(n->var == i ? 1 : 0), dim);
      case Kind::Sum: {
        std::vector<Expr> parts;
        for (const auto& k : n->kids) parts.push_back(diff_node(k, i, dim));
        return sum(parts);
      }
      case Kind::Product: {
        std::vector<Expr> parts;
        for (std::size_t j = 0; j < n->kids.size(); ++j) {
          std::vector<Expr> factors;
          for (std::size_t t = 0; t < n->kids.size(); ++t)
            factors.push_back(t == j ? diff_node(n->kids[t], i, dim)
                                     : Expr(n->kids[t], dim));
          parts.push_back(product(factors));
        }
        return sum(parts);
      }
      case Kind::Power: {
        Expr base(n->kids[0], dim);
        Expr dbase = diff_node(n->kids[0], i, dim);
        return product({Expr(Rat(n->exponent), dim), power(base, n->exponent - 1), dbase});
      }
      case Kind::Negate:
        return negate(diff_node(n->kids[0], i, dim));
    }
    return Expr(Rat(0), dim);
  }

  // prec: 0 sum context, 1 product context, 2 power/unary context
  static std::string print_node(const NodePtr& n, const std::vector<std::string>& names,
                                int prec) {
    switch (n->kind) {
      case Kind::Constant: {
        std::string s = n->value.get_str();
        if (prec > 0 && n->value < 0) return "(" + s + ")";
        return s;
      }
      case Kind::Variable:
        return names[n->var];
      case Kind::Sum: {
        std::string s;
        for (std::size_t i = 0; i < n->kids.size(); ++i) {
          const NodePtr& k = n->kids[i];
          if (i == 0) {
            s += print_node(k, names, 0);
          } else if (k->kind == Kind::Negate) {
            s += " - " + print_node(k->kids[0], names, 1);
          } else if (k->kind == Kind::Constant && k->value < 0) {
            s += " - " + Rat(-k->value).get_str();
          } else {
            s += " + " + print_node(k, names, 1);
          }
        }
        if (prec > 0) return "(" + s + ")";
        return s;
      }
      case Kind::Product: {
        std::string s;
        for (std::size_t i = 0; i < n->kids.size(); ++i) {
          if (i) s += "*";
          s += print_node(n->kids[i], names, 2);
        }
        if (prec > 1) return "(" + s + ")";
        return s;
      }
      case Kind::Power: {
        std::string base = print_node(n->kids[0], names, 3);
        std::string s = base + "^" + std::to_string(n->exponent);
        if (prec > 2) return "(" + s + ")";
        return s;
      }
      case Kind::Negate: {
        // '-' binds tighter than '^' in the grammar, so a Power child needs parens
        std::string s = "-" + print_node(n->kids[0], names, 3);
        if (prec > 1) return "(" + s + ")";
        return s;
      }
    }
    return "";
  }

  static bool node_equal(const NodePtr& a, const NodePtr& b) {
    if (a->kind != b->kind || a->kids.size() != b->kids.size()) return false;
    switch (a->kind) {
      case Kind::Constant:
        return a->value == b->value;
      case Kind::Variable:
        return a->var == b->var;
      case Kind::Power:
        if (a->exponent != b->exponent) return false;
        break;
      default:
        break;
    }
    for (std::size_t i = 0; i < a->kids.size(); ++i)
      if (!node_equal(a->kids[i], b->kids[i])) return false;
    return true;
  }

  NodePtr node_;
  std::size_t dim_;
};

// Recursive-descent parser for
//   expr   := term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := base ('^' uint)?
//   base   := rational | ident | '(' expr ')' | '-' base
class ExprParser {
 public:
  ExprParser(std::string text, std::vector<std::string> variables)
      : text_(std::move(text)), vars_(std::move(variables)) {}

  Expr parse() {
    pos_ = 0;
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("trailing input", pos_);
    return e;
  }

 private:
  Expr parse_expr() {
    Expr e = parse_term();
    for (;;) {
      skip_ws();
      if (peek() == '+') {
        ++pos_;
        e = e + parse_term();
      } else if (peek() == '-') {
        ++pos_;
        e = e - parse_term();
      } else {
        return e;
      }
    }
  }

  Expr parse_term() {
    Expr e = parse_factor();
    for (;;) {
      skip_ws();
      if (peek() == '*') {
        ++pos_;
        e = e * parse_factor();
      } else {
        return e;
      }
    }
  }

  Expr parse_factor() {
    Expr base = parse_base();
    skip_ws();
    if (peek() == '^') {
      ++pos_;
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) throw ParseError("expected nonnegative integer exponent", pos_);
      unsigned long e = std::strtoul(text_.substr(start, pos_ - start).c_str(), nullptr, 10);
      return Expr::power(base, static_cast<unsigned>(e));
    }
    return base;
  }

  Expr parse_base() {
    skip_ws();
    char c = peek();
    if (c == '(') {
      ++pos_;
      Expr e = parse_expr();
      skip_ws();
      if (peek() != ')') throw ParseError("expected ')'", pos_);
      ++pos_;
      return e;
    }
    if (c == '-') {
      ++pos_;
      return -parse_base();
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < text_.size()) {
        char d = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(d)) || d == '.' || d == '/') {
          ++pos_;
        } else {
          break;
        }
      }
      return Expr::constant(parse_rational(text_.substr(start, pos_ - start), start),
                            vars_.size());
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      std::string name = text_.substr(start, pos_ - start);
      for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i] == name) return Expr::variable(i, vars_.size());
      throw ParseError("unknown identifier '" + name + "'", start);
    }
    throw ParseError("unexpected character", pos_);
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string text_;
  std::vector<std::string> vars_;
  std::size_t pos_ = 0;
};

inline Expr parse_expr(const std::string& text, const std::vector<std::string>& variables) {
  return ExprParser(text, variables).parse();
}

/// Ordered list of scalar components R^d -> R^k.
struct VectorFunc {
  std::vector<Expr> components;
  std::size_t input_dim = 0;

  VectorFunc() = default;
  explicit VectorFunc(std::vector<Expr> comps) : components(std::move(comps)) {
    if (!components.empty()) input_dim = components[0].dim();
    for (const Expr& c : components)
      if (c.dim() != input_dim) throw DimensionMismatch("VectorFunc: mixed dims");
  }

  std::size_t output_dim() const { return components.size(); }

  template <typename Scalar>
  std::vector<Scalar> eval(const std::vector<Scalar>& x) const {
    std::vector<Scalar> out;
    out.reserve(components.size());
    for (const Expr& c : components) out.push_back(c.eval(x));
    return out;
  }
};

/// All partials of a scalar expression, as a VectorFunc of length dim.
inline VectorFunc gradient(const Expr& e) {
  std::vector<Expr> parts;
  for (std::size_t i = 0; i < e.dim(); ++i) parts.push_back(e.derivative(i));
  return VectorFunc(std::move(parts));
}

/// Row i is the gradient of component i at x.
template <typename Scalar>
std::vector<std::vector<Scalar>> jacobian(const VectorFunc& F, const std::vector<Scalar>& x) {
  if (x.size() != F.input_dim) throw DimensionMismatch("jacobian: point dimension");
  std::vector<std::vector<Scalar>> J;
  J.reserve(F.components.size());
  for (const Expr& c : F.components) J.push_back(gradient(c).eval(x));
  return J;
}

/// J(x)^T eta: the multiplier pullback used throughout the checkers.
inline RatVec jacobian_transpose_apply(const VectorFunc& F, const RatVec& x, const RatVec& eta) {
  auto J = jacobian(F, x);
  if (eta.size() != J.size()) throw DimensionMismatch("jacobian_transpose_apply");
  RatVec out(F.input_dim, Rat(0));
  for (std::size_t i = 0; i < J.size(); ++i)
    for (std::size_t j = 0; j < F.input_dim; ++j) out[j] += J[i][j] * eta[i];
  return out;
}

}  // namespace discq
