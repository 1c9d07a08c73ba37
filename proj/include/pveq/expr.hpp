#pragma once

#include <cctype>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pveq/asymptotic.hpp"
#include "pveq/rational.hpp"

namespace pveq {

class PoleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class Op { Const, VarX, VarY, Add, Sub, Mul, Neg, Abs, RecipAbs };

/// Immutable expression tree over x1..xm, y1..ym.
class Expr {
 public:
  Expr() : Expr(constant(0)) {}

  static Expr constant(Rational v) {
    auto n = std::make_shared<Node>();
    n->op = Op::Const;
    n->value = std::move(v);
    return Expr(std::move(n));
  }
  static Expr x(std::size_t i = 0) { return var(Op::VarX, i); }
  static Expr y(std::size_t i = 0) { return var(Op::VarY, i); }

  friend Expr operator+(const Expr& a, const Expr& b) { return binary(Op::Add, a, b); }
  friend Expr operator-(const Expr& a, const Expr& b) { return binary(Op::Sub, a, b); }
  friend Expr operator*(const Expr& a, const Expr& b) { return binary(Op::Mul, a, b); }
  friend Expr operator-(const Expr& a) { return unary(Op::Neg, a); }
  friend Expr abs(const Expr& a) { return unary(Op::Abs, a); }
  /// 1/|a|
  friend Expr recip_abs(const Expr& a) { return unary(Op::RecipAbs, a); }

  Op op() const noexcept { return node_->op; }
  const Rational& value() const noexcept { return node_->value; }
  std::size_t index() const noexcept { return node_->index; }
  const Expr& lhs() const { return node_->kids.at(0); }
  const Expr& rhs() const { return node_->kids.at(1); }
  const Expr& child() const { return node_->kids.at(0); }

  bool is_constant() const noexcept { return op() == Op::Const; }

  /// Exact evaluation; y may be empty for unary maps.
  Rational eval(std::span<const Rational> x, std::span<const Rational> y = {}) const {
    switch (op()) {
      case Op::Const: return value();
      case Op::VarX:
        if (index() >= x.size()) throw DimensionError("x" + std::to_string(index() + 1) + " unbound");
        return x[index()];
      case Op::VarY:
        if (index() >= y.size()) throw DimensionError("y" + std::to_string(index() + 1) + " unbound");
        return y[index()];
      case Op::Add: return lhs().eval(x, y) + rhs().eval(x, y);
      case Op::Sub: return lhs().eval(x, y) - rhs().eval(x, y);
      case Op::Mul: return lhs().eval(x, y) * rhs().eval(x, y);
      case Op::Neg: return -child().eval(x, y);
      case Op::Abs: return abs_value(child().eval(x, y));
      case Op::RecipAbs: {
        const Rational t = child().eval(x, y);
        if (t == 0) throw PoleError("reciprocal pole hit in 1/|" + child().str() + "|");
        return Rational(1) / abs_value(t);
      }
    }
    throw std::logic_error("unreachable");
  }

  /// Replaces y-variables by constants (fix_second) or x-variables (fix_first).
  Expr substitute_y(std::span<const Rational> y) const { return substitute(Op::VarY, y); }
  Expr substitute_x(std::span<const Rational> x) const { return substitute(Op::VarX, x); }

  /// Swaps the roles of x and y (used to view z -> F(x0, z) as a unary map in x).
  Expr swap_xy() const {
    switch (op()) {
      case Op::Const: return *this;
      case Op::VarX: return y(index());
      case Op::VarY: return x(index());
      case Op::Neg:
      case Op::Abs:
      case Op::RecipAbs: return unary(op(), child().swap_xy());
      default: return binary(op(), lhs().swap_xy(), rhs().swap_xy());
    }
  }

  bool uses(Op var_kind) const {
    if (op() == var_kind) return true;
    for (const auto& k : node_->kids)
      if (k.uses(var_kind)) return true;
    return false;
  }

  /// Polynomial degree in the y-variables; kNonPolynomial if y occurs under |.| or 1/|.|.
  static constexpr int kNonPolynomial = 1 << 20;
  int y_degree() const {
    switch (op()) {
      case Op::Const:
      case Op::VarX: return 0;
      case Op::VarY: return 1;
      case Op::Add:
      case Op::Sub: return std::max(lhs().y_degree(), rhs().y_degree());
      case Op::Mul: return std::min(kNonPolynomial, lhs().y_degree() + rhs().y_degree());
      case Op::Neg: return child().y_degree();
      case Op::Abs:
      case Op::RecipAbs: return child().uses(Op::VarY) ? kNonPolynomial : 0;
    }
    return kNonPolynomial;
  }

  struct Tail {
    RatFunc f;
    Rational valid_from;  ///< representation exact for all integer n >= valid_from
  };

  /// Rational function of n that equals this expression along the given
  /// coordinate tails for all n >= valid_from.
  Tail tail(std::span<const RatFunc> xs, std::span<const RatFunc> ys = {}) const {
    switch (op()) {
      case Op::Const: return {RatFunc::constant(value()), 0};
      case Op::VarX:
        if (index() >= xs.size()) throw DimensionError("x" + std::to_string(index() + 1) + " unbound");
        return {xs[index()], xs[index()].root_bound()};
      case Op::VarY:
        if (index() >= ys.size()) throw DimensionError("y" + std::to_string(index() + 1) + " unbound");
        return {ys[index()], ys[index()].root_bound()};
      case Op::Add:
      case Op::Sub:
      case Op::Mul: {
        auto a = lhs().tail(xs, ys);
        auto b = rhs().tail(xs, ys);
        RatFunc f = op() == Op::Add ? a.f + b.f : (op() == Op::Sub ? a.f - b.f : a.f * b.f);
        return {std::move(f), std::max(a.valid_from, b.valid_from)};
      }
      case Op::Neg: {
        auto a = child().tail(xs, ys);
        return {-a.f, a.valid_from};
      }
      case Op::Abs:
      case Op::RecipAbs: {
        auto a = child().tail(xs, ys);
        Rational from = std::max(a.valid_from, a.f.root_bound());
        RatFunc m = a.f.eventual_abs();
        if (op() == Op::Abs) return {std::move(m), std::move(from)};
        if (m.is_zero()) throw PoleError("1/|" + child().str() + "| is singular along the whole tail");
        return {m.reciprocal(), std::move(from)};
      }
    }
    throw std::logic_error("unreachable");
  }

  std::string str() const {
    switch (op()) {
      case Op::Const: return value().get_str();
      case Op::VarX: return "x" + std::to_string(index() + 1);
      case Op::VarY: return "y" + std::to_string(index() + 1);
      case Op::Add: return "(add " + lhs().str() + " " + rhs().str() + ")";
      case Op::Sub: return "(sub " + lhs().str() + " " + rhs().str() + ")";
      case Op::Mul: return "(mul " + lhs().str() + " " + rhs().str() + ")";
      case Op::Neg: return "(neg " + child().str() + ")";
      case Op::Abs: return "(abs " + child().str() + ")";
      case Op::RecipAbs: return "(rabs " + child().str() + ")";
    }
    return "?";
  }

  bool operator==(const Expr& o) const { return str() == o.str(); }

 private:
  struct Node {
    Op op = Op::Const;
    Rational value = 0;
    std::size_t index = 0;
    std::vector<Expr> kids;
  };

  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static Expr var(Op kind, std::size_t i) {
    auto n = std::make_shared<Node>();
    n->op = kind;
    n->index = i;
    return Expr(std::move(n));
  }
  static Expr unary(Op kind, const Expr& a) {
    auto n = std::make_shared<Node>();
    n->op = kind;
    n->kids = {a};
    return Expr(std::move(n));
  }
  static Expr binary(Op kind, const Expr& a, const Expr& b) {
    auto n = std::make_shared<Node>();
    n->op = kind;
    n->kids = {a, b};
    return Expr(std::move(n));
  }

  Expr substitute(Op kind, std::span<const Rational> values) const {
    switch (op()) {
      case Op::Const: return *this;
      case Op::VarX:
      case Op::VarY:
        if (op() != kind) return *this;
        if (index() >= values.size()) throw DimensionError("substitution vector too short");
        return constant(values[index()]);
      case Op::Neg:
      case Op::Abs:
      case Op::RecipAbs: return unary(op(), child().substitute(kind, values));
      default: return binary(op(), lhs().substitute(kind, values), rhs().substitute(kind, values));
    }
  }

  std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Interval enclosure with infinite endpoints, used for neighbourhood bounds.

struct Interval {
  ExtValue lo;
  ExtValue hi;

  static Interval point(const Rational& v) { return {ExtValue::finite(v), ExtValue::finite(v)}; }
  static Interval of(const Rational& a, const Rational& b) {
    return {ExtValue::finite(a), ExtValue::finite(b)};
  }
};

namespace detail {

inline ExtValue ext_add(const ExtValue& a, const ExtValue& b) {
  if (a.is_finite() && b.is_finite()) return ExtValue::finite(a.value + b.value);
  if (!a.is_finite()) return a;
  return b;
}

inline ExtValue ext_neg(const ExtValue& a) {
  if (a.kind == ExtValue::Kind::PosInf) return ExtValue::neg_inf();
  if (a.kind == ExtValue::Kind::NegInf) return ExtValue::pos_inf();
  return ExtValue::finite(-a.value);
}

inline int ext_sign(const ExtValue& a) {
  if (a.kind == ExtValue::Kind::PosInf) return 1;
  if (a.kind == ExtValue::Kind::NegInf) return -1;
  return sgn(a.value);
}

/// Endpoint product with the 0 * inf = 0 convention valid for interval hulls.
inline ExtValue ext_mul(const ExtValue& a, const ExtValue& b) {
  if (a.is_finite() && b.is_finite()) return ExtValue::finite(a.value * b.value);
  const int s = ext_sign(a) * ext_sign(b);
  if (s == 0) return ExtValue::finite(0);
  return s > 0 ? ExtValue::pos_inf() : ExtValue::neg_inf();
}

inline bool ext_less(const ExtValue& a, const ExtValue& b) {
  if (a == b) return false;
  if (a.kind == ExtValue::Kind::NegInf || b.kind == ExtValue::Kind::PosInf) return true;
  if (a.kind == ExtValue::Kind::PosInf || b.kind == ExtValue::Kind::NegInf) return false;
  return a.value < b.value;
}

inline const ExtValue& ext_min(const ExtValue& a, const ExtValue& b) { return ext_less(b, a) ? b : a; }
inline const ExtValue& ext_max(const ExtValue& a, const ExtValue& b) { return ext_less(a, b) ? b : a; }

}  // namespace detail

/// Enclosure of expr over the box of variable intervals.
inline Interval enclose(const Expr& e, std::span<const Interval> xs, std::span<const Interval> ys = {}) {
  using namespace detail;
  switch (e.op()) {
    case Op::Const: return Interval::point(e.value());
    case Op::VarX: return xs[e.index()];
    case Op::VarY: return ys[e.index()];
    case Op::Add:
    case Op::Sub: {
      Interval a = enclose(e.lhs(), xs, ys);
      Interval b = enclose(e.rhs(), xs, ys);
      if (e.op() == Op::Sub) b = {ext_neg(b.hi), ext_neg(b.lo)};
      return {ext_add(a.lo, b.lo), ext_add(a.hi, b.hi)};
    }
    case Op::Mul: {
      Interval a = enclose(e.lhs(), xs, ys);
      Interval b = enclose(e.rhs(), xs, ys);
      ExtValue p[4] = {ext_mul(a.lo, b.lo), ext_mul(a.lo, b.hi), ext_mul(a.hi, b.lo),
                       ext_mul(a.hi, b.hi)};
      ExtValue lo = p[0], hi = p[0];
      for (const auto& v : p) {
        lo = ext_min(lo, v);
        hi = ext_max(hi, v);
      }
      return {lo, hi};
    }
    case Op::Neg: {
      Interval a = enclose(e.child(), xs, ys);
      return {ext_neg(a.hi), ext_neg(a.lo)};
    }
    case Op::Abs:
    case Op::RecipAbs: {
      Interval a = enclose(e.child(), xs, ys);
      Interval m;
      if (ext_sign(a.lo) >= 0) {
        m = a;
      } else if (ext_sign(a.hi) <= 0) {
        m = {ext_neg(a.hi), ext_neg(a.lo)};
      } else {
        m = {ExtValue::finite(0), ext_max(ext_neg(a.lo), a.hi)};
      }
      if (e.op() == Op::Abs) return m;
      auto inv = [](const ExtValue& v) {
        if (!v.is_finite()) return ExtValue::finite(0);
        if (v.value == 0) return ExtValue::pos_inf();
        return ExtValue::finite(Rational(1) / v.value);
      };
      return {inv(m.hi), inv(m.lo)};
    }
  }
  throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// Prefix grammar:
//   expr := rational | xK | yK | x | y | "(" op expr+ ")"
//   op   := add | sub | mul | neg | abs | rabs

class ExprParser {
 public:
  explicit ExprParser(std::string_view text, std::size_t line = 0, std::size_t column_offset = 0)
      : text_(text), line_(line), col0_(column_offset) {}

  Expr parse_all() {
    Expr e = parse();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input after expression");
    return e;
  }

  Expr parse() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    if (text_[pos_] == '(') {
      ++pos_;
      const std::string op = token();
      std::vector<Expr> args;
      skip_ws();
      while (pos_ < text_.size() && text_[pos_] != ')') {
        args.push_back(parse());
        skip_ws();
      }
      if (pos_ >= text_.size()) fail("missing ')'");
      ++pos_;
      return build(op, args);
    }
    const std::string tok = token();
    if (tok.empty()) fail("expected expression");
    if (tok[0] == 'x' || tok[0] == 'y') {
      std::size_t idx = 0;
      if (tok.size() > 1) {
        for (std::size_t i = 1; i < tok.size(); ++i)
          if (!std::isdigit(static_cast<unsigned char>(tok[i]))) fail("bad variable '" + tok + "'");
        idx = std::stoul(tok.substr(1));
        if (idx == 0) fail("variables are 1-based");
        --idx;
      }
      return tok[0] == 'x' ? Expr::x(idx) : Expr::y(idx);
    }
    try {
      return Expr::constant(parse_rational(tok));
    } catch (const ParseError& err) {
      fail(err.what());
    }
  }

  std::size_t position() const noexcept { return pos_; }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, col0_ + pos_ + 1); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string token() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '(' && text_[pos_] != ')')
      ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  Expr build(const std::string& op, const std::vector<Expr>& args) {
    auto need = [&](std::size_t n) {
      if (args.size() != n) fail("'" + op + "' expects " + std::to_string(n) + " argument(s)");
    };
    if (op == "add" || op == "mul") {
      if (args.size() < 2) fail("'" + op + "' expects at least 2 arguments");
      Expr acc = args[0];
      for (std::size_t i = 1; i < args.size(); ++i) acc = op == "add" ? acc + args[i] : acc * args[i];
      return acc;
    }
    if (op == "sub") {
      if (args.size() == 1) return -args[0];
      need(2);
      return args[0] - args[1];
    }
    if (op == "neg") {
      need(1);
      return -args[0];
    }
    if (op == "abs") {
      need(1);
      return abs(args[0]);
    }
    if (op == "rabs") {
      need(1);
      return recip_abs(args[0]);
    }
    fail("unknown operator '" + op + "'");
  }

  std::string_view text_;
  std::size_t line_;
  std::size_t col0_;
  std::size_t pos_ = 0;
};

inline Expr parse_expr(std::string_view text) { return ExprParser(text).parse_all(); }

}  // namespace pveq
