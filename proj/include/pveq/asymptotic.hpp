#pragma once

// Exact tail behaviour of expressions evaluated along rational Moebius
// sequences. Along x_n = (a n + b)/(c n + d) every formula built from
// + - * constants |.| and 1/|.| agrees, for all large n, with a rational
// function of n. Limits and eventual signs are then read off leading terms.

#include <cstddef>
#include <string>
#include <vector>

#include "pveq/rational.hpp"

namespace pveq {

/// Extended real limit value.
struct ExtValue {
  enum class Kind { Finite, PosInf, NegInf };
  Kind kind = Kind::Finite;
  Rational value = 0;

  static ExtValue finite(Rational v) { return {Kind::Finite, std::move(v)}; }
  static ExtValue pos_inf() { return {Kind::PosInf, 0}; }
  static ExtValue neg_inf() { return {Kind::NegInf, 0}; }

  bool is_finite() const noexcept { return kind == Kind::Finite; }
  bool operator==(const ExtValue& o) const {
    return kind == o.kind && (kind != Kind::Finite || value == o.value);
  }

  /// -1, 0, +1 comparison against a finite rational.
  int compare(const Rational& r) const {
    if (kind == Kind::PosInf) return 1;
    if (kind == Kind::NegInf) return -1;
    return value < r ? -1 : (value > r ? 1 : 0);
  }

  std::string str() const {
    if (kind == Kind::PosInf) return "+inf";
    if (kind == Kind::NegInf) return "-inf";
    return value.get_str();
  }
};

/// Dense polynomial in n, coefficients low to high, no trailing zeros.
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }
  static Poly constant(const Rational& v) { return Poly({v}); }
  static Poly linear(const Rational& slope, const Rational& offset) { return Poly({offset, slope}); }

  bool is_zero() const noexcept { return c_.empty(); }
  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  const Rational& lead() const { return c_.back(); }
  const std::vector<Rational>& coeffs() const noexcept { return c_; }

  Rational at(const Rational& n) const {
    Rational acc(0);
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * n + c_[i];
    return acc;
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    std::vector<Rational> r(std::max(a.c_.size(), b.c_.size()), Rational(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) r[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) r[i] += b.c_[i];
    return Poly(std::move(r));
  }
  friend Poly operator-(const Poly& a) {
    Poly r = a;
    for (auto& v : r.c_) v = -v;
    return r;
  }
  friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }
  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Rational> r(a.c_.size() + b.c_.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return Poly(std::move(r));
  }

  /// Sign for all sufficiently large n.
  int eventual_sign() const { return is_zero() ? 0 : sgn(lead()); }

  /// Integer bound beyond which the polynomial has no root (Cauchy bound).
  Rational root_bound() const {
    if (degree() <= 0) return 0;
    Rational m(0);
    for (std::size_t i = 0; i + 1 < c_.size(); ++i) m = std::max(m, abs_value(c_[i] / lead()));
    Rational b = m + 1;
    mpz_class ceil_b;
    mpz_cdiv_q(ceil_b.get_mpz_t(), b.get_num_mpz_t(), b.get_den_mpz_t());
    return Rational(ceil_b);
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<Rational> c_;
};

/// num(n)/den(n), den not identically zero.
class RatFunc {
 public:
  RatFunc() : num_(), den_(Poly::constant(1)) {}
  RatFunc(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw std::domain_error("rational function with zero denominator");
  }
  static RatFunc constant(const Rational& v) { return {Poly::constant(v), Poly::constant(1)}; }
  static RatFunc moebius(const Rational& a, const Rational& b, const Rational& c,
                         const Rational& d) {
    return {Poly::linear(a, b), Poly::linear(c, d)};
  }

  const Poly& num() const noexcept { return num_; }
  const Poly& den() const noexcept { return den_; }
  bool is_zero() const noexcept { return num_.is_zero(); }

  Rational at(const Rational& n) const { return num_.at(n) / den_.at(n); }

  friend RatFunc operator+(const RatFunc& a, const RatFunc& b) {
    return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
  }
  friend RatFunc operator-(const RatFunc& a) { return {-a.num_, a.den_}; }
  friend RatFunc operator-(const RatFunc& a, const RatFunc& b) { return a + (-b); }
  friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
    return {a.num_ * b.num_, a.den_ * b.den_};
  }

  int eventual_sign() const { return num_.eventual_sign() * den_.eventual_sign(); }

  RatFunc eventual_abs() const { return eventual_sign() < 0 ? -*this : *this; }

  /// 1/f; f must not vanish identically.
  RatFunc reciprocal() const {
    if (is_zero()) throw std::domain_error("reciprocal of identically zero tail");
    return {den_, num_};
  }

  /// For n >= root_bound() neither numerator nor denominator vanishes (unless
  /// the numerator is identically zero) and every sign is the eventual one.
  Rational root_bound() const { return std::max(num_.root_bound(), den_.root_bound()); }

  ExtValue limit() const {
    if (num_.is_zero()) return ExtValue::finite(0);
    const int dn = num_.degree();
    const int dd = den_.degree();
    if (dn < dd) return ExtValue::finite(0);
    if (dn == dd) return ExtValue::finite(num_.lead() / den_.lead());
    return eventual_sign() > 0 ? ExtValue::pos_inf() : ExtValue::neg_inf();
  }

 private:
  Poly num_;
  Poly den_;
};

}  // namespace pveq
