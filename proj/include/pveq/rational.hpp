#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pveq {

/// Exact rational scalar. mpq_class keeps numerator/denominator canonical
/// (gcd 1, positive denominator) after every operation we use.
using Rational = mpq_class;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : std::runtime_error(format(what, line, column)), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& what, std::size_t line, std::size_t column) {
    if (line == 0) return what;
    return std::to_string(line) + ":" + std::to_string(column) + ": " + what;
  }
  std::size_t line_;
  std::size_t column_;
};

/// Parses "p", "-p", "p/q". Rejects anything else (no decimals, no spaces).
inline Rational parse_rational(std::string_view text) {
  if (text.empty()) throw ParseError("empty rational literal");
  auto valid_int = [](std::string_view s, bool allow_sign) {
    std::size_t i = 0;
    if (allow_sign && !s.empty() && (s[0] == '-' || s[0] == '+')) i = 1;
    if (i >= s.size()) return false;
    return std::all_of(s.begin() + static_cast<std::ptrdiff_t>(i), s.end(),
                       [](char c) { return c >= '0' && c <= '9'; });
  };
  const auto slash = text.find('/');
  std::string num(text.substr(0, slash));
  std::string den = slash == std::string_view::npos ? "1" : std::string(text.substr(slash + 1));
  if (!valid_int(num, true) || !valid_int(den, false)) {
    throw ParseError("malformed rational literal '" + std::string(text) + "'");
  }
  if (num[0] == '+') num.erase(0, 1);
  mpz_class n(num, 10);
  mpz_class d(den, 10);
  if (d == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
  Rational q(n, d);
  q.canonicalize();
  return q;
}

/// n/d in lowest terms.
inline Rational ratio(long n, long d) {
  if (d == 0) throw ParseError("zero denominator");
  Rational q(n, d);
  q.canonicalize();
  return q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline int sign(const Rational& q) { return sgn(q); }

inline Rational abs_value(const Rational& q) { return q < 0 ? Rational(-q) : q; }

/// Fixed-length exact coordinate vector.
class RationalVec {
 public:
  RationalVec() = default;
  explicit RationalVec(std::size_t dim) : coords_(dim, Rational(0)) {}
  RationalVec(std::initializer_list<Rational> init) : coords_(init) {}
  explicit RationalVec(std::vector<Rational> coords) : coords_(std::move(coords)) {}

  /// Convenience for literals: {"1/2", "-3"}.
  static RationalVec parse(std::initializer_list<std::string_view> items) {
    RationalVec v;
    for (auto s : items) v.coords_.push_back(parse_rational(s));
    return v;
  }

  std::size_t dim() const noexcept { return coords_.size(); }
  const Rational& operator[](std::size_t i) const { return coords_.at(i); }
  Rational& operator[](std::size_t i) { return coords_.at(i); }
  std::span<const Rational> coords() const noexcept { return coords_; }
  auto begin() const noexcept { return coords_.begin(); }
  auto end() const noexcept { return coords_.end(); }

  bool operator==(const RationalVec& other) const { return coords_ == other.coords_; }
  bool operator<(const RationalVec& other) const {
    return std::lexicographical_compare(coords_.begin(), coords_.end(), other.coords_.begin(),
                                        other.coords_.end());
  }

  RationalVec& operator+=(const RationalVec& o) {
    check_same(o);
    for (std::size_t i = 0; i < dim(); ++i) coords_[i] += o.coords_[i];
    return *this;
  }
  RationalVec& operator-=(const RationalVec& o) {
    check_same(o);
    for (std::size_t i = 0; i < dim(); ++i) coords_[i] -= o.coords_[i];
    return *this;
  }
  RationalVec& operator*=(const Rational& s) {
    for (auto& c : coords_) c *= s;
    return *this;
  }

  friend RationalVec operator+(RationalVec a, const RationalVec& b) { return a += b; }
  friend RationalVec operator-(RationalVec a, const RationalVec& b) { return a -= b; }
  friend RationalVec operator-(RationalVec a) {
    for (auto& c : a.coords_) c = -c;
    return a;
  }
  friend RationalVec operator*(const Rational& s, RationalVec a) { return a *= s; }

  friend Rational dot(const RationalVec& a, const RationalVec& b) {
    a.check_same(b);
    Rational acc(0);
    for (std::size_t i = 0; i < a.dim(); ++i) acc += a.coords_[i] * b.coords_[i];
    return acc;
  }

  /// L-infinity norm; exact, so it is the metric used for neighbourhoods.
  Rational max_norm() const {
    Rational m(0);
    for (const auto& c : coords_) m = std::max(m, abs_value(c));
    return m;
  }

  bool is_zero() const {
    return std::all_of(coords_.begin(), coords_.end(), [](const Rational& c) { return c == 0; });
  }

  std::string str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      if (i) s += ", ";
      s += coords_[i].get_str();
    }
    return s + ")";
  }

  void check_same(const RationalVec& o) const {
    if (o.dim() != dim()) {
      throw DimensionError("dimension mismatch: " + std::to_string(dim()) + " vs " +
                           std::to_string(o.dim()));
    }
  }

 private:
  std::vector<Rational> coords_;
};

inline std::ostream& operator<<(std::ostream& os, const RationalVec& v) { return os << v.str(); }

inline Rational max_distance(const RationalVec& a, const RationalVec& b) { return (a - b).max_norm(); }

}  // namespace pveq
