#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pveq/asymptotic.hpp"
#include "pveq/expr.hpp"
#include "pveq/ordered_space.hpp"
#include "pveq/verdict.hpp"

namespace pveq {

/// n -> (a n + b) / (c n + d), normalised so that c n + d > 0 for every
/// index the sequence uses.
struct Moebius {
  Rational a = 0, b = 0, c = 0, d = 1;

  static Moebius constant(const Rational& v) { return {0, v, 0, 1}; }

  Rational at(long n) const { return (a * n + b) / (c * n + d); }
  RatFunc tail() const { return RatFunc::moebius(a, b, c, d); }
  bool is_constant() const { return a * d - b * c == 0; }

  std::optional<Rational> limit() const {
    if (c != 0) return a / c;
    if (a != 0) return std::nullopt;
    return b / d;
  }

  std::string str() const {
    return "(" + a.get_str() + "n+" + b.get_str() + ")/(" + c.get_str() + "n+" + d.get_str() + ")";
  }
  bool operator==(const Moebius& o) const {
    // same function of n
    return a * o.c == o.a * c && a * o.d + b * o.c == o.a * d + o.b * c && b * o.d == o.b * d;
  }
};

class SequenceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exactly evaluable sequence x_n, n >= first_index, with a declared limit.
class SequenceSpec {
 public:
  SequenceSpec(std::vector<Moebius> coords, RationalVec declared_limit, long first_index = 0,
               bool allow_limit_terms = false, std::vector<RationalVec> prefix = {})
      : coords_(std::move(coords)),
        limit_(std::move(declared_limit)),
        first_(first_index),
        allow_limit_terms_(allow_limit_terms),
        prefix_(std::move(prefix)) {
    if (coords_.size() != limit_.dim()) throw SequenceError("sequence/limit dimension mismatch");
    const long tail_start = first_ + static_cast<long>(prefix_.size());
    for (auto& m : coords_) {
      if (m.c < 0 || (m.c == 0 && m.d < 0)) {
        m.a = -m.a;
        m.b = -m.b;
        m.c = -m.c;
        m.d = -m.d;
      }
      if (m.c * tail_start + m.d <= 0) throw SequenceError("denominator of " + m.str() + " vanishes in range");
      auto l = m.limit();
      if (!l) throw SequenceError("coordinate " + m.str() + " diverges");
    }
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      if (*coords_[i].limit() != limit_[i]) {
        throw SequenceError("declared limit " + limit_.str() + " differs from formula limit in coordinate " +
                            std::to_string(i + 1));
      }
    }
    for (const auto& p : prefix_) p.check_same(limit_);
    if (!allow_limit_terms_) {
      bool moving = false;
      for (const auto& m : coords_) moving = moving || !m.is_constant();
      if (!moving) throw SequenceError("sequence is constant at its limit; mark it as allowed");
      for (const auto& p : prefix_)
        if (p == limit_) throw SequenceError("prefix term equals the limit");
    }
  }

  /// x0 + d/(n+1), n >= 0.
  static SequenceSpec toward(const RationalVec& x0, const RationalVec& dir) {
    std::vector<Moebius> c;
    for (std::size_t i = 0; i < x0.dim(); ++i) c.push_back({x0[i], x0[i] + dir[i], 1, 1});
    return {std::move(c), x0, 0};
  }

  static SequenceSpec constant(const RationalVec& p) {
    std::vector<Moebius> c;
    for (const auto& v : p) c.push_back(Moebius::constant(v));
    return {std::move(c), p, 0, true};
  }

  std::size_t dim() const noexcept { return limit_.dim(); }
  const RationalVec& limit() const noexcept { return limit_; }
  long first_index() const noexcept { return first_; }
  const std::vector<Moebius>& coords() const noexcept { return coords_; }
  bool allows_limit_terms() const noexcept { return allow_limit_terms_; }
  bool is_constant() const {
    if (!prefix_.empty()) return false;
    for (const auto& m : coords_)
      if (!m.is_constant()) return false;
    return true;
  }

  long tail_start() const noexcept { return first_ + static_cast<long>(prefix_.size()); }

  RationalVec term(long n) const {
    if (n < first_) throw SequenceError("index below first index");
    if (n < tail_start()) return prefix_[static_cast<std::size_t>(n - first_)];
    RationalVec v(dim());
    for (std::size_t i = 0; i < dim(); ++i) v[i] = coords_[i].at(n);
    return v;
  }

  /// k-th term counted from the first index.
  RationalVec nth(std::size_t k) const { return term(first_ + static_cast<long>(k)); }

  std::vector<RatFunc> tail() const {
    std::vector<RatFunc> t;
    for (const auto& m : coords_) t.push_back(m.tail());
    return t;
  }

  /// Moebius coordinates are monotone, so the tail lies between its first
  /// term and the limit; both endpoints inside a box keep every term inside.
  bool inside(const BoxDomain& box) const {
    for (const auto& p : prefix_)
      if (!box.contains(p)) return false;
    return box.contains(term(tail_start())) && box.contains(limit_);
  }

  bool operator==(const SequenceSpec& o) const {
    return coords_ == o.coords_ && limit_ == o.limit_ && first_ == o.first_ && prefix_ == o.prefix_;
  }

  std::string str() const {
    std::string s = "n>=" + std::to_string(first_) + ": (";
    for (std::size_t i = 0; i < coords_.size(); ++i) s += (i ? ", " : "") + coords_[i].str();
    return s + ") -> " + limit_.str();
  }

  Json to_json() const {
    Json c = Json::array();
    for (const auto& m : coords_) c.push_back({m.a.get_str(), m.b.get_str(), m.c.get_str(), m.d.get_str()});
    Json j = {{"moebius", c}, {"limit", pveq::to_json(limit_)}, {"first", first_}};
    if (allow_limit_terms_) j["allow_limit_terms"] = true;
    if (!prefix_.empty()) {
      Json p = Json::array();
      for (const auto& v : prefix_) p.push_back(pveq::to_json(v));
      j["prefix"] = p;
    }
    return j;
  }

  static SequenceSpec from_json(const Json& j) {
    std::vector<Moebius> c;
    for (const auto& m : j.at("moebius")) {
      c.push_back({rational_from_json(m.at(0)), rational_from_json(m.at(1)), rational_from_json(m.at(2)),
                   rational_from_json(m.at(3))});
    }
    std::vector<RationalVec> prefix;
    if (j.contains("prefix"))
      for (const auto& p : j.at("prefix")) prefix.push_back(vec_from_json(p));
    return {std::move(c), vec_from_json(j.at("limit")), j.value("first", 0L),
            j.value("allow_limit_terms", false), std::move(prefix)};
  }

 private:
  std::vector<Moebius> coords_;
  RationalVec limit_;
  long first_;
  bool allow_limit_terms_;
  std::vector<RationalVec> prefix_;
};

/// Witness net z_n in Z for the a-usc / w-usc definitions.
struct WitnessSpec {
  enum class Kind {
    Explicit,  ///< z_n given by its own Moebius formulas
    Image,     ///< z_n = h(x_n), z = lim h(x_n)
    Clamped,   ///< z_n = z + t_n e with t_n the least shift putting z_n in h(x_n) + C
    OfSequence,  ///< z_n = F(x_n) for expressions F in x
  };
  Kind kind = Kind::Image;
  std::optional<SequenceSpec> formula;  ///< Explicit only
  RationalVec limit;                     ///< declared z
  RationalVec shift;                     ///< e in int C, Clamped only
  std::vector<Expr> of_x;                ///< OfSequence only

  static WitnessSpec of_sequence(std::vector<Expr> f, RationalVec limit) {
    WitnessSpec w;
    w.kind = Kind::OfSequence;
    w.of_x = std::move(f);
    w.limit = std::move(limit);
    return w;
  }

  static std::string kind_name(Kind k) {
    switch (k) {
      case Kind::Explicit: return "explicit";
      case Kind::Image: return "image";
      case Kind::Clamped: return "clamped";
      case Kind::OfSequence: return "of_sequence";
    }
    return "?";
  }

  static WitnessSpec explicit_net(SequenceSpec s) {
    WitnessSpec w;
    w.kind = Kind::Explicit;
    w.limit = s.limit();
    w.formula = std::move(s);
    return w;
  }

  Json to_json() const {
    Json j;
    j["kind"] = kind_name(kind);
    j["limit"] = pveq::to_json(limit);
    if (formula) j["formula"] = formula->to_json();
    if (kind == Kind::Clamped) j["shift"] = pveq::to_json(shift);
    if (kind == Kind::OfSequence) {
      Json f = Json::array();
      for (const auto& e : of_x) f.push_back(e.str());
      j["of_x"] = f;
    }
    return j;
  }

  static WitnessSpec from_json(const Json& j) {
    WitnessSpec w;
    const auto k = j.at("kind").get<std::string>();
    if (k == "explicit") w.kind = Kind::Explicit;
    else if (k == "image") w.kind = Kind::Image;
    else if (k == "clamped") w.kind = Kind::Clamped;
    else if (k == "of_sequence") w.kind = Kind::OfSequence;
    else throw ParseError("unknown witness kind '" + k + "'");
    w.limit = vec_from_json(j.at("limit"));
    if (j.contains("formula")) w.formula = SequenceSpec::from_json(j.at("formula"));
    if (j.contains("shift")) w.shift = vec_from_json(j.at("shift"));
    if (j.contains("of_x"))
      for (const auto& e : j.at("of_x")) w.of_x.push_back(parse_expr(e.get<std::string>()));
    return w;
  }
};

}  // namespace pveq
