#pragma once

#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pveq/expr.hpp"
#include "pveq/ordered_space.hpp"
#include "pveq/verdict.hpp"

namespace pveq {

enum class Cmp { Lt, Le, Eq, Gt, Ge };

inline bool compare(const Rational& lhs, Cmp op, const Rational& rhs) {
  switch (op) {
    case Cmp::Lt: return lhs < rhs;
    case Cmp::Le: return lhs <= rhs;
    case Cmp::Eq: return lhs == rhs;
    case Cmp::Gt: return lhs > rhs;
    case Cmp::Ge: return lhs >= rhs;
  }
  return false;
}

/// Decides a comparison from the sign of lhs - rhs.
inline bool compare_sign(int s, Cmp op) {
  switch (op) {
    case Cmp::Lt: return s < 0;
    case Cmp::Le: return s <= 0;
    case Cmp::Eq: return s == 0;
    case Cmp::Gt: return s > 0;
    case Cmp::Ge: return s >= 0;
  }
  return false;
}

inline std::string to_string(Cmp op) {
  switch (op) {
    case Cmp::Lt: return "<";
    case Cmp::Le: return "<=";
    case Cmp::Eq: return "=";
    case Cmp::Gt: return ">";
    case Cmp::Ge: return ">=";
  }
  return "?";
}

inline std::optional<Cmp> cmp_from_string(const std::string& s) {
  if (s == "<") return Cmp::Lt;
  if (s == "<=") return Cmp::Le;
  if (s == "=") return Cmp::Eq;
  if (s == ">") return Cmp::Gt;
  if (s == ">=") return Cmp::Ge;
  return std::nullopt;
}

struct Comparison {
  Expr lhs;
  Cmp op;
  Rational rhs;

  bool holds(std::span<const Rational> x, std::span<const Rational> y) const {
    return compare(lhs.eval(x, y), op, rhs);
  }
  std::string str() const { return lhs.str() + " " + to_string(op) + " " + rhs.get_str(); }
};

/// Conjunction of comparisons; empty means "everywhere".
struct Region {
  std::vector<Comparison> clauses;

  bool holds(std::span<const Rational> x, std::span<const Rational> y = {}) const {
    for (const auto& c : clauses)
      if (!c.holds(x, y)) return false;
    return true;
  }

  /// Region membership for all large n along the coordinate tails, plus the
  /// index from which that answer is exact.
  std::pair<bool, Rational> eventually_holds(std::span<const RatFunc> xs,
                                             std::span<const RatFunc> ys = {}) const {
    Rational from(0);
    bool inside = true;
    for (const auto& c : clauses) {
      auto t = c.lhs.tail(xs, ys);
      RatFunc diff = t.f - RatFunc::constant(c.rhs);
      from = std::max({from, t.valid_from, diff.root_bound()});
      if (!compare_sign(diff.eventual_sign(), c.op)) inside = false;
    }
    return {inside, from};
  }

  Region substitute_y(std::span<const Rational> y) const {
    Region r;
    for (const auto& c : clauses) r.clauses.push_back({c.lhs.substitute_y(y), c.op, c.rhs});
    return r;
  }
  Region substitute_x(std::span<const Rational> x) const {
    Region r;
    for (const auto& c : clauses) r.clauses.push_back({c.lhs.substitute_x(x), c.op, c.rhs});
    return r;
  }
  Region swap_xy() const {
    Region r;
    for (const auto& c : clauses) r.clauses.push_back({c.lhs.swap_xy(), c.op, c.rhs});
    return r;
  }

  /// A clause with constant lhs that is false makes the region empty.
  bool trivially_empty() const {
    for (const auto& c : clauses)
      if (c.lhs.is_constant() && !compare(c.lhs.value(), c.op, c.rhs)) return true;
    return false;
  }

  bool uses(Op var_kind) const {
    for (const auto& c : clauses)
      if (c.lhs.uses(var_kind)) return true;
    return false;
  }
};

struct Piece {
  Region region;
  std::vector<Expr> values;
};

enum class Arity { Unary, Bifunction };

class MapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Piecewise map K -> Z (unary) or K x K -> Z (bifunction) with exact pieces.
class PiecewiseMap {
 public:
  PiecewiseMap(std::string name, Arity arity, BoxDomain domain, std::size_t codomain_dim,
               std::vector<Piece> pieces)
      : name_(std::move(name)),
        arity_(arity),
        domain_(std::move(domain)),
        codomain_dim_(codomain_dim),
        pieces_(std::move(pieces)) {
    if (codomain_dim_ == 0) throw MapError("codomain dimension must be positive");
    if (pieces_.empty()) throw MapError("map " + name_ + " has no pieces");
    for (const auto& p : pieces_) {
      if (p.values.size() != codomain_dim_) {
        throw MapError("map " + name_ + ": piece has " + std::to_string(p.values.size()) +
                       " components, codomain has " + std::to_string(codomain_dim_));
      }
      if (arity_ == Arity::Unary && (p.region.uses(Op::VarY) || uses_y(p)))
        throw MapError("unary map " + name_ + " refers to y");
    }
  }

  const std::string& name() const noexcept { return name_; }
  Arity arity() const noexcept { return arity_; }
  bool is_unary() const noexcept { return arity_ == Arity::Unary; }
  const BoxDomain& domain() const noexcept { return domain_; }
  std::size_t dim() const noexcept { return domain_.dim(); }
  std::size_t codomain_dim() const noexcept { return codomain_dim_; }
  const std::vector<Piece>& pieces() const noexcept { return pieces_; }

  PiecewiseMap renamed(std::string name) const {
    PiecewiseMap m = *this;
    m.name_ = std::move(name);
    return m;
  }

  PiecewiseMap with_domain(BoxDomain d) const {
    if (d.dim() != dim()) throw DimensionError("domain dimension mismatch for " + name_);
    PiecewiseMap m = *this;
    m.domain_ = std::move(d);
    return m;
  }

  /// Index of the first piece whose region contains the point.
  std::optional<std::size_t> piece_at(const RationalVec& x, const RationalVec* y = nullptr) const {
    std::span<const Rational> ys = y ? y->coords() : std::span<const Rational>{};
    for (std::size_t i = 0; i < pieces_.size(); ++i)
      if (pieces_[i].region.holds(x.coords(), ys)) return i;
    return std::nullopt;
  }

  RationalVec eval(const RationalVec& x, const std::optional<RationalVec>& y = std::nullopt) const {
    check_point(x, "x");
    if (arity_ == Arity::Bifunction) {
      if (!y) throw MapError("bifunction " + name_ + " needs a y argument");
      check_point(*y, "y");
    }
    const RationalVec* yp = (arity_ == Arity::Bifunction) ? &*y : nullptr;
    auto idx = piece_at(x, yp);
    if (!idx) throw MapError("no piece of " + name_ + " matches x = " + x.str());
    return eval_piece(*idx, x, yp);
  }

  RationalVec eval_piece(std::size_t idx, const RationalVec& x, const RationalVec* y) const {
    std::span<const Rational> ys = y ? y->coords() : std::span<const Rational>{};
    RationalVec out(codomain_dim_);
    for (std::size_t k = 0; k < codomain_dim_; ++k) out[k] = pieces_[idx].values[k].eval(x.coords(), ys);
    return out;
  }

  RationalVec eval(const RationalVec& x, const RationalVec& y) const {
    return eval(x, std::optional<RationalVec>(y));
  }

  /// Every grid point (pair, for bifunctions) lies in exactly one region.
  /// Returns a description of the first violation, if any.
  std::optional<std::string> validate_partition() const {
    const auto pts = domain_.points();
    auto count_at = [&](const RationalVec& x, const RationalVec* y) {
      std::span<const Rational> ys = y ? y->coords() : std::span<const Rational>{};
      std::size_t n = 0;
      for (const auto& p : pieces_) n += p.region.holds(x.coords(), ys) ? 1 : 0;
      return n;
    };
    for (const auto& x : pts) {
      if (arity_ == Arity::Unary) {
        if (const auto n = count_at(x, nullptr); n != 1)
          return name_ + ": " + std::to_string(n) + " pieces match x = " + x.str();
      } else {
        for (const auto& y : pts)
          if (const auto n = count_at(x, &y); n != 1)
            return name_ + ": " + std::to_string(n) + " pieces match (x, y) = (" + x.str() + ", " +
                   y.str() + ")";
      }
    }
    return std::nullopt;
  }

  /// True when every component is affine in y and no region depends on y.
  bool affine_in_y() const {
    for (const auto& p : pieces_) {
      if (p.region.uses(Op::VarY)) return false;
      for (const auto& v : p.values)
        if (v.y_degree() > 1) return false;
    }
    return true;
  }

  bool is_constant() const {
    if (pieces_.size() != 1) return false;
    for (const auto& v : pieces_.front().values)
      if (!v.is_constant()) return false;
    return true;
  }

  std::string str() const;

 private:
  static bool uses_y(const Piece& p) {
    for (const auto& v : p.values)
      if (v.uses(Op::VarY)) return true;
    return false;
  }

  void check_point(const RationalVec& p, const char* which) const {
    if (p.dim() != dim()) throw DimensionError(std::string(which) + " has wrong dimension for " + name_);
    if (!domain_.contains(p)) throw MapError(std::string(which) + " = " + p.str() + " outside domain of " + name_);
  }

  std::string name_;
  Arity arity_;
  BoxDomain domain_;
  std::size_t codomain_dim_;
  std::vector<Piece> pieces_;
};

/// x -> F(x, y) by symbolic substitution.
inline PiecewiseMap fix_second(const PiecewiseMap& f, const RationalVec& y) {
  if (f.is_unary()) throw MapError("fix_second needs a bifunction");
  if (y.dim() != f.dim() || !f.domain().contains(y)) throw MapError("y = " + y.str() + " outside domain");
  std::vector<Piece> pieces;
  for (const auto& p : f.pieces()) {
    Piece q{p.region.substitute_y(y.coords()), {}};
    if (q.region.trivially_empty()) continue;
    for (const auto& v : p.values) q.values.push_back(v.substitute_y(y.coords()));
    pieces.push_back(std::move(q));
  }
  if (pieces.empty()) throw MapError("fix_second left no pieces");
  return {f.name() + "(.," + y.str() + ")", Arity::Unary, f.domain(), f.codomain_dim(), std::move(pieces)};
}

/// z -> F(x, z), presented as a unary map whose variable is named x.
inline PiecewiseMap fix_first(const PiecewiseMap& f, const RationalVec& x) {
  if (f.is_unary()) throw MapError("fix_first needs a bifunction");
  if (x.dim() != f.dim() || !f.domain().contains(x)) throw MapError("x = " + x.str() + " outside domain");
  std::vector<Piece> pieces;
  for (const auto& p : f.pieces()) {
    Piece q{p.region.substitute_x(x.coords()).swap_xy(), {}};
    if (q.region.trivially_empty()) continue;
    for (const auto& v : p.values) q.values.push_back(v.substitute_x(x.coords()).swap_xy());
    pieces.push_back(std::move(q));
  }
  if (pieces.empty()) throw MapError("fix_first left no pieces");
  return {f.name() + "(" + x.str() + ",.)", Arity::Unary, f.domain(), f.codomain_dim(), std::move(pieces)};
}

/// Pointwise sum on the common refinement of the two partitions.
inline PiecewiseMap sum_maps(const PiecewiseMap& f, const PiecewiseMap& g) {
  if (f.arity() != g.arity() || !(f.domain() == g.domain()) || f.codomain_dim() != g.codomain_dim())
    throw MapError("sum_maps: shape mismatch between " + f.name() + " and " + g.name());
  std::vector<Piece> pieces;
  for (const auto& p : f.pieces()) {
    for (const auto& q : g.pieces()) {
      Piece r;
      r.region.clauses = p.region.clauses;
      r.region.clauses.insert(r.region.clauses.end(), q.region.clauses.begin(), q.region.clauses.end());
      if (r.region.trivially_empty()) continue;
      for (std::size_t k = 0; k < f.codomain_dim(); ++k) r.values.push_back(p.values[k] + q.values[k]);
      pieces.push_back(std::move(r));
    }
  }
  return {"(" + f.name() + "+" + g.name() + ")", f.arity(), f.domain(), f.codomain_dim(), std::move(pieces)};
}

inline PiecewiseMap zero_map(Arity arity, const BoxDomain& domain, std::size_t codomain_dim,
                             std::string name = "zero") {
  Piece p{{}, std::vector<Expr>(codomain_dim, Expr::constant(0))};
  return {std::move(name), arity, domain, codomain_dim, {std::move(p)}};
}

inline PiecewiseMap constant_map(Arity arity, const BoxDomain& domain, const RationalVec& value,
                                 std::string name = "const") {
  Piece p;
  for (const auto& c : value) p.values.push_back(Expr::constant(c));
  return {std::move(name), arity, domain, value.dim(), {std::move(p)}};
}

// ---------------------------------------------------------------------------
// C-convexity of y -> F(x, y).

inline Verdict c_convex_check(const PiecewiseMap& f, const RationalVec& x, const ConeSpec& c,
                              unsigned t_density) {
  if (f.is_unary()) throw MapError("c_convex_check needs a bifunction");
  if (!f.domain().contains(x)) throw MapError("x outside domain");
  if (f.codomain_dim() != c.dim()) throw DimensionError("codomain/cone dimension mismatch");
  Json budget = {{"t_density", t_density}, {"grid_points", f.domain().point_count()}};
  if (f.affine_in_y()) {
    return Verdict::make(Status::Holds, "c_convex", {{"kind", "affine_in_y"}, {"x", to_json(x)}},
                         "map is affine in y: the defining combination is identically 0");
  }
  const auto pts = f.domain().points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i == j) continue;
      for (unsigned k = 1; k < t_density; ++k) {
        const Rational t(k, t_density);
        const RationalVec mid = t * pts[i] + (Rational(1) - t) * pts[j];
        const RationalVec comb =
            t * f.eval(x, pts[i]) + (Rational(1) - t) * f.eval(x, pts[j]) - f.eval(x, mid);
        if (!cone_contains(c, comb)) {
          return Verdict::make(Status::Fails, "c_convex",
                               {{"kind", "c_convex_counterexample"},
                                {"x", to_json(x)},
                                {"y1", to_json(pts[i])},
                                {"y2", to_json(pts[j])},
                                {"t", to_json(t)},
                                {"value", to_json(comb)}});
        }
      }
    }
  }
  return Verdict::make(Status::ConsistentUpToSampling, "c_convex", {{"budget", budget}});
}

// ---------------------------------------------------------------------------
// Text format.
//
//   map NAME unary|bifunction codomain K
//   piece
//   when EXPR OP RATIONAL        (zero or more; conjunction)
//   value EXPR EXPR ...          (exactly K prefix expressions)
//   end
//   ...
//   endmap

inline std::string serialize_map(const PiecewiseMap& m) {
  std::ostringstream os;
  os << "map " << m.name() << " " << (m.is_unary() ? "unary" : "bifunction") << " codomain "
     << m.codomain_dim() << "\n";
  for (const auto& p : m.pieces()) {
    os << "piece\n";
    for (const auto& c : p.region.clauses) os << "when " << c.str() << "\n";
    os << "value";
    for (const auto& v : p.values) os << " " << v.str();
    os << "\nend\n";
  }
  os << "endmap\n";
  return os.str();
}

inline std::string PiecewiseMap::str() const { return serialize_map(*this); }

/// Line reader shared by the map and config parsers: strips comments ('#')
/// and blank lines, tracks 1-based line numbers.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool next(std::string& line) {
    while (pos_ < text_.size()) {
      std::size_t end = text_.find('\n', pos_);
      if (end == std::string_view::npos) end = text_.size();
      std::string raw(text_.substr(pos_, end - pos_));
      pos_ = end + 1;
      ++line_no_;
      if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
      const auto first = raw.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      const auto last = raw.find_last_not_of(" \t\r");
      indent_ = first;
      line = raw.substr(first, last - first + 1);
      return true;
    }
    return false;
  }

  std::size_t line_no() const noexcept { return line_no_; }
  std::size_t indent() const noexcept { return indent_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
  std::size_t indent_ = 0;
};

inline std::vector<std::string> split_words(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

/// Parses one map block; `header` is the already-read "map ..." line.
inline PiecewiseMap parse_map_block(LineReader& in, const std::string& header, const BoxDomain& domain) {
  const auto words = split_words(header);
  const std::size_t header_line = in.line_no();
  if (words.size() != 5 || words[0] != "map" || words[3] != "codomain")
    throw ParseError("expected 'map NAME unary|bifunction codomain K'", header_line, 1);
  Arity arity;
  if (words[2] == "unary") arity = Arity::Unary;
  else if (words[2] == "bifunction") arity = Arity::Bifunction;
  else throw ParseError("arity must be unary or bifunction", header_line, 1);
  std::size_t codomain = 0;
  try {
    codomain = std::stoul(words[4]);
  } catch (...) {
    throw ParseError("bad codomain dimension", header_line, 1);
  }
  std::vector<Piece> pieces;
  std::optional<Piece> current;
  std::string line;
  while (in.next(line)) {
    const std::size_t ln = in.line_no();
    const std::size_t col = in.indent();
    if (line == "endmap") {
      if (current) throw ParseError("piece not closed with 'end'", ln, col + 1);
      try {
        return PiecewiseMap(words[1], arity, domain, codomain, std::move(pieces));
      } catch (const std::exception& e) {
        throw ParseError(e.what(), header_line, 1);
      }
    }
    if (line == "piece") {
      if (current) throw ParseError("nested piece", ln, col + 1);
      current.emplace();
      continue;
    }
    if (!current) throw ParseError("expected 'piece' or 'endmap', got '" + line + "'", ln, col + 1);
    if (line == "end") {
      if (current->values.size() != codomain)
        throw ParseError("piece needs exactly " + std::to_string(codomain) + " value expressions", ln, col + 1);
      pieces.push_back(std::move(*current));
      current.reset();
      continue;
    }
    if (line.rfind("when ", 0) == 0) {
      const std::string body = line.substr(5);
      ExprParser p(body, ln, col + 5);
      Expr lhs = p.parse();
      const auto rest = split_words(body.substr(p.position()));
      if (rest.size() != 2) throw ParseError("expected 'when EXPR OP RATIONAL'", ln, col + 1);
      const std::size_t op_at = body.find(rest[0], p.position());
      auto op = cmp_from_string(rest[0]);
      if (!op) throw ParseError("unknown comparison '" + rest[0] + "'", ln, col + 6 + op_at);
      Rational rhs;
      try {
        rhs = parse_rational(rest[1]);
      } catch (const ParseError& e) {
        throw ParseError(e.what(), ln, col + 6 + body.find(rest[1], op_at + rest[0].size()));
      }
      current->region.clauses.push_back({std::move(lhs), *op, std::move(rhs)});
      continue;
    }
    if (line.rfind("value ", 0) == 0) {
      const std::string body = line.substr(6);
      ExprParser p(body, ln, col + 6);
      std::size_t guard = 0;
      while (body.find_first_not_of(" \t", p.position()) != std::string::npos && guard++ < 1024)
        current->values.push_back(p.parse());
      continue;
    }
    throw ParseError("unexpected line in map block: '" + line + "'", ln, col + 1);
  }
  throw ParseError("map block not closed with 'endmap'", header_line, 1);
}

inline PiecewiseMap parse_map(std::string_view text, const BoxDomain& domain) {
  LineReader in(text);
  std::string header;
  if (!in.next(header)) throw ParseError("empty map text");
  return parse_map_block(in, header, domain);
}

}  // namespace pveq
