#pragma once

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pveq/catalog.hpp"
#include "pveq/conditions.hpp"

namespace pveq {

/// One declared map: either a catalog entry bound to a name or inline text.
struct MapDecl {
  std::string name;
  std::optional<std::string> catalog_id;
  PiecewiseMap map;
};

struct Task {
  std::string kind;
  std::vector<std::pair<std::string, std::string>> params;
  std::size_t line = 0;

  std::optional<std::string> get(const std::string& key) const {
    for (const auto& [k, v] : params)
      if (k == key) return v;
    return std::nullopt;
  }
  bool has(const std::string& key) const { return get(key).has_value(); }
  std::string str() const {
    std::string s = kind;
    for (const auto& [k, v] : params) s += " " + k + "=" + v;
    return s;
  }
};

struct ProblemConfig {
  std::optional<ConeSpec> cone;
  std::string cone_text;  ///< canonical "cone ..." line
  std::optional<BoxDomain> domain;
  SamplingBudget budget;
  bool budget_declared = false;
  std::vector<MapDecl> maps;
  std::vector<Task> tasks;

  const MapDecl* find_map(const std::string& name) const {
    for (const auto& m : maps)
      if (m.name == name) return &m;
    return nullptr;
  }
};

// ---- value syntax -------------------------------------------------------------
//   point    := RAT { "," RAT }
//   box      := RAT ":" RAT { ";" RAT ":" RAT }
//   axis     := RAT ":" RAT ":" COUNT
//   sequence := "const:" point | coord { ";" coord } [ "@" INT ]
//   coord    := RAT "|" RAT "|" RAT "|" RAT        ((a n + b) / (c n + d))
//   rats     := RAT { "," RAT }

namespace cfg {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

inline RationalVec parse_point(const std::string& s) {
  std::vector<Rational> c;
  for (const auto& part : split(s, ',')) c.push_back(parse_rational(part));
  return RationalVec(std::move(c));
}

inline std::string point_text(const RationalVec& v) {
  std::string s;
  for (std::size_t i = 0; i < v.dim(); ++i) s += (i ? "," : "") + v[i].get_str();
  return s;
}

inline std::vector<Rational> parse_rats(const std::string& s) {
  std::vector<Rational> out;
  for (const auto& part : split(s, ',')) out.push_back(parse_rational(part));
  return out;
}

/// Sub-box aligned with a given grid.
inline BoxDomain parse_box(const std::string& s, const BoxDomain& grid) {
  const auto axes = split(s, ';');
  if (axes.size() != grid.dim()) throw ParseError("box needs " + std::to_string(grid.dim()) + " axes");
  RationalVec lo(grid.dim()), hi(grid.dim());
  std::vector<std::uint32_t> counts;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const auto ends = split(axes[i], ':');
    if (ends.size() != 2) throw ParseError("box axis must be LO:HI");
    lo[i] = parse_rational(ends[0]);
    hi[i] = parse_rational(ends[1]);
    const Rational steps = (hi[i] - lo[i]) / grid.step(i);
    if (steps.get_den() != 1 || steps < 0) throw ParseError("box axis not aligned with the domain grid");
    counts.push_back(static_cast<std::uint32_t>(std::max<unsigned long>(steps.get_num().get_ui(), 1UL)));
  }
  return {lo, hi, counts};
}

inline std::string box_text(const BoxDomain& b) {
  std::string s;
  for (std::size_t i = 0; i < b.dim(); ++i) s += (i ? ";" : "") + b.lower()[i].get_str() + ":" + b.upper()[i].get_str();
  return s;
}

inline SequenceSpec parse_sequence(const std::string& s) {
  if (s.rfind("const:", 0) == 0) return SequenceSpec::constant(parse_point(s.substr(6)));
  std::string body = s;
  long first = 0;
  if (auto at = s.find('@'); at != std::string::npos) {
    body = s.substr(0, at);
    try {
      std::size_t used = 0;
      first = std::stol(s.substr(at + 1), &used);
      if (used != s.size() - at - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError("bad first index in sequence '" + s + "'");
    }
  }
  std::vector<Moebius> coords;
  std::vector<Rational> lim;
  for (const auto& c : split(body, ';')) {
    const auto q = split(c, '|');
    if (q.size() != 4) throw ParseError("sequence coordinate must be a|b|c|d");
    Moebius m{parse_rational(q[0]), parse_rational(q[1]), parse_rational(q[2]), parse_rational(q[3])};
    auto l = m.limit();
    if (!l) throw ParseError("sequence coordinate '" + c + "' diverges");
    lim.push_back(*l);
    coords.push_back(m);
  }
  try {
    return SequenceSpec(std::move(coords), RationalVec(std::move(lim)), first);
  } catch (const SequenceError& e) {
    throw ParseError(e.what());
  }
}

inline std::string sequence_text(const SequenceSpec& s) {
  if (s.is_constant() && s.allows_limit_terms()) return "const:" + point_text(s.limit());
  std::string out;
  for (std::size_t i = 0; i < s.coords().size(); ++i) {
    const auto& m = s.coords()[i];
    out += (i ? ";" : "") + m.a.get_str() + "|" + m.b.get_str() + "|" + m.c.get_str() + "|" + m.d.get_str();
  }
  if (s.first_index() != 0) out += "@" + std::to_string(s.first_index());
  return out;
}

enum class ValueKind { Name, Point, Box, Sequence, Rats, Word, Condition };

struct KeySpec {
  std::string key;
  ValueKind kind;
  std::vector<std::string> words = {};  ///< allowed values for Word
};

inline const std::map<std::string, std::vector<KeySpec>>& task_schema() {
  using V = ValueKind;
  static const KeySpec assert_key{"assert", V::Word, {"yes", "no"}};
  static const std::map<std::string, std::vector<KeySpec>> schema = {
      {"validate-cone", {assert_key}},
      {"eval", {{"map", V::Name}, {"x", V::Point}, {"y", V::Point}}},
      {"semicont",
       {{"map", V::Name},
        {"notion", V::Word, {"ausc", "cusc", "qusc", "wusc", "all"}},
        {"x0", V::Point},
        {"y", V::Point},
        {"fix", V::Word, {"second", "first"}},
        {"seq", V::Sequence},
        assert_key}},
      {"levelset", {{"map", V::Name}, {"y", V::Point}, {"probe", V::Word, {"yes", "no"}}, assert_key}},
      {"solve", {{"map", V::Name}, {"f", V::Name}, assert_key}},
      {"check-condition",
       {{"id", V::Condition},
        {"f", V::Name},
        {"g", V::Name},
        {"x0", V::Point},
        {"y", V::Point},
        {"xnet", V::Sequence},
        {"unet", V::Sequence},
        {"ynet", V::Sequence},
        {"vnet", V::Sequence},
        {"znet", V::Sequence},
        {"wnet", V::Sequence},
        {"w_source", V::Word, {"net", "g(x0,z)", "terms"}},
        assert_key}},
      {"coercivity", {{"map", V::Name}, {"k0", V::Box}, assert_key}},
      {"probe", {{"map", V::Name}, {"k0", V::Box}}},
      {"diagonal", {{"map", V::Name}, {"mode", V::Word, {"in-cone", "not-neg-int"}}, assert_key}},
      {"segment", {{"f", V::Name}, {"g", V::Name}, {"x0", V::Point}, {"t", V::Rats}, assert_key}},
      {"transfer",
       {{"f", V::Name}, {"g", V::Name}, {"x0", V::Point}, {"id", V::Condition},
        {"witness", V::Word, {"trivial", "search"}}, assert_key}},
  };
  return schema;
}

inline const std::map<std::string, std::vector<std::string>>& required_keys() {
  static const std::map<std::string, std::vector<std::string>> req = {
      {"validate-cone", {}},
      {"eval", {"map", "x"}},
      {"semicont", {"map", "notion", "x0"}},
      {"levelset", {"map", "y"}},
      {"solve", {"map"}},
      {"check-condition", {"id", "f", "g", "x0", "y"}},
      {"coercivity", {"map", "k0"}},
      {"probe", {"map"}},
      {"diagonal", {"map", "mode"}},
      {"segment", {"f", "g", "x0", "t"}},
      {"transfer", {"f", "g", "x0", "id"}},
  };
  return req;
}

/// Words of a line with their 1-based columns.
inline std::vector<std::pair<std::string, std::size_t>> words_with_columns(const std::string& line, std::size_t indent) {
  std::vector<std::pair<std::string, std::size_t>> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    out.emplace_back(line.substr(start, i - start), indent + start + 1);
  }
  return out;
}

}  // namespace cfg

namespace detail {

inline std::string canonical_value(cfg::ValueKind kind, const std::string& v, const cfg::KeySpec& spec,
                                   const ProblemConfig& c) {
  using V = cfg::ValueKind;
  switch (kind) {
    case V::Name:
      if (!c.find_map(v)) throw ParseError("unknown map '" + v + "'");
      return v;
    case V::Point: return cfg::point_text(cfg::parse_point(v));
    case V::Box:
      if (!c.domain) throw ParseError("box values need a domain declaration");
      return cfg::box_text(cfg::parse_box(v, *c.domain));
    case V::Sequence: return cfg::sequence_text(cfg::parse_sequence(v));
    case V::Rats: {
      std::string s;
      for (const auto& q : cfg::parse_rats(v)) s += (s.empty() ? "" : ",") + q.get_str();
      return s;
    }
    case V::Word:
      if (std::find(spec.words.begin(), spec.words.end(), v) == spec.words.end())
        throw ParseError("value '" + v + "' not allowed for " + spec.key);
      return v;
    case V::Condition: return to_string(condition_from_string(v));
  }
  return v;
}

inline void set_budget_key(SamplingBudget& b, const std::string& key, const std::string& value) {
  auto uint_value = [&]() -> unsigned {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(value, &used);
    } catch (const std::exception&) {
      used = std::string::npos;
    }
    if (used != value.size()) throw ParseError("'" + key + "' needs a nonnegative integer");
    return static_cast<unsigned>(v);
  };
  if (key == "directions") b.directions = uint_value();
  else if (key == "tail_depth") b.tail_depth = uint_value();
  else if (key == "witness_radius") b.witness_radius = parse_rational(value);
  else if (key == "witness_density") b.witness_density = uint_value();
  else if (key == "k_radius") b.k_radius = parse_rational(value);
  else if (key == "k_levels") b.k_levels = uint_value();
  else if (key == "radius0") b.radius0 = parse_rational(value);
  else throw ParseError("unknown budget key '" + key + "'");
}

}  // namespace detail

inline ConeSpec parse_cone_words(const std::vector<std::string>& w) {
  if (w.size() == 3 && w[1] == "orthant") {
    int n = 0;
    try {
      n = std::stoi(w[2]);
    } catch (const std::exception&) {
      throw ParseError("orthant needs a dimension");
    }
    if (n <= 0) throw ParseError("orthant dimension must be positive");
    return ConeSpec::orthant(static_cast<std::size_t>(n));
  }
  if (w.size() == 2 && w[1] == "icecream2") return ConeSpec::ice_cream2();
  if (w.size() >= 3 && w[1] == "normals") {
    std::vector<RationalVec> normals;
    for (std::size_t i = 2; i < w.size(); ++i) normals.push_back(cfg::parse_point(w[i]));
    return ConeSpec("custom", normals);
  }
  throw ParseError("expected 'cone orthant N', 'cone icecream2' or 'cone normals v1 v2 ...'");
}

/// Grammar (one statement per line; '#' starts a comment):
///   cone orthant N | cone icecream2 | cone normals POINT {POINT}
///   domain AXIS {AXIS}
///   budget KEY=VALUE {KEY=VALUE}
///   use NAME CATALOG_ID
///   map NAME unary|bifunction codomain K ... endmap
///   task KIND {KEY=VALUE}
inline ProblemConfig parse_config(std::string_view text) {
  ProblemConfig c;
  LineReader in(text);
  std::string line;
  while (in.next(line)) {
    const std::size_t ln = in.line_no();
    const auto words = cfg::words_with_columns(line, in.indent());
    const std::string& head = words.front().first;
    auto at = [&](std::size_t i, const std::string& what) -> ParseError {
      const std::size_t col = i < words.size() ? words[i].second : in.indent() + line.size() + 1;
      return ParseError(what, ln, col);
    };
    auto guard = [&](std::size_t i, auto&& fn) {
      try {
        fn();
      } catch (const ParseError& e) {
        if (e.line() != 0) throw;
        throw at(i, e.what());
      } catch (const std::invalid_argument& e) {
        throw at(i, e.what());
      }
    };
    std::vector<std::string> plain;
    for (const auto& [w, col] : words) plain.push_back(w);
    if (head == "cone") {
      if (c.cone) throw at(0, "cone declared twice");
      guard(1, [&] { c.cone = parse_cone_words(plain); });
      std::string t = "cone";
      for (std::size_t i = 1; i < plain.size(); ++i) t += " " + plain[i];
      if (plain.size() > 2 && plain[1] == "normals") {
        t = "cone normals";
        for (const auto& n : c.cone->normals()) t += " " + cfg::point_text(n);
      }
      c.cone_text = t;
    } else if (head == "domain") {
      if (c.domain) throw at(0, "domain declared twice");
      if (words.size() < 2) throw at(1, "domain needs at least one axis LO:HI:COUNT");
      RationalVec lo(words.size() - 1), hi(words.size() - 1);
      std::vector<std::uint32_t> counts;
      for (std::size_t i = 1; i < words.size(); ++i) {
        guard(i, [&] {
          const auto p = cfg::split(plain[i], ':');
          if (p.size() != 3) throw ParseError("axis must be LO:HI:COUNT");
          lo[i - 1] = parse_rational(p[0]);
          hi[i - 1] = parse_rational(p[1]);
          std::size_t used = 0;
          unsigned long count = 0;
          try {
            count = std::stoul(p[2], &used);
          } catch (const std::exception&) {
            used = std::string::npos;
          }
          if (used != p[2].size() || count == 0 || count > 400) throw ParseError("grid count must be in 1..400");
          counts.push_back(static_cast<std::uint32_t>(count));
        });
      }
      guard(1, [&] { c.domain = BoxDomain(lo, hi, counts); });
    } else if (head == "budget") {
      c.budget_declared = true;
      for (std::size_t i = 1; i < words.size(); ++i) {
        const auto eq = plain[i].find('=');
        if (eq == std::string::npos) throw at(i, "expected KEY=VALUE");
        guard(i, [&] { detail::set_budget_key(c.budget, plain[i].substr(0, eq), plain[i].substr(eq + 1)); });
      }
      guard(0, [&] { c.budget.validate(); });
    } else if (head == "use") {
      if (words.size() != 3) throw at(0, "expected 'use NAME CATALOG_ID'");
      if (c.find_map(plain[1])) throw at(1, "map '" + plain[1] + "' declared twice");
      auto id = catalog::id_from_name(plain[2]);
      if (!id) throw at(2, "unknown catalog id '" + plain[2] + "'");
      PiecewiseMap m = catalog::make(*id, c.domain);
      c.maps.push_back({plain[1], plain[2], m.renamed(plain[1])});
    } else if (head == "map") {
      if (!c.domain) throw at(0, "inline maps need a preceding domain declaration");
      PiecewiseMap m = parse_map_block(in, line, *c.domain);
      if (c.find_map(m.name())) throw ParseError("map '" + m.name() + "' declared twice", ln, 1);
      c.maps.push_back({m.name(), std::nullopt, m});
    } else if (head == "task") {
      if (words.size() < 2) throw at(1, "task needs a kind");
      const auto& schema = cfg::task_schema();
      auto it = schema.find(plain[1]);
      if (it == schema.end()) throw at(1, "unknown task kind '" + plain[1] + "'");
      Task t{plain[1], {}, ln};
      for (std::size_t i = 2; i < words.size(); ++i) {
        const auto eq = plain[i].find('=');
        if (eq == std::string::npos || eq == 0) throw at(i, "expected KEY=VALUE");
        const std::string key = plain[i].substr(0, eq), value = plain[i].substr(eq + 1);
        auto spec = std::find_if(it->second.begin(), it->second.end(), [&](const cfg::KeySpec& k) { return k.key == key; });
        if (spec == it->second.end()) throw at(i, "unknown key '" + key + "' for task " + t.kind);
        if (t.has(key)) throw at(i, "duplicate key '" + key + "'");
        guard(i, [&] { t.params.emplace_back(key, detail::canonical_value(spec->kind, value, *spec, c)); });
      }
      for (const auto& k : cfg::required_keys().at(t.kind))
        if (!t.has(k)) throw at(0, "task " + t.kind + " needs '" + k + "'");
      c.tasks.push_back(std::move(t));
    } else {
      throw at(0, "unknown statement '" + head + "'");
    }
  }
  return c;
}

inline std::string serialize_config(const ProblemConfig& c) {
  std::ostringstream os;
  if (c.cone) os << c.cone_text << "\n";
  if (c.domain) {
    os << "domain";
    for (std::size_t i = 0; i < c.domain->dim(); ++i)
      os << " " << c.domain->lower()[i].get_str() << ":" << c.domain->upper()[i].get_str() << ":"
         << c.domain->grid_counts()[i];
    os << "\n";
  }
  if (c.budget_declared) {
    const auto& b = c.budget;
    os << "budget directions=" << b.directions << " tail_depth=" << b.tail_depth
       << " witness_radius=" << b.witness_radius.get_str() << " witness_density=" << b.witness_density
       << " k_radius=" << b.k_radius.get_str() << " k_levels=" << b.k_levels << " radius0=" << b.radius0.get_str()
       << "\n";
  }
  for (const auto& m : c.maps) {
    if (m.catalog_id) os << "use " << m.name << " " << *m.catalog_id << "\n";
    else os << serialize_map(m.map);
  }
  for (const auto& t : c.tasks) os << "task " << t.str() << "\n";
  return os.str();
}

inline bool operator==(const ProblemConfig& a, const ProblemConfig& b) {
  auto tasks_equal = [](const std::vector<Task>& x, const std::vector<Task>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i].kind != y[i].kind || x[i].params != y[i].params) return false;
    return true;
  };
  if (a.cone_text != b.cone_text || a.domain != b.domain || a.budget_declared != b.budget_declared) return false;
  if (a.budget.to_json() != b.budget.to_json() || a.maps.size() != b.maps.size()) return false;
  for (std::size_t i = 0; i < a.maps.size(); ++i) {
    if (a.maps[i].name != b.maps[i].name || a.maps[i].catalog_id != b.maps[i].catalog_id) return false;
    if (serialize_map(a.maps[i].map) != serialize_map(b.maps[i].map)) return false;
  }
  return tasks_equal(a.tasks, b.tasks);
}

}  // namespace pveq
