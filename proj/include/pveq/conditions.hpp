#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pveq/equilibrium.hpp"

namespace pveq {

enum class ConditionId { A1, A2, A3, A4, A5, B1, B2, B3, B4, B5, B6 };

inline constexpr std::array kAllConditions = {ConditionId::A1, ConditionId::A2, ConditionId::A3, ConditionId::A4,
                                              ConditionId::A5, ConditionId::B1, ConditionId::B2, ConditionId::B3,
                                              ConditionId::B4, ConditionId::B5, ConditionId::B6};

inline std::string to_string(ConditionId id) {
  static const char* names[] = {"A1", "A2", "A3", "A4", "A5", "B1", "B2", "B3", "B4", "B5", "B6"};
  return names[static_cast<int>(id)];
}

inline ConditionId condition_from_string(const std::string& s) {
  for (auto id : kAllConditions)
    if (to_string(id) == s) return id;
  throw ParseError("unknown condition id '" + s + "'");
}

class ConditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument slots of f and g inside a membership template.
enum class Arg { X0, Y, NetX, NetU, NetY, NetV };

/// Which unary slice must be a-usc: x -> h(x, y) at x0, or z -> h(x0, z) at y.
enum class Slice { FirstArgAtX0, SecondArgAtY };

struct AuscRequirement {
  char map;  ///< 'f' or 'g'
  Slice slice;
};

/// lead - f(f1, f2) - g(g1, g2) in -C, lead = g(x0, z_n) for B, w_n for A.
struct ConditionTemplate {
  ConditionId id;
  bool a_form;
  Arg f1, f2, g1, g2;
  std::vector<AuscRequirement> ausc;
};

inline ConditionTemplate condition_template(ConditionId id) {
  using A = Arg;
  const AuscRequirement fx{'f', Slice::FirstArgAtX0}, gx{'g', Slice::FirstArgAtX0};
  const AuscRequirement fy{'f', Slice::SecondArgAtY}, gy{'g', Slice::SecondArgAtY};
  switch (id) {
    case ConditionId::A1: return {id, true, A::NetX, A::Y, A::X0, A::Y, {fx}};
    case ConditionId::A2: return {id, true, A::X0, A::NetY, A::X0, A::Y, {fy}};
    case ConditionId::A3: return {id, true, A::NetX, A::Y, A::NetU, A::Y, {fx, gx}};
    case ConditionId::A4: return {id, true, A::X0, A::NetY, A::X0, A::NetV, {fy, gy}};
    case ConditionId::A5: return {id, true, A::NetX, A::Y, A::X0, A::NetY, {fx, gy}};
    case ConditionId::B1: return {id, false, A::NetX, A::Y, A::X0, A::Y, {fx}};
    case ConditionId::B2: return {id, false, A::X0, A::NetY, A::X0, A::Y, {fy}};
    case ConditionId::B3: return {id, false, A::NetX, A::Y, A::NetU, A::Y, {fx, gx}};
    case ConditionId::B4: return {id, false, A::X0, A::NetY, A::X0, A::NetV, {fy, gy}};
    case ConditionId::B5: return {id, false, A::NetX, A::Y, A::X0, A::NetY, {fx, gy}};
    case ConditionId::B6: return {id, false, A::X0, A::NetY, A::NetX, A::Y, {gx, fy}};
  }
  throw ConditionError("unknown condition");
}

inline bool template_uses(const ConditionTemplate& t, Arg a) {
  return t.f1 == a || t.f2 == a || t.g1 == a || t.g2 == a;
}

/// Nets for one fixed y. Missing z in a B-template may be replaced by a
/// per-index table; the w-net of an A-template is explicit, g(x0, z_n),
/// or the template's own subtracted terms.
struct ConditionWitness {
  enum class WSource { Net, FromZ, FromTerms };
  std::optional<SequenceSpec> x, u, y, v, z, w;
  std::vector<RationalVec> z_table;
  WSource w_source = WSource::Net;

  Json to_json() const {
    Json j = Json::object();
    auto put = [&](const char* k, const std::optional<SequenceSpec>& s) {
      if (s) j[k] = s->to_json();
    };
    put("x", x);
    put("u", u);
    put("y", y);
    put("v", v);
    put("z", z);
    put("w", w);
    if (!z_table.empty()) {
      Json t = Json::array();
      for (const auto& p : z_table) t.push_back(pveq::to_json(p));
      j["z_table"] = t;
    }
    if (w_source == WSource::FromZ) j["w_source"] = "g(x0,z)";
    if (w_source == WSource::FromTerms) j["w_source"] = "terms";
    return j;
  }

  static ConditionWitness from_json(const Json& j) {
    ConditionWitness w;
    auto get = [&](const char* k, std::optional<SequenceSpec>& s) {
      if (j.contains(k)) s = SequenceSpec::from_json(j.at(k));
    };
    get("x", w.x);
    get("u", w.u);
    get("y", w.y);
    get("v", w.v);
    get("z", w.z);
    get("w", w.w);
    if (j.contains("z_table"))
      for (const auto& p : j.at("z_table")) w.z_table.push_back(vec_from_json(p));
    const std::string src = j.value("w_source", std::string("net"));
    if (src == "g(x0,z)") w.w_source = WSource::FromZ;
    else if (src == "terms") w.w_source = WSource::FromTerms;
    else if (src != "net") throw ParseError("unknown w_source '" + src + "'");
    return w;
  }
};

struct ConditionResult {
  Verdict verdict;
  Verdict membership;
  std::vector<Verdict> subchecks;
  std::vector<std::string> constant_nets;
  bool precondition_failed = false;

  Json to_json() const {
    Json s = Json::array();
    for (const auto& v : subchecks) s.push_back(v.to_json());
    Json j = verdict.to_json();
    j["membership"] = membership.to_json();
    j["subchecks"] = s;
    if (!constant_nets.empty()) j["constant_nets"] = constant_nets;
    if (precondition_failed) j["precondition_failed"] = true;
    return j;
  }
};

namespace detail {

struct NetChoice {
  const SequenceSpec* x = nullptr;
  const SequenceSpec* u = nullptr;
  const SequenceSpec* y = nullptr;
  const SequenceSpec* v = nullptr;
};

inline const SequenceSpec* net_for(Arg a, const NetChoice& n) {
  switch (a) {
    case Arg::NetX: return n.x;
    case Arg::NetU: return n.u;
    case Arg::NetY: return n.y;
    case Arg::NetV: return n.v;
    default: return nullptr;
  }
}

inline RationalVec arg_value(Arg a, const NetChoice& nets, const RationalVec& x0, const RationalVec& y, long n) {
  if (a == Arg::X0) return x0;
  if (a == Arg::Y) return y;
  return net_for(a, nets)->term(n);
}

/// f(a1, a2) + g(b1, b2) at index n.
inline RationalVec subtracted(const ConditionTemplate& t, const PiecewiseMap& f, const PiecewiseMap& g,
                              const NetChoice& nets, const RationalVec& x0, const RationalVec& y, long n) {
  return f.eval(arg_value(t.f1, nets, x0, y, n), arg_value(t.f2, nets, x0, y, n)) +
         g.eval(arg_value(t.g1, nets, x0, y, n), arg_value(t.g2, nets, x0, y, n));
}

inline long first_common_index(const NetChoice& nets, const std::vector<const SequenceSpec*>& extra = {}) {
  long first = 0;
  for (auto* s : {nets.x, nets.u, nets.y, nets.v})
    if (s) first = std::max(first, s->first_index());
  for (auto* s : extra)
    if (s) first = std::max(first, s->first_index());
  return first;
}

/// Exact tail limit of <a, h(p1, p2)> where at most one slot is a net.
inline std::optional<ExtValue> slot_limit(const PiecewiseMap& h, Arg a1, Arg a2, const NetChoice& nets,
                                          const RationalVec& x0, const RationalVec& y, const RationalVec& a) {
  const SequenceSpec* n1 = net_for(a1, nets);
  const SequenceSpec* n2 = net_for(a2, nets);
  if (n1 && n2) return std::nullopt;
  if (!n1 && !n2) return ExtValue::finite(dot(a, h.eval(arg_value(a1, nets, x0, y, 0), arg_value(a2, nets, x0, y, 0))));
  const PiecewiseMap slice = n1 ? fix_second(h, arg_value(a2, nets, x0, y, 0)) : fix_first(h, arg_value(a1, nets, x0, y, 0));
  auto t = map_tail(slice, n1 ? *n1 : *n2);
  if (!t) return std::nullopt;
  return t->functional_limit(a);
}

inline std::optional<ExtValue> ext_add(const std::optional<ExtValue>& p, const std::optional<ExtValue>& q) {
  if (!p || !q) return std::nullopt;
  if (p->is_finite() && q->is_finite()) return ExtValue::finite(p->value + q->value);
  if (p->is_finite()) return q;
  if (q->is_finite() || p->kind == q->kind) return p;
  return std::nullopt;
}

inline Json nets_json(const NetChoice& n) {
  Json j = Json::object();
  if (n.x) j["x"] = n.x->to_json();
  if (n.u) j["u"] = n.u->to_json();
  if (n.y) j["y"] = n.y->to_json();
  if (n.v) j["v"] = n.v->to_json();
  return j;
}

}  // namespace detail

/// Membership of the template along explicit nets at indices first..first+depth-1.
inline Verdict verify_condition_membership(ConditionId id, const PiecewiseMap& f, const PiecewiseMap& g,
                                           const RationalVec& x0, const RationalVec& y, const ConeSpec& c,
                                           const ConditionWitness& w, const SamplingBudget& budget,
                                           bool* precondition_failed = nullptr) {
  const ConditionTemplate t = condition_template(id);
  const BoxDomain& K = f.domain();
  auto need = [&](Arg a, const std::optional<SequenceSpec>& s, const RationalVec& lim, const char* name) {
    if (!template_uses(t, a)) return;
    if (!s) throw ConditionError(to_string(id) + " needs a " + name + "-net");
    if (!(s->limit() == lim)) throw ConditionError(std::string(name) + "-net must converge to " + lim.str());
    if (!s->inside(K)) throw ConditionError(std::string(name) + "-net leaves K");
  };
  need(Arg::NetX, w.x, x0, "x");
  need(Arg::NetU, w.u, x0, "u");
  need(Arg::NetY, w.y, y, "y");
  need(Arg::NetV, w.v, y, "v");
  const bool needs_z = !t.a_form || w.w_source == ConditionWitness::WSource::FromZ;
  if (needs_z) {
    if (!w.z && w.z_table.empty()) throw ConditionError(to_string(id) + " needs a z-net");
    if (w.z && !w.z->inside(K)) throw ConditionError("z-net leaves K");
    for (const auto& p : w.z_table)
      if (!K.contains(p)) throw ConditionError("z-table entry outside K");
  }
  if (t.a_form && w.w_source == ConditionWitness::WSource::Net && !w.w) throw ConditionError(to_string(id) + " needs a w-net");
  const detail::NetChoice nets{w.x ? &*w.x : nullptr, w.u ? &*w.u : nullptr, w.y ? &*w.y : nullptr,
                               w.v ? &*w.v : nullptr};
  const long first = detail::first_common_index(nets, {w.z ? &*w.z : nullptr, w.w ? &*w.w : nullptr});
  long last = first + static_cast<long>(budget.tail_depth) - 1;
  if (!w.z_table.empty() && !w.z) last = std::min(last, first + static_cast<long>(w.z_table.size()) - 1);
  auto z_at = [&](long n) { return w.z ? w.z->term(n) : w.z_table.at(static_cast<std::size_t>(n - first)); };
  for (long n = first; n <= last; ++n) {
    const RationalVec sub = detail::subtracted(t, f, g, nets, x0, y, n);
    RationalVec lead;
    if (!t.a_form) {
      lead = g.eval(x0, z_at(n));
    } else {
      switch (w.w_source) {
        case ConditionWitness::WSource::Net: lead = w.w->term(n); break;
        case ConditionWitness::WSource::FromZ: lead = g.eval(x0, z_at(n)); break;
        case ConditionWitness::WSource::FromTerms: lead = sub; break;
      }
      if (!not_in_neg_interior(c, lead)) {
        if (precondition_failed) *precondition_failed = true;
        return Verdict::make(Status::Fails, "membership",
                             {{"kind", "w_precondition"}, {"index", n}, {"w", to_json(lead)}},
                             "w-term lies in -int C");
      }
    }
    const RationalVec value = lead - sub;
    if (!in_neg_cone(c, value)) {
      return Verdict::make(Status::Fails, "membership",
                           {{"kind", "membership_violation"}, {"condition", to_string(id)}, {"index", n},
                            {"value", to_json(value)}});
    }
  }
  return Verdict::make(Status::Holds, "membership",
                       {{"kind", "condition_membership"}, {"condition", to_string(id)}, {"x0", to_json(x0)},
                        {"y", to_json(y)}, {"first", first}, {"last", last}, {"witness", w.to_json()}});
}

/// The a-usc requirements attached to the template.
inline std::vector<Verdict> condition_subchecks(ConditionId id, const PiecewiseMap& f, const PiecewiseMap& g,
                                                const RationalVec& x0, const RationalVec& y, const ConeSpec& c,
                                                const SamplingBudget& budget) {
  std::vector<Verdict> out;
  for (const auto& req : condition_template(id).ausc) {
    const PiecewiseMap& h = req.map == 'f' ? f : g;
    Verdict v = req.slice == Slice::FirstArgAtX0 ? ausc_check(fix_second(h, y), x0, c, budget)
                                                 : ausc_check(fix_first(h, x0), y, c, budget);
    v.check = std::string("ausc ") + req.map + (req.slice == Slice::FirstArgAtX0 ? "(., y) at x0" : "(x0, .) at y");
    out.push_back(std::move(v));
  }
  return out;
}

namespace detail {

inline std::vector<SequenceSpec> candidate_nets(const RationalVec& p, const BoxDomain& K, const SamplingBudget& b) {
  std::vector<SequenceSpec> out{SequenceSpec::constant(p)};
  for (auto& s : generate_sequences(p, K, b)) out.push_back(std::move(s));
  return out;
}

/// Lower bound of <a, g(x0, z)> over z in K: exact when every piece of
/// z -> g(x0, z) gives the same constant functional, else over grid z only.
inline std::pair<Rational, bool> z_part_bound(const PiecewiseMap& g, const RationalVec& x0, const RationalVec& a) {
  const PiecewiseMap slice = fix_first(g, x0);
  std::optional<Rational> common;
  bool syntactic = true;
  for (const auto& p : slice.pieces()) {
    if (p.region.trivially_empty()) continue;
    Expr e = Expr::constant(0);
    for (std::size_t k = 0; k < p.values.size(); ++k)
      if (a[k] != 0) e = e + Expr::constant(a[k]) * p.values[k];
    if (e.uses(Op::VarX) || e.uses(Op::VarY)) {
      syntactic = false;
      break;
    }
    const Rational v = e.eval({}, {});
    if (common && *common != v) {
      syntactic = false;
      break;
    }
    common = v;
  }
  if (syntactic && common) return {*common, true};
  std::optional<Rational> m;
  for (const auto& z : g.domain().points()) {
    const Rational v = dot(a, g.eval(x0, z));
    if (!m || v < *m) m = v;
  }
  return {*m, false};
}

}  // namespace detail

/// Searches candidate nets for a template witness; nullopt witness result
/// with an impossibility certificate when one normal rules out every candidate.
inline Verdict search_condition(ConditionId id, const PiecewiseMap& f, const PiecewiseMap& g, const RationalVec& x0,
                                const RationalVec& y, const ConeSpec& c, const SamplingBudget& budget) {
  const ConditionTemplate t = condition_template(id);
  const BoxDomain& K = f.domain();
  const auto xs = template_uses(t, Arg::NetX) ? detail::candidate_nets(x0, K, budget) : std::vector<SequenceSpec>{};
  const auto us = template_uses(t, Arg::NetU) ? detail::candidate_nets(x0, K, budget) : std::vector<SequenceSpec>{};
  const auto ys = template_uses(t, Arg::NetY) ? detail::candidate_nets(y, K, budget) : std::vector<SequenceSpec>{};
  const auto vs = template_uses(t, Arg::NetV) ? detail::candidate_nets(y, K, budget) : std::vector<SequenceSpec>{};
  std::vector<detail::NetChoice> combos;
  auto opt = [](const std::vector<SequenceSpec>& v) {
    std::vector<const SequenceSpec*> p;
    for (const auto& s : v) p.push_back(&s);
    if (p.empty()) p.push_back(nullptr);
    return p;
  };
  for (auto* a : opt(xs))
    for (auto* b : opt(us))
      for (auto* cc : opt(ys))
        for (auto* d : opt(vs)) combos.push_back({a, b, cc, d});
  const auto zgrid = K.points();
  for (const auto& nets : combos) {
    ConditionWitness w;
    if (nets.x) w.x = *nets.x;
    if (nets.u) w.u = *nets.u;
    if (nets.y) w.y = *nets.y;
    if (nets.v) w.v = *nets.v;
    if (t.a_form) {
      w.w_source = ConditionWitness::WSource::FromTerms;
    } else {
      const long first = detail::first_common_index(nets);
      const long last = first + static_cast<long>(budget.tail_depth) - 1;
      std::vector<RationalVec> table;
      bool ok = true;
      for (long n = first; n <= last && ok; ++n) {
        const RationalVec sub = detail::subtracted(t, f, g, nets, x0, y, n);
        auto it = std::find_if(zgrid.begin(), zgrid.end(),
                               [&](const RationalVec& z) { return in_neg_cone(c, g.eval(x0, z) - sub); });
        if (it == zgrid.end()) ok = false;
        else table.push_back(*it);
      }
      if (!ok) continue;
      if (std::all_of(table.begin(), table.end(), [&](const RationalVec& z) { return z == table.front(); }))
        w.z = SequenceSpec::constant(table.front());
      else
        w.z_table = std::move(table);
    }
    Verdict v = verify_condition_membership(id, f, g, x0, y, c, w, budget);
    if (v.holds()) {
      v.certificate["searched"] = true;
      return v;
    }
  }
  // impossibility over all candidates
  for (std::size_t j = 0; j < c.normals().size(); ++j) {
    const auto& a = c.normals()[j];
    Rational bound = 0;
    bool exact = true;
    if (!t.a_form) std::tie(bound, exact) = detail::z_part_bound(g, x0, a);
    Json limits = Json::array();
    bool all = true;
    for (const auto& nets : combos) {
      auto lf = detail::slot_limit(f, t.f1, t.f2, nets, x0, y, a);
      auto lg = detail::slot_limit(g, t.g1, t.g2, nets, x0, y, a);
      auto l = detail::ext_add(lf, lg);
      // B: <a, value> >= bound - <a, sub> -> bound - lim > 0 ; A: handled via -int C of sub
      if (!l || t.a_form || l->compare(bound) >= 0) {
        all = false;
        break;
      }
      limits.push_back({{"nets", detail::nets_json(nets)}, {"limit", l->str()}});
    }
    if (all && !combos.empty()) {
      return Verdict::make(Status::Fails, "membership",
                           {{"kind", "condition_impossible"},
                            {"condition", to_string(id)},
                            {"x0", to_json(x0)},
                            {"y", to_json(y)},
                            {"normal_index", j},
                            {"normal", to_json(a)},
                            {"z_bound", bound.get_str()},
                            {"z_bound_kind", exact ? "exact" : "grid_level"},
                            {"candidates", limits}},
                           "<a, g(x0,z)> >= z_bound for all z while <a, f + g terms> tends below it on every candidate");
    }
  }
  if (t.a_form) {
    // F_n + G_n eventually in -int C along every candidate excludes every w-net
    Json limits = Json::array();
    bool all = !combos.empty();
    for (const auto& nets : combos) {
      bool inside = true;
      for (const auto& a : c.normals()) {
        auto l = detail::ext_add(detail::slot_limit(f, t.f1, t.f2, nets, x0, y, a),
                                 detail::slot_limit(g, t.g1, t.g2, nets, x0, y, a));
        inside = inside && l && l->compare(Rational(0)) < 0;
      }
      if (!inside) {
        all = false;
        break;
      }
      limits.push_back(detail::nets_json(nets));
    }
    if (all) {
      return Verdict::make(Status::Fails, "membership",
                           {{"kind", "condition_impossible_w"}, {"condition", to_string(id)}, {"x0", to_json(x0)},
                            {"y", to_json(y)}, {"candidates", limits}},
                           "terms end in -int C, so no w outside -int C lies below them");
    }
  }
  return Verdict::make(Status::ConsistentUpToSampling, "membership",
                       {{"condition", to_string(id)}, {"candidates", combos.size()}, {"budget", budget.to_json()}});
}

inline ConditionResult check_condition(ConditionId id, const PiecewiseMap& f, const PiecewiseMap& g,
                                       const RationalVec& x0, const RationalVec& y, const ConeSpec& c,
                                       const std::optional<ConditionWitness>& witness,
                                       const SamplingBudget& budget = {}) {
  if (f.is_unary() || g.is_unary()) throw MapError("conditions need bifunctions");
  if (!f.domain().contains(x0) || !f.domain().contains(y)) throw ConditionError("x0 and y must lie in K");
  ConditionResult r;
  r.membership = witness ? verify_condition_membership(id, f, g, x0, y, c, *witness, budget, &r.precondition_failed)
                         : search_condition(id, f, g, x0, y, c, budget);
  if (witness) {
    for (auto [name, s] : {std::pair{"x", &witness->x}, {"u", &witness->u}, {"y", &witness->y},
                           {"v", &witness->v}, {"z", &witness->z}, {"w", &witness->w}})
      if (*s && (*s)->is_constant()) r.constant_nets.emplace_back(name);
  }
  r.subchecks = condition_subchecks(id, f, g, x0, y, c, budget);
  const bool sub_fail = std::any_of(r.subchecks.begin(), r.subchecks.end(), [](const Verdict& v) { return v.fails(); });
  const bool sub_hold = std::all_of(r.subchecks.begin(), r.subchecks.end(), [](const Verdict& v) { return v.holds(); });
  Json cert{{"condition", to_string(id)}, {"x0", to_json(x0)}, {"y", to_json(y)}};
  if (r.membership.fails()) {
    cert["failed"] = "membership";
    r.verdict = Verdict::make(Status::Fails, "condition", cert, r.membership.note);
  } else if (sub_fail) {
    auto it = std::find_if(r.subchecks.begin(), r.subchecks.end(), [](const Verdict& v) { return v.fails(); });
    cert["failed"] = it->check;
    r.verdict = Verdict::make(Status::Fails, "condition", cert);
  } else if (r.membership.holds() && sub_hold) {
    r.verdict = Verdict::make(Status::Holds, "condition", cert);
  } else {
    r.verdict = Verdict::make(Status::ConsistentUpToSampling, "condition", cert);
  }
  if (!r.constant_nets.empty() && r.verdict.note.empty()) r.verdict.note = "uses eventually constant nets";
  return r;
}

inline ConditionResult check_condition_A(ConditionId id, const PiecewiseMap& f, const PiecewiseMap& g,
                                         const RationalVec& x0, const RationalVec& y, const ConeSpec& c,
                                         const ConditionWitness& witness, const SamplingBudget& budget = {}) {
  if (!condition_template(id).a_form) throw ConditionError(to_string(id) + " is not an A-condition");
  return check_condition(id, f, g, x0, y, c, witness, budget);
}

// ---- transfer ---------------------------------------------------------------

struct TransferReport {
  bool dual_solution = false;
  bool diagonal_in_cone = false;
  std::vector<std::pair<RationalVec, ConditionResult>> per_y;
  bool asserted = false;
  bool directly_confirmed = false;
  std::optional<RationalVec> direct_violator;
  std::string discrepancy;

  Json to_json() const {
    Json ys = Json::array();
    for (const auto& [y, r] : per_y) ys.push_back({{"y", pveq::to_json(y)}, {"result", r.to_json()}});
    Json j{{"dual_solution", dual_solution}, {"diagonal_in_cone", diagonal_in_cone}, {"asserted", asserted},
           {"directly_confirmed", directly_confirmed}, {"per_y", ys}};
    if (direct_violator) j["direct_violator"] = pveq::to_json(*direct_violator);
    if (!discrepancy.empty()) j["discrepancy"] = discrepancy;
    return j;
  }
};

using WitnessProvider = std::function<std::optional<ConditionWitness>(const RationalVec& y)>;

inline TransferReport transfer_check(const PiecewiseMap& f, const PiecewiseMap& g, const RationalVec& x0,
                                     const ConeSpec& c, const BoxDomain& domain, ConditionId id,
                                     const WitnessProvider& witness, const SamplingBudget& budget = {}) {
  TransferReport r;
  r.dual_solution = solve_dual(g, domain, c).contains(x0);
  r.diagonal_in_cone = cone_contains(c, f.eval(x0, x0));
  const PiecewiseMap h = sum_maps(f, g);
  for (const auto& y : domain.points()) {
    if (!not_in_neg_interior(c, h.eval(x0, y)) && !r.direct_violator) r.direct_violator = y;
  }
  r.directly_confirmed = !r.direct_violator;
  if (!r.dual_solution || !r.diagonal_in_cone) return r;
  bool all = true;
  for (const auto& y : domain.points()) {
    if (y == x0) continue;
    ConditionResult cr = check_condition(id, f, g, x0, y, c, witness ? witness(y) : std::nullopt, budget);
    all = all && cr.verdict.holds();
    r.per_y.emplace_back(y, std::move(cr));
    if (!all) break;
  }
  r.asserted = all;
  if (r.asserted && !r.directly_confirmed)
    r.discrepancy = "conditions hold but x0 fails the perturbed problem at y = " + r.direct_violator->str();
  return r;
}

/// Witness x_n = x0 (constant), z_n = y (constant).
inline WitnessProvider trivial_b1_witness(const RationalVec& x0) {
  return [x0](const RationalVec& y) -> std::optional<ConditionWitness> {
    ConditionWitness w;
    w.x = SequenceSpec::constant(x0);
    w.z = SequenceSpec::constant(y);
    return w;
  };
}

}  // namespace pveq
