#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pveq/maps.hpp"
#include "pveq/sequence.hpp"

namespace pveq {

struct SamplingBudget {
  unsigned directions = 8;        ///< sampled approach directions (0 disables generation)
  unsigned tail_depth = 64;       ///< indices checked per net / radii per schedule
  Rational witness_radius = 4;    ///< brute-force witness box half-width
  unsigned witness_density = 8;   ///< witness grid points per unit
  Rational k_radius = 2;          ///< k-lattice half-width around the anchor
  unsigned k_levels = 3;          ///< lattice steps 1, 1/2, ..., 1/2^(levels-1)
  Rational radius0 = Rational(1, 2);  ///< first radius of the neighbourhood schedule

  void validate() const {
    if (tail_depth == 0 || witness_density == 0 || k_levels == 0 || witness_radius <= 0 || k_radius <= 0 ||
        radius0 <= 0)
      throw std::invalid_argument("sampling budget entries must be positive");
  }

  Json to_json() const {
    return {{"directions", directions},         {"tail_depth", tail_depth},
            {"witness_radius", witness_radius.get_str()}, {"witness_density", witness_density},
            {"k_radius", k_radius.get_str()},   {"k_levels", k_levels},
            {"radius0", radius0.get_str()}};
  }
};

/// Sign patterns of {-1,0,1}^n without 0, unit coordinates first, +1 before -1.
inline std::vector<RationalVec> sign_patterns(std::size_t n) {
  std::vector<RationalVec> out;
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= 3;
  for (std::size_t code = 1; code < total; ++code) {
    RationalVec v(n);
    std::size_t c = code;
    for (std::size_t i = n; i-- > 0;) {
      const std::size_t digit = c % 3;
      c /= 3;
      v[i] = digit == 0 ? 0 : (digit == 1 ? 1 : -1);
    }
    out.push_back(std::move(v));
  }
  std::stable_sort(out.begin(), out.end(), [](const RationalVec& a, const RationalVec& b) {
    auto nz = [](const RationalVec& v) {
      return std::count_if(v.begin(), v.end(), [](const Rational& q) { return q != 0; });
    };
    return nz(a) < nz(b);
  });
  return out;
}

/// Deterministic family of sequences converging to x0 inside the box:
/// x0 + d/(n+1) for sampled directions d = 2^-m * pattern, axis-aligned
/// one-sided approaches reaching the box boundary, and the segments toward
/// every box vertex.
inline std::vector<SequenceSpec> generate_sequences(const RationalVec& x0, const BoxDomain& domain,
                                                    const SamplingBudget& budget) {
  std::vector<SequenceSpec> out;
  if (budget.directions == 0) return out;
  if (!domain.contains(x0)) throw std::invalid_argument("x0 outside domain");
  auto push = [&](const RationalVec& d) {
    if (d.is_zero() || !domain.contains(x0 + d)) return;
    SequenceSpec s = SequenceSpec::toward(x0, d);
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(std::move(s));
  };
  const auto patterns = sign_patterns(x0.dim());
  Rational scale = 1;
  std::size_t sampled = 0;
  for (unsigned m = 0; m < 16 && sampled < budget.directions; ++m, scale /= 2) {
    for (const auto& p : patterns) {
      if (sampled >= budget.directions) break;
      const std::size_t before = out.size();
      push(scale * p);
      if (out.size() > before) ++sampled;
    }
  }
  for (std::size_t axis = 0; axis < x0.dim(); ++axis) {
    RationalVec up(x0.dim()), down(x0.dim());
    up[axis] = domain.upper()[axis] - x0[axis];
    down[axis] = domain.lower()[axis] - x0[axis];
    push(up);
    push(down);
  }
  for (const auto& v : domain.vertices()) push(v - x0);
  return out;
}

/// Eventual behaviour of a unary map along a sequence.
struct MapTail {
  std::size_t piece = 0;
  std::vector<RatFunc> components;
  Rational valid_from = 0;

  std::vector<ExtValue> limits() const {
    std::vector<ExtValue> l;
    for (const auto& c : components) l.push_back(c.limit());
    return l;
  }

  bool converges() const {
    for (const auto& c : components)
      if (!c.limit().is_finite()) return false;
    return true;
  }

  RationalVec finite_limit() const {
    RationalVec v(components.size());
    for (std::size_t i = 0; i < components.size(); ++i) v[i] = components[i].limit().value;
    return v;
  }

  /// lim <a, h(x_n)>
  ExtValue functional_limit(const RationalVec& a) const {
    RatFunc acc;
    for (std::size_t i = 0; i < components.size(); ++i) acc = acc + RatFunc::constant(a[i]) * components[i];
    return acc.limit();
  }
};

/// Finds the piece the sequence eventually stays in and the exact rational
/// function of n each component equals there. nullopt when no piece is
/// eventually occupied or a pole sits on the tail.
inline std::optional<MapTail> map_tail(const PiecewiseMap& h, const SequenceSpec& seq) {
  if (!h.is_unary()) throw MapError("map_tail needs a unary map");
  const auto xs = seq.tail();
  for (std::size_t i = 0; i < h.pieces().size(); ++i) {
    const auto& piece = h.pieces()[i];
    try {
      auto [inside, from] = piece.region.eventually_holds(xs);
      if (!inside) continue;
      MapTail t;
      t.piece = i;
      t.valid_from = from;
      for (const auto& v : piece.values) {
        auto tail = v.tail(xs);
        t.valid_from = std::max(t.valid_from, tail.valid_from);
        t.components.push_back(std::move(tail.f));
      }
      return t;
    } catch (const PoleError&) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

struct ReplayResult {
  bool ok = true;
  std::string message = "ok";
  std::optional<long> failing_index;

  static ReplayResult fail(std::string msg, std::optional<long> idx = std::nullopt) {
    return {false, std::move(msg), idx};
  }
};

namespace detail {

inline long last_index(const SequenceSpec& s, const SamplingBudget& b) {
  return s.first_index() + static_cast<long>(b.tail_depth) - 1;
}

inline RationalVec clamp_term(const ConeSpec& c, const RationalVec& hz, const RationalVec& z,
                              const RationalVec& e) {
  Rational t = 0;
  for (const auto& a : c.normals()) t = std::max(t, Rational((dot(a, hz) - dot(a, z)) / dot(a, e)));
  return z + t * e;
}

inline Json sequences_json(const std::vector<SequenceSpec>& s) {
  Json a = Json::array();
  for (const auto& q : s) a.push_back(q.to_json());
  return a;
}

}  // namespace detail

/// Value of the witness net at index n.
inline RationalVec witness_term(const WitnessSpec& w, const PiecewiseMap& h, const SequenceSpec& seq,
                                const ConeSpec& c, long n) {
  switch (w.kind) {
    case WitnessSpec::Kind::Explicit: return w.formula->term(n);
    case WitnessSpec::Kind::Image: return h.eval(seq.term(n));
    case WitnessSpec::Kind::Clamped: return detail::clamp_term(c, h.eval(seq.term(n)), w.limit, w.shift);
    case WitnessSpec::Kind::OfSequence: {
      const RationalVec x = seq.term(n);
      RationalVec z(w.of_x.size());
      for (std::size_t i = 0; i < z.dim(); ++i) z[i] = w.of_x[i].eval(x.coords(), {});
      return z;
    }
  }
  throw std::logic_error("unreachable");
}

/// Replays an a-usc / w-usc witness: h(x_n) - z_n in -C at every checked
/// index, h(x0) - z in C, and z_n -> z.
inline ReplayResult verify_ausc_witness(const PiecewiseMap& h, const RationalVec& x0, const SequenceSpec& seq,
                                        const WitnessSpec& w, const ConeSpec& c, const SamplingBudget& budget) {
  if (!(seq.limit() == x0)) return ReplayResult::fail("sequence limit " + seq.limit().str() + " is not x0");
  if (!seq.inside(h.domain())) return ReplayResult::fail("sequence leaves the domain");
  if (!cone_contains(c, h.eval(x0) - w.limit)) return ReplayResult::fail("h(x0) - z not in C");
  switch (w.kind) {
    case WitnessSpec::Kind::Explicit:
      if (!w.formula || !(w.formula->limit() == w.limit)) return ReplayResult::fail("witness limit mismatch");
      break;
    case WitnessSpec::Kind::Image: {
      auto t = map_tail(h, seq);
      if (!t || !t->converges() || !(t->finite_limit() == w.limit))
        return ReplayResult::fail("h(x_n) does not converge to the declared z");
      break;
    }
    case WitnessSpec::Kind::Clamped: {
      auto t = map_tail(h, seq);
      if (!t || !cone_interior_contains(c, w.shift)) return ReplayResult::fail("clamped witness malformed");
      for (const auto& a : c.normals())
        if (t->functional_limit(a).compare(dot(a, w.limit)) > 0)
          return ReplayResult::fail("clamp shift does not tend to 0");
      break;
    }
    case WitnessSpec::Kind::OfSequence: {
      if (w.of_x.size() != h.codomain_dim()) return ReplayResult::fail("witness dimension mismatch");
      const auto xs = seq.tail();
      for (std::size_t i = 0; i < w.of_x.size(); ++i) {
        try {
          const ExtValue l = w.of_x[i].tail(xs, {}).f.limit();
          if (!l.is_finite() || l.value != w.limit[i]) return ReplayResult::fail("F(x_n) does not converge to z");
        } catch (const PoleError&) {
          return ReplayResult::fail("pole on the witness tail");
        }
      }
      break;
    }
  }
  for (long n = seq.first_index(); n <= detail::last_index(seq, budget); ++n) {
    const RationalVec gap = h.eval(seq.term(n)) - witness_term(w, h, seq, c, n);
    if (!in_neg_cone(c, gap))
      return ReplayResult::fail("h(x_n) - z_n not in -C at n = " + std::to_string(n), n);
  }
  return {};
}

/// a-usc along one sequence. A witness exists iff for every normal a_j
/// lim <a_j, h(x_n)> <= <a_j, h(x0)>: necessity from z_n - h(x_n) in C and
/// h(x0) - z in C; sufficiency by z = h(x0) (or z = lim h(x_n)) and a
/// vanishing shift along a point of int C.
inline Verdict ausc_along(const PiecewiseMap& h, const RationalVec& x0, const SequenceSpec& seq,
                          const ConeSpec& c, const SamplingBudget& budget) {
  if (!(seq.limit() == x0)) throw SequenceError("sequence limit " + seq.limit().str() + " differs from x0 " + x0.str());
  if (h.codomain_dim() != c.dim()) throw DimensionError("codomain/cone dimension mismatch");
  auto tail = map_tail(h, seq);
  if (!tail) {
    return Verdict::make(Status::ConsistentUpToSampling, "ausc_along",
                         {{"sequence", seq.to_json()}, {"budget", budget.to_json()}},
                         "no eventually occupied piece");
  }
  const RationalVec hx0 = h.eval(x0);
  for (std::size_t j = 0; j < c.normals().size(); ++j) {
    const auto& a = c.normals()[j];
    const ExtValue lim = tail->functional_limit(a);
    const Rational bound = dot(a, hx0);
    if (lim.compare(bound) > 0) {
      return Verdict::make(Status::Fails, "ausc_along",
                           {{"kind", "ausc_infeasible"},
                            {"x0", to_json(x0)},
                            {"sequence", seq.to_json()},
                            {"normal_index", j},
                            {"normal", to_json(a)},
                            {"tail_limit", lim.str()},
                            {"bound", bound.get_str()},
                            {"valid_from", tail->valid_from.get_str()}},
                           "every witness needs <a,z> >= " + lim.str() + " and <a,z> <= " + bound.get_str());
    }
  }
  WitnessSpec w;
  if (tail->converges()) {
    w.kind = WitnessSpec::Kind::Image;
    w.limit = tail->finite_limit();
  } else {
    w.kind = WitnessSpec::Kind::Clamped;
    w.limit = hx0;
    w.shift = *cone_validate(c).witness;
  }
  return Verdict::make(Status::Holds, "ausc_along",
                       {{"kind", "ausc_witness"},
                        {"x0", to_json(x0)},
                        {"sequence", seq.to_json()},
                        {"witness", w.to_json()},
                        {"tail_depth", budget.tail_depth}});
}

/// Re-derives an ausc_infeasible certificate from scratch.
inline ReplayResult verify_ausc_infeasible(const PiecewiseMap& h, const Json& cert, const ConeSpec& c) {
  const RationalVec x0 = vec_from_json(cert.at("x0"));
  const SequenceSpec seq = SequenceSpec::from_json(cert.at("sequence"));
  const auto j = cert.at("normal_index").get<std::size_t>();
  if (j >= c.normals().size()) return ReplayResult::fail("normal index out of range");
  auto tail = map_tail(h, seq);
  if (!tail) return ReplayResult::fail("tail not determined");
  const ExtValue lim = tail->functional_limit(c.normals()[j]);
  const Rational bound = dot(c.normals()[j], h.eval(x0));
  if (lim.str() != cert.at("tail_limit").get<std::string>()) return ReplayResult::fail("tail limit differs");
  if (lim.compare(bound) <= 0) return ReplayResult::fail("claimed obstruction does not hold");
  return {};
}

/// h(x_n) -> h(x0) along every sequence of the family.
inline bool continuous_on_family(const PiecewiseMap& h, const RationalVec& x0,
                                 const std::vector<SequenceSpec>& family) {
  const RationalVec hx0 = h.eval(x0);
  for (const auto& s : family) {
    auto t = map_tail(h, s);
    if (!t || !t->converges() || !(t->finite_limit() == hx0)) return false;
  }
  return true;
}

inline Verdict ausc_check(const PiecewiseMap& h, const RationalVec& x0, const ConeSpec& c,
                          const SamplingBudget& budget) {
  const auto family = generate_sequences(x0, h.domain(), budget);
  Json per = Json::array();
  bool all_hold = !family.empty();
  for (const auto& s : family) {
    Verdict v = ausc_along(h, x0, s, c, budget);
    if (v.fails()) {
      v.check = "ausc";
      return v;
    }
    all_hold = all_hold && v.holds();
    per.push_back(v.to_json());
  }
  if (all_hold && (h.is_constant() || continuous_on_family(h, x0, family))) {
    return Verdict::make(Status::Holds, "ausc", {{"kind", "ausc_all"}, {"x0", to_json(x0)}, {"per_sequence", per}},
                         "every generated sequence admits a witness and h is continuous at x0 on the family");
  }
  return Verdict::make(Status::ConsistentUpToSampling, "ausc",
                       {{"x0", to_json(x0)}, {"per_sequence", per}, {"budget", budget.to_json()}},
                       all_hold ? "per-sequence Holds; continuity at x0 not established" : "");
}

namespace detail {

/// Coarse-to-fine lattice around the anchor; within a level ordered by
/// max-distance to the anchor, then lexicographically.
inline std::vector<RationalVec> k_lattice(const RationalVec& anchor, const SamplingBudget& b) {
  std::vector<RationalVec> out;
  Rational step = 1;
  for (unsigned level = 0; level < b.k_levels; ++level, step /= 2) {
    std::vector<RationalVec> pts;
    const std::size_t n = anchor.dim();
    std::vector<std::vector<Rational>> axes(n);
    for (std::size_t i = 0; i < n; ++i) {
      mpz_class lo_idx, hi_idx;
      const Rational lo = (anchor[i] - b.k_radius) / step;
      const Rational hi = (anchor[i] + b.k_radius) / step;
      mpz_cdiv_q(lo_idx.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
      mpz_fdiv_q(hi_idx.get_mpz_t(), hi.get_num_mpz_t(), hi.get_den_mpz_t());
      for (mpz_class k = lo_idx; k <= hi_idx; ++k) axes[i].push_back(Rational(k) * step);
    }
    std::vector<std::size_t> idx(n, 0);
    bool done = std::any_of(axes.begin(), axes.end(), [](const auto& a) { return a.empty(); });
    while (!done) {
      RationalVec p(n);
      for (std::size_t i = 0; i < n; ++i) p[i] = axes[i][idx[i]];
      if (std::find(out.begin(), out.end(), p) == out.end()) pts.push_back(std::move(p));
      std::size_t i = n;
      while (i > 0) {
        --i;
        if (++idx[i] < axes[i].size()) break;
        idx[i] = 0;
        if (i == 0) done = true;
      }
    }
    std::stable_sort(pts.begin(), pts.end(), [&](const RationalVec& a, const RationalVec& c) {
      const Rational da = max_distance(a, anchor), dc = max_distance(c, anchor);
      if (da != dc) return da < dc;
      return a < c;
    });
    out.insert(out.end(), pts.begin(), pts.end());
  }
  return out;
}

/// Probe points of the punctured ball of radius r around x0 inside the box.
inline std::vector<RationalVec> ball_probes(const RationalVec& x0, const Rational& r, const BoxDomain& box,
                                            const std::vector<RationalVec>& patterns) {
  std::vector<RationalVec> out;
  for (const Rational& f : {Rational(1, 2), Rational(1, 4)}) {
    for (const auto& p : patterns) {
      RationalVec u = x0 + Rational(r * f) * p;
      if (box.contains(u)) out.push_back(std::move(u));
    }
  }
  return out;
}

/// Shared driver for the neighbourhood refutations: for each k, every radius
/// r0/2^j (j < tail_depth) must contain a probe point where `violates` holds.
template <typename KFilter, typename Violates>
std::optional<std::pair<RationalVec, std::vector<RationalVec>>> search_refutation(
    const PiecewiseMap& h, const RationalVec& x0, const RationalVec& anchor, const SamplingBudget& b,
    KFilter keep_k, Violates violates) {
  const auto patterns = sign_patterns(x0.dim());
  std::vector<std::vector<RationalVec>> probes;
  Rational r = b.radius0;
  for (unsigned j = 0; j < b.tail_depth; ++j, r /= 2) probes.push_back(ball_probes(x0, r, h.domain(), patterns));
  for (const auto& k : k_lattice(anchor, b)) {
    if (!keep_k(k)) continue;
    std::vector<RationalVec> hits;
    for (const auto& ring : probes) {
      auto it = std::find_if(ring.begin(), ring.end(), [&](const RationalVec& u) { return violates(k, u); });
      if (it == ring.end()) break;
      hits.push_back(*it);
    }
    if (hits.size() == probes.size()) return std::make_pair(k, std::move(hits));
  }
  return std::nullopt;
}

inline Json points_json(const std::vector<RationalVec>& pts) {
  Json a = Json::array();
  for (const auto& p : pts) a.push_back(to_json(p));
  return a;
}

}  // namespace detail

/// C-usc via: for all k in int C some neighbourhood has h(u) in h(x0) + k - int C.
inline Verdict cusc_check(const PiecewiseMap& h, const RationalVec& x0, const ConeSpec& c,
                          const SamplingBudget& budget) {
  budget.validate();
  const RationalVec hx0 = h.eval(x0);
  auto found = detail::search_refutation(
      h, x0, -hx0, budget, [&](const RationalVec& k) { return cone_interior_contains(c, k); },
      [&](const RationalVec& k, const RationalVec& u) { return !cone_interior_contains(c, hx0 + k - h.eval(u)); });
  if (found) {
    Json residuals = Json::array();
    for (const auto& u : found->second) residuals.push_back(to_json(hx0 + found->first - h.eval(u)));
    return Verdict::make(Status::Fails, "cusc",
                         {{"kind", "cusc_refutation"},
                          {"x0", to_json(x0)},
                          {"k", to_json(found->first)},
                          {"radius0", budget.radius0.get_str()},
                          {"points", detail::points_json(found->second)},
                          {"residuals", residuals}});
  }
  return Verdict::make(Status::ConsistentUpToSampling, "cusc", {{"x0", to_json(x0)}, {"budget", budget.to_json()}});
}

/// q-usc: for each k with k + h(x0) not in C some neighbourhood keeps k + h(x) out of C.
inline Verdict qusc_check(const PiecewiseMap& h, const RationalVec& x0, const ConeSpec& c,
                          const SamplingBudget& budget) {
  budget.validate();
  const RationalVec hx0 = h.eval(x0);
  auto found = detail::search_refutation(
      h, x0, -hx0, budget, [&](const RationalVec& k) { return !cone_contains(c, k + hx0); },
      [&](const RationalVec& k, const RationalVec& u) { return cone_contains(c, k + h.eval(u)); });
  if (found) {
    return Verdict::make(Status::Fails, "qusc",
                         {{"kind", "qusc_refutation"},
                          {"x0", to_json(x0)},
                          {"k", to_json(found->first)},
                          {"radius0", budget.radius0.get_str()},
                          {"points", detail::points_json(found->second)}});
  }
  return Verdict::make(Status::ConsistentUpToSampling, "qusc", {{"x0", to_json(x0)}, {"budget", budget.to_json()}});
}

/// Replays cusc/qusc refutations: each point lies within its radius and shows the claimed membership.
inline ReplayResult verify_neighbourhood_refutation(const PiecewiseMap& h, const Json& cert, const ConeSpec& c) {
  const std::string kind = cert.at("kind").get<std::string>();
  const RationalVec x0 = vec_from_json(cert.at("x0"));
  const RationalVec k = vec_from_json(cert.at("k"));
  const RationalVec hx0 = h.eval(x0);
  if (kind == "cusc_refutation" && !cone_interior_contains(c, k)) return ReplayResult::fail("k not in int C");
  if (kind == "qusc_refutation" && cone_contains(c, k + hx0)) return ReplayResult::fail("k + h(x0) in C");
  Rational r = rational_from_json(cert.at("radius0"));
  long j = 0;
  for (const auto& pj : cert.at("points")) {
    const RationalVec u = vec_from_json(pj);
    const Rational dist = max_distance(u, x0);
    if (dist == 0 || dist >= r) return ReplayResult::fail("point outside its punctured ball", j);
    const bool violated = kind == "cusc_refutation" ? !cone_interior_contains(c, hx0 + k - h.eval(u))
                                                    : cone_contains(c, k + h.eval(u));
    if (!violated) return ReplayResult::fail("membership not reproduced", j);
    r /= 2;
    ++j;
  }
  if (j == 0) return ReplayResult::fail("no points");
  return {};
}

/// The epsilon-indexed refutation pattern: k(eps) = k0 + eps k1 in int C and
/// u(eps) = x0 + eps u1 with residual h(x0) + k(eps) - h(u(eps)) outside int C.
/// Reports the residuals; `uniform` tells whether k0 itself lies in int C,
/// which a refutation of C-usc with a single k requires.
struct EpsilonFamilyReplay {
  bool memberships_ok = true;
  bool uniform = false;
  std::vector<RationalVec> residuals;
  std::string message;
};

inline EpsilonFamilyReplay replay_epsilon_family(const PiecewiseMap& h, const RationalVec& x0, const ConeSpec& c,
                                                 const RationalVec& k0, const RationalVec& k1, const RationalVec& u1,
                                                 const std::vector<Rational>& eps) {
  EpsilonFamilyReplay out;
  const RationalVec hx0 = h.eval(x0);
  for (const auto& e : eps) {
    const RationalVec k = k0 + e * k1;
    const RationalVec u = x0 + e * u1;
    const RationalVec residual = hx0 + k - h.eval(u);
    out.residuals.push_back(residual);
    if (!cone_interior_contains(c, k) || max_distance(u, x0) >= e || cone_interior_contains(c, residual)) {
      out.memberships_ok = false;
      out.message = "family breaks at eps = " + e.get_str();
    }
  }
  out.uniform = cone_interior_contains(c, k0);
  if (out.message.empty())
    out.message = out.uniform ? "single k refutes" : "k(eps) -> " + k0.str() + " leaves int C: not a fixed-k refutation";
  return out;
}

namespace detail {

/// Lower bound of <a, piece value> over the piece's part of the box,
/// or nullopt when the piece cannot meet the box minus x0.
inline std::optional<ExtValue> piece_lower_bound(const Piece& p, const RationalVec& a, const RationalVec& x0,
                                                 const RationalVec& lo, const RationalVec& hi) {
  const std::size_t n = x0.dim();
  std::vector<Interval> box;
  std::vector<Rational> l(lo.begin(), lo.end()), u(hi.begin(), hi.end());
  for (const auto& cl : p.region.clauses) {
    if (cl.lhs.op() != Op::VarX) continue;
    const std::size_t i = cl.lhs.index();
    if (cl.op == Cmp::Lt || cl.op == Cmp::Le || cl.op == Cmp::Eq) u[i] = std::min(u[i], cl.rhs);
    if (cl.op == Cmp::Gt || cl.op == Cmp::Ge || cl.op == Cmp::Eq) l[i] = std::max(l[i], cl.rhs);
  }
  bool point_at_x0 = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (l[i] > u[i]) return std::nullopt;
    point_at_x0 = point_at_x0 && l[i] == u[i] && l[i] == x0[i];
    box.push_back(Interval::of(l[i], u[i]));
  }
  if (point_at_x0) return std::nullopt;
  for (const auto& cl : p.region.clauses) {
    if (cl.lhs.op() == Op::VarX) continue;
    const Interval iv = enclose(cl.lhs, box);
    const bool below_possible = iv.lo.compare(cl.rhs) < 0;
    const bool equal_possible = iv.lo.compare(cl.rhs) <= 0 && iv.hi.compare(cl.rhs) >= 0;
    const bool above_possible = iv.hi.compare(cl.rhs) > 0;
    bool possible = false;
    switch (cl.op) {
      case Cmp::Lt: possible = below_possible; break;
      case Cmp::Le: possible = below_possible || equal_possible; break;
      case Cmp::Eq: possible = equal_possible; break;
      case Cmp::Gt: possible = above_possible; break;
      case Cmp::Ge: possible = above_possible || equal_possible; break;
    }
    if (!possible) return std::nullopt;
  }
  Expr functional = Expr::constant(0);
  for (std::size_t k = 0; k < p.values.size(); ++k) functional = functional + Expr::constant(a[k]) * p.values[k];
  return enclose(functional, box).lo;
}

}  // namespace detail

/// Punctured-neighbourhood bound: some normal a with <a, h(x)> >= lb > <a, h(x0)>
/// on every piece meeting the box of radius r around x0.
inline std::optional<Json> wusc_bound_certificate(const PiecewiseMap& h, const RationalVec& x0, const ConeSpec& c,
                                                  const SamplingBudget& budget) {
  const RationalVec hx0 = h.eval(x0);
  Rational r = budget.radius0;
  for (unsigned step = 0; step < 16; ++step, r /= 2) {
    RationalVec lo(x0.dim()), hi(x0.dim());
    for (std::size_t i = 0; i < x0.dim(); ++i) {
      lo[i] = std::max(h.domain().lower()[i], Rational(x0[i] - r));
      hi[i] = std::min(h.domain().upper()[i], Rational(x0[i] + r));
    }
    for (std::size_t j = 0; j < c.normals().size(); ++j) {
      const auto& a = c.normals()[j];
      const Rational bound = dot(a, hx0);
      bool all_above = true;
      bool any_piece = false;
      Json bounds = Json::array();
      for (std::size_t pi = 0; pi < h.pieces().size() && all_above; ++pi) {
        auto lb = detail::piece_lower_bound(h.pieces()[pi], a, x0, lo, hi);
        if (!lb) continue;
        any_piece = true;
        all_above = lb->compare(bound) > 0;
        bounds.push_back({{"piece", pi}, {"lower_bound", lb->str()}});
      }
      if (any_piece && all_above) {
        return Json{{"kind", "wusc_bound"}, {"x0", to_json(x0)}, {"normal_index", j}, {"normal", to_json(a)},
                    {"radius", r.get_str()}, {"bound", bound.get_str()}, {"pieces", bounds}};
      }
    }
  }
  return std::nullopt;
}

inline ReplayResult verify_wusc_bound(const PiecewiseMap& h, const Json& cert, const ConeSpec& c) {
  const RationalVec x0 = vec_from_json(cert.at("x0"));
  const auto j = cert.at("normal_index").get<std::size_t>();
  const Rational r = rational_from_json(cert.at("radius"));
  const auto& a = c.normals().at(j);
  const Rational bound = dot(a, h.eval(x0));
  RationalVec lo(x0.dim()), hi(x0.dim());
  for (std::size_t i = 0; i < x0.dim(); ++i) {
    lo[i] = std::max(h.domain().lower()[i], Rational(x0[i] - r));
    hi[i] = std::min(h.domain().upper()[i], Rational(x0[i] + r));
  }
  bool any = false;
  for (const auto& p : h.pieces()) {
    auto lb = detail::piece_lower_bound(p, a, x0, lo, hi);
    if (!lb) continue;
    any = true;
    if (lb->compare(bound) <= 0) return ReplayResult::fail("piece bound does not exceed <a, h(x0)>");
  }
  return any ? ReplayResult{} : ReplayResult::fail("no piece meets the neighbourhood");
}

/// w-usc: one approach sequence with a witness suffices.
inline Verdict wusc_check(const PiecewiseMap& h, const RationalVec& x0, const ConeSpec& c,
                          const SamplingBudget& budget, const std::vector<SequenceSpec>& extra = {}) {
  std::vector<SequenceSpec> family = extra;
  for (auto& s : generate_sequences(x0, h.domain(), budget))
    if (std::find(family.begin(), family.end(), s) == family.end()) family.push_back(std::move(s));
  for (const auto& s : family) {
    Verdict v = ausc_along(h, x0, s, c, budget);
    if (v.holds()) {
      v.check = "wusc";
      v.certificate["kind"] = "wusc_witness";
      return v;
    }
  }
  if (auto cert = wusc_bound_certificate(h, x0, c, budget)) {
    return Verdict::make(Status::Fails, "wusc", *cert,
                         "coordinate bound on the whole punctured neighbourhood excludes every witness");
  }
  return Verdict::make(Status::ConsistentUpToSampling, "wusc",
                       {{"x0", to_json(x0)}, {"sequences", family.size()}, {"budget", budget.to_json()}});
}

/// o-usc certificate check: g(x_n) + z_n nondecreasing on consecutive checked
/// indices and g(x0) - g(x_n) + w_n in C at each checked index.
inline bool ousc_verify_certificate(const PiecewiseMap& h, const RationalVec& x0, const ConeSpec& c,
                                    const SequenceSpec& xnet, const SequenceSpec& znet, const SequenceSpec& wnet,
                                    const SamplingBudget& budget) {
  if (!(xnet.limit() == x0)) throw SequenceError("x-net does not converge to x0");
  if (!znet.limit().is_zero() || !wnet.limit().is_zero()) throw SequenceError("z-net and w-net must converge to 0");
  const long first = std::max({xnet.first_index(), znet.first_index(), wnet.first_index()});
  const long last = first + static_cast<long>(budget.tail_depth) - 1;
  const RationalVec hx0 = h.eval(x0);
  RationalVec prev = h.eval(xnet.term(first)) + znet.term(first);
  for (long n = first; n <= last; ++n) {
    const RationalVec hn = h.eval(xnet.term(n));
    if (!cone_contains(c, hx0 - hn + wnet.term(n))) return false;
    if (n > first) {
      const RationalVec cur = hn + znet.term(n);
      if (!cone_contains(c, cur - prev)) return false;
      prev = cur;
    }
  }
  return true;
}

}  // namespace pveq
