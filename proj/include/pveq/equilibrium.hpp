#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pveq/levelsets.hpp"

namespace pveq {

struct SolutionReport {
  std::string problem;  ///< "dual" or "perturbed"
  BoxDomain domain;
  std::vector<RationalVec> solutions;
  std::vector<std::pair<RationalVec, RationalVec>> violators;  ///< (x, first y with value in -int C)

  bool contains(const RationalVec& x) const { return std::find(solutions.begin(), solutions.end(), x) != solutions.end(); }

  std::optional<RationalVec> violator_of(const RationalVec& x) const {
    for (const auto& [p, y] : violators)
      if (p == x) return y;
    return std::nullopt;
  }

  Json to_json() const {
    Json s = Json::array(), v = Json::array();
    for (const auto& x : solutions) s.push_back(pveq::to_json(x));
    for (const auto& [x, y] : violators) v.push_back({{"x", pveq::to_json(x)}, {"y", pveq::to_json(y)}});
    return {{"problem", problem}, {"domain", domain.str()}, {"solutions", s}, {"violators", v}};
  }
};

/// All grid x0 with g(x0, y) not in -int C for every grid y.
inline SolutionReport solve_dual(const PiecewiseMap& g, const BoxDomain& domain, const ConeSpec& c,
                                 std::string problem = "dual") {
  if (g.is_unary()) throw MapError("solve_dual needs a bifunction");
  if (g.codomain_dim() != c.dim()) throw DimensionError("codomain/cone dimension mismatch");
  if (!cone_validate(c).valid) throw std::invalid_argument("cone " + c.name() + " is not valid");
  SolutionReport r{std::move(problem), domain, {}, {}};
  const auto pts = domain.points();
  if (pts.empty()) throw std::invalid_argument("empty grid");
  for (const auto& x : pts) {
    std::optional<RationalVec> bad;
    for (const auto& y : pts) {
      if (!not_in_neg_interior(c, g.eval(x, y))) {
        bad = y;
        break;
      }
    }
    if (bad) r.violators.emplace_back(x, *bad);
    else r.solutions.push_back(x);
  }
  return r;
}

inline SolutionReport solve_perturbed(const PiecewiseMap& f, const PiecewiseMap& g, const BoxDomain& domain,
                                      const ConeSpec& c) {
  if (f.codomain_dim() != g.codomain_dim() || f.arity() != g.arity() || f.domain().dim() != g.domain().dim())
    throw DimensionError("f and g shapes differ");
  return solve_dual(sum_maps(f, g), domain, c, "perturbed");
}

/// Exhaustive re-check of a report against its defining predicate.
inline bool recheck_solutions(const PiecewiseMap& h, const SolutionReport& r, const ConeSpec& c) {
  for (const auto& x : r.solutions)
    for (const auto& y : r.domain.points())
      if (!not_in_neg_interior(c, h.eval(x, y))) return false;
  for (const auto& [x, y] : r.violators)
    if (not_in_neg_interior(c, h.eval(x, y))) return false;
  return true;
}

enum class DiagonalMode { NotNegInterior, InCone };

inline Verdict diagonal_check(const PiecewiseMap& h, const BoxDomain& domain, const ConeSpec& c, DiagonalMode mode) {
  Json bad = Json::array();
  for (const auto& x : domain.points()) {
    const RationalVec v = h.eval(x, x);
    const bool ok = mode == DiagonalMode::InCone ? cone_contains(c, v) : not_in_neg_interior(c, v);
    if (!ok) bad.push_back({{"x", to_json(x)}, {"value", to_json(v)}});
  }
  const std::string m = mode == DiagonalMode::InCone ? "in_cone" : "not_neg_interior";
  if (bad.empty()) return Verdict::make(Status::Holds, "diagonal", {{"kind", "diagonal_exhaustive"}, {"mode", m}});
  return Verdict::make(Status::Fails, "diagonal", {{"kind", "diagonal_violation"}, {"mode", m}, {"violations", bad}});
}

/// core_K K0 for boxes.
struct CoreRegion {
  BoxDomain K;
  BoxDomain K0;

  bool contains(const RationalVec& u) const {
    if (!K0.contains(u)) return false;
    for (std::size_t i = 0; i < u.dim(); ++i) {
      if (u[i] == K0.upper()[i] && K.upper()[i] != u[i]) return false;
      if (u[i] == K0.lower()[i] && K.lower()[i] != u[i]) return false;
    }
    return true;
  }
};

inline CoreRegion core_relative(const BoxDomain& K, const BoxDomain& K0) {
  if (K.dim() != K0.dim()) throw DimensionError("K and K0 dimensions differ");
  if (!K.contains_box(K0)) throw std::invalid_argument("K0 is not contained in K");
  return {K, K0};
}

/// Grid points of K lying in K0; K0's corners must be K grid points.
inline std::vector<RationalVec> aligned_points(const BoxDomain& K, const BoxDomain& K0) {
  if (!K.index_of(K0.lower()) || !K.index_of(K0.upper())) throw std::invalid_argument("K0 is not aligned with the K grid");
  std::vector<RationalVec> out;
  for (const auto& p : K.points())
    if (K0.contains(p)) out.push_back(p);
  return out;
}

inline Verdict coercivity_check(const PiecewiseMap& h, const BoxDomain& K, const BoxDomain& K0, const ConeSpec& c) {
  const CoreRegion core = core_relative(K, K0);
  const auto pts = aligned_points(K, K0);
  std::vector<RationalVec> inner, boundary;
  for (const auto& p : pts) (core.contains(p) ? inner : boundary).push_back(p);
  if (inner.empty()) {
    return Verdict::make(Status::Fails, "coercivity", {{"kind", "empty_core"}, {"K0", K0.str()}},
                         "core of K0 relative to K has no grid point");
  }
  Json assignment = Json::array();
  for (const auto& x : boundary) {
    auto it = std::find_if(inner.begin(), inner.end(),
                           [&](const RationalVec& y0) { return cone_contains(c, -h.eval(x, y0)); });
    if (it == inner.end()) {
      return Verdict::make(Status::Fails, "coercivity",
                           {{"kind", "coercivity_uncovered"}, {"x", to_json(x)}, {"core_points", inner.size()}},
                           "no core point y0 with h(x, y0) in -C");
    }
    assignment.push_back({{"x", to_json(x)}, {"y0", to_json(*it)}});
  }
  return Verdict::make(Status::Holds, "coercivity", {{"kind", "coercivity_assignment"}, {"assignment", assignment}});
}

inline ReplayResult verify_coercivity(const PiecewiseMap& h, const Json& cert, const BoxDomain& K,
                                      const BoxDomain& K0, const ConeSpec& c) {
  const CoreRegion core = core_relative(K, K0);
  std::vector<RationalVec> covered;
  for (const auto& e : cert.at("assignment")) {
    const RationalVec x = vec_from_json(e.at("x")), y0 = vec_from_json(e.at("y0"));
    if (!core.contains(y0) || !cone_contains(c, -h.eval(x, y0))) return ReplayResult::fail("assignment for " + x.str());
    covered.push_back(x);
  }
  for (const auto& p : aligned_points(K, K0))
    if (!core.contains(p) && std::find(covered.begin(), covered.end(), p) == covered.end())
      return ReplayResult::fail("boundary point " + p.str() + " unassigned");
  return {};
}

/// Segment corollary: (i) f(x,x) in C, (ii) a grid z per (t, y) and (iii)
/// the passage t -> 0 along ]x0, y].
inline Verdict segment_corollary_check(const PiecewiseMap& f, const PiecewiseMap& g, const RationalVec& x0,
                                       const ConeSpec& c, const BoxDomain& domain, const std::vector<Rational>& t_grid) {
  for (const auto& t : t_grid)
    if (t <= 0 || t > 1) throw std::invalid_argument("t-grid entries must lie in ]0,1]");
  const Verdict diag = diagonal_check(f, domain, c, DiagonalMode::InCone);
  if (diag.fails()) {
    Verdict v = diag;
    v.check = "segment_corollary";
    v.note = "condition (i) f(x,x) in C fails";
    return v;
  }
  const SolutionReport dual = solve_dual(g, domain, c);
  if (!dual.contains(x0))
    return Verdict::make(Status::Fails, "segment_corollary", {{"kind", "not_dual_solution"}, {"x0", to_json(x0)}});
  const auto pts = domain.points();
  Json per_y = Json::array();
  for (const auto& y : pts) {
    if (y == x0) continue;
    const RationalVec gy = g.eval(x0, y);
    Json zs = Json::array();
    for (const auto& t : t_grid) {
      const RationalVec xt = Rational(1 - t) * x0 + t * y;
      const RationalVec fx = f.eval(xt, y);
      auto it = std::find_if(pts.begin(), pts.end(),
                             [&](const RationalVec& z) { return in_neg_cone(c, g.eval(x0, z) - fx - gy); });
      if (it == pts.end()) {
        return Verdict::make(Status::Fails, "segment_corollary",
                             {{"kind", "segment_no_z"}, {"y", to_json(y)}, {"t", t.get_str()}, {"x_t", to_json(xt)}},
                             "no grid z satisfies condition (ii)");
      }
      zs.push_back({{"t", t.get_str()}, {"z", to_json(*it)}});
    }
    // (iii) along x0 + (y - x0)/(n+1)
    const SequenceSpec seg = SequenceSpec::toward(x0, y - x0);
    auto tail = map_tail(fix_second(f, y), seg);
    const RationalVec direct = f.eval(x0, y) + gy;
    std::string route;
    if (tail && tail->converges() && tail->finite_limit() == f.eval(x0, y)) {
      route = "hemicontinuous";
    } else if (tail && tail->converges() && cone_interior_contains(c, -(tail->finite_limit() + gy))) {
      route = "vacuous";
    } else if (not_in_neg_interior(c, direct)) {
      route = "direct";
    } else {
      return Verdict::make(Status::Fails, "segment_corollary",
                           {{"kind", "segment_limit"}, {"y", to_json(y)}, {"value", to_json(direct)}},
                           "condition (iii) fails");
    }
    per_y.push_back({{"y", to_json(y)}, {"z", zs}, {"route", route}});
  }
  return Verdict::make(Status::Holds, "segment_corollary", {{"kind", "segment_witnesses"}, {"x0", to_json(x0)}, {"per_y", per_y}});
}

/// phi_y(1) - phi_y(t) in C with phi_y(t) = g(x0, x_t) - f(x_t, y), x_t = (1-t)x0 + ty.
inline bool segment_maximum_at_one(const PiecewiseMap& f, const PiecewiseMap& g, const RationalVec& x0,
                                   const RationalVec& y, const ConeSpec& c, const std::vector<Rational>& t_grid) {
  auto phi = [&](const Rational& t) {
    const RationalVec xt = Rational(1 - t) * x0 + t * y;
    return g.eval(x0, xt) - f.eval(xt, y);
  };
  const RationalVec top = phi(1);
  for (const auto& t : t_grid)
    if (!cone_contains(c, top - phi(t))) return false;
  return cone_contains(c, top - phi(0));
}

// ---- existence probe -------------------------------------------------------

struct ExistenceTrace {
  std::string outcome;  ///< solution_exists | diagonal_violation | convexity_violation | membership_violation | inconclusive
  std::optional<RationalVec> solution;
  Json claims = Json::array();

  Json to_json() const {
    Json j{{"kind", "existence_trace"}, {"outcome", outcome}};
    if (solution) j["solution"] = pveq::to_json(*solution);
    j["claims"] = claims;
    return j;
  }
};

namespace detail {

inline std::vector<bool> neg_interior_set(const PiecewiseMap& g, const std::vector<RationalVec>& pts,
                                          const RationalVec& y, const ConeSpec& c) {
  std::vector<bool> m(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) m[i] = cone_interior_contains(c, -g.eval(pts[i], y));
  return m;
}

/// Hat weights: L-infinity distance to the grid complement of each cover set.
inline std::vector<Rational> hat_weights(const RationalVec& x, const std::vector<RationalVec>& pts,
                                         const std::vector<std::vector<bool>>& sets) {
  std::vector<Rational> w;
  for (const auto& s : sets) {
    std::optional<Rational> d;
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (!s[i]) {
        const Rational di = max_distance(x, pts[i]);
        if (!d || di < *d) d = di;
      }
    w.push_back(d.value_or(Rational(1)));
  }
  Rational total = 0;
  for (const auto& v : w) total += v;
  if (total == 0) throw std::logic_error("partition of unity undefined: point outside every cover set");
  for (auto& v : w) v /= total;
  return w;
}

inline RationalVec combine(const std::vector<Rational>& p, const std::vector<RationalVec>& ys) {
  RationalVec out(ys.front().dim());
  for (std::size_t i = 0; i < p.size(); ++i) out += p[i] * ys[i];
  return out;
}

/// Nearest grid point, ties toward the lower grid index.
inline RationalVec snap(const BoxDomain& d, const RationalVec& x) {
  RationalVec out(d.dim());
  for (std::size_t i = 0; i < d.dim(); ++i) {
    if (d.upper()[i] == d.lower()[i]) {
      out[i] = d.lower()[i];
      continue;
    }
    const Rational t = (x[i] - d.lower()[i]) / d.step(i);
    mpz_class k;
    mpz_fdiv_q(k.get_mpz_t(), t.get_num_mpz_t(), t.get_den_mpz_t());
    if (t - Rational(k) > Rational(1, 2)) k += 1;
    if (k < 0) k = 0;
    if (k > d.grid_counts()[i]) k = d.grid_counts()[i];
    out[i] = d.lower()[i] + d.step(i) * Rational(k);
  }
  return out;
}

}  // namespace detail

inline ExistenceTrace existence_probe(const PiecewiseMap& g, const BoxDomain& K0, const ConeSpec& c,
                                      const SamplingBudget& budget = {}) {
  ExistenceTrace tr;
  const SolutionReport dual = solve_dual(g, K0, c);
  if (!dual.solutions.empty()) {
    tr.outcome = "solution_exists";
    tr.solution = dual.solutions.front();
    tr.claims.push_back({{"claim", "dual_solution"}, {"x", to_json(*tr.solution)}});
    return tr;
  }
  tr.claims.push_back({{"claim", "no_dual_solution"}, {"grid", K0.str()}});
  const auto pts = K0.points();
  std::vector<std::vector<bool>> all;
  for (const auto& y : pts) all.push_back(detail::neg_interior_set(g, pts, y, c));
  std::vector<bool> covered(pts.size(), false);
  std::vector<std::size_t> chosen;
  for (;;) {
    std::size_t best = pts.size(), gain = 0;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      std::size_t cnt = 0;
      for (std::size_t i = 0; i < pts.size(); ++i) cnt += all[j][i] && !covered[i];
      if (cnt > gain) {
        gain = cnt;
        best = j;
      }
    }
    if (best == pts.size()) break;
    chosen.push_back(best);
    for (std::size_t i = 0; i < pts.size(); ++i) covered[i] = covered[i] || all[best][i];
  }
  if (std::find(covered.begin(), covered.end(), false) != covered.end())
    throw std::logic_error("cover incomplete although no dual solution exists");
  std::vector<RationalVec> ys;
  std::vector<std::vector<bool>> sets;
  Json cover = Json::array();
  for (auto j : chosen) {
    ys.push_back(pts[j]);
    sets.push_back(all[j]);
    cover.push_back(to_json(pts[j]));
  }
  tr.claims.push_back({{"claim", "cover"}, {"y", cover}});
  auto phi = [&](const RationalVec& x) { return detail::combine(detail::hat_weights(x, pts, sets), ys); };
  RationalVec x = pts.front();
  std::optional<RationalVec> fixed;
  std::vector<RationalVec> seen;
  for (unsigned it = 0; it < budget.tail_depth; ++it) {
    const RationalVec img = detail::snap(K0, phi(x));
    if (img == x) {
      fixed = x;
      break;
    }
    if (std::find(seen.begin(), seen.end(), x) != seen.end()) break;
    seen.push_back(x);
    x = detail::snap(K0, Rational(1, 2) * (x + phi(x)));
  }
  if (!fixed) {
    tr.outcome = "inconclusive";
    tr.claims.push_back({{"claim", "no_fixed_point"}, {"iterations", budget.tail_depth}});
    return tr;
  }
  const auto p = detail::hat_weights(*fixed, pts, sets);
  Json weights = Json::array();
  for (const auto& w : p) weights.push_back(w.get_str());
  tr.claims.push_back({{"claim", "fixed_point"}, {"x", to_json(*fixed)}, {"weights", weights}});
  const RationalVec y0 = detail::combine(p, ys);
  tr.claims.push_back({{"claim", "y0"}, {"y0", to_json(y0)}});
  const RationalVec diag = g.eval(y0, y0);
  if (cone_interior_contains(c, -diag)) {
    tr.outcome = "diagonal_violation";
    tr.claims.push_back({{"claim", "diagonal_in_neg_interior"}, {"x", to_json(y0)}, {"value", to_json(diag)}});
    return tr;
  }
  RationalVec mix(c.dim());
  for (std::size_t i = 0; i < p.size(); ++i) mix += p[i] * g.eval(y0, ys[i]);
  if (!cone_contains(c, mix - diag)) {
    tr.outcome = "convexity_violation";
    tr.claims.push_back({{"claim", "convexity_gap"}, {"x", to_json(y0)}, {"combination", to_json(mix)},
                         {"value", to_json(diag)}});
    return tr;
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0 && !cone_interior_contains(c, -g.eval(y0, ys[i]))) {
      tr.outcome = "membership_violation";
      tr.claims.push_back({{"claim", "outside_cover_set"}, {"x", to_json(y0)}, {"y", to_json(ys[i])}});
      return tr;
    }
  }
  throw std::logic_error("existence probe found no violated hypothesis");
}

/// Re-checks every claim of an existence trace against the exact kernel.
inline ReplayResult verify_existence_trace(const PiecewiseMap& g, const BoxDomain& K0, const ConeSpec& c,
                                           const Json& trace) {
  const auto pts = K0.points();
  std::vector<RationalVec> ys;
  std::vector<std::vector<bool>> sets;
  std::vector<Rational> weights;
  long idx = 0;
  for (const auto& cl : trace.at("claims")) {
    const std::string kind = cl.at("claim").get<std::string>();
    auto fail = [&](const std::string& m) { return ReplayResult::fail(kind + ": " + m, idx); };
    if (kind == "dual_solution") {
      const RationalVec x = vec_from_json(cl.at("x"));
      for (const auto& y : pts)
        if (!not_in_neg_interior(c, g.eval(x, y))) return fail("violated at y = " + y.str());
    } else if (kind == "no_dual_solution") {
      if (!solve_dual(g, K0, c).solutions.empty()) return fail("a dual solution exists");
    } else if (kind == "cover") {
      for (const auto& y : cl.at("y")) {
        ys.push_back(vec_from_json(y));
        sets.push_back(detail::neg_interior_set(g, pts, ys.back(), c));
      }
      for (std::size_t i = 0; i < pts.size(); ++i) {
        bool in = false;
        for (const auto& s : sets) in = in || s[i];
        if (!in) return fail("grid point " + pts[i].str() + " uncovered");
      }
    } else if (kind == "fixed_point") {
      const RationalVec x = vec_from_json(cl.at("x"));
      weights = detail::hat_weights(x, pts, sets);
      std::size_t k = 0;
      for (const auto& w : cl.at("weights"))
        if (k >= weights.size() || rational_from_json(w) != weights[k++]) return fail("weights differ");
      if (!(detail::snap(K0, detail::combine(weights, ys)) == x)) return fail("not a grid fixed point");
    } else if (kind == "y0") {
      if (!(vec_from_json(cl.at("y0")) == detail::combine(weights, ys))) return fail("y0 differs from phi(x)");
    } else if (kind == "diagonal_in_neg_interior") {
      const RationalVec x = vec_from_json(cl.at("x"));
      if (cl.contains("value") && !(vec_from_json(cl.at("value")) == g.eval(x, x))) return fail("stated value differs");
      if (!cone_interior_contains(c, -g.eval(x, x))) return fail("g(y0,y0) not in -int C");
    } else if (kind == "convexity_gap") {
      const RationalVec x = vec_from_json(cl.at("x"));
      RationalVec mix(c.dim());
      for (std::size_t i = 0; i < ys.size(); ++i) mix += weights[i] * g.eval(x, ys[i]);
      if (!(vec_from_json(cl.at("combination")) == mix) || !(vec_from_json(cl.at("value")) == g.eval(x, x)))
        return fail("stated values differ");
      if (cone_contains(c, mix - g.eval(x, x))) return fail("no convexity gap");
    } else if (kind == "outside_cover_set") {
      const RationalVec x = vec_from_json(cl.at("x")), y = vec_from_json(cl.at("y"));
      if (cone_interior_contains(c, -g.eval(x, y))) return fail("point lies in the cover set");
    } else if (kind == "no_fixed_point") {
      // nothing to check: inconclusive outcome
    } else {
      return fail("unknown claim");
    }
    ++idx;
  }
  return {};
}

}  // namespace pveq
