#pragma once

#include <string>
#include <vector>

#include "pveq/catalog.hpp"
#include "pveq/semicontinuity.hpp"

namespace pveq {

/// Brute-force witness search along one sequence, using only pointwise
/// evaluation: grid candidates z with h(x0) - z in C, scored by the least
/// shift along e putting z into h(x_n) + C at two far-apart tail indices.
/// Feasible when the far score is at most tau and not larger than the near one.
struct WitnessGridOracle {
  Rational radius = 2;
  unsigned density = 4;
  long near_index = 1L << 10;
  long far_index = 1L << 20;
  Rational tau = Rational(1, 1000);

  bool feasible(const PiecewiseMap& h, const RationalVec& x0, const SequenceSpec& seq, const ConeSpec& c) const {
    const RationalVec hx0 = h.eval(x0);
    const RationalVec e = *cone_validate(c).witness;
    const RationalVec h_near = h.eval(seq.term(near_index));
    const RationalVec h_far = h.eval(seq.term(far_index));
    auto score = [&](const RationalVec& hz, const RationalVec& z) {
      Rational t = 0;
      for (const auto& a : c.normals()) t = std::max(t, Rational((dot(a, hz) - dot(a, z)) / dot(a, e)));
      return t;
    };
    const std::size_t m = hx0.dim();
    const long per_axis = 2 * static_cast<long>(mpz_class(radius * density).get_si()) + 1;
    std::vector<long> idx(m, 0);
    const Rational step(1, density);
    for (;;) {
      RationalVec z(m);
      for (std::size_t i = 0; i < m; ++i) z[i] = hx0[i] - radius + step * idx[i];
      if (cone_contains(c, hx0 - z)) {
        const Rational far = score(h_far, z);
        if (far <= tau && far <= score(h_near, z)) return true;
      }
      std::size_t i = m;
      while (i > 0) {
        --i;
        if (++idx[i] < per_axis) break;
        idx[i] = 0;
        if (i == 0) return false;
      }
    }
  }
};

struct GateCase {
  std::string label;
  PiecewiseMap map;
  RationalVec x0;
  ConeSpec cone;
};

/// Unary slices of the catalog at a spread of base points.
inline std::vector<GateCase> gate_cases() {
  using namespace catalog;
  std::vector<GateCase> out;
  auto pts = [](std::initializer_list<std::string_view> s) {
    std::vector<RationalVec> v;
    for (auto q : s) v.push_back(RationalVec::parse({q}));
    return v;
  };
  auto add = [&](const std::string& label, const PiecewiseMap& h, const std::vector<RationalVec>& xs,
                 const ConeSpec& c) {
    for (const auto& x : xs) out.push_back({label + "@" + x.str(), h, x, c});
  };
  for (auto id : kAllIds) {
    auto f = make(id);
    const ConeSpec c = default_cone(id);
    const BoxDomain& d = f.domain();
    std::vector<RationalVec> xs = {d.lower(), d.upper()};
    for (std::size_t k = 1; k < d.point_count(); k += 2) xs.push_back(d.point(k));
    if (f.is_unary()) {
      add(std::string(id_name(id)), f, xs, c);
      continue;
    }
    for (auto y : pts({"0", "1/2"})) {
      if (!d.contains(y)) continue;
      add(std::string(id_name(id)) + "[y=" + y.str() + "]", fix_second(f, y), xs, c);
      add(std::string(id_name(id)) + "[x=" + y.str() + "]", fix_first(f, y), xs, c);
    }
  }
  add("EX_LEVELSET_WUSC[y=0]", fix_second(make(CatalogId::LevelSetWusc), RationalVec::parse({"0"})),
      pts({"-1", "0", "-1/2"}), default_cone(CatalogId::LevelSetWusc));
  return out;
}

struct GateReport {
  bool passed = true;
  std::size_t sequences = 0;
  std::vector<std::string> disagreements;
};

/// The limit-based a-usc reduction is trusted only if this passes.
inline GateReport run_reduction_gate(const SamplingBudget& budget = {}) {
  GateReport r;
  const WitnessGridOracle oracle;
  for (const auto& gc : gate_cases()) {
    for (const auto& s : generate_sequences(gc.x0, gc.map.domain(), budget)) {
      ++r.sequences;
      const Verdict v = ausc_along(gc.map, gc.x0, s, gc.cone, budget);
      const bool brute = oracle.feasible(gc.map, gc.x0, s, gc.cone);
      if (v.consistent() || v.holds() != brute) {
        r.passed = false;
        r.disagreements.push_back(gc.label + " along " + s.str() + ": reduction " + to_string(v.status) +
                                  ", oracle " + (brute ? "feasible" : "infeasible"));
      }
    }
  }
  return r;
}

}  // namespace pveq
