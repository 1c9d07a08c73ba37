#pragma once

#include <string>
#include <vector>

#include "pveq/semicontinuity.hpp"

namespace pveq {

/// Subset of a box grid given by a membership mask, flat grid order.
struct GridSet {
  BoxDomain domain;
  std::vector<bool> mask;
  std::string predicate;

  std::size_t size() const { return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true)); }
  bool contains_index(std::size_t i) const { return mask.at(i); }

  std::vector<RationalVec> members() const {
    std::vector<RationalVec> out;
    for (std::size_t i = 0; i < mask.size(); ++i)
      if (mask[i]) out.push_back(domain.point(i));
    return out;
  }

  /// Indices whose mask differs from a grid neighbour along some axis.
  std::vector<std::size_t> flip_points() const {
    std::vector<std::size_t> out;
    const std::size_t n = domain.dim();
    std::vector<std::size_t> stride(n, 1);
    for (std::size_t a = n - 1; a-- > 0;) stride[a] = stride[a + 1] * (domain.grid_counts()[a + 1] + 1);
    for (std::size_t i = 0; i < mask.size(); ++i) {
      bool flip = false;
      for (std::size_t a = 0; a < n && !flip; ++a) {
        const std::size_t k = (i / stride[a]) % (domain.grid_counts()[a] + 1);
        if (k > 0 && mask[i - stride[a]] != mask[i]) flip = true;
        if (k < domain.grid_counts()[a] && mask[i + stride[a]] != mask[i]) flip = true;
      }
      if (flip) out.push_back(i);
    }
    return out;
  }

  Json to_json() const {
    Json m = Json::array();
    for (const auto& p : members()) m.push_back(pveq::to_json(p));
    return {{"domain", domain.str()}, {"predicate", predicate}, {"size", size()}, {"members", m}};
  }
};

/// G(y) = {x : g(x,y) not in -int C} on the grid.
inline GridSet level_set(const PiecewiseMap& g, const RationalVec& y, const ConeSpec& c, const BoxDomain& domain) {
  if (g.is_unary()) throw MapError("level_set needs a bifunction");
  if (!domain.contains(y)) throw std::invalid_argument("y = " + y.str() + " outside domain");
  GridSet s{domain, std::vector<bool>(domain.point_count(), false),
            "{x : " + g.name() + "(x, " + y.str() + ") not in -int " + c.name() + "}"};
  for (std::size_t i = 0; i < s.mask.size(); ++i) s.mask[i] = not_in_neg_interior(c, g.eval(domain.point(i), y));
  return s;
}

/// Checks that every term of seq from its first index up to the tail depth,
/// and every later term, lies in G(y); on success returns the first index
/// from which the exact tail bound applies.
inline std::optional<long> sequence_eventually_in_level_set(const PiecewiseMap& gy, const SequenceSpec& seq,
                                                            const ConeSpec& c) {
  auto t = map_tail(gy, seq);
  if (!t) return std::nullopt;
  for (const auto& a : c.normals()) {
    RatFunc acc;
    for (std::size_t i = 0; i < t->components.size(); ++i)
      acc = acc + RatFunc::constant(a[i]) * t->components[i];
    if (acc.eventual_sign() < 0) continue;
    const Rational from = std::max(t->valid_from, acc.root_bound());
    mpz_class f;
    mpz_cdiv_q(f.get_mpz_t(), from.get_num_mpz_t(), from.get_den_mpz_t());
    return std::max(seq.first_index(), f.get_si() + 1);
  }
  return std::nullopt;
}

/// Refutes closedness of G(y) with a sequence inside G(y) whose limit is outside.
inline Verdict closedness_probe(const PiecewiseMap& g, const RationalVec& y, const ConeSpec& c,
                                const BoxDomain& domain, const SamplingBudget& budget) {
  const GridSet set = level_set(g, y, c, domain);
  const PiecewiseMap gy = fix_second(g, y).with_domain(domain);
  std::size_t probed = 0;
  for (std::size_t idx : set.flip_points()) {
    if (set.mask[idx]) continue;
    const RationalVec anchor = domain.point(idx);
    for (const auto& s : generate_sequences(anchor, domain, budget)) {
      ++probed;
      auto from = sequence_eventually_in_level_set(gy, s, c);
      if (!from) continue;
      const SequenceSpec shifted(s.coords(), s.limit(), *from);
      bool inside = true;
      for (long n = shifted.first_index(); n < shifted.first_index() + static_cast<long>(budget.tail_depth); ++n)
        inside = inside && not_in_neg_interior(c, gy.eval(shifted.term(n)));
      if (!inside) continue;
      const RationalVec v = gy.eval(anchor);
      return Verdict::make(Status::Fails, "closedness",
                           {{"kind", "closedness_refutation"},
                            {"y", to_json(y)},
                            {"sequence", shifted.to_json()},
                            {"limit", to_json(anchor)},
                            {"value_at_limit", to_json(v)}},
                           "G(y) contains the sequence but not its limit");
    }
  }
  return Verdict::make(Status::ConsistentUpToSampling, "closedness",
                       {{"y", to_json(y)}, {"level_set_size", set.size()}, {"sequences_probed", probed},
                        {"budget", budget.to_json()}});
}

inline ReplayResult verify_closedness_refutation(const PiecewiseMap& g, const Json& cert, const ConeSpec& c,
                                                 const BoxDomain& domain, const SamplingBudget& budget) {
  const RationalVec y = vec_from_json(cert.at("y"));
  const SequenceSpec s = SequenceSpec::from_json(cert.at("sequence"));
  const PiecewiseMap gy = fix_second(g, y).with_domain(domain);
  if (!s.inside(domain)) return ReplayResult::fail("sequence leaves the domain");
  if (!cone_interior_contains(c, -gy.eval(s.limit()))) return ReplayResult::fail("limit lies in G(y)");
  auto from = sequence_eventually_in_level_set(gy, s, c);
  if (!from || *from > s.first_index()) return ReplayResult::fail("tail not inside G(y) from the first index");
  for (long n = s.first_index(); n < s.first_index() + static_cast<long>(budget.tail_depth); ++n)
    if (!not_in_neg_interior(c, gy.eval(s.term(n)))) return ReplayResult::fail("term outside G(y)", n);
  return {};
}

}  // namespace pveq
