#include <random>
#include <set>

#include <gtest/gtest.h>

#include "pveq/catalog.hpp"
#include "pveq/run.hpp"

using namespace pveq;
using namespace pveq::catalog;

namespace {

RationalVec v(std::initializer_list<std::string_view> s) { return RationalVec::parse(s); }

const ConeSpec kIce = ConeSpec::ice_cream2();
const ConeSpec kO2 = ConeSpec::orthant(2);
const ConeSpec kO1 = ConeSpec::orthant(1);
const SamplingBudget kBudget;

PiecewiseMap ice_at(const char* y) { return fix_second(make(CatalogId::IceCreamG), v({y})); }

struct CatSlice {
  std::string label;
  PiecewiseMap h;
  ConeSpec cone;
  std::set<Rational> jumps;      ///< grid points where h is not continuous
  std::set<Rational> ausc_true;  ///< discontinuity points that are still a-usc
};

/// Every unary map the catalog gives rise to, with its analytic continuity data.
std::vector<CatSlice> catalog_slices() {
  std::vector<CatSlice> out;
  auto q = [](const char* s) { return parse_rational(s); };
  out.push_back({"QUSC_NOT_AUSC", make(CatalogId::QuscNotAusc), kO2, {q("0")}, {}});
  out.push_back({"WUSC_NOT_QUSC", make(CatalogId::WuscNotQusc), kIce, {q("1/2")}, {}});
  out.push_back({"REAL_WUSC", make(CatalogId::RealWusc), kO1, {q("0")}, {}});
  struct Bi {
    CatalogId id;
    std::set<Rational> x_jumps, x_ausc;
  };
  const std::vector<Bi> bis = {{CatalogId::IceCreamG, {q("1/2")}, {q("1/2")}},
                               {CatalogId::LevelSetQusc, {q("0")}, {}},
                               {CatalogId::LevelSetWusc, {q("-1"), q("0")}, {}},
                               {CatalogId::PhiPsiF, {}, {}},
                               {CatalogId::PhiPsiG, {}, {}},
                               {CatalogId::B1SemicontF, {q("-1/2")}, {}},
                               {CatalogId::B1SemicontG, {}, {}}};
  for (const auto& b : bis) {
    const PiecewiseMap g = make(b.id);
    for (const char* ys : {"0", "1/2"}) {
      const RationalVec y = v({ys});
      if (!g.domain().contains(y)) continue;
      const std::string base = std::string(id_name(b.id)) + "[y=" + ys + "]";
      out.push_back({base, fix_second(g, y), default_cone(b.id), b.x_jumps, b.x_ausc});
      out.push_back({std::string(id_name(b.id)) + "[x=" + ys + "]", fix_first(g, y), default_cone(b.id), {}, {}});
    }
  }
  return out;
}

/// Every re-verifiable certificate in v replays.
void expect_replays(const Verdict& v, const PiecewiseMap& h, const ConeSpec& c, const std::string& where) {
  VerifyOutcome out;
  pveq::detail::replay_semicont_verdict(v.to_json(), h, c, kBudget, where, out);
  for (const auto& m : out.messages) ADD_FAILURE() << m;
  if (v.holds() || v.fails()) {
    EXPECT_GT(out.replayed, 0u) << where << " " << v.to_json().dump();
  }
}

}  // namespace

TEST(Sequences, Generation) {
  SamplingBudget b;
  const auto near_half = generate_sequences(v({"1/2"}), BoxDomain::interval(0, 1, 8), b);
  const SequenceSpec expected = SequenceSpec::toward(v({"1/2"}), v({"1/2"}));
  EXPECT_EQ(near_half.front(), expected);
  EXPECT_EQ(expected.term(0), v({"1"}));
  EXPECT_EQ(expected.term(3), v({"5/8"}));
  const auto at_zero = generate_sequences(v({"0"}), BoxDomain::interval(-1, 1, 8), b);
  EXPECT_NE(std::find(at_zero.begin(), at_zero.end(), SequenceSpec::toward(v({"0"}), v({"1"}))), at_zero.end());
  EXPECT_NE(std::find(at_zero.begin(), at_zero.end(), SequenceSpec::toward(v({"0"}), v({"-1"}))), at_zero.end());
  b.directions = 0;
  EXPECT_TRUE(generate_sequences(v({"0"}), BoxDomain::interval(-1, 1, 8), b).empty());
}

TEST(Sequences, RejectsBadSpecs) {
  EXPECT_THROW(SequenceSpec({Moebius{1, 0, 0, 1}}, v({"0"})), SequenceError);
  EXPECT_THROW(SequenceSpec({Moebius{1, 0, 2, 1}}, v({"1"})), SequenceError);
  EXPECT_THROW(SequenceSpec({Moebius::constant(0)}, v({"0"})), SequenceError);
}

TEST(Cusc, IceCreamJumpPoint) {
  const PiecewiseMap g = ice_at("1/2");
  // For a fixed k in int C the residual limit stays in int C, so no fixed-k
  // refutation exists; the refuting family needs k to depend on eps.
  const Verdict c = cusc_check(g, v({"1/2"}), kIce, kBudget);
  EXPECT_EQ(c.status, Status::ConsistentUpToSampling);
  std::vector<Rational> eps;
  for (int d = 2; d <= 1024; d *= 2) eps.push_back(Rational(1, d));
  const auto fam = replay_epsilon_family(g, v({"1/2"}), kIce, v({"-1", "1"}), v({"1", "0"}), v({"1/2"}), eps);
  EXPECT_TRUE(fam.memberships_ok) << fam.message;
  EXPECT_FALSE(fam.uniform);
  for (const auto& r : fam.residuals) {
    EXPECT_EQ(r, v({"-3/2", "3/2"}));
    EXPECT_FALSE(cone_interior_contains(kIce, r));
  }
}

TEST(Cusc, ContinuousAndConstant) {
  EXPECT_EQ(cusc_check(ice_at("1/2"), v({"1/4"}), kIce, kBudget).status, Status::ConsistentUpToSampling);
  const PiecewiseMap k = constant_map(Arity::Unary, BoxDomain::interval(0, 1, 8), v({"1", "2"}));
  EXPECT_EQ(cusc_check(k, v({"1/2"}), kIce, kBudget).status, Status::ConsistentUpToSampling);
}

TEST(Cusc, JumpUpIsRefuted) {
  // h = 0 for x <= 0 and (1, 1) beyond: k = (1/2, 1/2) fails near 0 from the right
  const BoxDomain d = BoxDomain::interval(-1, 1, 8);
  const Expr x = Expr::x();
  const PiecewiseMap h{"STEP", Arity::Unary, d, 2,
                       {{{{{x, Cmp::Le, Rational(0)}}}, {Expr::constant(0), Expr::constant(0)}},
                        {{{{x, Cmp::Gt, Rational(0)}}}, {Expr::constant(1), Expr::constant(1)}}}};
  const Verdict c = cusc_check(h, v({"0"}), kO2, kBudget);
  ASSERT_TRUE(c.fails());
  EXPECT_TRUE(verify_neighbourhood_refutation(h, c.certificate, kO2).ok);
}

TEST(AuscAlong, IceCreamFromTheRightWithStatedWitness) {
  const PiecewiseMap g = ice_at("1/2");
  const SequenceSpec right = SequenceSpec::toward(v({"1/2"}), v({"1/2"}));
  const Verdict a = ausc_along(g, v({"1/2"}), right, kIce, kBudget);
  ASSERT_TRUE(a.holds());
  expect_replays(a, g, kIce, "ice cream right");
  const Expr x = Expr::x();
  const WitnessSpec w = WitnessSpec::of_sequence({x + Expr::constant(Rational(1, 2)), x}, v({"1", "1/2"}));
  EXPECT_TRUE(verify_ausc_witness(g, v({"1/2"}), right, w, kIce, kBudget).ok);
  const SequenceSpec left = SequenceSpec::toward(v({"1/2"}), v({"-1/2"}));
  EXPECT_TRUE(verify_ausc_witness(g, v({"1/2"}), left, w, kIce, kBudget).ok);
}

TEST(AuscAlong, QuscNotAuscObstruction) {
  const PiecewiseMap g = make(CatalogId::QuscNotAusc);
  const Verdict a = ausc_along(g, v({"0"}), SequenceSpec::toward(v({"0"}), v({"1"})), kO2, kBudget);
  ASSERT_TRUE(a.fails());
  EXPECT_EQ(a.certificate.at("normal"), to_json(v({"1", "0"})));
  EXPECT_EQ(a.certificate.at("tail_limit"), "1");
  EXPECT_EQ(a.certificate.at("bound"), "0");
  expect_replays(a, g, kO2, "qusc_not_ausc");
}

TEST(AuscAlong, ConstantMapUsesValueAtX0) {
  const PiecewiseMap k = constant_map(Arity::Unary, BoxDomain::interval(0, 1, 8), v({"1", "2"}));
  const Verdict a = ausc_along(k, v({"1/2"}), SequenceSpec::toward(v({"1/2"}), v({"1/4"})), kIce, kBudget);
  ASSERT_TRUE(a.holds());
  EXPECT_EQ(a.certificate.at("witness").at("limit"), to_json(v({"1", "2"})));
}

TEST(AuscAlong, UnboundedBelowUsesClampedWitness) {
  const PiecewiseMap g = fix_second(make(CatalogId::LevelSetQusc), v({"0"}));
  const Verdict a = ausc_along(g, v({"0"}), SequenceSpec::toward(v({"0"}), v({"1"})), kO2, kBudget);
  ASSERT_TRUE(a.fails());  // first coordinate tends to 0 > -1
  const Verdict b = ausc_along(fix_second(make(CatalogId::LevelSetQusc), v({"1"})), v({"1/2"}),
                               SequenceSpec::toward(v({"1/2"}), v({"1/2"})), kO2, kBudget);
  ASSERT_TRUE(b.holds());
}

TEST(Ausc, CatalogVerdicts) {
  EXPECT_TRUE(ausc_check(make(CatalogId::QuscNotAusc), v({"0"}), kO2, kBudget).fails());
  const Verdict ice = ausc_check(ice_at("1/2"), v({"1/2"}), kIce, kBudget);
  EXPECT_EQ(ice.status, Status::ConsistentUpToSampling);
  for (const auto& p : ice.certificate.at("per_sequence")) EXPECT_EQ(p.at("status"), "Holds");
  EXPECT_TRUE(ausc_check(ice_at("1/2"), v({"1/4"}), kIce, kBudget).holds());
  EXPECT_TRUE(ausc_check(fix_second(make(CatalogId::B1SemicontF), v({"0"})), v({"-1/2"}), kO2, kBudget).fails());
}

TEST(Qusc, CatalogVerdicts) {
  const Verdict q = qusc_check(make(CatalogId::WuscNotQusc), v({"1/2"}), kIce, kBudget);
  ASSERT_TRUE(q.fails());
  EXPECT_EQ(q.certificate.at("k"), to_json(v({"-1", "-1"})));
  EXPECT_TRUE(verify_neighbourhood_refutation(make(CatalogId::WuscNotQusc), q.certificate, kIce).ok);
  EXPECT_EQ(qusc_check(fix_second(make(CatalogId::LevelSetQusc), v({"0"})), v({"0"}), kO2, kBudget).status,
            Status::ConsistentUpToSampling);
  const PiecewiseMap k = constant_map(Arity::Unary, BoxDomain::interval(0, 1, 8), v({"1", "2"}));
  EXPECT_EQ(qusc_check(k, v({"1/2"}), kIce, kBudget).status, Status::ConsistentUpToSampling);
}

TEST(Wusc, CatalogVerdicts) {
  const PiecewiseMap w = make(CatalogId::WuscNotQusc);
  const SequenceSpec xs({Moebius{1, 0, 2, 1}}, v({"1/2"}), 1);
  const Verdict a = wusc_check(w, v({"1/2"}), kIce, kBudget, {xs});
  ASSERT_TRUE(a.holds());
  EXPECT_EQ(SequenceSpec::from_json(a.certificate.at("sequence")), xs);
  const Expr x = Expr::x();
  EXPECT_TRUE(verify_ausc_witness(w, v({"1/2"}), xs, WitnessSpec::of_sequence({x, Expr::constant(2) * x}, v({"1/2", "1"})),
                                  kIce, kBudget)
                  .ok);

  const Verdict b = wusc_check(make(CatalogId::QuscNotAusc), v({"0"}), kO2, kBudget);
  ASSERT_TRUE(b.fails());
  EXPECT_EQ(b.certificate.at("kind"), "wusc_bound");
  EXPECT_TRUE(verify_wusc_bound(make(CatalogId::QuscNotAusc), b.certificate, kO2).ok);

  const PiecewiseMap r = make(CatalogId::RealWusc);
  const SequenceSpec left = SequenceSpec::toward(v({"0"}), v({"-1"}));
  ASSERT_TRUE(wusc_check(r, v({"0"}), kO1, kBudget, {left}).holds());
  EXPECT_TRUE(verify_ausc_witness(r, v({"0"}), left, WitnessSpec::of_sequence({-x}, v({"0"})), kO1, kBudget).ok);
}

TEST(Ousc, Certificates) {
  const BoxDomain d = BoxDomain::interval(-1, 1, 8);
  const SequenceSpec xs = SequenceSpec::toward(v({"0"}), v({"1"}));
  const SequenceSpec zero = SequenceSpec::constant(v({"0"}));
  const PiecewiseMap k = constant_map(Arity::Unary, d, v({"3"}));
  EXPECT_TRUE(ousc_verify_certificate(k, v({"0"}), kO1, xs, zero, zero, kBudget));
  // h(x) = -x: h(x_n) = -1/(n+1) increases towards h(0) = 0
  const PiecewiseMap neg{"NEG", Arity::Unary, d, 1, {{{}, {-Expr::x()}}}};
  EXPECT_TRUE(ousc_verify_certificate(neg, v({"0"}), kO1, xs, zero, zero, kBudget));
  // h(x) = x decreases along x_n: the monotonicity clause breaks
  const PiecewiseMap id{"ID", Arity::Unary, d, 1, {{{}, {Expr::x()}}}};
  EXPECT_FALSE(ousc_verify_certificate(id, v({"0"}), kO1, xs, zero, zero, kBudget));
}

TEST(SemicontinuityProperties, ImplicationChainOverCatalog) {
  std::size_t checked = 0;
  for (const auto& s : catalog_slices()) {
    for (const auto& x0 : s.h.domain().points()) {
      const bool continuous = !s.jumps.count(x0[0]);
      const bool ausc_truth = continuous || s.ausc_true.count(x0[0]);
      const std::string where = s.label + " at " + x0.str();
      if (continuous) {
        const Verdict a = ausc_check(s.h, x0, s.cone, kBudget);
        EXPECT_FALSE(a.fails()) << where;
        expect_replays(a, s.h, s.cone, where);
      }
      if (ausc_truth) {
        const Verdict q = qusc_check(s.h, x0, s.cone, kBudget);
        EXPECT_FALSE(q.fails()) << where;
        const Verdict w = wusc_check(s.h, x0, s.cone, kBudget);
        EXPECT_FALSE(w.fails()) << where;
        expect_replays(w, s.h, s.cone, where);
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 200u);
}

TEST(SemicontinuityProperties, FailuresReplayOverCatalog) {
  for (const auto& s : catalog_slices()) {
    for (const Rational& j : s.jumps) {
      const RationalVec x0{j};
      for (const Verdict& v : {ausc_check(s.h, x0, s.cone, kBudget), wusc_check(s.h, x0, s.cone, kBudget)})
        expect_replays(v, s.h, s.cone, s.label + " at " + x0.str());
      const Verdict q = qusc_check(s.h, x0, s.cone, kBudget);
      if (q.fails()) {
        EXPECT_TRUE(verify_neighbourhood_refutation(s.h, q.certificate, s.cone).ok) << s.label;
      }
    }
  }
}

TEST(SemicontinuityProperties, Deterministic) {
  for (const auto& s : catalog_slices()) {
    const RationalVec x0 = s.jumps.empty() ? s.h.domain().point(4) : RationalVec{*s.jumps.begin()};
    EXPECT_EQ(ausc_check(s.h, x0, s.cone, kBudget).to_json(), ausc_check(s.h, x0, s.cone, kBudget).to_json());
    EXPECT_EQ(cusc_check(s.h, x0, s.cone, kBudget).to_json(), cusc_check(s.h, x0, s.cone, kBudget).to_json());
    EXPECT_EQ(qusc_check(s.h, x0, s.cone, kBudget).to_json(), qusc_check(s.h, x0, s.cone, kBudget).to_json());
    EXPECT_EQ(wusc_check(s.h, x0, s.cone, kBudget).to_json(), wusc_check(s.h, x0, s.cone, kBudget).to_json());
  }
}

namespace {

/// Random piecewise-affine real map on [-1, 1] with two breakpoints and
/// isolated values at them.
PiecewiseMap random_real_map(std::mt19937& rng, int index, std::vector<Rational>& breaks) {
  std::uniform_int_distribution<int> grid(1, 15), coef(-4, 4);
  int a = grid(rng), b = grid(rng);
  while (b == a) b = grid(rng);
  if (a > b) std::swap(a, b);
  const Rational b1 = ratio(a - 8, 8), b2 = ratio(b - 8, 8);
  breaks = {b1, b2};
  const Expr x = Expr::x();
  auto affine = [&] { return Expr::constant(ratio(coef(rng), 2)) * x + Expr::constant(ratio(coef(rng), 2)); };
  auto value = [&] { return Expr::constant(ratio(coef(rng), 2)); };
  auto cmp = [&](Cmp op, const Rational& r) { return Comparison{x, op, r}; };
  std::vector<Piece> p;
  p.push_back({Region{{cmp(Cmp::Lt, b1)}}, {affine()}});
  p.push_back({Region{{cmp(Cmp::Eq, b1)}}, {value()}});
  p.push_back({Region{{cmp(Cmp::Gt, b1), cmp(Cmp::Lt, b2)}}, {affine()}});
  p.push_back({Region{{cmp(Cmp::Eq, b2)}}, {value()}});
  p.push_back({Region{{cmp(Cmp::Gt, b2)}}, {affine()}});
  return {"R" + std::to_string(index), Arity::Unary, BoxDomain::interval(-1, 1, 8), 1, std::move(p)};
}

/// limsup of h(x_n) > h(x0), read off a far sampled window.
bool limsup_exceeds(const PiecewiseMap& h, const RationalVec& x0, const SequenceSpec& s) {
  Rational sup = h.eval(s.term(1 << 16))[0];
  for (long n = (1 << 16) + 1; n < (1 << 16) + 64; ++n) sup = std::max(sup, h.eval(s.term(n))[0]);
  return sup > h.eval(x0)[0] + Rational(1, 1000);
}

}  // namespace

TEST(SemicontinuityProperties, RealValuedAuscMatchesLimsup) {
  std::mt19937 rng(7031);
  std::size_t sequences = 0, failures = 0;
  for (int i = 0; i < 20; ++i) {
    std::vector<Rational> breaks;
    const PiecewiseMap h = random_real_map(rng, i, breaks);
    ASSERT_EQ(h.validate_partition(), std::nullopt) << h.str();
    for (const RationalVec& x0 : {RationalVec{breaks[0]}, RationalVec{breaks[1]}, RationalVec{Rational(0)}}) {
      for (const auto& s : generate_sequences(x0, h.domain(), kBudget)) {
        const bool fails = ausc_along(h, x0, s, kO1, kBudget).fails();
        EXPECT_EQ(fails, limsup_exceeds(h, x0, s)) << h.str() << " at " << x0 << " along " << s.to_json().dump();
        ++sequences;
        failures += fails;
      }
    }
  }
  EXPECT_GT(failures, 0u);
  EXPECT_LT(failures, sequences);
}

TEST(SemicontinuityProperties, AuscWitnessesAddUp) {
  std::size_t pairs = 0;
  const auto slices = catalog_slices();
  for (std::size_t i = 0; i < slices.size(); ++i) {
    for (std::size_t j = i; j < slices.size(); ++j) {
      const CatSlice &p = slices[i], &q = slices[j];
      if (!(p.h.domain() == q.h.domain()) || p.h.codomain_dim() != q.h.codomain_dim() || !(p.cone == q.cone)) continue;
      const PiecewiseMap sum = sum_maps(p.h, q.h);
      for (std::size_t k = 0; k < p.h.domain().point_count(); k += 2) {
        const RationalVec x0 = p.h.domain().point(k);
        for (const auto& s : generate_sequences(x0, p.h.domain(), kBudget)) {
          const Verdict a = ausc_along(p.h, x0, s, p.cone, kBudget), b = ausc_along(q.h, x0, s, q.cone, kBudget);
          if (!a.holds() || !b.holds()) continue;
          const WitnessSpec wa = WitnessSpec::from_json(a.certificate.at("witness"));
          const WitnessSpec wb = WitnessSpec::from_json(b.certificate.at("witness"));
          ASSERT_TRUE(cone_contains(p.cone, sum.eval(x0) - (wa.limit + wb.limit)));
          for (long n = s.first_index(); n < s.first_index() + 24; ++n) {
            const RationalVec z = witness_term(wa, p.h, s, p.cone, n) + witness_term(wb, q.h, s, q.cone, n);
            ASSERT_TRUE(in_neg_cone(p.cone, sum.eval(s.term(n)) - z)) << p.label << " + " << q.label << " n=" << n;
          }
          ++pairs;
        }
      }
    }
  }
  EXPECT_GT(pairs, 100u);
}
