#include <gtest/gtest.h>

#include "pveq/catalog.hpp"
#include "pveq/levelsets.hpp"

using namespace pveq;
using namespace pveq::catalog;

namespace {

RationalVec v(std::initializer_list<std::string_view> s) { return RationalVec::parse(s); }

const ConeSpec kO2 = ConeSpec::orthant(2);
const SamplingBudget kBudget;

std::vector<RationalVec> expected_members(const BoxDomain& d, auto pred) {
  std::vector<RationalVec> out;
  for (const auto& p : d.points())
    if (pred(p[0])) out.push_back(p);
  return out;
}

}  // namespace

TEST(LevelSet, QuscCounterexampleIsHalfOpen) {
  const BoxDomain d = BoxDomain::interval(-1, 1, 8);
  const GridSet s = level_set(make(CatalogId::LevelSetQusc), v({"0"}), kO2, d);
  EXPECT_EQ(s.members(), expected_members(d, [](const Rational& x) { return x > 0; }));
  EXPECT_EQ(s.mask.size(), d.point_count());
}

TEST(LevelSet, WuscCounterexampleIsOpenAtMinusOne) {
  const BoxDomain d = BoxDomain::interval(-2, 2, 8);
  const GridSet s = level_set(make(CatalogId::LevelSetWusc), v({"0"}), kO2, d);
  EXPECT_EQ(s.members(), expected_members(d, [](const Rational& x) { return x > -1; }));
}

TEST(LevelSet, ZeroMapGivesEverything) {
  const BoxDomain d = BoxDomain::interval(-1, 1, 8);
  const PiecewiseMap z = constant_map(Arity::Bifunction, d, v({"0", "0"}));
  EXPECT_EQ(level_set(z, v({"1/2"}), kO2, d).size(), d.point_count());
  EXPECT_EQ(level_set(z, v({"1/2"}), ConeSpec::ice_cream2(), d).size(), d.point_count());
}

TEST(LevelSet, Errors) {
  const BoxDomain d = BoxDomain::interval(-1, 1, 8);
  EXPECT_THROW(level_set(make(CatalogId::LevelSetQusc), v({"3"}), kO2, d), std::invalid_argument);
  EXPECT_THROW(level_set(make(CatalogId::QuscNotAusc), v({"0"}), kO2, d), MapError);
}

TEST(LevelSet, Regeneration) {
  for (CatalogId id : {CatalogId::LevelSetQusc, CatalogId::LevelSetWusc, CatalogId::IceCreamG, CatalogId::PhiPsiG}) {
    const PiecewiseMap g = make(id);
    const ConeSpec c = default_cone(id);
    for (const auto& y : g.domain().points()) {
      const GridSet a = level_set(g, y, c, g.domain());
      const GridSet b = level_set(make(id), y, c, g.domain());
      EXPECT_EQ(a.mask, b.mask);
      EXPECT_EQ(a.to_json(), b.to_json());
      for (std::size_t i = 0; i < a.mask.size(); ++i)
        EXPECT_EQ(a.mask[i], not_in_neg_interior(c, g.eval(g.domain().point(i), y)));
    }
  }
}

TEST(Closedness, QuscCounterexample) {
  const PiecewiseMap g = make(CatalogId::LevelSetQusc);
  const Verdict r = closedness_probe(g, v({"0"}), kO2, g.domain(), kBudget);
  ASSERT_TRUE(r.fails());
  EXPECT_EQ(r.certificate.at("limit"), to_json(v({"0"})));
  EXPECT_EQ(r.certificate.at("value_at_limit"), to_json(v({"-1", "-1"})));
  const SequenceSpec s = SequenceSpec::from_json(r.certificate.at("sequence"));
  EXPECT_EQ(s.coords(), SequenceSpec::toward(v({"0"}), v({"1"})).coords());
  EXPECT_TRUE(verify_closedness_refutation(g, r.certificate, kO2, g.domain(), kBudget).ok);
}

TEST(Closedness, WuscCounterexample) {
  const PiecewiseMap g = make(CatalogId::LevelSetWusc);
  const Verdict r = closedness_probe(g, v({"0"}), kO2, g.domain(), kBudget);
  ASSERT_TRUE(r.fails());
  EXPECT_EQ(r.certificate.at("limit"), to_json(v({"-1"})));
  const SequenceSpec s = SequenceSpec::from_json(r.certificate.at("sequence"));
  EXPECT_EQ(s.coords(), SequenceSpec::toward(v({"-1"}), v({"1"})).coords());
  EXPECT_TRUE(verify_closedness_refutation(g, r.certificate, kO2, g.domain(), kBudget).ok);
}

TEST(Closedness, IceCreamIsClosedEverywhere) {
  const PiecewiseMap g = make(CatalogId::IceCreamG);
  for (const auto& y : g.domain().points())
    EXPECT_EQ(closedness_probe(g, y, ConeSpec::ice_cream2(), g.domain(), kBudget).status, Status::ConsistentUpToSampling)
        << y;
}

TEST(Closedness, TamperedCertificateIsRejected) {
  const PiecewiseMap g = make(CatalogId::LevelSetQusc);
  Json cert = closedness_probe(g, v({"0"}), kO2, g.domain(), kBudget).certificate;
  Json moved = cert;
  moved["sequence"] = SequenceSpec::toward(v({"0"}), v({"-1"})).to_json();
  EXPECT_FALSE(verify_closedness_refutation(g, moved, kO2, g.domain(), kBudget).ok);
  Json elsewhere = cert;
  elsewhere["sequence"] = SequenceSpec::toward(v({"1/2"}), v({"1/2"})).to_json();
  EXPECT_FALSE(verify_closedness_refutation(g, elsewhere, kO2, g.domain(), kBudget).ok);
}

TEST(LevelSetProperties, LemmaConsistencyOverCatalog) {
  std::size_t premises = 0;
  for (CatalogId id : kAllIds) {
    const PiecewiseMap g = make(id);
    if (g.is_unary()) continue;
    const ConeSpec c = default_cone(id);
    for (const auto& y : g.domain().points()) {
      const PiecewiseMap gy = fix_second(g, y);
      bool ausc_everywhere = true;
      for (const auto& x : g.domain().points()) ausc_everywhere = ausc_everywhere && !ausc_check(gy, x, c, kBudget).fails();
      if (!ausc_everywhere) continue;
      ++premises;
      EXPECT_FALSE(closedness_probe(g, y, c, g.domain(), kBudget).fails()) << id_name(id) << " y=" << y;
    }
  }
  EXPECT_GT(premises, 20u);
}

TEST(LevelSetProperties, WeakerNotionsDoNotGiveClosedness) {
  const PiecewiseMap q = make(CatalogId::LevelSetQusc);
  EXPECT_TRUE(closedness_probe(q, v({"0"}), kO2, q.domain(), kBudget).fails());
  EXPECT_FALSE(qusc_check(fix_second(q, v({"0"})), v({"0"}), kO2, kBudget).fails());

  const PiecewiseMap w = make(CatalogId::LevelSetWusc);
  EXPECT_TRUE(closedness_probe(w, v({"0"}), kO2, w.domain(), kBudget).fails());
  EXPECT_FALSE(wusc_check(fix_second(w, v({"0"})), v({"-1"}), kO2, kBudget).fails());
}
