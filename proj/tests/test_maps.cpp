#include <map>

#include <gtest/gtest.h>

#include "pveq/catalog.hpp"

using namespace pveq;
using namespace pveq::catalog;

namespace {

RationalVec v(std::initializer_list<std::string_view> s) { return RationalVec::parse(s); }

struct Spot {
  std::string x, y;
  std::vector<std::string> value;
};

const std::map<CatalogId, std::vector<Spot>>& spot_table() {
  static const std::map<CatalogId, std::vector<Spot>> t = {
    {CatalogId::IceCreamG, {{"0", "1/2", {"1/2", "0"}},
      {"1/4", "0", {"1/4", "1/4"}},
      {"1/2", "1/2", {"1", "1/2"}},
      {"3/4", "0", {"3/2", "0"}},
      {"1", "1/2", {"5/2", "0"}}}},
    {CatalogId::QuscNotAusc, {{"-1", "", {"1", "-1"}},
      {"-1/2", "", {"1", "-2"}},
      {"0", "", {"0", "0"}},
      {"1/4", "", {"1", "-4"}},
      {"1", "", {"1", "-1"}}}},
    {CatalogId::WuscNotQusc, {{"0", "", {"0", "0"}},
      {"1/4", "", {"1/4", "1/2"}},
      {"1/2", "", {"1/2", "1"}},
      {"5/8", "", {"5/4", "5/4"}},
      {"1", "", {"2", "2"}}}},
    {CatalogId::LevelSetQusc, {{"-1", "0", {"-1", "-1"}},
      {"-1/4", "1/2", {"1/4", "-7/2"}},
      {"0", "0", {"-1", "-1"}},
      {"1/4", "1/2", {"3/4", "-7/2"}},
      {"1", "0", {"1", "-1"}}}},
    {CatalogId::LevelSetWusc, {{"-2", "0", {"-1", "-1"}},
      {"-1", "1", {"-1", "0"}},
      {"-1/2", "0", {"0", "-1"}},
      {"0", "1", {"0", "0"}},
      {"3/2", "0", {"1", "-1"}}}},
    {CatalogId::RealWusc, {{"-1", "", {"-1"}},
      {"-1/8", "", {"-1/8"}},
      {"0", "", {"1/2"}},
      {"1/8", "", {"9/8"}},
      {"1", "", {"2"}}}},
    {CatalogId::PhiPsiF, {{"-1", "3/4", {"-1/2", "0"}},
      {"-1/2", "-1/4", {"1/3", "0"}},
      {"0", "3/4", {"-1/6", "0"}},
      {"1/2", "-1/4", {"0", "0"}},
      {"3/4", "3/4", {"1/4", "0"}}}},
    {CatalogId::PhiPsiG, {{"-1", "3/4", {"-1", "-3/2"}},
      {"-1/2", "-1/4", {"0", "1/3"}},
      {"0", "3/4", {"-1/3", "-1/2"}},
      {"1/2", "-1/4", {"0", "0"}},
      {"3/4", "3/4", {"-1/4", "0"}}}},
    {CatalogId::B1SemicontF, {{"-1", "0", {"0", "-1"}},
      {"-1/2", "-3/4", {"1/4", "1/4"}},
      {"-1/4", "0", {"-1/4", "1/4"}},
      {"0", "-3/4", {"3/4", "-3/4"}},
      {"1", "0", {"1", "-1"}}}},
    {CatalogId::B1SemicontG, {{"-1", "0", {"0", "0"}},
      {"-1/2", "-3/4", {"-5/4", "3/4"}},
      {"-1/4", "0", {"-3/4", "0"}},
      {"0", "-3/4", {"-7/4", "3/4"}},
      {"1", "0", {"-2", "0"}}}},
  };
  return t;
}

RationalVec from_strings(const std::vector<std::string>& s) {
  std::vector<Rational> c;
  for (const auto& e : s) c.push_back(parse_rational(e));
  return RationalVec(std::move(c));
}

}  // namespace

TEST(Catalog, SpotTable) {
  for (auto id : kAllIds) {
    const auto it = spot_table().find(id);
    ASSERT_NE(it, spot_table().end()) << id_name(id);
    ASSERT_GE(it->second.size(), 5u);
    const PiecewiseMap m = make(id);
    for (const auto& s : it->second) {
      const RationalVec x = v({s.x});
      const RationalVec got = s.y.empty() ? m.eval(x) : m.eval(x, v({s.y}));
      EXPECT_EQ(got, from_strings(s.value)) << id_name(id) << " at " << s.x << "," << s.y;
    }
  }
}

TEST(Catalog, RegionsPartitionEveryGrid) {
  for (auto id : kAllIds) {
    for (std::uint32_t n : {8u, 10u, 64u}) {
      const BoxDomain d = default_domain(id);
      const PiecewiseMap m = make(id, BoxDomain::interval(d.lower()[0], d.upper()[0], n));
      EXPECT_EQ(m.validate_partition(), std::nullopt) << id_name(id) << " grid " << n;
    }
  }
}

TEST(Catalog, OverlappingPiecesRejected) {
  const BoxDomain d = BoxDomain::interval(-1, 1, 4);
  const Expr x = Expr::x();
  const PiecewiseMap m{"OVERLAP", Arity::Unary, d, 1,
                       {{{{catalog::detail::when(x, Cmp::Le, "0")}}, {x}}, {{{catalog::detail::when(x, Cmp::Ge, "0")}}, {x}}}};
  EXPECT_NE(m.validate_partition(), std::nullopt);
}

TEST(Catalog, NamesRoundTrip) {
  for (auto id : kAllIds) EXPECT_EQ(id_from_name(id_name(id)), id);
  EXPECT_EQ(id_from_name("EX_NOPE"), std::nullopt);
}

TEST(Maps, PhiPsiValues) {
  const PiecewiseMap f = make(CatalogId::PhiPsiF), g = make(CatalogId::PhiPsiG);
  // psi(-1/2) = 2/3, so f(-1/2, y) = ((2/3) phi(y), 0) and g(-1/2, y) = (0, (2/3) phi(y))
  for (const auto& y : g.domain().points()) EXPECT_EQ(g.eval(v({"-1/2"}), y), (RationalVec{Rational(0), f.eval(v({"-1/2"}), y)[0]}));
  EXPECT_EQ(f.eval(v({"-1/2"}), v({"-1/2"})), v({"0", "0"}));
  EXPECT_EQ(sum_maps(f, g).eval(v({"-1/2"}), v({"3/4"})), v({"-1/3", "-1/3"}));
}

TEST(Maps, PhiPsiDiagonalInCone) {
  const PiecewiseMap f = make(CatalogId::PhiPsiF);
  const ConeSpec c = ConeSpec::orthant(2);
  for (const auto& x : f.domain().points()) EXPECT_TRUE(cone_contains(c, f.eval(x, x))) << x;
}

TEST(Maps, B1SemicontValues) {
  const PiecewiseMap f = make(CatalogId::B1SemicontF), g = make(CatalogId::B1SemicontG);
  EXPECT_EQ(f.eval(v({"-1/2"}), v({"-1/2"})), v({"0", "0"}));
  EXPECT_EQ(sum_maps(f, g).eval(v({"-1/2"}), v({"0"})), v({"-1", "-1/2"}));
}

TEST(Maps, FixSecondAndFirst) {
  const PiecewiseMap q = fix_second(make(CatalogId::LevelSetQusc), v({"0"}));
  EXPECT_TRUE(q.is_unary());
  EXPECT_EQ(q.eval(v({"1/4"})), v({"1/4", "-4"}));
  EXPECT_EQ(q.eval(v({"0"})), v({"-1", "-1"}));
  const PiecewiseMap g = make(CatalogId::IceCreamG);
  const PiecewiseMap h = fix_first(g, v({"3/4"}));
  for (const auto& y : g.domain().points()) EXPECT_EQ(h.eval(y), g.eval(v({"3/4"}), y));
}

TEST(Maps, SumAssociativeCommutative) {
  const PiecewiseMap a = make(CatalogId::PhiPsiF), b = make(CatalogId::PhiPsiG);
  const PiecewiseMap c = make(CatalogId::B1SemicontF, a.domain());
  const PiecewiseMap ab_c = sum_maps(sum_maps(a, b), c), a_bc = sum_maps(a, sum_maps(b, c));
  const PiecewiseMap ba = sum_maps(b, a), ab = sum_maps(a, b);
  for (const auto& x : a.domain().points())
    for (const auto& y : a.domain().points()) {
      EXPECT_EQ(ab_c.eval(x, y), a_bc.eval(x, y));
      EXPECT_EQ(ab.eval(x, y), ba.eval(x, y));
    }
}

TEST(Maps, ArityAndDimensionErrors) {
  const PiecewiseMap g = make(CatalogId::IceCreamG);
  EXPECT_THROW(g.eval(v({"1/2"})), MapError);
  EXPECT_THROW(g.eval(v({"1/2", "1/2"}), v({"0"})), DimensionError);
  EXPECT_THROW(sum_maps(g, make(CatalogId::QuscNotAusc)), MapError);
}

TEST(Maps, CConvex) {
  const BoxDomain d = BoxDomain::interval(-1, 1, 8);
  const ConeSpec o2 = ConeSpec::orthant(2);
  const Expr x = Expr::x(), y = Expr::y();
  const PiecewiseMap affine{"AFF", Arity::Bifunction, d, 2, {{{}, {y - x, Expr::constant(2) * y}}}};
  EXPECT_TRUE(c_convex_check(affine, v({"0"}), o2, 4).holds());
  EXPECT_EQ(c_convex_check(derived::square_gap(d), v({"0"}), o2, 4).status, Status::ConsistentUpToSampling);
  const Verdict cube = c_convex_check(derived::y_cubed(BoxDomain::interval(-1, 1, 2)), v({"0"}), o2, 2);
  ASSERT_TRUE(cube.fails());
  EXPECT_EQ(cube.certificate.at("y1"), to_json(v({"-1"})));
  EXPECT_EQ(cube.certificate.at("y2"), to_json(v({"0"})));
  EXPECT_EQ(cube.certificate.at("value"), to_json(v({"-3/8", "0"})));
}

TEST(MapText, RoundTripCatalog) {
  for (auto id : kAllIds) {
    const PiecewiseMap m = make(id);
    const PiecewiseMap back = parse_map(serialize_map(m), m.domain());
    EXPECT_EQ(serialize_map(back), serialize_map(m)) << id_name(id);
    for (const auto& x : m.domain().points()) {
      if (m.is_unary()) {
        EXPECT_EQ(back.eval(x), m.eval(x));
      } else {
        EXPECT_EQ(back.eval(x, x), m.eval(x, x));
      }
    }
  }
}

TEST(MapText, ErrorsCarryLineAndColumn) {
  const BoxDomain d = BoxDomain::interval(-1, 1, 4);
  try {
    parse_map("map M unary codomain 1\npiece\nwhen x1 << 0\nvalue x1\nend\nendmap\n", d);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.column(), 9u);
  }
}
