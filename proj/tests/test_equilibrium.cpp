#include <gtest/gtest.h>

#include "pveq/catalog.hpp"
#include "pveq/equilibrium.hpp"

using namespace pveq;
using namespace pveq::catalog;
using namespace pveq::catalog::derived;

namespace {

RationalVec v(std::initializer_list<std::string_view> s) { return RationalVec::parse(s); }

const ConeSpec kO2 = ConeSpec::orthant(2);
const BoxDomain kUnit = BoxDomain::interval(-1, 1, 8);
const BoxDomain kHalf = BoxDomain::interval(ratio(-1, 2), ratio(1, 2), 4);

std::vector<Rational> t_grid() { return {ratio(1, 4), ratio(1, 2), ratio(3, 4), Rational(1)}; }

}  // namespace

TEST(SolveDual, PhiPsiHasMinusHalf) {
  const SolutionReport r = solve_dual(make(CatalogId::PhiPsiG), kUnit, kO2);
  EXPECT_TRUE(r.contains(v({"-1/2"})));
  EXPECT_TRUE(recheck_solutions(make(CatalogId::PhiPsiG), r, kO2));
}

TEST(SolveDual, SquareGapHasZero) {
  const SolutionReport r = solve_dual(square_gap(kUnit), kUnit, kO2);
  EXPECT_TRUE(r.contains(v({"0"})));
  // brute force: 0 is the only x with y^2 - x^2 >= 0 for every grid y
  EXPECT_EQ(r.solutions, std::vector<RationalVec>{v({"0"})});
}

TEST(SolveDual, ZeroMapAndErrors) {
  const PiecewiseMap z = constant_map(Arity::Bifunction, kUnit, v({"0", "0"}));
  EXPECT_EQ(solve_dual(z, kUnit, kO2).solutions, kUnit.points());
  EXPECT_THROW(solve_dual(z, kUnit, ConeSpec::orthant(3)), DimensionError);
  EXPECT_THROW(solve_dual(z, kUnit, ConeSpec("half", {RationalVec{1, 0}})), std::invalid_argument);
  EXPECT_THROW(solve_dual(make(CatalogId::QuscNotAusc), kUnit, kO2), MapError);
}

TEST(SolvePerturbed, PhiPsiLosesMinusHalf) {
  const SolutionReport r = solve_perturbed(make(CatalogId::PhiPsiF), make(CatalogId::PhiPsiG), kUnit, kO2);
  EXPECT_FALSE(r.contains(v({"-1/2"})));
  const PiecewiseMap h = sum_maps(make(CatalogId::PhiPsiF), make(CatalogId::PhiPsiG));
  const auto y = r.violator_of(v({"-1/2"}));
  ASSERT_TRUE(y.has_value());
  EXPECT_TRUE(cone_interior_contains(kO2, -h.eval(v({"-1/2"}), *y)));
  EXPECT_TRUE(cone_interior_contains(kO2, -h.eval(v({"-1/2"}), v({"3/4"}))));
}

TEST(SolvePerturbed, B1PairLosesMinusHalfAtZero) {
  const PiecewiseMap f = make(CatalogId::B1SemicontF), g = make(CatalogId::B1SemicontG);
  const SolutionReport r = solve_perturbed(f, g, kUnit, kO2);
  EXPECT_FALSE(r.contains(v({"-1/2"})));
  EXPECT_EQ(sum_maps(f, g).eval(v({"-1/2"}), v({"0"})), v({"-1", "-1/2"}));
}

TEST(SolvePerturbed, ZeroPerturbationIsDual) {
  const PiecewiseMap g = make(CatalogId::PhiPsiG);
  const PiecewiseMap z = constant_map(Arity::Bifunction, g.domain(), v({"0", "0"}));
  EXPECT_EQ(solve_perturbed(z, g, kUnit, kO2).solutions, solve_dual(g, kUnit, kO2).solutions);
  EXPECT_THROW(solve_perturbed(make(CatalogId::QuscNotAusc), g, kUnit, kO2), DimensionError);
}

TEST(Diagonal, Examples) {
  EXPECT_TRUE(diagonal_check(make(CatalogId::PhiPsiF), kUnit, kO2, DiagonalMode::InCone).holds());
  EXPECT_EQ(make(CatalogId::B1SemicontF).eval(v({"-1/2"}), v({"-1/2"})), v({"0", "0"}));
  const PiecewiseMap z = constant_map(Arity::Bifunction, kUnit, v({"0", "0"}));
  EXPECT_TRUE(diagonal_check(z, kUnit, kO2, DiagonalMode::InCone).holds());
  EXPECT_TRUE(diagonal_check(z, kUnit, kO2, DiagonalMode::NotNegInterior).holds());
  const PiecewiseMap neg = constant_map(Arity::Bifunction, kUnit, v({"-1", "-1"}));
  const Verdict d = diagonal_check(neg, kUnit, kO2, DiagonalMode::NotNegInterior);
  ASSERT_TRUE(d.fails());
  EXPECT_EQ(d.certificate.at("violations").size(), kUnit.point_count());
}

TEST(Core, Examples) {
  const CoreRegion same = core_relative(kUnit, kUnit);
  for (const auto& p : kUnit.points()) EXPECT_TRUE(same.contains(p));
  const CoreRegion half = core_relative(kUnit, BoxDomain::interval(ratio(-1, 2), ratio(1, 2), 4));
  EXPECT_FALSE(half.contains(v({"-1/2"})));
  EXPECT_FALSE(half.contains(v({"1/2"})));
  EXPECT_TRUE(half.contains(v({"1/4"})));
  EXPECT_TRUE(half.contains(v({"0"})));
  const CoreRegion left = core_relative(BoxDomain::interval(0, 1, 8), BoxDomain::interval(0, ratio(1, 2), 4));
  EXPECT_TRUE(left.contains(v({"0"})));
  EXPECT_TRUE(left.contains(v({"3/8"})));
  EXPECT_FALSE(left.contains(v({"1/2"})));
  EXPECT_THROW(core_relative(BoxDomain::interval(0, 1, 8), kUnit), std::invalid_argument);
}

TEST(Core, Monotone) {
  for (int lo = 0; lo <= 8; ++lo) {
    for (int hi = lo; hi <= 8; ++hi) {
      const BoxDomain k0 = BoxDomain::interval(ratio(lo - 4, 4), ratio(hi - 4, 4), std::max(1, hi - lo));
      const CoreRegion core = core_relative(kUnit, k0);
      for (const auto& p : kUnit.points())
        if (core.contains(p)) {
          EXPECT_TRUE(k0.contains(p)) << k0.str() << " " << p;
        }
    }
  }
}

TEST(Coercivity, Examples) {
  const Verdict sq = coercivity_check(square_gap(kUnit), kUnit, kHalf, kO2);
  ASSERT_TRUE(sq.holds());
  EXPECT_TRUE(verify_coercivity(square_gap(kUnit), sq.certificate, kUnit, kHalf, kO2).ok);
  const Verdict yx = coercivity_check(y_minus_x(kUnit), kUnit, kHalf, kO2);
  ASSERT_TRUE(yx.fails());
  EXPECT_EQ(yx.certificate.at("x"), to_json(v({"-1/2"})));
  const PiecewiseMap z = constant_map(Arity::Bifunction, kUnit, v({"0", "0"}));
  EXPECT_TRUE(coercivity_check(z, kUnit, kHalf, kO2).holds());
}

TEST(Coercivity, EmptyCoreIsReported) {
  const BoxDomain point = BoxDomain::interval(ratio(1, 2), ratio(1, 2), 1);
  const Verdict e = coercivity_check(square_gap(kUnit), kUnit, point, kO2);
  ASSERT_TRUE(e.fails());
  EXPECT_EQ(e.certificate.at("kind"), "empty_core");
}

TEST(Coercivity, TamperedAssignmentIsRejected) {
  const Verdict sq = coercivity_check(square_gap(kUnit), kUnit, kHalf, kO2);
  Json cert = sq.certificate;
  cert["assignment"][0]["y0"] = to_json(v({"1/2"}));
  EXPECT_FALSE(verify_coercivity(square_gap(kUnit), cert, kUnit, kHalf, kO2).ok);
  cert = sq.certificate;
  cert["assignment"].erase(0);
  EXPECT_FALSE(verify_coercivity(square_gap(kUnit), cert, kUnit, kHalf, kO2).ok);
}

TEST(Segment, Examples) {
  const PiecewiseMap z = constant_map(Arity::Bifunction, kUnit, v({"0", "0"}));
  const PiecewiseMap g = make(CatalogId::PhiPsiG);
  const Verdict trivial = segment_corollary_check(z, g, v({"-1/2"}), kO2, kUnit, t_grid());
  ASSERT_TRUE(trivial.holds()) << trivial.to_json().dump();
  for (const auto& e : trivial.certificate.at("per_y"))
    for (const auto& zt : e.at("z")) EXPECT_TRUE(in_neg_cone(kO2, g.eval(v({"-1/2"}), vec_from_json(zt.at("z"))) - g.eval(
                                                                      v({"-1/2"}), vec_from_json(e.at("y")))));

  const PiecewiseMap sq = square_gap(kUnit);
  EXPECT_TRUE(segment_corollary_check(sq, sq, v({"0"}), kO2, kUnit, t_grid()).holds());

  const Verdict pp = segment_corollary_check(make(CatalogId::PhiPsiF), g, v({"-1/2"}), kO2, kUnit, t_grid());
  ASSERT_TRUE(pp.fails());
  EXPECT_EQ(pp.certificate.at("kind"), "segment_no_z");
  EXPECT_EQ(pp.certificate.at("y"), to_json(v({"3/4"})));

  EXPECT_THROW(segment_corollary_check(z, g, v({"-1/2"}), kO2, kUnit, {Rational(0)}), std::invalid_argument);
}

TEST(Segment, MaximumAtOne) {
  const PiecewiseMap z = constant_map(Arity::Bifunction, kUnit, v({"0", "0"}));
  const PiecewiseMap sq = square_gap(kUnit);
  for (const auto& y : kUnit.points()) EXPECT_TRUE(segment_maximum_at_one(z, sq, v({"0"}), y, kO2, t_grid())) << y;
  EXPECT_FALSE(segment_maximum_at_one(z, y_minus_x(kUnit), v({"0"}), v({"-1"}), kO2, t_grid()));
}

TEST(Existence, ConstantNegativeMap) {
  const BoxDomain k0 = BoxDomain::interval(0, 1, 8);
  const PiecewiseMap g = constant_map(Arity::Bifunction, k0, v({"-1", "-1"}));
  const ExistenceTrace tr = existence_probe(g, k0, kO2);
  EXPECT_EQ(tr.outcome, "diagonal_violation");
  const Json j = tr.to_json();
  const auto cover = std::find_if(j.at("claims").begin(), j.at("claims").end(),
                                  [](const Json& c) { return c.at("claim") == "cover"; });
  ASSERT_NE(cover, j.at("claims").end());
  EXPECT_EQ(cover->at("y").size(), 1u);
  EXPECT_TRUE(verify_existence_trace(g, k0, kO2, j).ok);
}

TEST(Existence, SolutionsExist) {
  const ExistenceTrace sq = existence_probe(square_gap(kUnit), kUnit, kO2);
  EXPECT_EQ(sq.outcome, "solution_exists");
  EXPECT_EQ(*sq.solution, v({"0"}));
  EXPECT_TRUE(verify_existence_trace(square_gap(kUnit), kUnit, kO2, sq.to_json()).ok);
  const ExistenceTrace pg = existence_probe(make(CatalogId::PhiPsiG), kUnit, kO2);
  EXPECT_EQ(pg.outcome, "solution_exists");
  EXPECT_TRUE(solve_dual(make(CatalogId::PhiPsiG), kUnit, kO2).contains(*pg.solution));
}

TEST(Existence, TamperedTraceIsRejected) {
  const BoxDomain k0 = BoxDomain::interval(0, 1, 8);
  const PiecewiseMap g = constant_map(Arity::Bifunction, k0, v({"-1", "-1"}));
  Json j = existence_probe(g, k0, kO2).to_json();
  for (auto& c : j["claims"])
    if (c.at("claim") == "diagonal_in_neg_interior") c["value"] = to_json(v({"1", "1"}));
  EXPECT_FALSE(verify_existence_trace(g, k0, kO2, j).ok);
  const Json ok = existence_probe(square_gap(kUnit), kUnit, kO2).to_json();
  Json bad = ok;
  bad["solution"] = to_json(v({"1"}));
  for (auto& c : bad["claims"])
    if (c.at("claim") == "dual_solution") c["x"] = to_json(v({"1"}));
  EXPECT_FALSE(verify_existence_trace(square_gap(kUnit), kUnit, kO2, bad).ok);
}

TEST(EquilibriumProperties, SolverSoundnessAcrossCatalog) {
  for (CatalogId id : kAllIds) {
    const PiecewiseMap g = make(id);
    if (g.is_unary()) continue;
    const ConeSpec c = default_cone(id);
    const SolutionReport r = solve_dual(g, g.domain(), c);
    EXPECT_TRUE(recheck_solutions(g, r, c)) << id_name(id);
    EXPECT_EQ(r.solutions.size() + r.violators.size(), g.domain().point_count());
  }
  for (const PiecewiseMap& g : {square_gap(kUnit), y_minus_x(kUnit), y_cubed(kUnit)})
    EXPECT_TRUE(recheck_solutions(g, solve_dual(g, kUnit, kO2), kO2)) << g.name();
}

TEST(EquilibriumProperties, RemarkOnDiagonalSums) {
  std::size_t hits = 0;
  std::vector<PiecewiseMap> maps;
  for (CatalogId id : kAllIds)
    if (make(id).is_unary() == false && default_cone(id) == kO2) maps.push_back(make(id));
  for (const auto& f : maps) {
    for (const auto& g : maps) {
      if (!(f.domain() == g.domain())) continue;
      for (const auto& x : f.domain().points()) {
        const RationalVec fx = f.eval(x, x), gx = g.eval(x, x);
        if (!cone_contains(kO2, fx) || !not_in_neg_interior(kO2, gx)) continue;
        EXPECT_TRUE(not_in_neg_interior(kO2, fx + gx)) << f.name() << " + " << g.name() << " at " << x;
        ++hits;
      }
    }
  }
  EXPECT_GT(hits, 20u);
}
