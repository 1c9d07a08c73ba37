#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pveq/maps.hpp"

namespace pveq::catalog {

enum class CatalogId {
  IceCreamG,       ///< g(x,y) = (x+y, x) for x <= 1/2, (2x+y, 0) for x > 1/2 on [0,1]
  QuscNotAusc,     ///< g(x) = (1, -1/|x|) for x != 0, (0,0) at 0
  WuscNotQusc,     ///< g(x) = (x, 2x) for x <= 1/2, (2x, 2x) for x > 1/2
  LevelSetQusc,    ///< g(x,y) = (x+y, y-1/|x|) for x != 0, (-1+y, -1+y) at 0
  LevelSetWusc,    ///< g(x,y) = (-1|0|1, y-1) on x <= -1 | (-1,0] | x > 0
  RealWusc,        ///< g(x) = x for x < 0, 1/2 at 0, x+1 for x > 0
  PhiPsiF,         ///< f(x,y) = (phi(y) psi(x), 0)
  PhiPsiG,         ///< g(x,y) = (-phi(x) psi(x), phi(y) psi(x) - phi(x) psi(x))
  B1SemicontF,     ///< f = (-1-x-y, x-y) on [-1,-1/2], (x+|y|, -x+y) on ]-1/2,1]
  B1SemicontG,     ///< g = (-1-x-|y|, |y|)
};

inline constexpr std::array kAllIds = {
    CatalogId::IceCreamG,   CatalogId::QuscNotAusc, CatalogId::WuscNotQusc, CatalogId::LevelSetQusc,
    CatalogId::LevelSetWusc, CatalogId::RealWusc,   CatalogId::PhiPsiF,     CatalogId::PhiPsiG,
    CatalogId::B1SemicontF, CatalogId::B1SemicontG,
};

inline std::string_view id_name(CatalogId id) {
  switch (id) {
    case CatalogId::IceCreamG: return "EX_ICECREAM_G";
    case CatalogId::QuscNotAusc: return "EX_QUSC_NOT_AUSC";
    case CatalogId::WuscNotQusc: return "EX_WUSC_NOT_QUSC";
    case CatalogId::LevelSetQusc: return "EX_LEVELSET_QUSC";
    case CatalogId::LevelSetWusc: return "EX_LEVELSET_WUSC";
    case CatalogId::RealWusc: return "EX_REAL_WUSC";
    case CatalogId::PhiPsiF: return "EX_PHI_PSI_F";
    case CatalogId::PhiPsiG: return "EX_PHI_PSI_G";
    case CatalogId::B1SemicontF: return "EX_B1_SEMICONT_F";
    case CatalogId::B1SemicontG: return "EX_B1_SEMICONT_G";
  }
  return "?";
}

inline std::optional<CatalogId> id_from_name(std::string_view name) {
  for (auto id : kAllIds)
    if (id_name(id) == name) return id;
  return std::nullopt;
}

namespace detail {

inline Rational q(std::string_view s) { return parse_rational(s); }
inline Expr k(std::string_view s) { return Expr::constant(parse_rational(s)); }
inline Comparison when(Expr lhs, Cmp op, std::string_view rhs) { return {std::move(lhs), op, q(rhs)}; }

/// Scalar piecewise function of one variable: (region, expression) branches.
struct Branch {
  Region region;
  Expr value;
};

/// phi(t) with t either x or y.
inline std::vector<Branch> phi(const Expr& t) {
  return {{{{when(t, Cmp::Le, "-1/2")}}, k("-2") * t - k("1")},
          {{{when(t, Cmp::Gt, "-1/2"), when(t, Cmp::Le, "0")}}, k("2") * t + k("1")},
          {{{when(t, Cmp::Gt, "0")}}, k("-2") * t + k("1")}};
}

inline std::vector<Branch> psi(const Expr& t) {
  return {{{{when(t, Cmp::Le, "1/2")}}, k("-2/3") * t + k("1/3")},
          {{{when(t, Cmp::Gt, "1/2")}}, k("-2") * t + k("1")}};
}

inline Region conj(const Region& a, const Region& b) {
  Region r = a;
  r.clauses.insert(r.clauses.end(), b.clauses.begin(), b.clauses.end());
  return r;
}

}  // namespace detail

inline BoxDomain default_domain(CatalogId id) {
  using detail::q;
  switch (id) {
    case CatalogId::IceCreamG:
    case CatalogId::WuscNotQusc: return BoxDomain::interval(0, 1, 8);
    case CatalogId::LevelSetWusc: return BoxDomain::interval(-2, 2, 8);
    default: return BoxDomain::interval(-1, 1, 8);
  }
}

inline ConeSpec default_cone(CatalogId id) {
  switch (id) {
    case CatalogId::IceCreamG:
    case CatalogId::WuscNotQusc: return ConeSpec::ice_cream2();
    case CatalogId::RealWusc: return ConeSpec::orthant(1);
    default: return ConeSpec::orthant(2);
  }
}

inline PiecewiseMap make(CatalogId id, const std::optional<BoxDomain>& domain = std::nullopt) {
  using namespace detail;
  const BoxDomain dom = domain.value_or(default_domain(id));
  const Expr x = Expr::x();
  const Expr y = Expr::y();
  const std::string name(id_name(id));
  switch (id) {
    case CatalogId::IceCreamG:
      return {name, Arity::Bifunction, dom, 2,
              {{{{when(x, Cmp::Le, "1/2")}}, {x + y, x}},
               {{{when(x, Cmp::Gt, "1/2")}}, {k("2") * x + y, k("0")}}}};
    case CatalogId::QuscNotAusc:
      return {name, Arity::Unary, dom, 2,
              {{{{when(x, Cmp::Lt, "0")}}, {k("1"), -recip_abs(x)}},
               {{{when(x, Cmp::Eq, "0")}}, {k("0"), k("0")}},
               {{{when(x, Cmp::Gt, "0")}}, {k("1"), -recip_abs(x)}}}};
    case CatalogId::WuscNotQusc:
      return {name, Arity::Unary, dom, 2,
              {{{{when(x, Cmp::Le, "1/2")}}, {x, k("2") * x}},
               {{{when(x, Cmp::Gt, "1/2")}}, {k("2") * x, k("2") * x}}}};
    case CatalogId::LevelSetQusc:
      return {name, Arity::Bifunction, dom, 2,
              {{{{when(x, Cmp::Lt, "0")}}, {x + y, y - recip_abs(x)}},
               {{{when(x, Cmp::Eq, "0")}}, {k("-1") + y, k("-1") + y}},
               {{{when(x, Cmp::Gt, "0")}}, {x + y, y - recip_abs(x)}}}};
    case CatalogId::LevelSetWusc:
      return {name, Arity::Bifunction, dom, 2,
              {{{{when(x, Cmp::Le, "-1")}}, {k("-1"), y - k("1")}},
               {{{when(x, Cmp::Gt, "-1"), when(x, Cmp::Le, "0")}}, {k("0"), y - k("1")}},
               {{{when(x, Cmp::Gt, "0")}}, {k("1"), y - k("1")}}}};
    case CatalogId::RealWusc:
      return {name, Arity::Unary, dom, 1,
              {{{{when(x, Cmp::Lt, "0")}}, {x}},
               {{{when(x, Cmp::Eq, "0")}}, {k("1/2")}},
               {{{when(x, Cmp::Gt, "0")}}, {x + k("1")}}}};
    case CatalogId::PhiPsiF: {
      std::vector<Piece> pieces;
      for (const auto& py : phi(y))
        for (const auto& sx : psi(x)) pieces.push_back({conj(py.region, sx.region), {py.value * sx.value, k("0")}});
      return {name, Arity::Bifunction, dom, 2, std::move(pieces)};
    }
    case CatalogId::PhiPsiG: {
      std::vector<Piece> pieces;
      for (const auto& px : phi(x))
        for (const auto& sx : psi(x))
          for (const auto& py : phi(y)) {
            Region r = conj(conj(px.region, sx.region), py.region);
            const Expr diag = px.value * sx.value;
            pieces.push_back({std::move(r), {-diag, py.value * sx.value - diag}});
          }
      return {name, Arity::Bifunction, dom, 2, std::move(pieces)};
    }
    case CatalogId::B1SemicontF:
      return {name, Arity::Bifunction, dom, 2,
              {{{{when(x, Cmp::Le, "-1/2")}}, {k("-1") - x - y, x - y}},
               {{{when(x, Cmp::Gt, "-1/2")}}, {x + abs(y), -x + y}}}};
    case CatalogId::B1SemicontG:
      return {name, Arity::Bifunction, dom, 2, {{{}, {k("-1") - x - abs(y), abs(y)}}}};
  }
  throw MapError("unknown catalog id");
}

/// Instances built for the worked checks beyond the catalog proper.
namespace derived {

/// (y^2 - x^2, y^2 - x^2)
inline PiecewiseMap square_gap(const BoxDomain& dom) {
  const Expr x = Expr::x(), y = Expr::y();
  const Expr v = y * y - x * x;
  return {"SQUARE_GAP", Arity::Bifunction, dom, 2, {{{}, {v, v}}}};
}

/// (y - x, y - x)
inline PiecewiseMap y_minus_x(const BoxDomain& dom) {
  const Expr v = Expr::y() - Expr::x();
  return {"Y_MINUS_X", Arity::Bifunction, dom, 2, {{{}, {v, v}}}};
}

/// (y^3, 0)
inline PiecewiseMap y_cubed(const BoxDomain& dom) {
  const Expr y = Expr::y();
  return {"Y_CUBED", Arity::Bifunction, dom, 2, {{{}, {y * y * y, Expr::constant(0)}}}};
}

}  // namespace derived

}  // namespace pveq::catalog
