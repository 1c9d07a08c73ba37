#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pveq/rational.hpp"

namespace pveq {

/// Polyhedral cone C = {z : <a_j, z> >= 0 for all j}, whose interior is taken to be
/// the all-strict system {z : <a_j, z> > 0}. `cone_validate` checks that this
/// representation is legitimate (full-rank normals, strictly feasible).
class ConeSpec {
 public:
  ConeSpec(std::string name, std::vector<RationalVec> normals,
           std::optional<RationalVec> witness = std::nullopt)
      : name_(std::move(name)), normals_(std::move(normals)), witness_(std::move(witness)) {
    if (normals_.empty()) throw std::invalid_argument("cone needs at least one normal");
    dim_ = normals_.front().dim();
    if (dim_ == 0) throw std::invalid_argument("cone dimension must be positive");
    for (const auto& a : normals_) a.check_same(normals_.front());
    if (witness_) witness_->check_same(normals_.front());
  }

  static ConeSpec orthant(std::size_t n) {
    std::vector<RationalVec> normals;
    RationalVec ones(n);
    for (std::size_t i = 0; i < n; ++i) {
      RationalVec e(n);
      e[i] = 1;
      ones[i] = 1;
      normals.push_back(std::move(e));
    }
    return {"orthant" + std::to_string(n), std::move(normals), std::move(ones)};
  }

  /// {(z1, z2) : z1^2 <= z2^2, z2 >= 0} = {|z1| <= z2}.
  static ConeSpec ice_cream2() {
    return {"icecream2", {RationalVec{1, 1}, RationalVec{-1, 1}}, RationalVec{0, 1}};
  }

  const std::string& name() const noexcept { return name_; }
  std::size_t dim() const noexcept { return dim_; }
  const std::vector<RationalVec>& normals() const noexcept { return normals_; }
  const std::optional<RationalVec>& stored_witness() const noexcept { return witness_; }

  bool operator==(const ConeSpec& o) const { return normals_ == o.normals_; }

  void check_dim(const RationalVec& z) const {
    if (z.dim() != dim_) {
      throw DimensionError("cone " + name_ + " has dimension " + std::to_string(dim_) +
                           ", point has dimension " + std::to_string(z.dim()));
    }
  }

 private:
  std::string name_;
  std::vector<RationalVec> normals_;
  std::optional<RationalVec> witness_;
  std::size_t dim_ = 0;
};

inline bool cone_contains(const ConeSpec& c, const RationalVec& z) {
  c.check_dim(z);
  for (const auto& a : c.normals())
    if (dot(a, z) < 0) return false;
  return true;
}

inline bool cone_interior_contains(const ConeSpec& c, const RationalVec& z) {
  c.check_dim(z);
  for (const auto& a : c.normals())
    if (dot(a, z) <= 0) return false;
  return true;
}

/// z not in -int C: the weak solution predicate.
inline bool not_in_neg_interior(const ConeSpec& c, const RationalVec& z) {
  return !cone_interior_contains(c, -z);
}

inline bool in_neg_cone(const ConeSpec& c, const RationalVec& z) { return cone_contains(c, -z); }

inline bool leq_cone(const ConeSpec& c, const RationalVec& z1, const RationalVec& z2) {
  return cone_contains(c, z2 - z1);
}

inline bool lt_interior(const ConeSpec& c, const RationalVec& z1, const RationalVec& z2) {
  return cone_interior_contains(c, z2 - z1);
}

namespace detail {

using Matrix = std::vector<std::vector<Rational>>;

/// Row-reduces in place; returns the rank.
inline std::size_t row_reduce(Matrix& m, std::size_t cols) {
  std::size_t rank = 0;
  for (std::size_t col = 0; col < cols && rank < m.size(); ++col) {
    std::size_t pivot = rank;
    while (pivot < m.size() && m[pivot][col] == 0) ++pivot;
    if (pivot == m.size()) continue;
    std::swap(m[rank], m[pivot]);
    const Rational inv = Rational(1) / m[rank][col];
    for (auto& v : m[rank]) v *= inv;
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == rank || m[r][col] == 0) continue;
      const Rational factor = m[r][col];
      for (std::size_t k = 0; k < m[r].size(); ++k) m[r][k] -= factor * m[rank][k];
    }
    ++rank;
  }
  return rank;
}

inline std::size_t rank_of(const std::vector<RationalVec>& rows) {
  if (rows.empty()) return 0;
  Matrix m;
  for (const auto& r : rows) m.emplace_back(r.begin(), r.end());
  return row_reduce(m, rows.front().dim());
}

/// Solves the square system rows * z = rhs; nullopt when singular.
inline std::optional<RationalVec> solve_square(const std::vector<RationalVec>& rows,
                                              const std::vector<Rational>& rhs) {
  const std::size_t n = rows.size();
  Matrix m;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Rational> row(rows[i].begin(), rows[i].end());
    row.push_back(rhs[i]);
    m.push_back(std::move(row));
  }
  if (row_reduce(m, n) < n) return std::nullopt;
  RationalVec z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = m[i][n];
  return z;
}

}  // namespace detail

struct ConeValidation {
  bool valid = false;
  bool pointed = false;
  bool interior_nonempty = false;
  std::size_t rank = 0;
  std::optional<RationalVec> witness;
  std::string message;
};

/// Pointedness by exact rank; strict feasibility by exhibiting z with A z >= 1.
/// With full column rank {A z >= 1} is a pointed polyhedron, so when it is
/// nonempty one of its vertices solves some dim x dim subsystem A_S z = 1.
inline ConeValidation cone_validate(const ConeSpec& c) {
  ConeValidation out;
  out.rank = detail::rank_of(c.normals());
  out.pointed = out.rank == c.dim();
  if (!out.pointed) {
    out.message = "not pointed under representation contract (rank " + std::to_string(out.rank) +
                  " < " + std::to_string(c.dim()) + ")";
    return out;
  }
  if (c.stored_witness() && cone_interior_contains(c, *c.stored_witness())) {
    out.witness = c.stored_witness();
  } else {
    const auto& a = c.normals();
    const std::size_t m = a.size();
    const std::size_t n = c.dim();
    std::vector<std::size_t> pick(n);
    for (std::size_t i = 0; i < n; ++i) pick[i] = i;
    while (!out.witness) {
      std::vector<RationalVec> rows;
      for (auto i : pick) rows.push_back(a[i]);
      if (auto z = detail::solve_square(rows, std::vector<Rational>(n, Rational(1)))) {
        if (cone_interior_contains(c, *z)) out.witness = std::move(z);
      }
      // next n-subset of m in lexicographic order
      std::size_t i = n;
      while (i > 0 && pick[i - 1] == m - n + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < n; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  out.interior_nonempty = out.witness.has_value();
  if (!out.interior_nonempty) {
    out.message = "empty interior";
    return out;
  }
  out.valid = true;
  out.message = "valid";
  return out;
}

/// Axis-aligned box K with an exact rational grid.
class BoxDomain {
 public:
  BoxDomain(RationalVec lower, RationalVec upper, std::vector<std::uint32_t> grid_counts)
      : lower_(std::move(lower)), upper_(std::move(upper)), counts_(std::move(grid_counts)) {
    lower_.check_same(upper_);
    if (lower_.dim() == 0) throw std::invalid_argument("box dimension must be positive");
    if (counts_.size() != lower_.dim()) throw DimensionError("grid count per axis required");
    for (std::size_t i = 0; i < dim(); ++i) {
      if (lower_[i] > upper_[i]) throw std::invalid_argument("box lower bound exceeds upper bound");
      if (counts_[i] == 0) throw std::invalid_argument("grid counts must be positive");
    }
  }

  /// 1-D interval [lo, hi] with `count` grid steps.
  static BoxDomain interval(const Rational& lo, const Rational& hi, std::uint32_t count) {
    return {RationalVec{lo}, RationalVec{hi}, {count}};
  }

  std::size_t dim() const noexcept { return lower_.dim(); }
  const RationalVec& lower() const noexcept { return lower_; }
  const RationalVec& upper() const noexcept { return upper_; }
  const std::vector<std::uint32_t>& grid_counts() const noexcept { return counts_; }

  bool operator==(const BoxDomain& o) const {
    return lower_ == o.lower_ && upper_ == o.upper_ && counts_ == o.counts_;
  }

  std::size_t point_count() const {
    std::size_t total = 1;
    for (auto c : counts_) total *= static_cast<std::size_t>(c) + 1;
    return total;
  }

  Rational step(std::size_t axis) const { return (upper_[axis] - lower_[axis]) / counts_[axis]; }

  /// Grid point by flat index, first axis varying slowest (lexicographic order).
  RationalVec point(std::size_t index) const {
    RationalVec p(dim());
    for (std::size_t axis = dim(); axis-- > 0;) {
      const std::size_t n = static_cast<std::size_t>(counts_[axis]) + 1;
      const std::size_t k = index % n;
      index /= n;
      p[axis] = lower_[axis] + step(axis) * static_cast<unsigned long>(k);
    }
    return p;
  }

  std::vector<RationalVec> points() const {
    std::vector<RationalVec> out;
    out.reserve(point_count());
    for (std::size_t i = 0; i < point_count(); ++i) out.push_back(point(i));
    return out;
  }

  /// Flat index of p when it is a grid point.
  std::optional<std::size_t> index_of(const RationalVec& p) const {
    lower_.check_same(p);
    std::size_t index = 0;
    for (std::size_t axis = 0; axis < dim(); ++axis) {
      const std::size_t n = static_cast<std::size_t>(counts_[axis]) + 1;
      std::size_t k = 0;
      if (upper_[axis] != lower_[axis]) {
        const Rational t = (p[axis] - lower_[axis]) / step(axis);
        if (t.get_den() != 1 || t < 0 || t > counts_[axis]) return std::nullopt;
        k = t.get_num().get_ui();
      } else if (p[axis] != lower_[axis]) {
        return std::nullopt;
      }
      index = index * n + k;
    }
    return index;
  }

  bool contains(const RationalVec& p) const {
    lower_.check_same(p);
    for (std::size_t i = 0; i < dim(); ++i)
      if (p[i] < lower_[i] || p[i] > upper_[i]) return false;
    return true;
  }

  bool contains_box(const BoxDomain& inner) const {
    return contains(inner.lower()) && contains(inner.upper());
  }

  std::vector<RationalVec> vertices() const {
    std::vector<RationalVec> out;
    const std::size_t n = dim();
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      RationalVec v(n);
      for (std::size_t i = 0; i < n; ++i) v[i] = (mask >> (n - 1 - i)) & 1U ? upper_[i] : lower_[i];
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(std::move(v));
    }
    return out;
  }

  std::string str() const {
    std::string s;
    for (std::size_t i = 0; i < dim(); ++i) {
      if (i) s += " x ";
      s += "[" + lower_[i].get_str() + ", " + upper_[i].get_str() + "]/" + std::to_string(counts_[i]);
    }
    return s;
  }

 private:
  RationalVec lower_;
  RationalVec upper_;
  std::vector<std::uint32_t> counts_;
};

}  // namespace pveq
