#pragma once
// Dense exact linear algebra over Q. Vectors are std::vector<Scalar>; a
// matrix is a list of rows.

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "tiltmut/scalar.hpp"

namespace tiltmut::linalg {

using Vec = std::vector<Scalar>;
using Rows = std::vector<Vec>;

inline bool is_zero(const Vec& v) {
  for (const auto& x : v) {
    if (sgn(x) != 0) return false;
  }
  return true;
}

inline std::optional<std::size_t> first_nonzero(const Vec& v) {
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (sgn(v[k]) != 0) return k;
  }
  return std::nullopt;
}

// v -= c * w
inline void axpy(Vec& v, const Scalar& c, const Vec& w) {
  if (sgn(c) == 0) return;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (sgn(w[k]) != 0) v[k] -= c * w[k];
  }
}

// Reduced row echelon form; zero rows are dropped. Pivots are 1.
inline Rows rref(Rows m, std::vector<std::size_t>* pivots_out = nullptr) {
  std::vector<std::size_t> pivots;
  if (m.empty()) {
    if (pivots_out) pivots_out->clear();
    return m;
  }
  const std::size_t cols = m.front().size();
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < m.size(); ++col) {
    std::size_t sel = row;
    while (sel < m.size() && sgn(m[sel][col]) == 0) ++sel;
    if (sel == m.size()) continue;
    std::swap(m[row], m[sel]);
    Scalar inv = 1 / m[row][col];
    for (auto& x : m[row]) x *= inv;
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r != row && sgn(m[r][col]) != 0) {
        Scalar c = m[r][col];
        axpy(m[r], c, m[row]);
      }
    }
    pivots.push_back(col);
    ++row;
  }
  m.resize(row);
  if (pivots_out) *pivots_out = std::move(pivots);
  return m;
}

inline std::size_t rank(const Rows& m) { return rref(m).size(); }

// Basis of {x : A x = 0} where A is given by rows over `cols` unknowns.
// One vector per free column, with that free entry 1 and the other free
// entries 0.
inline Rows kernel(const Rows& a, std::size_t cols) {
  std::vector<std::size_t> pivots;
  Rows r = rref(a, &pivots);
  std::vector<bool> is_pivot(cols, false);
  for (auto p : pivots) is_pivot[p] = true;
  Rows out;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    Vec v(cols, Scalar(0));
    v[f] = 1;
    for (std::size_t k = 0; k < pivots.size(); ++k) v[pivots[k]] = -r[k][f];
    out.push_back(std::move(v));
  }
  return out;
}

// Incrementally built echelon basis. Each stored row is zero at the pivots
// of all earlier rows, so reducing a vector row by row in insertion order
// clears every pivot position. Optionally records each row as a combination
// of the inserted generators.
class EchelonBasis {
 public:
  explicit EchelonBasis(std::size_t dim, bool track = false)
      : dim_(dim), track_(track) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t rank() const noexcept { return rows_.size(); }
  std::size_t generators() const noexcept { return generators_; }

  Vec reduce(Vec v) const {
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      const Scalar& c = v[pivots_[k]];
      if (sgn(c) != 0) {
        Scalar cc = c;
        axpy(v, cc, rows_[k]);
      }
    }
    return v;
  }

  bool contains(const Vec& v) const { return is_zero(reduce(v)); }

  // Inserts v as a new generator. Returns false (and records nothing) if v
  // is already in the span.
  bool insert(Vec v) {
    Vec combo;
    if (track_) {
      combo.assign(generators_ + 1, Scalar(0));
      combo[generators_] = 1;
    }
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      const Scalar& c = v[pivots_[k]];
      if (sgn(c) != 0) {
        Scalar cc = c;
        axpy(v, cc, rows_[k]);
        if (track_) {
          for (std::size_t g = 0; g < combos_[k].size(); ++g) {
            combo[g] -= cc * combos_[k][g];
          }
        }
      }
    }
    auto piv = first_nonzero(v);
    if (!piv) return false;
    Scalar inv = 1 / v[*piv];
    for (auto& x : v) x *= inv;
    if (track_) {
      for (auto& x : combo) x *= inv;
      combos_.push_back(std::move(combo));
    }
    rows_.push_back(std::move(v));
    pivots_.push_back(*piv);
    ++generators_;
    return true;
  }

  // Coefficients of v over the inserted generators, or nullopt if v is not
  // in their span. Requires tracking.
  std::optional<Vec> coordinates(Vec v) const {
    Vec out(generators_, Scalar(0));
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      Scalar c = v[pivots_[k]];
      if (sgn(c) != 0) {
        axpy(v, c, rows_[k]);
        for (std::size_t g = 0; g < combos_[k].size(); ++g) {
          out[g] += c * combos_[k][g];
        }
      }
    }
    if (!is_zero(v)) return std::nullopt;
    return out;
  }

  const Rows& rows() const noexcept { return rows_; }

 private:
  std::size_t dim_;
  bool track_;
  std::size_t generators_ = 0;
  Rows rows_;
  std::vector<std::size_t> pivots_;
  Rows combos_;
};

// Canonical basis of span(w) modulo span(u), in reduced echelon form.
inline Rows complement(const Rows& u, const Rows& w, std::size_t dim) {
  Rows ur = rref(u);
  EchelonBasis ub(dim);
  for (const auto& r : ur) ub.insert(r);
  Rows rest;
  for (const auto& v : w) {
    Vec red = ub.reduce(v);
    if (!is_zero(red)) rest.push_back(std::move(red));
  }
  // Reduce again after echelonizing so every row is zero on u's pivots.
  Rows out;
  for (auto& r : rref(std::move(rest))) {
    Vec red = ub.reduce(r);
    if (!is_zero(red)) out.push_back(std::move(red));
  }
  return rref(std::move(out));
}

}  // namespace tiltmut::linalg
