#pragma once
// Independent check of a mutation: build the complex P_i* = (+)_a P_t(a) -> P_i,
// compute End(Lambda/P_i (+) P_i*) in the homotopy category by plain linear
// algebra, and read a bound quiver off the result.
//
// Conventions. Complexes are cohomologically graded. A morphism P_a -> P_b
// is a path b -> a; g o f is "first g, then f" as paths. A summand X_a of
// the tilting object becomes vertex a, and f in Hom(X_a, X_b) becomes an
// element from b to a, so the quiver reads like Q (the opposite ring is
// taken once, here).

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "tiltmut/algebra.hpp"
#include "tiltmut/linalg.hpp"
#include "tiltmut/mutation.hpp"
#include "tiltmut/simplify.hpp"

namespace tiltmut {

class NotBasic : public Error {
 public:
  explicit NotBasic(const std::string& what) : Error(ErrorCode::Internal, what) {}
};

class RadicalComputationFailed : public Error {
 public:
  explicit RadicalComputationFailed(const std::string& what)
      : Error(ErrorCode::Internal, what) {}
};

// Summands degree0 sit in cohomological degree -shift, degree1 in 1 - shift.
// differential[r][c] : P_degree0[c] -> P_degree1[r], a path degree1[r] ->
// degree0[c].
struct TwoTermComplex {
  int shift = 0;
  std::vector<int> degree0;
  std::vector<int> degree1;
  std::vector<std::vector<PathExpr>> differential;
};

inline TwoTermComplex stalk(int j) { return TwoTermComplex{0, {j}, {}, {}}; }

inline TwoTermComplex shifted(TwoTermComplex x, int by) {
  x.shift += by;
  return x;
}

inline TwoTermComplex build_mutation_complex(const NormalFormTable& t, int i) {
  const Presentation& q = t.presentation();
  auto out = q.arrows_from(i);
  if (out.empty()) {
    FeasibilityReport rep{i, false, {{FeasibilityCode::NoOutgoingArrows, {}, {}}}};
    throw InfeasibleMutation(rep);
  }
  TwoTermComplex c;
  c.degree1 = {i};
  c.differential.emplace_back();
  for (int a : out) {
    c.degree0.push_back(q.arrows[a].target);
    c.differential[0].push_back(t.reduce(PathExpr::of(q.arrow_path(a))));
  }
  return c;
}

namespace oracle_detail {

using linalg::Rows;
using linalg::Vec;

// Component (n, r, c): X^n[c] -> Y^(n+k)[r], as coefficients over basis paths.
using Key = std::tuple<int, int, int>;
using GradedMap = std::map<Key, std::map<int, Scalar>>;

inline const std::vector<int>* terms_at(const TwoTermComplex& x, int n) {
  if (n == -x.shift) return &x.degree0;
  if (n == 1 - x.shift) return &x.degree1;
  return nullptr;
}

inline std::vector<int> degrees(const TwoTermComplex& x) {
  std::vector<int> out;
  if (!x.degree0.empty()) out.push_back(-x.shift);
  if (!x.degree1.empty()) out.push_back(1 - x.shift);
  return out;
}

// The differential as a degree-one graded map, with the sign of the shift.
inline GradedMap differential(const NormalFormTable& t, const TwoTermComplex& x) {
  GradedMap d;
  Scalar sign = (x.shift % 2 == 0) ? 1 : -1;
  for (std::size_t r = 0; r < x.differential.size(); ++r) {
    for (std::size_t c = 0; c < x.differential[r].size(); ++c) {
      auto v = t.to_vector(x.differential[r][c]);
      for (std::size_t b = 0; b < v.size(); ++b) {
        if (sgn(v[b]) != 0) {
          d[{-x.shift, static_cast<int>(r), static_cast<int>(c)}][static_cast<int>(b)] +=
              sign * v[b];
        }
      }
    }
  }
  return d;
}

// g o f, where f has degree kf.
inline GradedMap compose(const NormalFormTable& t, const GradedMap& g,
                         const GradedMap& f, int kf) {
  GradedMap out;
  for (const auto& [kf_key, fv] : f) {
    auto [n, m, c] = kf_key;
    for (const auto& [kg_key, gv] : g) {
      auto [n2, r, m2] = kg_key;
      if (n2 != n + kf || m2 != m) continue;
      auto& slot = out[{n, r, c}];
      for (const auto& [fb, fc] : fv) {
        for (const auto& [gb, gc] : gv) {
          for (const auto& [p, pc] : t.product(fb, gb)) slot[p] += fc * gc * pc;
        }
      }
    }
  }
  for (auto it = out.begin(); it != out.end();) {
    for (auto jt = it->second.begin(); jt != it->second.end();) {
      jt = sgn(jt->second) == 0 ? it->second.erase(jt) : std::next(jt);
    }
    it = it->second.empty() ? out.erase(it) : std::next(it);
  }
  return out;
}

inline GradedMap add(GradedMap a, const GradedMap& b, const Scalar& s = 1) {
  for (const auto& [k, v] : b) {
    for (const auto& [i, c] : v) a[k][i] += s * c;
  }
  return a;
}

// Coordinates of all degree-k graded maps X -> Y.
struct Layout {
  std::vector<std::tuple<int, int, int, int>> coords;  // n, r, c, basis
  std::map<std::tuple<int, int, int, int>, std::size_t> index;

  Layout(const NormalFormTable& t, const TwoTermComplex& x,
         const TwoTermComplex& y, int k) {
    for (int n : degrees(x)) {
      const auto* xs = terms_at(x, n);
      const auto* ys = terms_at(y, n + k);
      if (!ys) continue;
      for (std::size_t r = 0; r < ys->size(); ++r) {
        for (std::size_t c = 0; c < xs->size(); ++c) {
          for (int b : t.hom_indices((*ys)[r], (*xs)[c])) {
            index[{n, static_cast<int>(r), static_cast<int>(c), b}] = coords.size();
            coords.emplace_back(n, static_cast<int>(r), static_cast<int>(c), b);
          }
        }
      }
    }
  }

  std::size_t size() const { return coords.size(); }

  GradedMap unit_map(std::size_t k) const {
    auto [n, r, c, b] = coords[k];
    GradedMap m;
    m[{n, r, c}][b] = 1;
    return m;
  }

  GradedMap to_map(const Vec& v) const {
    GradedMap m;
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (sgn(v[k]) == 0) continue;
      auto [n, r, c, b] = coords[k];
      m[{n, r, c}][b] += v[k];
    }
    return m;
  }

  Vec to_vec(const GradedMap& m) const {
    Vec v(coords.size(), Scalar(0));
    for (const auto& [key, entries] : m) {
      auto [n, r, c] = key;
      for (const auto& [b, coef] : entries) {
        if (sgn(coef) == 0) continue;
        auto it = index.find({n, r, c, b});
        if (it == index.end()) throw std::logic_error("graded map outside layout");
        v[it->second] += coef;
      }
    }
    return v;
  }
};

}  // namespace oracle_detail

// Hom(X, Y) in the homotopy category: chain maps modulo null-homotopic ones.
struct HomClassSpace {
  TwoTermComplex from;
  TwoTermComplex to;
  oracle_detail::Layout layout;
  linalg::Rows basis;  // chain maps, in layout coordinates
  std::size_t boundary_rank = 0;
  linalg::EchelonBasis reducer{0, true};

  std::size_t dimension() const noexcept { return basis.size(); }

  // Class of a chain map in terms of `basis`.
  linalg::Vec coordinates(const linalg::Vec& chain_map) const {
    auto all = reducer.coordinates(chain_map);
    if (!all) throw std::logic_error("not a chain map");
    return linalg::Vec(all->begin() + static_cast<long>(boundary_rank), all->end());
  }
};

inline HomClassSpace hom_classes(const NormalFormTable& t, const TwoTermComplex& x,
                                 const TwoTermComplex& y) {
  using namespace oracle_detail;
  Layout maps(t, x, y, 0);
  Layout up(t, x, y, 1);
  Layout down(t, x, y, -1);
  GradedMap dx = differential(t, x), dy = differential(t, y);

  // f is a chain map iff dy f - f dx = 0.
  Rows cols;
  for (std::size_t k = 0; k < maps.size(); ++k) {
    GradedMap f = maps.unit_map(k);
    cols.push_back(up.to_vec(add(compose(t, dy, f, 0), compose(t, f, dx, 1), -1)));
  }
  Rows a(up.size(), Vec(maps.size(), Scalar(0)));
  for (std::size_t k = 0; k < maps.size(); ++k) {
    for (std::size_t r = 0; r < up.size(); ++r) a[r][k] = cols[k][r];
  }
  Rows cycles = linalg::kernel(a, maps.size());

  Rows bounds;
  for (std::size_t k = 0; k < down.size(); ++k) {
    GradedMap h = down.unit_map(k);
    bounds.push_back(maps.to_vec(add(compose(t, dy, h, -1), compose(t, h, dx, 1))));
  }
  bounds = linalg::rref(std::move(bounds));

  HomClassSpace hs{x, y, maps, linalg::complement(bounds, cycles, maps.size()),
                   bounds.size(), linalg::EchelonBasis(maps.size(), true)};
  for (const auto& b : bounds) hs.reducer.insert(b);
  for (const auto& b : hs.basis) hs.reducer.insert(b);
  return hs;
}

// Finite-dimensional algebra with a basis of block elements. Element k runs
// from vertex source[k] to target[k]; mul(x, y) is "first y, then x".
struct FiniteDimAlgebra {
  std::vector<std::string> labels;
  std::vector<int> source;
  std::vector<int> target;
  std::vector<SparseVec> products;  // products[x * dim + y]
  std::vector<linalg::Vec> idempotents;

  std::size_t dimension() const noexcept { return source.size(); }
  std::size_t vertex_count() const noexcept { return labels.size(); }

  linalg::Vec mul(const linalg::Vec& x, const linalg::Vec& y) const {
    const std::size_t d = dimension();
    linalg::Vec out(d, Scalar(0));
    for (std::size_t a = 0; a < d; ++a) {
      if (sgn(x[a]) == 0) continue;
      for (std::size_t b = 0; b < d; ++b) {
        if (sgn(y[b]) == 0) continue;
        for (const auto& [k, c] : products[a * d + b]) out[k] += x[a] * y[b] * c;
      }
    }
    return out;
  }

  linalg::Vec unit(int k) const {
    linalg::Vec v(dimension(), Scalar(0));
    v[k] = 1;
    return v;
  }

  // Entry (a, b) counts basis elements from b to a.
  IntMatrix cartan() const {
    IntMatrix c(vertex_count(), std::vector<long>(vertex_count(), 0));
    for (std::size_t k = 0; k < dimension(); ++k) ++c[target[k]][source[k]];
    return c;
  }

  bool is_associative() const {
    const std::size_t d = dimension();
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < d; ++b) {
        if (source[a] != target[b]) continue;
        for (std::size_t c = 0; c < d; ++c) {
          if (source[b] != target[c]) continue;
          auto l = mul(mul(unit(a), unit(b)), unit(c));
          auto r = mul(unit(a), mul(unit(b), unit(c)));
          if (l != r) return false;
        }
      }
    }
    return true;
  }
};

// A named element offered as an arrow of the Gabriel quiver.
struct Generator {
  std::string name;
  int from = 0;
  int to = 0;
  linalg::Vec image;
};

// End(Lambda/P_i (+) P_i*)^op together with the Hom spaces it was built
// from; objects[i] is P_i*.
struct EndAlgebraData {
  std::vector<TwoTermComplex> objects;
  std::vector<std::vector<HomClassSpace>> hom;  // hom[a][b] = Hom(X_a, X_b)
  std::vector<std::vector<int>> offset;         // first basis index of hom[a][b]
  FiniteDimAlgebra alg;

  // Algebra element of a chain map X_to -> X_from (an element from -> to).
  linalg::Vec element(int from, int to, const oracle_detail::GradedMap& f) const {
    const auto& h = hom[to][from];
    auto coords = h.coordinates(h.layout.to_vec(f));
    linalg::Vec v(alg.dimension(), Scalar(0));
    for (std::size_t k = 0; k < coords.size(); ++k) v[offset[to][from] + k] = coords[k];
    return v;
  }
};

inline EndAlgebraData end_algebra_data(const NormalFormTable& t, int i) {
  auto rep = check_feasible(t, i);
  if (!rep.feasible) throw InfeasibleMutation(rep);
  const Presentation& q = t.presentation();
  const std::size_t n = q.vertex_count();
  std::vector<TwoTermComplex> objects;
  for (std::size_t j = 0; j < n; ++j) {
    objects.push_back(static_cast<int>(j) == i ? build_mutation_complex(t, i)
                                               : stalk(static_cast<int>(j)));
  }

  FiniteDimAlgebra alg;
  std::set<std::string> used(q.vertices.begin(), q.vertices.end());
  for (std::size_t j = 0; j < n; ++j) {
    alg.labels.push_back(static_cast<int>(j) == i
                             ? mutation_detail::fresh_name(q.vertices[j] + "*", used)
                             : q.vertices[j]);
  }

  // Elements of hom[a][b] run from b to a.
  std::vector<std::vector<HomClassSpace>> hom(n);
  std::vector<std::vector<int>> offset(n, std::vector<int>(n, 0));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      hom[a].push_back(hom_classes(t, objects[a], objects[b]));
      offset[a][b] = static_cast<int>(alg.source.size());
      for (std::size_t k = 0; k < hom[a][b].dimension(); ++k) {
        alg.source.push_back(static_cast<int>(b));
        alg.target.push_back(static_cast<int>(a));
      }
    }
  }
  const std::size_t d = alg.source.size();
  alg.products.assign(d * d, {});
  // x in Hom(X_a, X_b) runs b -> a, y in Hom(X_b, X_c) runs c -> b. First y,
  // then x, is the map f_y o f_x in Hom(X_a, X_c).
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const auto& hx = hom[a][b];
      for (std::size_t c = 0; c < n; ++c) {
        const auto& hy = hom[b][c];
        const auto& hz = hom[a][c];
        for (std::size_t kx = 0; kx < hx.dimension(); ++kx) {
          auto fx = hx.layout.to_map(hx.basis[kx]);
          for (std::size_t ky = 0; ky < hy.dimension(); ++ky) {
            auto fy = hy.layout.to_map(hy.basis[ky]);
            auto comp = oracle_detail::compose(t, fy, fx, 0);
            auto coords = hz.coordinates(hz.layout.to_vec(comp));
            SparseVec sv;
            for (std::size_t k = 0; k < coords.size(); ++k) {
              if (sgn(coords[k]) != 0) sv.emplace_back(offset[a][c] + static_cast<int>(k), coords[k]);
            }
            alg.products[(offset[a][b] + kx) * d + offset[b][c] + ky] = std::move(sv);
          }
        }
      }
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    const auto& h = hom[a][a];
    oracle_detail::GradedMap id;
    for (int deg : oracle_detail::degrees(objects[a])) {
      const auto* xs = oracle_detail::terms_at(objects[a], deg);
      for (std::size_t r = 0; r < xs->size(); ++r) {
        id[{deg, static_cast<int>(r), static_cast<int>(r)}]
          [*t.basis_index(trivial_path((*xs)[r]))] = 1;
      }
    }
    auto coords = h.coordinates(h.layout.to_vec(id));
    linalg::Vec e(d, Scalar(0));
    for (std::size_t k = 0; k < coords.size(); ++k) e[offset[a][a] + k] = coords[k];
    alg.idempotents.push_back(std::move(e));
  }
  return {std::move(objects), std::move(hom), std::move(offset), std::move(alg)};
}

// End(Lambda/P_i (+) P_i*)^op, with i* at position i.
inline FiniteDimAlgebra end_algebra(const NormalFormTable& t, int i) {
  return end_algebra_data(t, i).alg;
}

// The arrows of a mutation read as chain maps in End(Lambda/P_i (+) P_i*):
// an arrow u -> v of Q^{i*} is a map X_v -> X_u. Arrows of Q are stalk maps,
// a* is the projection of P_i* onto P_t(a), and bar(r) is the map P_l -> P_i*
// with component r/a at a.
inline std::vector<Generator> natural_generators(const NormalFormTable& t, int i,
                                                 const EndAlgebraData& data,
                                                 const MutationOutcome& m) {
  using oracle_detail::GradedMap;
  const Presentation& q = t.presentation();
  const Presentation& ext = m.extended;
  const int star = static_cast<int>(q.vertex_count());
  const auto out = q.arrows_from(i);
  std::map<std::string, GradedMap> maps;
  for (std::size_t a = 0; a < q.arrows.size(); ++a) {
    maps[q.arrows[a].name][{0, 0, 0}][*t.basis_index(q.arrow_path(static_cast<int>(a)))] = 1;
  }
  std::size_t bar = 0;
  for (std::size_t a = q.arrows.size(); a < ext.arrows.size(); ++a) {
    const auto& ar = ext.arrows[a];
    GradedMap f;
    if (ar.target == star) {
      // a* arrows come in the order of `out`
      std::size_t k = a - q.arrows.size();
      if (k >= out.size()) continue;
      f[{0, 0, static_cast<int>(k)}][*t.basis_index(trivial_path(ar.source))] = 1;
    } else {
      if (bar >= m.minimal_relations.size()) continue;
      for (std::size_t k = 0; k < out.size(); ++k) {
        auto v = t.to_vector(left_quotient(q, m.minimal_relations[bar], out[k]));
        for (std::size_t b = 0; b < v.size(); ++b) {
          if (sgn(v[b]) != 0) f[{0, static_cast<int>(k), 0}][static_cast<int>(b)] = v[b];
        }
      }
      ++bar;
    }
    maps[ar.name] = std::move(f);
  }

  std::vector<Generator> gens;
  for (std::size_t a = 0; a < m.result.arrows.size() && a < m.arrow_words.size(); ++a) {
    const auto& word = m.arrow_words[a];
    GradedMap f;
    bool known = true;
    for (std::size_t w = 0; w < word.size() && known; ++w) {
      auto it = maps.find(word[w]);
      known = it != maps.end();
      // first word[0], then word[1]: f_word[0] o f_word[1]
      if (known) f = w == 0 ? it->second : oracle_detail::compose(t, f, it->second, 0);
    }
    if (!known) continue;
    const auto& ar = m.result.arrows[a];
    gens.push_back({ar.name, ar.source, ar.target, data.element(ar.source, ar.target, f)});
  }
  return gens;
}

namespace oracle_detail {

// Restriction of a family of vectors to the coordinates of one block.
inline Rows block_part(const FiniteDimAlgebra& alg, const Rows& vs, int from, int to) {
  Rows out;
  for (const auto& v : vs) {
    Vec w(alg.dimension(), Scalar(0));
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (alg.source[k] == from && alg.target[k] == to) w[k] = v[k];
    }
    if (!linalg::is_zero(w)) out.push_back(std::move(w));
  }
  return linalg::rref(std::move(out));
}

}  // namespace oracle_detail

// Gabriel quiver and the reduced Groebner basis (deg-lex) of the relations.
// Per block, `preferred` generators become the arrows when they form a
// basis of rad/rad^2 there; other blocks get a canonical basis named u<k>.
inline Presentation extract_presentation(const FiniteDimAlgebra& alg,
                                         int cap = default_degree_cap(),
                                         const std::vector<Generator>& preferred = {}) {
  using linalg::Rows;
  using linalg::Vec;
  const std::size_t d = alg.dimension();
  const std::size_t n = alg.vertex_count();

  // Radical = kernel of the trace form (x, y) -> tr(L_xy).
  Vec tr(d, Scalar(0));
  for (std::size_t z = 0; z < d; ++z) {
    for (std::size_t k = 0; k < d; ++k) {
      for (const auto& [m, c] : alg.products[z * d + k]) {
        if (static_cast<std::size_t>(m) == k) tr[z] += c;
      }
    }
  }
  Rows gram(d, Vec(d, Scalar(0)));
  for (std::size_t x = 0; x < d; ++x) {
    for (std::size_t y = 0; y < d; ++y) {
      for (const auto& [z, c] : alg.products[x * d + y]) gram[x][y] += c * tr[z];
    }
  }
  Rows rad = linalg::kernel(gram, d);
  if (rad.size() + n != d) {
    throw NotBasic("radical has dimension " + std::to_string(rad.size()) +
                   ", expected " + std::to_string(d - n));
  }
  linalg::EchelonBasis rad_span(d);
  for (const auto& r : rad) rad_span.insert(r);
  for (const auto& e : alg.idempotents) {
    if (rad_span.contains(e)) throw RadicalComputationFailed("idempotent in radical");
  }

  Presentation p;
  p.vertices = alg.labels;
  std::map<std::pair<int, int>, Rows> rad_blocks;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      rad_blocks[{static_cast<int>(a), static_cast<int>(b)}] =
          oracle_detail::block_part(alg, rad, static_cast<int>(a), static_cast<int>(b));
    }
  }
  std::vector<Generator> arrows;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const auto& block = rad_blocks[{static_cast<int>(a), static_cast<int>(b)}];
      // rad^2 from a to b: first y (a -> c), then x (c -> b).
      Rows sq;
      for (std::size_t c = 0; c < n; ++c) {
        for (const auto& y : rad_blocks[{static_cast<int>(a), static_cast<int>(c)}]) {
          for (const auto& x : rad_blocks[{static_cast<int>(c), static_cast<int>(b)}]) {
            sq.push_back(alg.mul(x, y));
          }
        }
      }
      Rows top = linalg::complement(sq, block, d);
      std::vector<const Generator*> offered;
      for (const auto& g : preferred) {
        if (g.from == static_cast<int>(a) && g.to == static_cast<int>(b)) offered.push_back(&g);
      }
      if (!offered.empty() && offered.size() == top.size()) {
        // Independent modulo rad^2 and inside rad.
        linalg::EchelonBasis lower(d);
        for (const auto& r : sq) lower.insert(r);
        bool ok = true;
        for (const auto* g : offered) {
          ok = ok && rad_span.contains(g->image) && lower.insert(g->image);
        }
        if (ok) {
          for (const auto* g : offered) arrows.push_back(*g);
          continue;
        }
      }
      for (auto& v : top) arrows.push_back({"", static_cast<int>(a), static_cast<int>(b), std::move(v)});
    }
  }
  std::set<std::string> used;
  for (const auto& g : arrows) {
    if (!g.name.empty()) used.insert(g.name);
  }
  const std::size_t width = std::to_string(arrows.size()).size();
  std::size_t counter = 0;
  for (auto& g : arrows) {
    if (!g.name.empty()) continue;
    do {
      std::string num = std::to_string(++counter);
      g.name = "u" + std::string(width - num.size(), '0') + num;
    } while (used.count(g.name));
    used.insert(g.name);
  }
  std::stable_sort(arrows.begin(), arrows.end(),
                   [](const Generator& x, const Generator& y) { return x.name < y.name; });
  std::vector<Vec> arrow_image;
  for (auto& g : arrows) {
    p.add_arrow(g.name, g.from, g.to);
    arrow_image.push_back(std::move(g.image));
  }

  // Deg-lex walk over words: a word is standard if its image is independent
  // of the images of smaller standard words, otherwise it is a leading term.
  std::vector<Path> standard;
  linalg::EchelonBasis span(d, true);
  std::set<std::vector<int>> tips;
  std::vector<Path> layer;
  for (std::size_t v = 0; v < n; ++v) {
    Path e = trivial_path(static_cast<int>(v));
    if (!span.insert(alg.idempotents[v])) throw NotBasic("dependent idempotents");
    standard.push_back(e);
    layer.push_back(e);
  }
  std::vector<Vec> images;  // of words in `layer`
  for (std::size_t v = 0; v < n; ++v) images.push_back(alg.idempotents[v]);
  int length = 0;
  while (!layer.empty()) {
    if (++length > cap) throw NotAdmissibleWithinCap(cap);
    std::vector<std::pair<Path, Vec>> cands;
    for (std::size_t w = 0; w < layer.size(); ++w) {
      for (int a : p.arrows_from(layer[w].target)) {
        Path x = layer[w];
        x.arrows.push_back(a);
        x.target = p.arrows[a].target;
        bool reducible = false;
        for (std::size_t s = 0; s < x.arrows.size() && !reducible; ++s) {
          reducible = tips.count({x.arrows.begin() + static_cast<long>(s), x.arrows.end()}) > 0;
        }
        if (reducible) continue;
        cands.emplace_back(x, alg.mul(arrow_image[a], images[w]));
      }
    }
    std::sort(cands.begin(), cands.end(),
              [](const auto& l, const auto& r) { return PathOrder{}(l.first, r.first); });
    layer.clear();
    images.clear();
    for (auto& [w, v] : cands) {
      if (auto co = span.coordinates(v)) {
        PathExpr rel = PathExpr::of(w);
        for (std::size_t g = 0; g < co->size(); ++g) {
          if (sgn((*co)[g]) != 0) rel.add_term(standard[g], -(*co)[g]);
        }
        tips.insert(w.arrows);
        p.relations.push_back(std::move(rel));
      } else {
        span.insert(v);
        standard.push_back(w);
        layer.push_back(w);
        images.push_back(std::move(v));
      }
    }
  }
  return p;
}

struct CartanComparison {
  IntMatrix predicted;
  IntMatrix actual;
  bool equal() const { return predicted == actual; }
};

// Predicted Cartan matrix T C T^t, from [P_i*] = sum_a [P_t(a)] - [P_i].
inline IntMatrix predicted_cartan(const NormalFormTable& t, int i) {
  const Presentation& q = t.presentation();
  const std::size_t n = q.vertex_count();
  IntMatrix tr(n, std::vector<long>(n, 0));
  for (std::size_t k = 0; k < n; ++k) tr[k][k] = 1;
  tr[i][i] = -1;
  for (int a : q.arrows_from(i)) tr[i][q.arrows[a].target] += 1;
  IntMatrix c = cartan_matrix(t);
  IntMatrix tc(n, std::vector<long>(n, 0)), out(n, std::vector<long>(n, 0));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t s = 0; s < n; ++s) tc[r][s] += tr[r][k] * c[k][s];
    }
  }
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t k = 0; k < n; ++k) out[r][s] += tc[r][k] * tr[s][k];
    }
  }
  return out;
}

inline CartanComparison cartan_prediction(const NormalFormTable& t, int i) {
  auto alg = end_algebra(t, i);
  return {predicted_cartan(t, i), alg.cartan()};
}

struct VerifyReport {
  bool match = false;
  Presentation mutated;  // cleaned
  Presentation oracle;
  std::size_t mutated_dimension = 0;
  std::size_t oracle_dimension = 0;
  IntMatrix oracle_cartan;
  std::optional<IsoWitness> witness;
};

inline VerifyReport verify(const NormalFormTable& t, int i) {
  VerifyReport rep;
  auto data = end_algebra_data(t, i);
  const auto& alg = data.alg;
  auto outcome = mutate(t, i);
  rep.mutated = clean(outcome.result, t.degree_cap());
  // The mutated arrows that survive cleanup, as elements of the oracle algebra.
  std::vector<Generator> hints;
  for (auto& g : natural_generators(t, i, data, outcome)) {
    auto a = rep.mutated.find_arrow(g.name);
    if (a && rep.mutated.arrows[*a].source == g.from && rep.mutated.arrows[*a].target == g.to) {
      hints.push_back(std::move(g));
    }
  }
  rep.oracle = extract_presentation(alg, t.degree_cap(), hints);
  rep.oracle_dimension = alg.dimension();
  rep.oracle_cartan = alg.cartan();
  rep.mutated_dimension = build_table(rep.mutated, t.degree_cap()).dimension();
  IsoOptions opt;
  opt.cap = t.degree_cap();
  rep.witness = find_isomorphism(rep.mutated, rep.oracle, opt);
  rep.match = rep.witness.has_value();
  return rep;
}

inline VerifyReport verify(const Presentation& p, int i, int cap = default_degree_cap()) {
  Presentation c = p;
  canonicalize(c);
  return verify(build_table(c, cap), i);
}

}  // namespace tiltmut
