#pragma once
// Cleanup of mutated presentations and isomorphism testing.

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "tiltmut/algebra.hpp"
#include "tiltmut/errors.hpp"
#include "tiltmut/linalg.hpp"
#include "tiltmut/quiver.hpp"

namespace tiltmut {

class SubstitutionCycle : public Error {
 public:
  explicit SubstitutionCycle(const std::string& arrow)
      : Error(ErrorCode::Validation,
              "cannot cancel: every unit arrow of the relation reappears in it (" +
                  arrow + ")") {}
};

namespace simplify_detail {

// Replaces every occurrence of arrow a in e by `repl`.
inline PathExpr substitute(const Presentation& p, const PathExpr& e, int a,
                           const PathExpr& repl) {
  PathExpr out(e.source(), e.target());
  for (const auto& [path, c] : e.terms()) {
    if (std::find(path.arrows.begin(), path.arrows.end(), a) == path.arrows.end()) {
      out.add_term(path, c);
      continue;
    }
    PathExpr acc = PathExpr::of(trivial_path(path.source));
    for (int x : path.arrows) {
      acc = compose_expr(x == a ? repl : PathExpr::of(p.arrow_path(x)), acc);
    }
    acc *= c;
    out += acc;
  }
  return out;
}

inline void drop_arrow(Presentation& p, int a) {
  p.arrows.erase(p.arrows.begin() + a);
  for (auto& r : p.relations) {
    PathExpr out(r.source(), r.target());
    for (const auto& [path, c] : r.terms()) {
      Path q = path;
      for (int& x : q.arrows) {
        if (x == a) throw std::logic_error("drop_arrow: arrow still in use");
        if (x > a) --x;
      }
      out.add_term(q, c);
    }
    r = std::move(out);
  }
}

inline std::vector<Path> all_paths_of_length(const Presentation& p, int len) {
  std::vector<Path> layer;
  for (std::size_t v = 0; v < p.vertex_count(); ++v) layer.push_back(trivial_path(static_cast<int>(v)));
  for (int k = 0; k < len; ++k) {
    std::vector<Path> next;
    for (const auto& w : layer) {
      for (int a : p.arrows_from(w.target)) {
        Path x = w;
        x.arrows.push_back(a);
        x.target = p.arrows[a].target;
        next.push_back(std::move(x));
      }
    }
    layer = std::move(next);
  }
  return layer;
}

// Total order on expressions: compare terms from the leading one down.
inline bool expr_less(const PathExpr& a, const PathExpr& b) {
  auto ia = a.terms().rbegin();
  auto ib = b.terms().rbegin();
  PathOrder po;
  for (; ia != a.terms().rend() && ib != b.terms().rend(); ++ia, ++ib) {
    if (po(ia->first, ib->first)) return true;
    if (po(ib->first, ia->first)) return false;
    if (ia->second != ib->second) return ia->second < ib->second;
  }
  return a.size() < b.size();
}

}  // namespace simplify_detail

// Removes relations with a single-arrow term together with that arrow, by
// solving the relation for the arrow and substituting everywhere. An arrow
// that reappears in longer terms (x = E(x)) is solved by iterating the
// substitution; terms of length >= the nil index are zero and get dropped,
// and if that loses part of the ideal the paths of that length are added back.
inline Presentation cancel_unit_relations(Presentation p, int cap = default_degree_cap()) {
  std::optional<int> nil;
  std::optional<std::size_t> dim;
  bool truncated = false;
  while (true) {
    int k = -1;
    for (std::size_t r = 0; r < p.relations.size() && k < 0; ++r) {
      for (const auto& [path, c] : p.relations[r].terms()) {
        if (path.length() == 1) {
          k = static_cast<int>(r);
          break;
        }
      }
    }
    if (k < 0) break;
    const PathExpr r = p.relations[k];
    std::optional<int> chosen, fallback;
    Scalar coef, fallback_coef;
    for (auto it = r.terms().rbegin(); it != r.terms().rend(); ++it) {
      if (it->first.length() != 1) continue;
      int a = it->first.arrows.front();
      bool reappears = false;
      for (const auto& [path, c] : r.terms()) {
        if (path.length() > 1 &&
            std::find(path.arrows.begin(), path.arrows.end(), a) != path.arrows.end()) {
          reappears = true;
        }
      }
      if (!reappears) {
        chosen = a;
        coef = it->second;
        break;
      }
      if (!fallback) {
        fallback = a;
        fallback_coef = it->second;
      }
    }
    const bool cyclic = !chosen;
    if (cyclic) {
      chosen = fallback;
      coef = fallback_coef;
    }
    PathExpr repl = r;
    repl.add_term(p.arrow_path(*chosen), -coef);
    repl *= Scalar(-1) / coef;
    if (cyclic) {
      if (!nil) {
        try {
          ValidateOptions raw;
          raw.allow_unit_terms = true;
          auto t = build_table(p, cap, raw);
          nil = t.nil_index();
          dim = t.dimension();
        } catch (const Error&) {
          throw SubstitutionCycle(p.arrows[*chosen].name);
        }
      }
      const PathExpr e = repl;
      auto uses = [&](const PathExpr& x) {
        for (const auto& [path, c] : x.terms()) {
          if (std::find(path.arrows.begin(), path.arrows.end(), *chosen) != path.arrows.end()) {
            return true;
          }
        }
        return false;
      };
      for (int round = 0; uses(repl); ++round) {
        if (round > *nil) throw SubstitutionCycle(p.arrows[*chosen].name);
        PathExpr next = simplify_detail::substitute(p, e, *chosen, repl);
        PathExpr cut(next.source(), next.target());
        for (const auto& [path, c] : next.terms()) {
          if (static_cast<int>(path.length()) < *nil) {
            cut.add_term(path, c);
          } else {
            truncated = true;
          }
        }
        repl = std::move(cut);
      }
    }
    p.relations.erase(p.relations.begin() + k);
    std::vector<PathExpr> rest;
    for (const auto& e : p.relations) {
      PathExpr x = simplify_detail::substitute(p, e, *chosen, repl);
      if (!x.is_zero()) rest.push_back(std::move(x));
    }
    p.relations = std::move(rest);
    simplify_detail::drop_arrow(p, *chosen);
  }
  if (truncated) {
    bool same = false;
    try {
      same = build_table(p, cap).dimension() == *dim;
    } catch (const Error&) {
    }
    if (!same) {
      for (const auto& w : simplify_detail::all_paths_of_length(p, *nil)) p.relations.push_back(PathExpr::of(w));
    }
  }
  return p;
}

// Drops relations lying in the ideal generated by the remaining ones. Longer
// relations are examined first, so shorter generators survive. Output
// relations are monic, ordered by leading term. A relation whose membership
// cannot be decided within the cap is kept.
inline Presentation prune_redundant_relations(const Presentation& p,
                                              int cap = default_degree_cap()) {
  std::vector<PathExpr> rels;
  for (const auto& r : p.relations) {
    if (!r.is_zero()) rels.push_back(r.monic());
  }
  std::sort(rels.begin(), rels.end(), [](const PathExpr& a, const PathExpr& b) {
    return simplify_detail::expr_less(b, a);
  });
  rels.erase(std::unique(rels.begin(), rels.end()), rels.end());
  std::vector<bool> alive(rels.size(), true);
  for (std::size_t k = 0; k < rels.size(); ++k) {
    std::vector<PathExpr> others;
    for (std::size_t j = 0; j < rels.size(); ++j) {
      if (j != k && alive[j]) others.push_back(rels[j]);
    }
    try {
      if (ideal_membership(p, rels[k], others, cap)) alive[k] = false;
    } catch (const NotAdmissibleWithinCap&) {
    }
  }
  Presentation out = p;
  out.relations.clear();
  for (std::size_t k = rels.size(); k-- > 0;) {
    if (alive[k]) out.relations.push_back(rels[k]);
  }
  return out;
}

// Cancel, then prune, until nothing changes.
inline Presentation clean(Presentation p, int cap = default_degree_cap()) {
  for (int round = 0; round < 16; ++round) {
    Presentation next = prune_redundant_relations(cancel_unit_relations(p, cap), cap);
    canonicalize(next);
    if (next == p) break;
    p = std::move(next);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Isomorphism search.

struct IsoWitness {
  std::vector<int> vertex_map;  // p1 vertex -> p2 vertex
  // Leading part of each arrow image: (p2 arrow, scalar).
  std::vector<std::pair<int, Scalar>> arrow_map;
  // Full image of each p1 arrow in p2 (normal form). Differs from the
  // leading part only when higher-order terms were needed.
  std::vector<PathExpr> arrow_images;
  bool monomial = true;
};

class SearchBudgetExceeded : public Error {
 public:
  explicit SearchBudgetExceeded(long explored)
      : Error(ErrorCode::Internal, "isomorphism search budget exceeded after " +
                                       std::to_string(explored) + " candidates"),
        explored_(explored) {}
  long explored() const noexcept { return explored_; }

 private:
  long explored_;
};

struct IsoOptions {
  long budget = 100000;
  int cap = default_degree_cap();
  // Allow arrow images with higher-order terms (and mixing of parallel
  // arrows) when no pure scalar matching exists.
  bool allow_corrections = true;
};

namespace iso_detail {

using linalg::Vec;

inline Vec unit(const NormalFormTable& t, int idx) {
  Vec v(t.dimension(), Scalar(0));
  v[idx] = 1;
  return v;
}

// x after y
inline Vec mul(const NormalFormTable& t, const Vec& x, const Vec& y) {
  Vec out(t.dimension(), Scalar(0));
  for (std::size_t a = 0; a < x.size(); ++a) {
    if (sgn(x[a]) == 0) continue;
    for (std::size_t b = 0; b < y.size(); ++b) {
      if (sgn(y[b]) == 0) continue;
      Scalar ab = x[a] * y[b];
      for (const auto& [r, c] : t.product(static_cast<int>(a), static_cast<int>(b))) {
        out[r] += ab * c;
      }
    }
  }
  return out;
}

inline std::optional<Scalar> rational_root(const Scalar& x, unsigned e) {
  if (e == 1) return x;
  if (sgn(x) < 0 && e % 2 == 0) return std::nullopt;
  mpz_class num = abs(x.get_num());
  mpz_class den = x.get_den();
  mpz_class rn, rd;
  if (mpz_root(rn.get_mpz_t(), num.get_mpz_t(), e) == 0) return std::nullopt;
  if (mpz_root(rd.get_mpz_t(), den.get_mpz_t(), e) == 0) return std::nullopt;
  Scalar r(rn, rd);
  r.canonicalize();
  if (sgn(x) < 0) r = -r;
  return r;
}

class Searcher {
 public:
  Searcher(const NormalFormTable& t1, const NormalFormTable& t2, IsoOptions opt)
      : t1_(t1), t2_(t2), p1_(t1.presentation()), p2_(t2.presentation()), opt_(opt) {
    n_ = p1_.vertex_count();
    adj1_ = adjacency(p1_);
    adj2_ = adjacency(p2_);
    c1_ = cartan_matrix(t1_);
    c2_ = cartan_matrix(t2_);
    for (std::size_t b = 0; b < p2_.arrows.size(); ++b) {
      int idx = *t2_.basis_index(p2_.arrow_path(static_cast<int>(b)));
      arrow_vec2_.push_back(unit(t2_, idx));
      arrow_idx2_.push_back(idx);
    }
    // Powers of the radical of the second algebra.
    linalg::EchelonBasis r1(t2_.dimension());
    std::vector<Vec> gens;
    for (std::size_t k = 0; k < t2_.dimension(); ++k) {
      if (!t2_.basis()[k].is_trivial()) {
        r1.insert(unit(t2_, static_cast<int>(k)));
        gens.push_back(unit(t2_, static_cast<int>(k)));
      }
    }
    rad_.push_back(linalg::EchelonBasis(t2_.dimension()));  // unused slot 0
    rad_.push_back(r1);
    while (!gens.empty()) {
      linalg::EchelonBasis next(t2_.dimension());
      std::vector<Vec> next_gens;
      for (const auto& g : gens) {
        for (const auto& a : arrow_vec2_) {
          Vec v = mul(t2_, a, g);
          if (next.insert(v)) next_gens.push_back(std::move(v));
        }
      }
      rad_.push_back(next);
      gens = std::move(next_gens);
    }
  }

  std::optional<IsoWitness> run() {
    std::vector<int> pi(n_, -1);
    std::vector<bool> used(n_, false);
    return assign(0, pi, used);
  }

  long explored() const noexcept { return explored_; }

 private:
  using Matrix = std::vector<std::vector<long>>;

  static Matrix adjacency(const Presentation& p) {
    Matrix m(p.vertex_count(), std::vector<long>(p.vertex_count(), 0));
    for (const auto& a : p.arrows) ++m[a.source][a.target];
    return m;
  }

  std::optional<IsoWitness> assign(std::size_t v, std::vector<int>& pi,
                                   std::vector<bool>& used) {
    if (v == n_) return try_arrows(pi);
    std::vector<int> cands;
    for (std::size_t w = 0; w < n_; ++w) {
      if (!used[w]) cands.push_back(static_cast<int>(w));
    }
    std::stable_partition(cands.begin(), cands.end(), [&](int w) {
      return p2_.vertices[w] == p1_.vertices[v];
    });
    for (int w : cands) {
      if (!compatible(v, w, pi)) continue;
      pi[v] = w;
      used[w] = true;
      if (auto r = assign(v + 1, pi, used)) return r;
      used[w] = false;
      pi[v] = -1;
    }
    return std::nullopt;
  }

  bool compatible(std::size_t v, int w, const std::vector<int>& pi) const {
    if (adj1_[v][v] != adj2_[w][w] || c1_[v][v] != c2_[w][w]) return false;
    long out1 = 0, out2 = 0, in1 = 0, in2 = 0;
    for (std::size_t u = 0; u < n_; ++u) {
      out1 += adj1_[v][u];
      in1 += adj1_[u][v];
      out2 += adj2_[w][u];
      in2 += adj2_[u][w];
    }
    if (out1 != out2 || in1 != in2) return false;
    for (std::size_t u = 0; u < v; ++u) {
      int pu = pi[u];
      if (adj1_[u][v] != adj2_[pu][w] || adj1_[v][u] != adj2_[w][pu]) return false;
      if (c1_[u][v] != c2_[pu][w] || c1_[v][u] != c2_[w][pu]) return false;
    }
    return true;
  }

  std::optional<IsoWitness> try_arrows(const std::vector<int>& pi) {
    // Parallel classes of p1 arrows and their candidate targets in p2.
    std::map<std::pair<int, int>, std::vector<int>> blocks1;
    for (std::size_t a = 0; a < p1_.arrows.size(); ++a) {
      blocks1[{p1_.arrows[a].source, p1_.arrows[a].target}].push_back(static_cast<int>(a));
    }
    std::vector<std::vector<int>> src, dst;
    for (const auto& [key, arrows] : blocks1) {
      std::vector<int> targets;
      for (std::size_t b = 0; b < p2_.arrows.size(); ++b) {
        if (p2_.arrows[b].source == pi[key.first] && p2_.arrows[b].target == pi[key.second]) {
          targets.push_back(static_cast<int>(b));
        }
      }
      if (targets.size() != arrows.size()) return std::nullopt;
      src.push_back(arrows);
      dst.push_back(targets);
    }
    std::vector<int> sigma(p1_.arrows.size(), -1);
    std::optional<IsoWitness> found;
    std::function<bool(std::size_t)> rec = [&](std::size_t k) -> bool {
      if (k == src.size()) {
        if (++explored_ > opt_.budget) throw SearchBudgetExceeded(explored_);
        found = try_scalars(pi, sigma);
        return found.has_value();
      }
      std::vector<int> perm = dst[k];
      do {
        for (std::size_t j = 0; j < src[k].size(); ++j) sigma[src[k][j]] = perm[j];
        if (rec(k + 1)) return true;
      } while (std::next_permutation(perm.begin(), perm.end()));
      return false;
    };
    rec(0);
    if (found || !opt_.allow_corrections) return found;
    // Second pass with higher-order terms, identity matching per block.
    for (std::size_t k = 0; k < src.size(); ++k) {
      for (std::size_t j = 0; j < src[k].size(); ++j) sigma[src[k][j]] = dst[k][j];
    }
    return try_lifted(pi, sigma);
  }

  Vec word_image(const std::vector<int>& word, const std::vector<int>& sigma,
                 int source) const {
    if (word.empty()) return unit(t2_, *t2_.basis_index(trivial_path(source)));
    Vec acc = arrow_vec2_[sigma[word.front()]];
    for (std::size_t k = 1; k < word.size(); ++k) {
      acc = mul(t2_, arrow_vec2_[sigma[word[k]]], acc);
    }
    return acc;
  }

  struct ScalarTerm {
    Scalar coef;
    const std::vector<int>* word;
  };

  // Solves the lowest-order parts of the relations for per-arrow scalars
  // after fixing a spanning forest to 1.
  std::optional<std::vector<Scalar>> solve_scalars(const std::vector<int>& pi,
                                                   const std::vector<int>& sigma) {
    const std::size_t m1 = p1_.arrows.size();
    std::vector<std::optional<Scalar>> s(m1);
    std::vector<int> parent(n_);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
      return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    for (std::size_t a = 0; a < m1; ++a) {
      int x = find(p1_.arrows[a].source), y = find(p1_.arrows[a].target);
      if (x != y) {
        parent[x] = y;
        s[a] = Scalar(1);
      }
    }
    std::vector<std::vector<ScalarTerm>> eqs;
    for (const auto& r : p1_.relations) {
      std::size_t m = r.min_length();
      std::map<std::size_t, std::vector<ScalarTerm>> by_coord;
      for (const auto& [path, c] : r.terms()) {
        Vec v = word_image(path.arrows, sigma, pi[path.source]);
        if (m + 1 < rad_.size()) v = rad_[m + 1].reduce(v);
        for (std::size_t k = 0; k < v.size(); ++k) {
          if (sgn(v[k]) != 0) by_coord[k].push_back({c * v[k], &path.arrows});
        }
      }
      for (auto& [k, terms] : by_coord) eqs.push_back(std::move(terms));
    }
    while (true) {
      bool progress = false;
      for (const auto& eq : eqs) {
        Scalar known = 0, unk_coef = 0;
        int unk = -1;
        long exp = 0;
        bool multi = false;
        for (const auto& term : eq) {
          Scalar prod = term.coef;
          std::map<int, long> unknowns;
          for (int a : *term.word) {
            if (s[a]) {
              prod *= *s[a];
            } else {
              ++unknowns[a];
            }
          }
          if (unknowns.empty()) {
            known += prod;
          } else if (unknowns.size() == 1) {
            auto [x, e] = *unknowns.begin();
            if (unk == -1) {
              unk = x;
              exp = e;
            } else if (unk != x || exp != e) {
              multi = true;
            }
            unk_coef += prod;
          } else {
            multi = true;
          }
        }
        if (multi) continue;
        if (unk == -1 || sgn(unk_coef) == 0) {
          if (sgn(known) != 0) return std::nullopt;
          continue;
        }
        Scalar val = -known / unk_coef;
        if (sgn(val) == 0) return std::nullopt;
        auto root = rational_root(val, static_cast<unsigned>(exp));
        if (!root) return std::nullopt;
        s[unk] = *root;
        progress = true;
      }
      if (!progress) {
        auto it = std::find_if(s.begin(), s.end(), [](const auto& x) { return !x; });
        if (it == s.end()) break;
        *it = Scalar(1);
      }
    }
    std::vector<Scalar> out;
    for (auto& x : s) out.push_back(*x);
    return out;
  }

  PathExpr vec_to_expr(const Vec& v, int source, int target) const {
    return t2_.from_vector(v, source, target);
  }

  std::optional<IsoWitness> try_scalars(const std::vector<int>& pi,
                                        const std::vector<int>& sigma) {
    auto scalars = solve_scalars(pi, sigma);
    if (!scalars) return std::nullopt;
    const auto& s = *scalars;
    for (const auto& r : p1_.relations) {
      Vec acc(t2_.dimension(), Scalar(0));
      for (const auto& [path, c] : r.terms()) {
        Scalar coef = c;
        for (int a : path.arrows) coef *= s[a];
        linalg::axpy(acc, -coef, word_image(path.arrows, sigma, pi[path.source]));
      }
      if (!linalg::is_zero(acc)) return std::nullopt;
    }
    // Inverse direction: p2 relations pulled back must lie in I1.
    std::vector<int> inv(p2_.arrows.size());
    for (std::size_t a = 0; a < sigma.size(); ++a) inv[sigma[a]] = static_cast<int>(a);
    std::vector<int> vinv(n_);
    for (std::size_t v = 0; v < n_; ++v) vinv[pi[v]] = static_cast<int>(v);
    for (const auto& r : p2_.relations) {
      PathExpr back(vinv[r.source()], vinv[r.target()]);
      for (const auto& [path, c] : r.terms()) {
        Path q{vinv[path.source], vinv[path.target], {}};
        Scalar coef = c;
        for (int b : path.arrows) {
          q.arrows.push_back(inv[b]);
          coef /= s[inv[b]];
        }
        back.add_term(q, coef);
      }
      if (!t1_.reduce(back).is_zero()) return std::nullopt;
    }
    IsoWitness w;
    w.vertex_map = pi;
    for (std::size_t a = 0; a < sigma.size(); ++a) {
      w.arrow_map.emplace_back(sigma[a], s[a]);
      w.arrow_images.push_back(PathExpr::of(p2_.arrow_path(sigma[a]), s[a]));
    }
    return w;
  }

  // Newton lifting: start from the scalar matching (scalars from the lowest
  // order parts, or 1) and correct arrow images by elements of the same
  // block until every relation maps to zero.
  std::optional<IsoWitness> try_lifted(const std::vector<int>& pi,
                                       const std::vector<int>& sigma) {
    const std::size_t m1 = p1_.arrows.size();
    auto scalars = solve_scalars(pi, sigma);
    std::vector<Vec> x(m1);
    for (std::size_t a = 0; a < m1; ++a) {
      x[a] = arrow_vec2_[sigma[a]];
      if (scalars) {
        for (auto& c : x[a]) c *= (*scalars)[a];
      }
    }
    struct Unknown {
      int arrow;
      int basis;
    };
    std::vector<Unknown> unknowns;
    for (std::size_t a = 0; a < m1; ++a) {
      int u = pi[p1_.arrows[a].source], v = pi[p1_.arrows[a].target];
      for (int b : t2_.hom_indices(u, v)) {
        if (!t2_.basis()[b].is_trivial()) unknowns.push_back({static_cast<int>(a), b});
      }
    }
    // rref pivots on the leftmost columns: prefer long corrections so the
    // linear parts move only when nothing else can absorb the residual.
    std::stable_sort(unknowns.begin(), unknowns.end(), [&](const Unknown& l, const Unknown& r) {
      return t2_.basis()[l.basis].length() > t2_.basis()[r.basis].length();
    });
    const int max_iter = 2 * t2_.nil_index() + 4;
    for (int iter = 0; iter <= max_iter; ++iter) {
      // Residuals and Jacobian, row-blocked by relation and coordinate.
      linalg::Rows rows;
      bool zero = true;
      for (const auto& r : p1_.relations) {
        int u = pi[r.source()], v = pi[r.target()];
        const auto& coords = t2_.hom_indices(u, v);
        Vec f(t2_.dimension(), Scalar(0));
        std::vector<Vec> jac(unknowns.size(), Vec(t2_.dimension(), Scalar(0)));
        for (const auto& [path, c] : r.terms()) {
          const auto& w = path.arrows;
          const std::size_t len = w.size();
          // right[k] = X_{w_k-1} ... X_{w_0}; left[k] = X_{w_len-1} ... X_{w_k+1}
          std::vector<std::optional<Vec>> right(len + 1), left(len + 1);
          for (std::size_t k = 1; k <= len; ++k) {
            right[k] = right[k - 1] ? mul(t2_, x[w[k - 1]], *right[k - 1]) : x[w[k - 1]];
          }
          for (std::size_t k = len; k-- > 0;) {
            if (k + 1 < len) {
              left[k] = left[k + 1] ? mul(t2_, *left[k + 1], x[w[k + 1]]) : x[w[k + 1]];
            }
          }
          if (right[len]) linalg::axpy(f, -c, *right[len]);
          for (std::size_t k = 0; k < len; ++k) {
            for (std::size_t q = 0; q < unknowns.size(); ++q) {
              if (unknowns[q].arrow != w[k]) continue;
              Vec d = unit(t2_, unknowns[q].basis);
              if (right[k]) d = mul(t2_, d, *right[k]);
              if (left[k]) d = mul(t2_, *left[k], d);
              linalg::axpy(jac[q], -c, d);
            }
          }
        }
        for (int k : coords) {
          if (sgn(f[k]) != 0) zero = false;
          Vec row(unknowns.size() + 1, Scalar(0));
          for (std::size_t q = 0; q < unknowns.size(); ++q) row[q] = jac[q][k];
          row[unknowns.size()] = -f[k];
          rows.push_back(std::move(row));
        }
      }
      if (zero) return finish_lifted(pi, sigma, x);
      if (iter == max_iter) break;
      std::vector<std::size_t> piv;
      auto red = linalg::rref(rows, &piv);
      Vec delta(unknowns.size(), Scalar(0));
      for (std::size_t k = 0; k < piv.size(); ++k) {
        if (piv[k] == unknowns.size()) return std::nullopt;  // inconsistent
        delta[piv[k]] = red[k][unknowns.size()];
      }
      for (std::size_t q = 0; q < unknowns.size(); ++q) {
        x[unknowns[q].arrow][unknowns[q].basis] += delta[q];
      }
    }
    return std::nullopt;
  }

  std::optional<IsoWitness> finish_lifted(const std::vector<int>& pi,
                                          const std::vector<int>& sigma,
                                          const std::vector<Vec>& x) {
    // Linear parts must be invertible block by block.
    std::map<std::pair<int, int>, std::vector<int>> blocks1;
    for (std::size_t a = 0; a < p1_.arrows.size(); ++a) {
      blocks1[{p1_.arrows[a].source, p1_.arrows[a].target}].push_back(static_cast<int>(a));
    }
    for (const auto& [key, arrows] : blocks1) {
      linalg::Rows m;
      for (int a : arrows) {
        Vec row;
        for (std::size_t b = 0; b < p2_.arrows.size(); ++b) {
          if (p2_.arrows[b].source == pi[key.first] && p2_.arrows[b].target == pi[key.second]) {
            row.push_back(x[a][arrow_idx2_[b]]);
          }
        }
        m.push_back(std::move(row));
      }
      if (linalg::rank(m) != arrows.size()) return std::nullopt;
    }
    IsoWitness w;
    w.vertex_map = pi;
    w.monomial = false;
    for (std::size_t a = 0; a < p1_.arrows.size(); ++a) {
      w.arrow_map.emplace_back(sigma[a], x[a][arrow_idx2_[sigma[a]]]);
      w.arrow_images.push_back(vec_to_expr(x[a], pi[p1_.arrows[a].source],
                                           pi[p1_.arrows[a].target]));
    }
    return w;
  }

  const NormalFormTable& t1_;
  const NormalFormTable& t2_;
  const Presentation& p1_;
  const Presentation& p2_;
  IsoOptions opt_;
  std::size_t n_ = 0;
  Matrix adj1_, adj2_;
  IntMatrix c1_, c2_;
  std::vector<Vec> arrow_vec2_;
  std::vector<int> arrow_idx2_;
  std::vector<linalg::EchelonBasis> rad_;
  long explored_ = 0;
};

}  // namespace iso_detail

// Searches for an isomorphism of the presented algebras that sends vertices
// to vertices and arrows to nonzero multiples of arrows (plus, if allowed,
// higher-order terms). Both presentations must be admissible within the cap.
inline std::optional<IsoWitness> find_isomorphism(const Presentation& p1,
                                                  const Presentation& p2,
                                                  IsoOptions opt = {}) {
  if (p1.vertex_count() != p2.vertex_count() || p1.arrows.size() != p2.arrows.size()) {
    return std::nullopt;
  }
  Presentation a = p1, b = p2;
  canonicalize(a);
  canonicalize(b);
  auto t1 = build_table(a, opt.cap);
  auto t2 = build_table(b, opt.cap);
  if (t1.dimension() != t2.dimension()) return std::nullopt;
  iso_detail::Searcher s(t1, t2, opt);
  auto w = s.run();
  if (!w) return w;
  // Report arrow indices in the callers' numbering.
  auto index_in = [](const Presentation& orig, const Presentation& canon, int k) {
    return *orig.find_arrow(canon.arrows[k].name);
  };
  IsoWitness out;
  out.vertex_map = w->vertex_map;
  out.monomial = w->monomial;
  out.arrow_map.resize(p1.arrows.size());
  out.arrow_images.resize(p1.arrows.size());
  for (std::size_t k = 0; k < a.arrows.size(); ++k) {
    int orig = index_in(p1, a, static_cast<int>(k));
    auto [tgt, sc] = w->arrow_map[k];
    out.arrow_map[orig] = {index_in(p2, b, tgt), sc};
    PathExpr img(w->arrow_images[k].source(), w->arrow_images[k].target());
    for (const auto& [path, c] : w->arrow_images[k].terms()) {
      Path q = path;
      for (int& x : q.arrows) x = index_in(p2, b, x);
      img.add_term(q, c);
    }
    out.arrow_images[orig] = std::move(img);
  }
  return out;
}

inline bool are_isomorphic(const Presentation& p1, const Presentation& p2,
                           IsoOptions opt = {}) {
  return find_isomorphism(p1, p2, opt).has_value();
}

}  // namespace tiltmut
