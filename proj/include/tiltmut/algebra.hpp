#pragma once
// Linear structure of kQ/I: a degree-capped rewriting completion of the
// relations, the resulting normal-form basis, Hom bases between indecomposable
// projectives, Cartan matrices and minimal relations out of a vertex.

#include <algorithm>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "tiltmut/errors.hpp"
#include "tiltmut/linalg.hpp"
#include "tiltmut/quiver.hpp"

namespace tiltmut {

inline constexpr int kDefaultDegreeCap = 32;

// TILTMUT_DEGREE_CAP overrides the built-in default.
inline int default_degree_cap() {
  if (const char* env = std::getenv("TILTMUT_DEGREE_CAP")) {
    try {
      int cap = std::stoi(env);
      if (cap > 0) return cap;
    } catch (...) {
    }
  }
  return kDefaultDegreeCap;
}

// Monic polynomials whose leading words rewrite to the remaining terms.
// Built by Buchberger completion over overlaps of leading words, skipping
// overlaps longer than the cap (and remembering that it did).
class RewriteSystem {
 public:
  RewriteSystem() = default;

  static RewriteSystem complete(const Presentation& p,
                                const std::vector<PathExpr>& generators,
                                int cap) {
    RewriteSystem rs;
    rs.cap_ = cap;
    std::vector<PathExpr> pending;
    for (const auto& g : generators) {
      if (!g.is_zero()) pending.push_back(g);
    }
    std::sort(pending.begin(), pending.end(),
              [](const PathExpr& a, const PathExpr& b) {
                return PathOrder{}(a.leading_path(), b.leading_path());
              });

    struct Pair {
      std::size_t length;
      std::size_t seq;
      int first;
      int second;
      std::size_t overlap;
      bool operator>(const Pair& o) const {
        return std::tie(length, seq) > std::tie(o.length, o.seq);
      }
    };
    std::priority_queue<Pair, std::vector<Pair>, std::greater<>> queue;
    std::vector<bool> alive;
    std::size_t seq = 0;

    auto add_pairs = [&](int h) {
      const auto& lh = rs.rules_[h].leading_path().arrows;
      for (int g = 0; g < static_cast<int>(rs.rules_.size()); ++g) {
        if (!alive[g]) continue;
        const auto& lg = rs.rules_[g].leading_path().arrows;
        for (int dir = 0; dir < 2; ++dir) {
          if (dir == 1 && g == h) break;
          const auto& l1 = dir == 0 ? lg : lh;
          const auto& l2 = dir == 0 ? lh : lg;
          std::size_t maxk = std::min(l1.size(), l2.size());
          for (std::size_t k = 1; k < maxk; ++k) {
            if (std::equal(l1.end() - static_cast<long>(k), l1.end(),
                           l2.begin())) {
              queue.push(Pair{l1.size() + l2.size() - k, seq++,
                              dir == 0 ? g : h, dir == 0 ? h : g, k});
            }
          }
        }
      }
    };

    auto insert = [&](PathExpr f) {
      f = rs.reduce(f);
      if (f.is_zero()) return;
      f = f.monic();
      // Retire rules whose leading word now contains the new leading word.
      const auto& lead = f.leading_path().arrows;
      std::vector<PathExpr> requeue;
      for (std::size_t g = 0; g < rs.rules_.size(); ++g) {
        if (alive[g] && contains_word(rs.rules_[g].leading_path().arrows, lead)) {
          alive[g] = false;
          requeue.push_back(rs.rules_[g]);
        }
      }
      rs.rules_.push_back(std::move(f));
      alive.push_back(true);
      rs.rebuild_alive(alive);
      add_pairs(static_cast<int>(rs.rules_.size()) - 1);
      for (auto& r : requeue) pending.push_back(std::move(r));
    };

    while (true) {
      while (!pending.empty()) {
        PathExpr f = std::move(pending.back());
        pending.pop_back();
        insert(std::move(f));
      }
      if (queue.empty()) break;
      Pair pr = queue.top();
      queue.pop();
      if (!alive[pr.first] || !alive[pr.second]) continue;
      if (pr.length > static_cast<std::size_t>(cap)) {
        rs.truncated_ = true;
        continue;
      }
      const PathExpr& f = rs.rules_[pr.first];
      const PathExpr& g = rs.rules_[pr.second];
      const auto& l1 = f.leading_path().arrows;
      const auto& l2 = g.leading_path().arrows;
      // f walked first, then the tail of g beyond the overlap; versus the
      // head of f before the overlap, then g.
      std::vector<int> tail(l2.begin() + static_cast<long>(pr.overlap), l2.end());
      std::vector<int> head(l1.begin(), l1.end() - static_cast<long>(pr.overlap));
      PathExpr s = extend(p, f, {}, tail);
      s -= extend(p, g, head, {});
      pending.push_back(std::move(s));
    }
    rs.rebuild_alive(alive);
    rs.compact(alive);
    return rs;
  }

  bool truncated() const noexcept { return truncated_; }
  int cap() const noexcept { return cap_; }
  const std::vector<PathExpr>& rules() const noexcept { return rules_; }

  // Position of the first rule whose leading word occurs in w, with the
  // offset of the occurrence.
  std::optional<std::pair<int, std::size_t>> find_match(
      const std::vector<int>& w) const {
    for (int r : active_) {
      const auto& lead = rules_[r].leading_path().arrows;
      if (lead.size() > w.size()) continue;
      for (std::size_t off = 0; off + lead.size() <= w.size(); ++off) {
        if (std::equal(lead.begin(), lead.end(), w.begin() + static_cast<long>(off))) {
          return std::make_pair(r, off);
        }
      }
    }
    return std::nullopt;
  }

  bool is_reducible(const std::vector<int>& w) const {
    return find_match(w).has_value();
  }

  // True if some leading word is a suffix of w.
  bool has_suffix_match(const std::vector<int>& w) const {
    for (int r : active_) {
      const auto& lead = rules_[r].leading_path().arrows;
      if (lead.size() <= w.size() &&
          std::equal(lead.rbegin(), lead.rend(), w.rbegin())) {
        return true;
      }
    }
    return false;
  }

  PathExpr reduce(const PathExpr& x) const {
    PathExpr done(x.source(), x.target());
    PathExpr work = x;
    while (!work.is_zero()) {
      auto it = std::prev(work.terms().end());
      Path w = it->first;
      Scalar c = it->second;
      work.add_term(w, -c);
      auto m = find_match(w.arrows);
      if (!m) {
        done.add_term(w, c);
        continue;
      }
      const PathExpr& rule = rules_[m->first];
      const std::size_t len = rule.leading_path().length();
      for (const auto& [t, tc] : rule.terms()) {
        if (t == rule.leading_path()) continue;
        Path nw{w.source, w.target, {}};
        nw.arrows.assign(w.arrows.begin(), w.arrows.begin() + static_cast<long>(m->second));
        nw.arrows.insert(nw.arrows.end(), t.arrows.begin(), t.arrows.end());
        nw.arrows.insert(nw.arrows.end(),
                         w.arrows.begin() + static_cast<long>(m->second + len),
                         w.arrows.end());
        work.add_term(nw, -c * tc);
      }
    }
    return done;
  }

 private:
  static bool contains_word(const std::vector<int>& hay,
                            const std::vector<int>& needle) {
    if (needle.size() > hay.size()) return false;
    return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) !=
           hay.end();
  }

  // Prepends `head` and appends `tail` (traversal order) to every term.
  static PathExpr extend(const Presentation& p, const PathExpr& f,
                         const std::vector<int>& head,
                         const std::vector<int>& tail) {
    int s = head.empty() ? f.source() : p.arrows[head.front()].source;
    int t = tail.empty() ? f.target() : p.arrows[tail.back()].target;
    PathExpr out(s, t);
    for (const auto& [w, c] : f.terms()) {
      Path nw{s, t, head};
      nw.arrows.insert(nw.arrows.end(), w.arrows.begin(), w.arrows.end());
      nw.arrows.insert(nw.arrows.end(), tail.begin(), tail.end());
      out.add_term(nw, c);
    }
    return out;
  }

  void rebuild_alive(const std::vector<bool>& alive) {
    active_.clear();
    for (std::size_t g = 0; g < rules_.size(); ++g) {
      if (alive[g]) active_.push_back(static_cast<int>(g));
    }
  }

  void compact(const std::vector<bool>& alive) {
    std::vector<PathExpr> kept;
    for (std::size_t g = 0; g < rules_.size(); ++g) {
      if (alive[g]) kept.push_back(rules_[g]);
    }
    // Tail-reduce so every rule is in normal form apart from its lead.
    rules_ = std::move(kept);
    active_.clear();
    for (std::size_t g = 0; g < rules_.size(); ++g) active_.push_back(static_cast<int>(g));
    for (std::size_t g = 0; g < rules_.size(); ++g) {
      PathExpr lead = PathExpr::of(rules_[g].leading_path(), 1);
      PathExpr rest = rules_[g] - lead;
      rules_[g] = lead + reduce(rest);
    }
    std::sort(rules_.begin(), rules_.end(),
              [](const PathExpr& a, const PathExpr& b) {
                return PathOrder{}(a.leading_path(), b.leading_path());
              });
  }

  int cap_ = kDefaultDegreeCap;
  bool truncated_ = false;
  std::vector<PathExpr> rules_;
  std::vector<int> active_;
};

// Sparse vector over basis indices.
using SparseVec = std::vector<std::pair<int, Scalar>>;

// Basis of Lambda = kQ/I with reduction to normal form. Immutable after
// build_table; every query is const.
class NormalFormTable {
 public:
  const Presentation& presentation() const noexcept { return pres_; }
  int degree_cap() const noexcept { return cap_; }
  int nil_index() const noexcept { return nil_index_; }
  const std::vector<Path>& basis() const noexcept { return basis_; }
  std::size_t dimension() const noexcept { return basis_.size(); }
  const RewriteSystem& rewrite_system() const noexcept { return rs_; }

  std::optional<int> basis_index(const Path& p) const {
    auto it = index_.find(p);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  PathExpr reduce(const PathExpr& x) const { return rs_.reduce(x); }

  // Coordinates of x (after reduction) in the basis.
  linalg::Vec to_vector(const PathExpr& x) const {
    linalg::Vec v(basis_.size(), Scalar(0));
    PathExpr r = reduce(x);
    for (const auto& [p, c] : r.terms()) v[index_.at(p)] += c;
    return v;
  }

  PathExpr from_vector(const linalg::Vec& v, int source, int target) const {
    PathExpr out(source, target);
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (sgn(v[k]) != 0) out.add_term(basis_[k], v[k]);
    }
    return out;
  }

  // Basis indices of paths from j to i, in basis order.
  const std::vector<int>& hom_indices(int j, int i) const {
    return blocks_[static_cast<std::size_t>(j) * pres_.vertex_count() +
                   static_cast<std::size_t>(i)];
  }

  // reduce(first b, then a) for basis indices a, b; empty when the paths do
  // not compose.
  const SparseVec& product(int a, int b) const {
    return products_[static_cast<std::size_t>(a) * basis_.size() +
                     static_cast<std::size_t>(b)];
  }

  friend NormalFormTable build_table(const Presentation& p, int cap, ValidateOptions opts);

 private:
  Presentation pres_;
  int cap_ = kDefaultDegreeCap;
  int nil_index_ = 1;
  RewriteSystem rs_;
  std::vector<Path> basis_;
  std::map<Path, int, PathOrder> index_;
  std::vector<std::vector<int>> blocks_;
  std::vector<SparseVec> products_;
};

class NotAdmissible : public ValidationError {
 public:
  explicit NotAdmissible(const std::string& what) : ValidationError(what) {}
};

// Smallest L with rad^L = 0. Normal words alone do not show this when
// relations mix lengths: b.b = 2*b.b.b leaves b.b in the basis, yet
// rad^k never vanishes because 1 - 2b is not invertible in kQ.
inline int radical_nil_index(const NormalFormTable& t, int cap) {
  const std::size_t d = t.dimension();
  std::vector<int> arrows;
  for (std::size_t k = 0; k < d; ++k) {
    if (t.basis()[k].length() == 1) arrows.push_back(static_cast<int>(k));
  }
  linalg::Rows layer;
  for (std::size_t k = 0; k < d; ++k) {
    if (t.basis()[k].is_trivial()) continue;
    linalg::Vec v(d, Scalar(0));
    v[k] = 1;
    layer.push_back(std::move(v));
  }
  for (int power = 1;; ++power) {
    if (layer.empty()) return power;
    if (power > cap) throw NotAdmissibleWithinCap(cap);
    linalg::Rows next;
    for (const auto& x : layer) {
      for (int a : arrows) {
        linalg::Vec v(d, Scalar(0));
        for (std::size_t j = 0; j < d; ++j) {
          if (sgn(x[j]) == 0) continue;
          for (const auto& [k, c] : t.product(a, static_cast<int>(j))) v[k] += x[j] * c;
        }
        if (!linalg::is_zero(v)) next.push_back(std::move(v));
      }
    }
    next = linalg::rref(std::move(next));
    if (!next.empty() && next.size() == layer.size()) {
      throw NotAdmissible("ideal is not admissible: rad^" + std::to_string(power) +
                          " = rad^" + std::to_string(power + 1) + " is nonzero");
    }
    layer = std::move(next);
  }
}

// Unit terms may be allowed so cleanup can measure a raw mutation result.
inline NormalFormTable build_table(const Presentation& p,
                                   int cap = default_degree_cap(),
                                   ValidateOptions opts = {}) {
  require_valid(p, opts);
  if (!has_canonical_arrow_order(p)) {
    throw std::invalid_argument("build_table: arrows must be in name order");
  }
  if (cap < 1) throw std::invalid_argument("degree cap must be positive");
  NormalFormTable t;
  t.pres_ = p;
  t.cap_ = cap;
  t.rs_ = RewriteSystem::complete(p, p.relations, cap);

  // Irreducible words form a prefix-closed set; grow them arrow by arrow.
  std::vector<Path> found;
  std::vector<Path> frontier;
  for (int v = 0; v < static_cast<int>(p.vertex_count()); ++v) {
    frontier.push_back(trivial_path(v));
  }
  std::size_t length = 0;
  while (!frontier.empty()) {
    if (length >= static_cast<std::size_t>(cap)) throw NotAdmissibleWithinCap(cap);
    std::vector<Path> next;
    for (auto& w : frontier) {
      for (int a : p.arrows_from(w.target)) {
        Path x = w;
        x.arrows.push_back(a);
        x.target = p.arrows[a].target;
        if (!t.rs_.has_suffix_match(x.arrows)) next.push_back(std::move(x));
      }
      found.push_back(std::move(w));
    }
    frontier = std::move(next);
    ++length;
  }
  t.nil_index_ = static_cast<int>(length);
  std::sort(found.begin(), found.end(), PathOrder{});
  t.basis_ = std::move(found);
  const std::size_t n = p.vertex_count();
  t.blocks_.assign(n * n, {});
  for (std::size_t k = 0; k < t.basis_.size(); ++k) {
    t.index_[t.basis_[k]] = static_cast<int>(k);
    t.blocks_[static_cast<std::size_t>(t.basis_[k].source) * n +
              static_cast<std::size_t>(t.basis_[k].target)]
        .push_back(static_cast<int>(k));
  }
  const std::size_t d = t.basis_.size();
  t.products_.assign(d * d, {});
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) {
      if (t.basis_[b].target != t.basis_[a].source) continue;
      PathExpr prod = t.rs_.reduce(
          PathExpr::of(compose(t.basis_[a], t.basis_[b])));
      SparseVec sv;
      for (const auto& [q, c] : prod.terms()) sv.emplace_back(t.index_.at(q), c);
      t.products_[a * d + b] = std::move(sv);
    }
  }
  bool homogeneous = true;
  for (const auto& r : p.relations) {
    if (r.min_length() != r.max_length()) homogeneous = false;
  }
  if (!homogeneous) t.nil_index_ = radical_nil_index(t, cap);
  return t;
}

struct HomBasis {
  int from = 0;
  int to = 0;
  std::vector<Path> paths;
};

// Normal-form paths j -> i, spanning e_i Lambda e_j = Hom(P_i, P_j).
inline HomBasis hom_basis(const NormalFormTable& t, int j, int i) {
  HomBasis hb{j, i, {}};
  for (int k : t.hom_indices(j, i)) hb.paths.push_back(t.basis()[k]);
  return hb;
}

using IntMatrix = std::vector<std::vector<long>>;

// Entry (i, j) is the number of basis paths j -> i.
inline IntMatrix cartan_matrix(const NormalFormTable& t) {
  const std::size_t n = t.presentation().vertex_count();
  IntMatrix c(n, std::vector<long>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      c[i][j] = static_cast<long>(
          t.hom_indices(static_cast<int>(j), static_cast<int>(i)).size());
    }
  }
  return c;
}

// Canonical minimal generators of the relations out of vertex i: a basis of
// ker([a]_a : (+)_a P_t(a) -> P_i), taken modulo the part of the kernel
// reached by post-composing with arrows, in reduced echelon form with the
// greatest path first.
inline std::vector<PathExpr> minimal_relations_at(const NormalFormTable& t,
                                                  int i) {
  const Presentation& p = t.presentation();
  const auto out_arrows = p.arrows_from(i);
  const std::size_t n = p.vertex_count();
  if (out_arrows.empty()) return {};

  struct Block {
    std::vector<std::pair<int, int>> coords;  // (arrow, basis index)
    std::map<std::pair<int, int>, std::size_t> lookup;
    linalg::Rows kernel;
  };
  std::vector<Block> blocks(n);
  for (std::size_t k = 0; k < n; ++k) {
    Block& b = blocks[k];
    for (int a : out_arrows) {
      for (int q : t.hom_indices(p.arrows[a].target, static_cast<int>(k))) {
        b.coords.emplace_back(a, q);
      }
    }
    std::sort(b.coords.begin(), b.coords.end(), [&](auto x, auto y) {
      Path px = compose(t.basis()[x.second], p.arrow_path(x.first));
      Path py = compose(t.basis()[y.second], p.arrow_path(y.first));
      return PathOrder{}(py, px);
    });
    for (std::size_t c = 0; c < b.coords.size(); ++c) b.lookup[b.coords[c]] = c;
    if (b.coords.empty()) continue;
    // Columns: coordinates; rows: Lambda basis components of sum y_a a.
    linalg::Rows m(t.dimension(), linalg::Vec(b.coords.size(), Scalar(0)));
    for (std::size_t c = 0; c < b.coords.size(); ++c) {
      auto [a, q] = b.coords[c];
      int arrow_idx = *t.basis_index(p.arrow_path(a));
      for (const auto& [r, coef] : t.product(q, arrow_idx)) m[r][c] += coef;
    }
    b.kernel = linalg::kernel(m, b.coords.size());
  }

  std::vector<PathExpr> out;
  for (std::size_t k = 0; k < n; ++k) {
    Block& b = blocks[k];
    if (b.kernel.empty()) continue;
    linalg::Rows radical;
    for (int arr : p.arrows_into(static_cast<int>(k))) {
      const Block& src = blocks[p.arrows[arr].source];
      int arrow_idx = *t.basis_index(p.arrow_path(arr));
      for (const auto& y : src.kernel) {
        linalg::Vec v(b.coords.size(), Scalar(0));
        for (std::size_t c = 0; c < y.size(); ++c) {
          if (sgn(y[c]) == 0) continue;
          auto [a, q] = src.coords[c];
          for (const auto& [r, coef] : t.product(arrow_idx, q)) {
            v[b.lookup.at({a, r})] += y[c] * coef;
          }
        }
        radical.push_back(std::move(v));
      }
    }
    for (const auto& row : linalg::complement(radical, b.kernel, b.coords.size())) {
      PathExpr rel(i, static_cast<int>(k));
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (sgn(row[c]) == 0) continue;
        auto [a, q] = b.coords[c];
        rel.add_term(compose(t.basis()[q], p.arrow_path(a)), row[c]);
      }
      out.push_back(std::move(rel));
    }
  }
  return out;
}

// Decides x in the two-sided ideal generated by `generators` by completing
// them (capped at the table's cap) and reducing x.
inline bool ideal_membership(const NormalFormTable& t, const PathExpr& x,
                             const std::vector<PathExpr>& generators) {
  if (x.is_zero()) return true;
  auto rs = RewriteSystem::complete(t.presentation(), generators, t.degree_cap());
  if (rs.reduce(x).is_zero()) return true;
  if (rs.truncated()) throw NotAdmissibleWithinCap(t.degree_cap());
  return false;
}

// Same as above without a table: only the presentation's arrows are used.
inline bool ideal_membership(const Presentation& p, const PathExpr& x,
                             const std::vector<PathExpr>& generators,
                             int cap = default_degree_cap()) {
  if (x.is_zero()) return true;
  auto rs = RewriteSystem::complete(p, generators, cap);
  if (rs.reduce(x).is_zero()) return true;
  if (rs.truncated()) throw NotAdmissibleWithinCap(cap);
  return false;
}

}  // namespace tiltmut
