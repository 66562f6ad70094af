#pragma once
// Randomized algebraic laws over a seeded corpus, shared by the gtest suite
// and the acceptance runner. Each check returns how many cases it ran and
// a description of the first few failures.

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "brute.hpp"
#include "tiltmut/corpus.hpp"
#include "tiltmut/dsl.hpp"

namespace props {

using namespace tiltmut;

inline constexpr int kCases = 1000;

struct Result {
  int cases = 0;
  int failed = 0;
  std::vector<std::string> notes;

  void fail(const std::string& why) {
    ++failed;
    if (notes.size() < 5) notes.push_back(why);
  }
  bool ok(int min_cases = kCases) const { return failed == 0 && cases >= min_cases; }
};

inline const std::vector<Presentation>& corpus() {
  static const std::vector<Presentation> c = [] {
    CorpusOptions opt;
    opt.seed = 424242;
    opt.count = 300;
    return generate_corpus(opt);
  }();
  return c;
}

inline const std::vector<NormalFormTable>& tables() {
  static const std::vector<NormalFormTable> t = [] {
    std::vector<NormalFormTable> out;
    for (const auto& p : corpus()) out.push_back(build_table(p, 12));
    return out;
  }();
  return t;
}

inline int pick(std::mt19937_64& rng, int n) {
  return static_cast<int>(rng() % static_cast<std::uint64_t>(n));
}

// Combination of up to three paths parallel to a random walk from `from`.
inline std::optional<PathExpr> random_expr(const Presentation& p, std::mt19937_64& rng, int from) {
  auto w = corpus_detail::random_walk(p, rng, from, 1 + pick(rng, 3));
  if (!w) return std::nullopt;
  auto others = corpus_detail::parallel_paths(p, w->source, w->target, 4);
  PathExpr e = PathExpr::of(*w, 1 + pick(rng, 3));
  for (int k = pick(rng, 3); k > 0 && !others.empty(); --k) {
    e.add_term(others[pick(rng, static_cast<int>(others.size()))], Scalar(pick(rng, 7) - 3) / 2);
  }
  if (e.is_zero()) return std::nullopt;
  return e;
}

// Calls f(table, rng, x) on random expressions until kCases of them
// counted (f returns false to skip a case).
template <class F>
Result for_random_exprs(std::uint64_t seed, F&& f) {
  std::mt19937_64 rng(seed);
  Result res;
  for (int attempt = 0; res.cases < kCases && attempt < 50 * kCases; ++attempt) {
    const auto& t = tables()[rng() % tables().size()];
    const auto& p = t.presentation();
    auto x = random_expr(p, rng, pick(rng, static_cast<int>(p.vertex_count())));
    if (!x) continue;
    if (f(t, rng, *x, res)) ++res.cases;
  }
  return res;
}

inline Result quotient_reconstruction() {
  return for_random_exprs(1, [](const NormalFormTable& t, std::mt19937_64&, const PathExpr& x,
                                Result& res) {
    const auto& p = t.presentation();
    PathExpr left(x.source(), x.target()), right(x.source(), x.target());
    for (int a : p.arrows_from(x.source())) {
      left += compose_expr(left_quotient(p, x, a), PathExpr::of(p.arrow_path(a)));
    }
    for (int b : p.arrows_into(x.target())) {
      right += compose_expr(PathExpr::of(p.arrow_path(b)), right_quotient(p, x, b));
    }
    if (!(left == x) || !(right == x)) res.fail("quotients of " + format_expr(p, x));
    return true;
  });
}

inline Result reduce_idempotent() {
  return for_random_exprs(2, [](const NormalFormTable& t, std::mt19937_64&, const PathExpr& x,
                                Result& res) {
    PathExpr r = t.reduce(x);
    bool normal = true;
    for (const auto& [path, c] : r.terms()) normal = normal && t.basis_index(path).has_value();
    if (!(t.reduce(r) == r) || !normal) res.fail("reduce twice: " + format_expr(t.presentation(), x));
    return true;
  });
}

inline Result reduce_linear() {
  return for_random_exprs(3, [](const NormalFormTable& t, std::mt19937_64& rng, const PathExpr& x,
                                Result& res) {
    auto y = random_expr(t.presentation(), rng, x.source());
    if (!y || y->target() != x.target()) return false;
    Scalar c = Scalar(pick(rng, 9) - 4) / (1 + pick(rng, 3));
    if (!(t.reduce(x + c * *y) == t.reduce(x) + c * t.reduce(*y))) {
      res.fail("linearity: " + format_expr(t.presentation(), x));
    }
    return true;
  });
}

inline Result reduce_multiplicative() {
  return for_random_exprs(4, [](const NormalFormTable& t, std::mt19937_64& rng, const PathExpr& x,
                                Result& res) {
    auto y = random_expr(t.presentation(), rng, x.target());
    if (!y) return false;
    // first x, then y; product(b, a) is a then b
    PathExpr whole = t.reduce(compose_expr(*y, x));
    PathExpr parts = t.reduce(compose_expr(t.reduce(*y), t.reduce(x)));
    auto vx = t.to_vector(x), vy = t.to_vector(*y);
    linalg::Vec prod(t.dimension(), Scalar(0));
    for (std::size_t a = 0; a < vx.size(); ++a) {
      if (sgn(vx[a]) == 0) continue;
      for (std::size_t b = 0; b < vy.size(); ++b) {
        if (sgn(vy[b]) == 0) continue;
        for (const auto& [k, c] : t.product(static_cast<int>(b), static_cast<int>(a))) {
          prod[k] += vx[a] * vy[b] * c;
        }
      }
    }
    if (!(whole == parts) || prod != t.to_vector(whole)) {
      res.fail("multiplicativity: " + format_expr(t.presentation(), x));
    }
    return true;
  });
}

// Cartan entries sum to the dimension, coordinates round-trip, and on
// quivers with arrows only going up the brute-force count agrees.
inline Result basis_size() {
  std::mt19937_64 rng(5);
  Result res;
  for (int round = 0; res.cases < kCases; ++round) {
    const auto& t = tables()[static_cast<std::size_t>(round) % tables().size()];
    const auto& p = t.presentation();
    long total = 0;
    for (const auto& row : cartan_matrix(t)) {
      for (long c : row) total += c;
    }
    if (static_cast<std::size_t>(total) != t.dimension()) res.fail("cartan sum, case " + std::to_string(round));
    auto x = random_expr(p, rng, pick(rng, static_cast<int>(p.vertex_count())));
    if (x && !(t.from_vector(t.to_vector(*x), x->source(), x->target()) == t.reduce(*x))) {
      res.fail("coordinates: " + format_expr(p, *x));
    }
    ++res.cases;
  }
  for (std::size_t k = 0; k < corpus().size(); ++k) {
    const auto& p = corpus()[k];
    bool upward = true;
    for (const auto& a : p.arrows) upward = upward && a.source < a.target;
    if (!upward) continue;
    if (brute::cartan(p) != cartan_matrix(tables()[k])) res.fail("brute count, corpus " + std::to_string(k));
  }
  return res;
}

// Adding a consequence of the relations and pruning gives back the same
// ideal, with fewer generators than went in.
inline Result cleanup_ideal() {
  std::mt19937_64 rng(6);
  Result res;
  for (int attempt = 0; res.cases < kCases && attempt < 20 * kCases; ++attempt) {
    const auto& t = tables()[rng() % tables().size()];
    const Presentation& p = t.presentation();
    if (p.relations.empty()) continue;
    const PathExpr& r = p.relations[rng() % p.relations.size()];
    auto u = corpus_detail::random_walk(p, rng, r.target(), pick(rng, 2));
    if (!u) continue;
    PathExpr extra = compose_expr(PathExpr::of(*u), r);
    for (const auto& s : p.relations) {
      if (s.source() == extra.source() && s.target() == extra.target()) extra += s;
    }
    if (extra.is_zero()) continue;
    Presentation q = p;
    q.relations.push_back(extra);
    Presentation pruned = prune_redundant_relations(q, 12);
    bool same = pruned.relations.size() < q.relations.size();
    for (const auto& x : q.relations) same = same && ideal_membership(p, x, pruned.relations, 12);
    for (const auto& x : pruned.relations) same = same && ideal_membership(p, x, p.relations, 12);
    if (!same) res.fail("prune changed the ideal of\n" + serialize_quiver(q));
    ++res.cases;
  }
  return res;
}

// clean() after mutation keeps the algebra: same dimension as the raw
// result (read with unit terms allowed) and a valid admissible output.
inline Result cleanup_of_mutation() {
  ValidateOptions raw;
  raw.allow_unit_terms = true;
  Result res;
  for (std::size_t k = 0; k < tables().size(); ++k) {
    const auto& t = tables()[k];
    for (int i = 0; i < static_cast<int>(t.presentation().vertex_count()); ++i) {
      if (!check_feasible(t, i).feasible) continue;
      auto m = mutate(t, i);
      auto cleaned = clean(m.result, 12);
      if (build_table(m.result, 12, raw).dimension() != build_table(cleaned, 12).dimension() ||
          !validate(cleaned).ok()) {
        res.fail("cleanup of corpus " + std::to_string(k) + " at " + std::to_string(i));
      }
      ++res.cases;
    }
  }
  return res;
}

}  // namespace props
