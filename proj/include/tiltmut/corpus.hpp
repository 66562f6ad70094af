#pragma once
// Seeded random bound quivers and the oracle comparison run over them.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tiltmut/algebra.hpp"
#include "tiltmut/mutation.hpp"
#include "tiltmut/oracle.hpp"
#include "tiltmut/simplify.hpp"

namespace tiltmut {

struct CorpusOptions {
  std::uint64_t seed = 1;
  int count = 200;
  int max_vertices = 6;
  int max_arrows = 8;
  int max_relations = 4;
  int max_nil_index = 6;
  int cap = 12;
};

namespace corpus_detail {

// rng() % n keeps the stream identical across standard libraries.
inline int pick(std::mt19937_64& rng, int n) {
  return static_cast<int>(rng() % static_cast<std::uint64_t>(n));
}

inline std::optional<Path> random_walk(const Presentation& p, std::mt19937_64& rng,
                                       int from, int length) {
  Path w = trivial_path(from);
  for (int k = 0; k < length; ++k) {
    auto out = p.arrows_from(w.target);
    if (out.empty()) return std::nullopt;
    int a = out[pick(rng, static_cast<int>(out.size()))];
    w.arrows.push_back(a);
    w.target = p.arrows[a].target;
  }
  return w;
}

// All paths of length 2..max_len from s to t.
inline std::vector<Path> parallel_paths(const Presentation& p, int s, int t, int max_len) {
  std::vector<Path> out, layer{trivial_path(s)};
  for (int len = 1; len <= max_len; ++len) {
    std::vector<Path> next;
    for (const auto& w : layer) {
      for (int a : p.arrows_from(w.target)) {
        Path x = w;
        x.arrows.push_back(a);
        x.target = p.arrows[a].target;
        if (len >= 2 && x.target == t) out.push_back(x);
        next.push_back(std::move(x));
      }
    }
    layer = std::move(next);
  }
  return out;
}

}  // namespace corpus_detail

// One candidate; nullopt if it is not admissible within the limits.
inline std::optional<Presentation> random_presentation(std::mt19937_64& rng,
                                                       const CorpusOptions& opt) {
  using corpus_detail::pick;
  Presentation p;
  const int n = 2 + pick(rng, opt.max_vertices - 1);
  for (int v = 1; v <= n; ++v) p.add_vertex(std::to_string(v));
  const int lo = n - 1;
  const int m = lo + pick(rng, std::max(1, opt.max_arrows - lo + 1));
  for (int a = 0; a < m; ++a) {
    int s = pick(rng, n);
    int t = pick(rng, n);
    if (s == t && pick(rng, 4) != 0) t = (s + 1 + pick(rng, n - 1)) % n;
    p.add_arrow(std::string(1, static_cast<char>('a' + a)), s, t);
  }
  const int k = pick(rng, opt.max_relations + 1);
  static const Scalar coefs[] = {1, -1, 2, -2, Scalar(1, 2)};
  for (int r = 0; r < k; ++r) {
    int from = pick(rng, n);
    auto w = corpus_detail::random_walk(p, rng, from, 2 + pick(rng, 2));
    if (!w) continue;
    PathExpr rel = PathExpr::of(*w);
    if (pick(rng, 2) == 0) {
      auto others = corpus_detail::parallel_paths(p, w->source, w->target, 3);
      std::erase(others, *w);
      if (!others.empty()) {
        rel.add_term(others[pick(rng, static_cast<int>(others.size()))], coefs[pick(rng, 5)]);
      }
    }
    p.relations.push_back(std::move(rel));
  }
  canonicalize(p);
  if (!validate(p).ok()) return std::nullopt;
  try {
    // Any word longer than the nil bound makes this throw.
    auto t = build_table(p, std::min(opt.cap, opt.max_nil_index + 1));
    if (t.nil_index() > opt.max_nil_index) return std::nullopt;
  } catch (const NotAdmissibleWithinCap&) {
    return std::nullopt;
  } catch (const NotAdmissible&) {
    return std::nullopt;
  }
  return p;
}

inline std::vector<Presentation> generate_corpus(const CorpusOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  std::vector<Presentation> out;
  while (static_cast<int>(out.size()) < opt.count) {
    if (auto p = random_presentation(rng, opt)) out.push_back(std::move(*p));
  }
  return out;
}

// Oracle side of feasibility: structural conditions, then
// Hom(P_i*[1], P_j) = 0 in the homotopy category for every j.
inline bool oracle_feasible(const NormalFormTable& t, int i) {
  const Presentation& q = t.presentation();
  if (q.arrows_from(i).empty()) return false;
  for (int a : q.arrows_from(i)) {
    if (q.arrows[a].target == i) return false;
  }
  auto shifted_star = shifted(build_mutation_complex(t, i), 1);
  for (int j = 0; j < static_cast<int>(q.vertex_count()); ++j) {
    if (hom_classes(t, shifted_star, stalk(j)).dimension() != 0) return false;
  }
  return true;
}

struct CorpusCase {
  int index = 0;
  int vertex = 0;
  bool feasible = false;
  bool feasibility_agrees = true;
  bool match = false;
  bool cartan_equal = false;
  std::string error;  // set when a step threw
};

struct CorpusReport {
  std::size_t presentations = 0;
  std::size_t pairs = 0;
  std::size_t feasible = 0;
  std::size_t matches = 0;
  std::size_t cartan_matches = 0;
  std::size_t feasibility_agreements = 0;
  std::vector<CorpusCase> failures;

  bool ok() const {
    return matches == feasible && cartan_matches == feasible &&
           feasibility_agreements == pairs && failures.empty();
  }
};

inline CorpusCase run_case(const Presentation& p, int index, int i, int cap) {
  CorpusCase c;
  c.index = index;
  c.vertex = i;
  try {
    auto t = build_table(p, cap);
    c.feasible = check_feasible(t, i).feasible;
    c.feasibility_agrees = c.feasible == oracle_feasible(t, i);
    if (!c.feasible) return c;
    auto rep = verify(t, i);
    c.match = rep.match;
    c.cartan_equal = predicted_cartan(t, i) == rep.oracle_cartan;
  } catch (const std::exception& e) {
    c.error = e.what();
  }
  return c;
}

inline CorpusReport run_corpus(const std::vector<Presentation>& corpus, int cap) {
  CorpusReport rep;
  rep.presentations = corpus.size();
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    for (int i = 0; i < static_cast<int>(corpus[k].vertex_count()); ++i) {
      auto c = run_case(corpus[k], static_cast<int>(k), i, cap);
      ++rep.pairs;
      if (c.feasibility_agrees) ++rep.feasibility_agreements;
      if (c.feasible) {
        ++rep.feasible;
        if (c.match) ++rep.matches;
        if (c.cartan_equal) ++rep.cartan_matches;
      }
      bool bad = !c.error.empty() || !c.feasibility_agrees ||
                 (c.feasible && (!c.match || !c.cartan_equal));
      if (bad) rep.failures.push_back(std::move(c));
    }
  }
  return rep;
}

inline CorpusReport run_corpus(const CorpusOptions& opt) {
  return run_corpus(generate_corpus(opt), opt.cap);
}

}  // namespace tiltmut
