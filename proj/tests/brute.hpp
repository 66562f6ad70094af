#pragma once
// Brute-force dimension counts for acyclic quivers: enumerate every path,
// span the ideal by all u.r.v and take ranks block by block. Independent of
// the rewriting code.

#include <map>
#include <vector>

#include "tiltmut/linalg.hpp"
#include "tiltmut/quiver.hpp"

namespace brute {

using tiltmut::Path;
using tiltmut::PathExpr;
using tiltmut::Presentation;

inline std::vector<Path> all_paths(const Presentation& p) {
  std::vector<Path> out;
  std::vector<Path> frontier;
  for (int v = 0; v < static_cast<int>(p.vertex_count()); ++v) {
    frontier.push_back(tiltmut::trivial_path(v));
  }
  while (!frontier.empty()) {
    std::vector<Path> next;
    for (const auto& w : frontier) {
      for (int a : p.arrows_from(w.target)) {
        Path x = w;
        x.arrows.push_back(a);
        x.target = p.arrows[a].target;
        next.push_back(x);
      }
      out.push_back(w);
    }
    frontier = std::move(next);
  }
  return out;
}

// Cartan entry (i, j) = dim e_i (kQ/I) e_j, i.e. paths j -> i.
inline std::vector<std::vector<long>> cartan(const Presentation& p) {
  auto paths = all_paths(p);
  const std::size_t n = p.vertex_count();
  std::map<std::pair<int, int>, std::vector<Path>> by_block;
  for (const auto& q : paths) by_block[{q.source, q.target}].push_back(q);
  std::map<std::pair<int, int>, tiltmut::linalg::Rows> gens;
  for (const auto& r : p.relations) {
    for (const auto& u : paths) {
      if (u.target != r.source()) continue;
      for (const auto& v : paths) {
        if (v.source != r.target()) continue;
        PathExpr e(u.source, v.target);
        for (const auto& [w, c] : r.terms()) {
          e.add_term(tiltmut::compose(v, tiltmut::compose(w, u)), c);
        }
        const auto& block = by_block[{u.source, v.target}];
        tiltmut::linalg::Vec vec(block.size(), tiltmut::Scalar(0));
        for (std::size_t k = 0; k < block.size(); ++k) vec[k] = e.coefficient(block[k]);
        gens[{u.source, v.target}].push_back(std::move(vec));
      }
    }
  }
  std::vector<std::vector<long>> c(n, std::vector<long>(n, 0));
  for (auto& [key, block] : by_block) {
    long rk = static_cast<long>(tiltmut::linalg::rank(gens[key]));
    c[key.second][key.first] = static_cast<long>(block.size()) - rk;
  }
  return c;
}

inline long dimension(const Presentation& p) {
  long d = 0;
  for (const auto& row : cartan(p)) {
    for (long x : row) d += x;
  }
  return d;
}

}  // namespace brute
