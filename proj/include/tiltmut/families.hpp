#pragma once
// Line algebras A_{n,m}, commutative grids, and mutation schedules between
// them.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tiltmut/algebra.hpp"
#include "tiltmut/mutation.hpp"
#include "tiltmut/quiver.hpp"
#include "tiltmut/simplify.hpp"

namespace tiltmut {

// kA_n modulo all paths of length m. Vertices "1".."n", arrows a<k> : k -> k+1.
inline Presentation line_algebra(int n, int m) {
  if (n < 1 || m < 2) throw std::invalid_argument("line_algebra: need n >= 1, m >= 2");
  Presentation p;
  for (int v = 1; v <= n; ++v) p.add_vertex(std::to_string(v));
  for (int k = 1; k < n; ++k) p.add_arrow("a" + std::to_string(k), k - 1, k);
  canonicalize(p);
  for (int start = 0; start + m < n; ++start) {
    std::vector<int> word;
    for (int k = start; k < start + m; ++k) word.push_back(*p.find_arrow("a" + std::to_string(k + 1)));
    p.relations.push_back(PathExpr::of(p.path_of(word)));
  }
  return p;
}

// n rows of r vertices, labelled 1..rn row by row. Arrows h<k>_<c> go right
// along row k, v<k>_<c> go down column c. Every unit square commutes; for
// r = 2 the length-2 paths down each outside column are zero as well.
inline Presentation grid(int r, int n) {
  if (r < 1 || n < 1) throw std::invalid_argument("grid: need r >= 1, n >= 1");
  Presentation p;
  auto id = [r](int k, int c) { return (k - 1) * r + (c - 1); };
  for (int v = 1; v <= r * n; ++v) p.add_vertex(std::to_string(v));
  auto h = [](int k, int c) { return "h" + std::to_string(k) + "_" + std::to_string(c); };
  auto v = [](int k, int c) { return "v" + std::to_string(k) + "_" + std::to_string(c); };
  for (int k = 1; k <= n; ++k) {
    for (int c = 1; c < r; ++c) p.add_arrow(h(k, c), id(k, c), id(k, c + 1));
  }
  for (int k = 1; k < n; ++k) {
    for (int c = 1; c <= r; ++c) p.add_arrow(v(k, c), id(k, c), id(k + 1, c));
  }
  canonicalize(p);
  for (int k = 1; k < n; ++k) {
    for (int c = 1; c < r; ++c) {
      // right then down = down then right
      PathExpr rel = PathExpr::of(p.path({h(k, c), v(k, c + 1)}));
      rel -= PathExpr::of(p.path({v(k, c), h(k + 1, c)}));
      p.relations.push_back(std::move(rel));
    }
  }
  if (r == 2) {
    for (int k = 1; k + 1 < n; ++k) {
      for (int c = 1; c <= 2; ++c) {
        p.relations.push_back(PathExpr::of(p.path({v(k, c), v(k + 1, c)})));
      }
    }
  }
  return p;
}

// Vertex counts, arrow counts and relation counts expected after a step.
struct Fingerprint {
  std::size_t vertices = 0;
  std::size_t arrows = 0;
  std::size_t relations = 0;
  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
};

inline Fingerprint fingerprint(const Presentation& p) {
  return {p.vertex_count(), p.arrows.size(), p.relations.size()};
}

// Vertex labels, resolved when the step runs.
struct Schedule {
  std::vector<std::string> steps;
  std::vector<std::optional<Fingerprint>> expected;
};

// Takes line_algebra(2n, 3) to grid(2, n) in n(n-1)/2 steps. Round k mutates
// at 2k-1 (the lower left corner of the newest square), then at 2k-2, then
// replays round k-2 on the vertices it created (one more star each).
// Found by exhaustive search for n <= 5 and checked up to n = 7.
inline Schedule ladkani_schedule(int n) {
  if (n < 2) throw std::invalid_argument("ladkani_schedule: need n >= 2");
  std::vector<std::vector<std::string>> rounds;
  Schedule s;
  for (int k = 1; k < n; ++k) {
    std::vector<std::string> round{std::to_string(2 * k - 1)};
    if (k >= 2) round.push_back(std::to_string(2 * k - 2));
    if (k >= 3) {
      for (const auto& label : rounds[k - 3]) round.push_back(label + "*");
    }
    s.steps.insert(s.steps.end(), round.begin(), round.end());
    rounds.push_back(std::move(round));
  }
  return s;
}

class ScheduleFailed : public InfeasibleMutation {
 public:
  ScheduleFailed(std::size_t step, std::vector<Presentation> trace, FeasibilityReport rep)
      : InfeasibleMutation(std::move(rep)), step_(step), trace_(std::move(trace)) {}
  std::size_t step() const noexcept { return step_; }
  const std::vector<Presentation>& trace() const noexcept { return trace_; }

 private:
  std::size_t step_;
  std::vector<Presentation> trace_;
};

// Mutation at each scheduled label, followed by clean(). The trace starts
// with p itself.
inline std::vector<Presentation> run_schedule(const Presentation& p, const Schedule& s,
                                              int cap = default_degree_cap()) {
  std::vector<Presentation> trace{p};
  canonicalize(trace.back());
  for (std::size_t k = 0; k < s.steps.size(); ++k) {
    const Presentation& cur = trace.back();
    auto v = cur.find_vertex(s.steps[k]);
    if (!v) {
      throw ValidationError("schedule step " + std::to_string(k + 1) +
                            ": no vertex '" + s.steps[k] + "'");
    }
    auto t = build_table(cur, cap);
    auto rep = check_feasible(t, *v);
    if (!rep.feasible) throw ScheduleFailed(k, trace, rep);
    Presentation next = clean(mutate(t, *v).result, cap);
    if (k < s.expected.size() && s.expected[k] && fingerprint(next) != *s.expected[k]) {
      throw ValidationError("schedule step " + std::to_string(k + 1) +
                            ": unexpected shape");
    }
    trace.push_back(std::move(next));
  }
  return trace;
}

}  // namespace tiltmut
