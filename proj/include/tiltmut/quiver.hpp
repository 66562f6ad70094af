#pragma once
// Quivers with relations: vertices, arrows, paths and rational linear
// combinations of parallel paths.
//
// Paths are stored in traversal order (the first arrow walked is arrows[0]).
// Text output uses the right-to-left convention, so the path "first a, then
// b" prints as "b.a".

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tiltmut/errors.hpp"
#include "tiltmut/scalar.hpp"

namespace tiltmut {

struct Arrow {
  std::string name;
  int source = 0;
  int target = 0;

  friend bool operator==(const Arrow&, const Arrow&) = default;
};

struct Path {
  int source = 0;
  int target = 0;
  std::vector<int> arrows;

  std::size_t length() const noexcept { return arrows.size(); }
  bool is_trivial() const noexcept { return arrows.empty(); }

  friend bool operator==(const Path&, const Path&) = default;
};

// Length first, then lexicographic on arrow indices. Arrow indices follow
// name order in every canonical presentation, so this is the deg-lex order
// on arrow names. The greatest term of an expression is its leading term.
struct PathOrder {
  bool operator()(const Path& a, const Path& b) const {
    if (a.arrows.size() != b.arrows.size()) {
      return a.arrows.size() < b.arrows.size();
    }
    if (a.arrows != b.arrows) return a.arrows < b.arrows;
    if (a.source != b.source) return a.source < b.source;
    return a.target < b.target;
  }
};

inline Path trivial_path(int v) { return Path{v, v, {}}; }

// compose(p, q) is "first q, then p" (written pq).
inline Path compose(const Path& p, const Path& q) {
  if (q.target != p.source) {
    throw std::invalid_argument("compose: paths are not composable");
  }
  Path out{q.source, p.target, q.arrows};
  out.arrows.insert(out.arrows.end(), p.arrows.begin(), p.arrows.end());
  return out;
}

class PathExpr {
 public:
  using Terms = std::map<Path, Scalar, PathOrder>;

  PathExpr() = default;
  PathExpr(int source, int target) : source_(source), target_(target) {}

  static PathExpr of(const Path& p, const Scalar& c = 1) {
    PathExpr e(p.source, p.target);
    e.add_term(p, c);
    return e;
  }

  int source() const noexcept { return source_; }
  int target() const noexcept { return target_; }
  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }

  // Does not check that p is parallel to the expression; validate() does.
  void add_term(const Path& p, const Scalar& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(p, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Scalar coefficient(const Path& p) const {
    auto it = terms_.find(p);
    return it == terms_.end() ? Scalar(0) : it->second;
  }

  const Path& leading_path() const { return terms_.rbegin()->first; }
  const Scalar& leading_coefficient() const { return terms_.rbegin()->second; }

  std::size_t max_length() const {
    return terms_.empty() ? 0 : terms_.rbegin()->first.length();
  }
  std::size_t min_length() const {
    std::size_t m = terms_.empty() ? 0 : terms_.begin()->first.length();
    return m;
  }

  PathExpr& operator+=(const PathExpr& o) {
    for (const auto& [p, c] : o.terms_) add_term(p, c);
    return *this;
  }
  PathExpr& operator-=(const PathExpr& o) {
    for (const auto& [p, c] : o.terms_) add_term(p, -c);
    return *this;
  }
  PathExpr& operator*=(const Scalar& s) {
    if (s == 0) {
      terms_.clear();
    } else {
      for (auto& [p, c] : terms_) c *= s;
    }
    return *this;
  }
  friend PathExpr operator+(PathExpr a, const PathExpr& b) { return a += b; }
  friend PathExpr operator-(PathExpr a, const PathExpr& b) { return a -= b; }
  friend PathExpr operator*(const Scalar& s, PathExpr a) { return a *= s; }
  friend PathExpr operator-(PathExpr a) { return a *= Scalar(-1); }

  // Scales so the leading coefficient is 1.
  PathExpr monic() const {
    if (is_zero()) return *this;
    Scalar inv = 1 / leading_coefficient();
    return inv * PathExpr(*this);
  }

  friend bool operator==(const PathExpr& a, const PathExpr& b) {
    return a.source_ == b.source_ && a.target_ == b.target_ &&
           a.terms_ == b.terms_;
  }

 private:
  int source_ = 0;
  int target_ = 0;
  Terms terms_;
};

// Bilinear extension of compose: first y, then x.
inline PathExpr compose_expr(const PathExpr& x, const PathExpr& y) {
  if (y.target() != x.source()) {
    throw std::invalid_argument("compose_expr: expressions are not composable");
  }
  PathExpr out(y.source(), x.target());
  for (const auto& [p, a] : x.terms()) {
    for (const auto& [q, b] : y.terms()) out.add_term(compose(p, q), a * b);
  }
  return out;
}

struct Presentation {
  std::vector<std::string> vertices;
  std::vector<Arrow> arrows;
  std::vector<PathExpr> relations;

  std::optional<int> find_vertex(std::string_view label) const {
    for (std::size_t v = 0; v < vertices.size(); ++v) {
      if (vertices[v] == label) return static_cast<int>(v);
    }
    return std::nullopt;
  }
  int vertex(std::string_view label) const {
    auto v = find_vertex(label);
    if (!v) throw ValidationError("unknown vertex '" + std::string(label) + "'");
    return *v;
  }
  std::optional<int> find_arrow(std::string_view name) const {
    for (std::size_t a = 0; a < arrows.size(); ++a) {
      if (arrows[a].name == name) return static_cast<int>(a);
    }
    return std::nullopt;
  }
  int arrow(std::string_view name) const {
    auto a = find_arrow(name);
    if (!a) throw ValidationError("unknown arrow '" + std::string(name) + "'");
    return *a;
  }

  int add_vertex(std::string label) {
    vertices.push_back(std::move(label));
    return static_cast<int>(vertices.size()) - 1;
  }
  int add_arrow(std::string name, int source, int target) {
    arrows.push_back(Arrow{std::move(name), source, target});
    return static_cast<int>(arrows.size()) - 1;
  }

  std::size_t vertex_count() const noexcept { return vertices.size(); }

  Path arrow_path(int a) const {
    return Path{arrows.at(a).source, arrows.at(a).target, {a}};
  }

  // Path from arrow names given in traversal order.
  Path path(std::initializer_list<std::string_view> traversal) const {
    std::vector<int> ids;
    for (auto n : traversal) ids.push_back(arrow(n));
    return path_of(ids);
  }
  Path path_of(const std::vector<int>& traversal) const {
    if (traversal.empty()) throw std::invalid_argument("empty arrow word");
    Path p{arrows.at(traversal.front()).source, 0, traversal};
    int at = p.source;
    for (int a : traversal) {
      if (arrows.at(a).source != at) {
        throw ValidationError("non-composable word");
      }
      at = arrows[a].target;
    }
    p.target = at;
    return p;
  }

  std::vector<int> arrows_from(int v) const {
    std::vector<int> out;
    for (std::size_t a = 0; a < arrows.size(); ++a) {
      if (arrows[a].source == v) out.push_back(static_cast<int>(a));
    }
    return out;
  }
  std::vector<int> arrows_into(int v) const {
    std::vector<int> out;
    for (std::size_t a = 0; a < arrows.size(); ++a) {
      if (arrows[a].target == v) out.push_back(static_cast<int>(a));
    }
    return out;
  }

  friend bool operator==(const Presentation&, const Presentation&) = default;
};

inline bool has_canonical_arrow_order(const Presentation& p) {
  return std::is_sorted(
      p.arrows.begin(), p.arrows.end(),
      [](const Arrow& a, const Arrow& b) { return a.name < b.name; });
}

// Sorts arrows by name and rewrites every relation to the new indices.
inline void canonicalize(Presentation& p) {
  if (has_canonical_arrow_order(p)) return;
  std::vector<int> order(p.arrows.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return p.arrows[a].name < p.arrows[b].name;
  });
  std::vector<int> renumber(p.arrows.size());
  std::vector<Arrow> sorted;
  for (std::size_t k = 0; k < order.size(); ++k) {
    renumber[order[k]] = static_cast<int>(k);
    sorted.push_back(p.arrows[order[k]]);
  }
  p.arrows = std::move(sorted);
  for (auto& r : p.relations) {
    PathExpr out(r.source(), r.target());
    for (const auto& [path, c] : r.terms()) {
      Path q = path;
      for (int& a : q.arrows) {
        if (a >= 0 && a < static_cast<int>(renumber.size())) a = renumber[a];
      }
      out.add_term(q, c);
    }
    r = std::move(out);
  }
}

// ---------------------------------------------------------------------------
// Quotients by an arrow.

// r/a: terms of r whose first arrow is a, with a removed.
inline PathExpr left_quotient(const Presentation& p, const PathExpr& r,
                              int a) {
  if (p.arrows.at(a).source != r.source()) {
    throw std::invalid_argument("left_quotient: source mismatch");
  }
  PathExpr out(p.arrows[a].target, r.target());
  for (const auto& [path, c] : r.terms()) {
    if (!path.arrows.empty() && path.arrows.front() == a) {
      Path rest{p.arrows[a].target, path.target,
                {path.arrows.begin() + 1, path.arrows.end()}};
      out.add_term(rest, c);
    }
  }
  return out;
}

// r\b: terms of r whose last arrow is b, with b removed.
inline PathExpr right_quotient(const Presentation& p, const PathExpr& r,
                               int b) {
  if (p.arrows.at(b).target != r.target()) {
    throw std::invalid_argument("right_quotient: target mismatch");
  }
  PathExpr out(r.source(), p.arrows[b].source);
  for (const auto& [path, c] : r.terms()) {
    if (!path.arrows.empty() && path.arrows.back() == b) {
      Path rest{path.source, p.arrows[b].source,
                {path.arrows.begin(), path.arrows.end() - 1}};
      out.add_term(rest, c);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text rendering (right-to-left words).

inline std::string format_path(const Presentation& p, const Path& path) {
  if (path.is_trivial()) {
    return "e_" + p.vertices.at(static_cast<std::size_t>(path.source));
  }
  std::string out;
  for (auto it = path.arrows.rbegin(); it != path.arrows.rend(); ++it) {
    if (!out.empty()) out += '.';
    out += p.arrows.at(static_cast<std::size_t>(*it)).name;
  }
  return out;
}

// Terms are printed leading term first.
inline std::string format_expr(const Presentation& p, const PathExpr& e) {
  if (e.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (auto it = e.terms().rbegin(); it != e.terms().rend(); ++it) {
    const auto& [path, c] = *it;
    Scalar mag = abs(c);
    if (first) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    if (mag != 1) out += to_string(mag) + "*";
    out += format_path(p, path);
    first = false;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Validation.

struct Violation {
  std::string code;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const noexcept { return violations.empty(); }
  bool has(std::string_view code) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.code == code; });
  }
};

struct ValidateOptions {
  // Length-1 relation terms are expected between mutation and cleanup.
  bool allow_unit_terms = false;
};

inline ValidationReport validate(const Presentation& p,
                                 ValidateOptions opts = {}) {
  ValidationReport rep;
  auto add = [&](std::string code, std::string msg) {
    rep.violations.push_back({std::move(code), std::move(msg)});
  };
  const int nv = static_cast<int>(p.vertices.size());
  const int na = static_cast<int>(p.arrows.size());
  for (int v = 0; v < nv; ++v) {
    if (p.vertices[v].empty()) add("empty vertex label", "vertex #" + std::to_string(v));
    for (int w = 0; w < v; ++w) {
      if (p.vertices[v] == p.vertices[w]) {
        add("duplicate vertex label", p.vertices[v]);
      }
    }
  }
  for (int a = 0; a < na; ++a) {
    const Arrow& ar = p.arrows[a];
    if (ar.name.empty()) add("empty arrow name", "arrow #" + std::to_string(a));
    for (int b = 0; b < a; ++b) {
      if (p.arrows[b].name == ar.name) add("duplicate arrow name", ar.name);
    }
    if (ar.source < 0 || ar.source >= nv || ar.target < 0 || ar.target >= nv) {
      add("dangling arrow endpoint", ar.name);
    }
  }
  for (std::size_t k = 0; k < p.relations.size(); ++k) {
    const PathExpr& r = p.relations[k];
    const std::string where = "relation #" + std::to_string(k + 1);
    if (r.source() < 0 || r.source() >= nv || r.target() < 0 ||
        r.target() >= nv) {
      add("dangling relation endpoint", where);
      continue;
    }
    for (const auto& [path, c] : r.terms()) {
      bool arrows_ok = std::all_of(path.arrows.begin(), path.arrows.end(),
                                   [&](int a) { return a >= 0 && a < na; });
      if (!arrows_ok) {
        add("unknown arrow in relation", where);
        continue;
      }
      int at = path.source;
      bool composes = true;
      for (int a : path.arrows) {
        if (p.arrows[a].source != at) composes = false;
        at = p.arrows[a].target;
      }
      if (!composes || (!path.arrows.empty() && at != path.target)) {
        add("non-composable path", where);
        continue;
      }
      if (path.source != r.source() || path.target != r.target()) {
        add("non-parallel relation terms", where);
      }
      if (path.length() == 0 ||
          (path.length() == 1 && !opts.allow_unit_terms)) {
        add("non-admissible relation term", where + ": " + format_path(p, path));
      }
      if (c == 0) add("zero coefficient", where);
    }
  }
  return rep;
}

inline void require_valid(const Presentation& p, ValidateOptions opts = {}) {
  auto rep = validate(p, opts);
  if (!rep.ok()) {
    const auto& v = rep.violations.front();
    throw ValidationError(v.code + ": " + v.message);
  }
}

}  // namespace tiltmut
