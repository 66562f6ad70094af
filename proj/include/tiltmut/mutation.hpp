#pragma once
// Right mutation of a bound quiver at a vertex.
//
// mutate() first builds the quiver with an extra vertex i* (arrows a*, bar(r),
// the relation sum a*.a, the relations bar(r).a* = r/a and the kernel
// relations out of i*), then deletes i: every passage "into i, out of i"
// becomes a composite arrow, relations ending at i are extended by each arrow
// out of i, and relations starting at i are precomposed with each arrow into
// i. The deletion step reproduces the seven-step recipe, including the cycle
// case where bar(r) itself ends at i.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tiltmut/algebra.hpp"
#include "tiltmut/errors.hpp"
#include "tiltmut/linalg.hpp"
#include "tiltmut/quiver.hpp"

namespace tiltmut {

enum class FeasibilityCode { LoopAtVertex, NoOutgoingArrows, NonzeroShiftedHom };

inline const char* feasibility_code_name(FeasibilityCode c) {
  switch (c) {
    case FeasibilityCode::LoopAtVertex:
      return "LoopAtVertex";
    case FeasibilityCode::NoOutgoingArrows:
      return "NoOutgoingArrows";
    case FeasibilityCode::NonzeroShiftedHom:
      return "NonzeroShiftedHom";
  }
  return "?";
}

struct FeasibilityReason {
  FeasibilityCode code;
  // Loop arrow, or kernel element j -> i for NonzeroShiftedHom.
  std::optional<int> arrow;
  std::optional<PathExpr> witness;
};

struct FeasibilityReport {
  int vertex = 0;
  bool feasible = true;
  std::vector<FeasibilityReason> reasons;

  bool has(FeasibilityCode c) const {
    for (const auto& r : reasons) {
      if (r.code == c) return true;
    }
    return false;
  }
};

// Decides Hom(P_i*[1], Lambda) = 0 together with the structural conditions.
// The shifted Hom vanishes iff for every j the map
//   e_i Lambda e_j -> (+)_a e_t(a) Lambda e_j,  p |-> (a.p)_a
// is injective.
inline FeasibilityReport check_feasible(const NormalFormTable& t, int i) {
  const Presentation& p = t.presentation();
  if (i < 0 || i >= static_cast<int>(p.vertex_count())) {
    throw ValidationError("vertex index out of range");
  }
  FeasibilityReport rep;
  rep.vertex = i;
  for (int a : p.arrows_from(i)) {
    if (p.arrows[a].target == i) {
      rep.reasons.push_back({FeasibilityCode::LoopAtVertex, a, std::nullopt});
    }
  }
  const auto out = p.arrows_from(i);
  if (out.empty()) {
    rep.reasons.push_back({FeasibilityCode::NoOutgoingArrows, std::nullopt, std::nullopt});
  } else {
    for (int j = 0; j < static_cast<int>(p.vertex_count()); ++j) {
      const auto& cols = t.hom_indices(j, i);
      if (cols.empty()) continue;
      // One block of rows per arrow: the target is a direct sum.
      const std::size_t d = t.dimension();
      linalg::Rows m(out.size() * d, linalg::Vec(cols.size(), Scalar(0)));
      for (std::size_t k = 0; k < out.size(); ++k) {
        int ai = *t.basis_index(p.arrow_path(out[k]));
        for (std::size_t c = 0; c < cols.size(); ++c) {
          for (const auto& [r, coef] : t.product(ai, cols[c])) m[k * d + r][c] += coef;
        }
      }
      auto ker = linalg::kernel(m, cols.size());
      if (ker.empty()) continue;
      PathExpr w(j, i);
      for (std::size_t c = 0; c < cols.size(); ++c) {
        w.add_term(t.basis()[cols[c]], ker.front()[c]);
      }
      rep.reasons.push_back({FeasibilityCode::NonzeroShiftedHom, std::nullopt, w});
      break;
    }
  }
  rep.feasible = rep.reasons.empty();
  return rep;
}

class InfeasibleMutation : public Error {
 public:
  explicit InfeasibleMutation(FeasibilityReport rep)
      : Error(ErrorCode::Infeasible, message(rep)), report_(std::move(rep)) {}
  const FeasibilityReport& report() const noexcept { return report_; }

 private:
  static std::string message(const FeasibilityReport& rep) {
    std::string s = "mutation is infeasible:";
    for (const auto& r : rep.reasons) {
      s += " ";
      s += feasibility_code_name(r.code);
    }
    return s;
  }
  FeasibilityReport report_;
};

// Which step produced an arrow or relation (0: carried over unchanged), and
// a short description of its origin.
struct Provenance {
  int step = 0;
  std::string origin;
};

struct MutationOutcome {
  Presentation result;
  int star_vertex = 0;
  std::vector<Provenance> arrow_provenance;
  std::vector<Provenance> relation_provenance;
  // The minimal relations out of i used for bar(k), in index order.
  std::vector<PathExpr> minimal_relations;
  // Q^{i*} before vertex i is removed; i* is its last vertex.
  Presentation extended;
  // Per result arrow, the arrows of `extended` it stands for, first walked
  // first.
  std::vector<std::vector<std::string>> arrow_words;
};

// Index of the arrows of a quiver after deleting vertex i: kept arrows and
// composites (out of i) after (into i).
struct VertexRemovalMap {
  int removed = 0;
  std::vector<int> vertex;                      // old vertex -> new, -1 for i
  std::vector<int> arrow;                       // old arrow -> new, -1 if incident
  std::map<std::pair<int, int>, int> composite; // (into, out of) -> new arrow
};

// Rewrites a path that neither starts nor ends at the removed vertex into
// the reduced alphabet.
inline Path rewrite_avoiding_vertex(const Presentation& p, const Path& path,
                                    const VertexRemovalMap& m) {
  if (path.source == m.removed || path.target == m.removed) {
    throw std::invalid_argument("rewrite_avoiding_vertex: path touches the vertex");
  }
  Path out{m.vertex[path.source], m.vertex[path.target], {}};
  for (std::size_t k = 0; k < path.arrows.size(); ++k) {
    int a = path.arrows[k];
    if (p.arrows[a].target == m.removed) {
      int b = path.arrows[k + 1];
      out.arrows.push_back(m.composite.at({a, b}));
      ++k;
    } else {
      out.arrows.push_back(m.arrow.at(a));
    }
  }
  return out;
}

namespace mutation_detail {

struct Tagged {
  PathExpr expr;
  Provenance prov;
};

inline std::string fresh_name(std::string name, const std::set<std::string>& used) {
  while (used.count(name)) name += "'";
  return name;
}

inline PathExpr rewrite_expr(const Presentation& p, const PathExpr& e,
                             const VertexRemovalMap& m) {
  PathExpr out(m.vertex[e.source()], m.vertex[e.target()]);
  for (const auto& [path, c] : e.terms()) {
    out.add_term(rewrite_avoiding_vertex(p, path, m), c);
  }
  return out;
}

// Deletes vertex i from `p` (no loops at i, no relation i -> i). Composite
// arrows are named "<out>·<in>" and inherit `into_steps` provenance.
inline Presentation remove_vertex(const Presentation& p, int i,
                                  const std::vector<Provenance>& arrow_prov,
                                  const std::vector<Tagged>& relations,
                                  std::vector<Provenance>& out_arrow_prov,
                                  std::vector<std::vector<std::string>>& out_words,
                                  std::vector<Provenance>& out_rel_prov) {
  Presentation q;
  VertexRemovalMap m;
  m.removed = i;
  m.vertex.assign(p.vertex_count(), -1);
  for (int v = 0; v < static_cast<int>(p.vertex_count()); ++v) {
    if (v == i) continue;
    m.vertex[v] = q.add_vertex(p.vertices[v]);
  }
  std::set<std::string> used;
  m.arrow.assign(p.arrows.size(), -1);
  for (int a = 0; a < static_cast<int>(p.arrows.size()); ++a) {
    const Arrow& ar = p.arrows[a];
    if (ar.source == i || ar.target == i) continue;
    m.arrow[a] = q.add_arrow(ar.name, m.vertex[ar.source], m.vertex[ar.target]);
    used.insert(ar.name);
    out_arrow_prov.push_back(arrow_prov[a]);
    out_words.push_back({ar.name});
  }
  const auto into = p.arrows_into(i);
  const auto outof = p.arrows_from(i);
  for (int b : into) {
    for (int a : outof) {
      std::string name = fresh_name(p.arrows[a].name + "·" + p.arrows[b].name, used);
      used.insert(name);
      m.composite[{b, a}] = q.add_arrow(name, m.vertex[p.arrows[b].source],
                                        m.vertex[p.arrows[a].target]);
      // A composite with a relation-arrow is part of that relation-arrow's step.
      Provenance pv = arrow_prov[b].step == 3 ? arrow_prov[b]
                                              : Provenance{1, p.arrows[a].name + "·" + p.arrows[b].name};
      out_arrow_prov.push_back(pv);
      out_words.push_back({p.arrows[b].name, p.arrows[a].name});
    }
  }
  for (const auto& rel : relations) {
    const PathExpr& r = rel.expr;
    if (r.source() == i && r.target() == i) {
      throw std::logic_error("remove_vertex: relation from the vertex to itself");
    }
    std::vector<PathExpr> extended;
    if (r.source() == i) {
      for (int b : into) {
        extended.push_back(compose_expr(r, PathExpr::of(p.arrow_path(b))));
      }
    } else if (r.target() == i) {
      for (int a : outof) {
        extended.push_back(compose_expr(PathExpr::of(p.arrow_path(a)), r));
      }
    } else {
      extended.push_back(r);
    }
    for (const auto& e : extended) {
      PathExpr x = rewrite_expr(p, e, m);
      if (x.is_zero()) continue;
      q.relations.push_back(std::move(x));
      out_rel_prov.push_back(rel.prov);
    }
  }
  return q;
}

}  // namespace mutation_detail

inline MutationOutcome mutate(const NormalFormTable& t, int i) {
  using mutation_detail::Tagged;
  auto rep = check_feasible(t, i);
  if (!rep.feasible) throw InfeasibleMutation(rep);
  const Presentation& q = t.presentation();
  const auto out = q.arrows_from(i);
  const auto rels = minimal_relations_at(t, i);

  // Extended quiver with i* appended as the last vertex.
  Presentation ext = q;
  std::set<std::string> used_labels(q.vertices.begin(), q.vertices.end());
  const int star = ext.add_vertex(
      mutation_detail::fresh_name(q.vertices[i] + "*", used_labels));
  std::set<std::string> used;
  for (const auto& a : q.arrows) used.insert(a.name);
  std::vector<Provenance> arrow_prov(q.arrows.size(), Provenance{0, ""});
  for (std::size_t a = 0; a < q.arrows.size(); ++a) arrow_prov[a].origin = q.arrows[a].name;

  std::map<int, int> flipped;  // arrow out of i -> a*
  for (int a : out) {
    std::string name = mutation_detail::fresh_name(q.arrows[a].name + "*", used);
    used.insert(name);
    flipped[a] = ext.add_arrow(name, q.arrows[a].target, star);
    arrow_prov.push_back({2, q.arrows[a].name});
  }
  std::vector<int> bar;
  for (std::size_t k = 0; k < rels.size(); ++k) {
    std::string name =
        mutation_detail::fresh_name("bar(" + std::to_string(k + 1) + ")", used);
    used.insert(name);
    bar.push_back(ext.add_arrow(name, star, rels[k].target()));
    arrow_prov.push_back({3, format_expr(q, rels[k])});
  }

  std::vector<Tagged> relations;
  for (const auto& r : q.relations) {
    if (r.source() == i) continue;  // implied by sum a*.a and bar(r).a* = r/a
    relations.push_back({r, {r.target() == i ? 6 : 0, format_expr(q, r)}});
  }
  {
    PathExpr s(i, star);
    for (int a : out) {
      s.add_term(compose(ext.arrow_path(flipped[a]), q.arrow_path(a)), 1);
    }
    relations.push_back({s, {4, "sum of a*.a"}});
  }
  for (std::size_t k = 0; k < rels.size(); ++k) {
    for (int a : out) {
      PathExpr e = PathExpr::of(compose(ext.arrow_path(bar[k]), ext.arrow_path(flipped[a])));
      e -= left_quotient(q, rels[k], a);
      relations.push_back({e, {5, ext.arrows[bar[k]].name + "/" + q.arrows[a].name}});
    }
  }

  // Relations out of i*: sum_k eps_k.bar(k) with sum_k eps_k.(r_k/a) = 0 in
  // Lambda for every a, computed per target l and reduced modulo arrows
  // composed with relations at other targets.
  if (!rels.empty()) {
    std::vector<std::vector<PathExpr>> quot(rels.size());
    for (std::size_t k = 0; k < rels.size(); ++k) {
      for (int a : out) quot[k].push_back(left_quotient(q, rels[k], a));
    }
    const std::size_t n = q.vertex_count();
    struct Block {
      std::vector<std::pair<int, int>> coords;  // (relation, basis path)
      std::map<std::pair<int, int>, std::size_t> lookup;
      linalg::Rows kernel;
    };
    std::vector<Block> blocks(n);
    for (std::size_t l = 0; l < n; ++l) {
      Block& b = blocks[l];
      for (std::size_t k = 0; k < rels.size(); ++k) {
        for (int pth : t.hom_indices(rels[k].target(), static_cast<int>(l))) {
          b.coords.emplace_back(static_cast<int>(k), pth);
        }
      }
      std::sort(b.coords.begin(), b.coords.end(), [&](auto x, auto y) {
        Path px = compose(t.basis()[x.second], ext.arrow_path(bar[x.first]));
        Path py = compose(t.basis()[y.second], ext.arrow_path(bar[y.first]));
        return PathOrder{}(py, px);
      });
      for (std::size_t c = 0; c < b.coords.size(); ++c) b.lookup[b.coords[c]] = c;
      if (b.coords.empty()) continue;
      // One block of rows per arrow a, indexed by Lambda basis elements.
      linalg::Rows m(out.size() * t.dimension(), linalg::Vec(b.coords.size(), Scalar(0)));
      for (std::size_t c = 0; c < b.coords.size(); ++c) {
        auto [k, pth] = b.coords[c];
        for (std::size_t ai = 0; ai < out.size(); ++ai) {
          for (const auto& [path, coef] : quot[k][ai].terms()) {
            auto v = t.to_vector(PathExpr::of(path, coef));
            for (std::size_t x = 0; x < v.size(); ++x) {
              if (sgn(v[x]) == 0) continue;
              for (const auto& [r, pc] : t.product(pth, static_cast<int>(x))) {
                m[ai * t.dimension() + r][c] += v[x] * pc;
              }
            }
          }
        }
      }
      b.kernel = linalg::kernel(m, b.coords.size());
    }
    for (std::size_t l = 0; l < n; ++l) {
      Block& b = blocks[l];
      if (b.kernel.empty()) continue;
      linalg::Rows radical;
      for (int arr : q.arrows_into(static_cast<int>(l))) {
        const Block& src = blocks[q.arrows[arr].source];
        int ai = *t.basis_index(q.arrow_path(arr));
        for (const auto& y : src.kernel) {
          linalg::Vec v(b.coords.size(), Scalar(0));
          for (std::size_t c = 0; c < y.size(); ++c) {
            if (sgn(y[c]) == 0) continue;
            auto [k, pth] = src.coords[c];
            for (const auto& [r, coef] : t.product(ai, pth)) {
              v[b.lookup.at({k, r})] += y[c] * coef;
            }
          }
          radical.push_back(std::move(v));
        }
      }
      for (const auto& row : linalg::complement(radical, b.kernel, b.coords.size())) {
        PathExpr e(star, static_cast<int>(l));
        for (std::size_t c = 0; c < row.size(); ++c) {
          if (sgn(row[c]) == 0) continue;
          auto [k, pth] = b.coords[c];
          e.add_term(compose(t.basis()[pth], ext.arrow_path(bar[k])), row[c]);
        }
        relations.push_back({e, {7, "kernel at " + q.vertices[l]}});
      }
    }
  }

  MutationOutcome res;
  std::vector<Provenance> aprov, rprov;
  std::vector<std::vector<std::string>> words;
  Presentation removed =
      mutation_detail::remove_vertex(ext, i, arrow_prov, relations, aprov, words, rprov);
  // Put i* where i was.
  const int n = static_cast<int>(q.vertex_count());
  std::vector<int> place(n);
  for (int v = 0; v < n; ++v) {
    if (v == i) continue;
    place[v < i ? v : v - 1] = v;
  }
  place[n - 1] = i;  // i* was appended last
  Presentation r;
  r.vertices.resize(n);
  for (int v = 0; v < n; ++v) r.vertices[place[v]] = removed.vertices[v];
  for (const auto& a : removed.arrows) {
    r.add_arrow(a.name, place[a.source], place[a.target]);
  }
  for (const auto& e : removed.relations) {
    PathExpr x(place[e.source()], place[e.target()]);
    for (const auto& [path, c] : e.terms()) {
      x.add_term(Path{place[path.source], place[path.target], path.arrows}, c);
    }
    r.relations.push_back(std::move(x));
  }
  // Sort arrows by name, carrying provenance along.
  std::vector<int> order(r.arrows.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return r.arrows[a].name < r.arrows[b].name;
  });
  canonicalize(r);
  for (int k : order) {
    res.arrow_provenance.push_back(aprov[k]);
    res.arrow_words.push_back(words[k]);
  }
  res.extended = ext;
  res.relation_provenance = std::move(rprov);
  res.result = std::move(r);
  res.star_vertex = i;
  res.minimal_relations = rels;
  return res;
}

inline MutationOutcome mutate(const Presentation& p, int i,
                              int cap = default_degree_cap()) {
  return mutate(build_table(p, cap), i);
}

}  // namespace tiltmut
