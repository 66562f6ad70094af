#pragma once
// Graphviz export: solid edges for arrows, dashed edges for relations
// (source -> target, labelled with the expression).

#include <sstream>
#include <string>

#include "tiltmut/quiver.hpp"

namespace tiltmut {

namespace dot_detail {

inline std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace dot_detail

inline std::string export_dot(const Presentation& p, const std::string& name = "q") {
  using dot_detail::quote;
  std::ostringstream out;
  out << "digraph " << quote(name) << " {\n";
  out << "  rankdir=LR;\n";
  for (const auto& v : p.vertices) out << "  " << quote(v) << ";\n";
  for (const auto& a : p.arrows) {
    out << "  " << quote(p.vertices[a.source]) << " -> " << quote(p.vertices[a.target])
        << " [label=" << quote(a.name) << "];\n";
  }
  for (const auto& r : p.relations) {
    out << "  " << quote(p.vertices[r.source()]) << " -> " << quote(p.vertices[r.target()])
        << " [style=dashed, label=" << quote(format_expr(p, r)) << "];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace tiltmut
