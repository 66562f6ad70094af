#pragma once
// Line-oriented text format for quivers with relations:
//
//   quiver example
//   vertices 1 2 3
//   arrow a : 1 -> 2
//   arrow b : 2 -> 3
//   relation b.a = 0            # first a, then b
//   relation 2*x.y - z.w = u.v  # normalized to lhs - rhs = 0
//
// Words are read right to left. Coefficients are optional rationals
// ("-1/2*b.a"). Arrow names may not start with a digit or contain
// whitespace or any of ". + - = : #".

#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tiltmut/errors.hpp"
#include "tiltmut/quiver.hpp"

namespace tiltmut {

class ParseError : public ValidationError {
 public:
  ParseError(int line, int column, const std::string& msg)
      : ValidationError(std::to_string(line) + ":" + std::to_string(column) +
                        ": " + msg),
        line_(line),
        column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

struct QuiverDocument {
  std::string name;
  Presentation body;
  // 1-based source lines, for diagnostics.
  std::map<std::string, int> arrow_lines;
  std::vector<int> relation_lines;
};

namespace dsl_detail {

inline bool is_name_char(char c) {
  return !std::isspace(static_cast<unsigned char>(c)) && c != '.' && c != '+' &&
         c != '-' && c != '=' && c != ':' && c != '#';
}

class ExprParser {
 public:
  ExprParser(const Presentation& p, std::string_view text, int line, int col0)
      : p_(p), s_(text), line_(line), col0_(col0) {}

  // Parses a full expression; `expect_end` rejects trailing characters.
  PathExpr parse() {
    std::vector<std::pair<Scalar, Path>> terms;
    skip_ws();
    bool first = true;
    while (true) {
      skip_ws();
      Scalar sign = 1;
      if (peek() == '+' || peek() == '-') {
        sign = peek() == '-' ? -1 : 1;
        ++pos_;
        skip_ws();
      } else if (!first) {
        break;
      }
      first = false;
      auto term = parse_term();
      if (term) terms.emplace_back(sign * term->first, term->second);
      skip_ws();
      if (pos_ >= s_.size()) break;
      if (peek() != '+' && peek() != '-') break;
    }
    skip_ws();
    if (pos_ < s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    if (terms.empty()) return PathExpr(-1, -1);
    int src = terms.front().second.source;
    int tgt = terms.front().second.target;
    PathExpr out(src, tgt);
    for (auto& [c, path] : terms) {
      if (path.source != src || path.target != tgt) fail("non-parallel terms");
      out.add_term(path, c);
    }
    return out;
  }

 private:
  // nullopt for the literal zero.
  std::optional<std::pair<Scalar, Path>> parse_term() {
    Scalar coef = 1;
    if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (peek() == '/') {
        ++pos_;
        std::size_t dstart = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (dstart == pos_) fail("expected denominator");
      }
      try {
        coef = parse_scalar(s_.substr(start, pos_ - start));
      } catch (const std::invalid_argument&) {
        fail("bad coefficient");
      }
      skip_ws();
      if (peek() != '*') {
        if (coef == 0) return std::nullopt;
        fail("expected '*' after coefficient");
      }
      ++pos_;
      skip_ws();
    }
    std::vector<std::string> names;
    std::vector<std::size_t> starts;
    while (true) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && is_name_char(s_[pos_])) ++pos_;
      if (start == pos_) fail("expected arrow name");
      names.emplace_back(s_.substr(start, pos_ - start));
      starts.push_back(start);
      if (peek() == '.') {
        ++pos_;
        continue;
      }
      break;
    }
    if (names.size() == 1 && !p_.find_arrow(names[0]) &&
        names[0].rfind("e_", 0) == 0) {
      if (auto v = p_.find_vertex(std::string_view(names[0]).substr(2))) {
        return std::make_pair(coef, trivial_path(*v));
      }
    }
    // Right-to-left: the last name is walked first.
    std::vector<int> traversal;
    for (std::size_t k = names.size(); k-- > 0;) {
      auto a = p_.find_arrow(names[k]);
      if (!a) fail_at(starts[k], "unknown arrow '" + names[k] + "'");
      traversal.push_back(*a);
    }
    for (std::size_t k = 1; k < traversal.size(); ++k) {
      if (p_.arrows[traversal[k - 1]].target != p_.arrows[traversal[k]].source) {
        fail_at(starts.front(), "non-composable word");
      }
    }
    return std::make_pair(coef, p_.path_of(traversal));
  }

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg) const { fail_at(pos_, msg); }
  [[noreturn]] void fail_at(std::size_t at, const std::string& msg) const {
    throw ParseError(line_, col0_ + static_cast<int>(at), msg);
  }

  const Presentation& p_;
  std::string s_;
  std::size_t pos_ = 0;
  int line_;
  int col0_;
};

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

}  // namespace dsl_detail

// Parses one expression against the arrows of p. "0" yields a zero
// expression with endpoints -1.
inline PathExpr parse_expr(const Presentation& p, std::string_view text) {
  return dsl_detail::ExprParser(p, text, 1, 1).parse();
}

inline QuiverDocument parse_quiver(std::string_view text) {
  using dsl_detail::trim;
  QuiverDocument doc;
  Presentation& p = doc.body;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  struct PendingRelation {
    std::string text;
    int line;
    int column;
  };
  std::vector<PendingRelation> relations;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::string body = trim(line);
    if (body.empty()) continue;
    std::size_t col = line.find(body) + 1;
    std::istringstream words(body);
    std::string keyword;
    words >> keyword;
    std::string rest = trim(std::string_view(body).substr(keyword.size()));
    int rest_col = static_cast<int>(col + body.find(rest, keyword.size()));
    if (keyword == "quiver") {
      if (rest.empty()) throw ParseError(lineno, static_cast<int>(col), "missing quiver name");
      doc.name = rest;
    } else if (keyword == "vertices") {
      std::istringstream ids(rest);
      std::string id;
      while (ids >> id) {
        if (p.find_vertex(id)) {
          throw ParseError(lineno, rest_col, "duplicate vertex label '" + id + "'");
        }
        p.add_vertex(id);
      }
    } else if (keyword == "arrow") {
      auto colon = rest.find(':');
      auto arrow = rest.find("->");
      if (colon == std::string::npos || arrow == std::string::npos || arrow < colon) {
        throw ParseError(lineno, rest_col, "expected 'arrow <name> : <v> -> <w>'");
      }
      std::string name = trim(std::string_view(rest).substr(0, colon));
      std::string from = trim(std::string_view(rest).substr(colon + 1, arrow - colon - 1));
      std::string to = trim(std::string_view(rest).substr(arrow + 2));
      if (name.empty() || std::isdigit(static_cast<unsigned char>(name[0]))) {
        throw ParseError(lineno, rest_col, "bad arrow name '" + name + "'");
      }
      for (char c : name) {
        if (!dsl_detail::is_name_char(c)) {
          throw ParseError(lineno, rest_col, "bad arrow name '" + name + "'");
        }
      }
      if (p.find_arrow(name)) {
        throw ParseError(lineno, rest_col, "duplicate arrow name '" + name + "'");
      }
      auto s = p.find_vertex(from);
      auto t = p.find_vertex(to);
      if (!s) throw ParseError(lineno, rest_col, "unknown vertex '" + from + "'");
      if (!t) throw ParseError(lineno, rest_col, "unknown vertex '" + to + "'");
      p.add_arrow(name, *s, *t);
      doc.arrow_lines[name] = lineno;
    } else if (keyword == "relation") {
      relations.push_back({rest, lineno, rest_col});
    } else {
      throw ParseError(lineno, static_cast<int>(col), "unknown keyword '" + keyword + "'");
    }
  }
  canonicalize(p);
  for (const auto& rel : relations) {
    auto eq = rel.text.find('=');
    if (eq == std::string::npos) {
      throw ParseError(rel.line, rel.column, "expected '=' in relation");
    }
    PathExpr lhs =
        dsl_detail::ExprParser(p, rel.text.substr(0, eq), rel.line, rel.column).parse();
    PathExpr rhs = dsl_detail::ExprParser(p, rel.text.substr(eq + 1), rel.line,
                                          rel.column + static_cast<int>(eq) + 1)
                       .parse();
    PathExpr r = lhs;
    if (lhs.source() < 0) {
      r = -rhs;
    } else if (rhs.source() >= 0) {
      if (rhs.source() != lhs.source() || rhs.target() != lhs.target()) {
        throw ParseError(rel.line, rel.column, "non-parallel terms");
      }
      r = lhs - rhs;
    }
    if (r.source() < 0) throw ParseError(rel.line, rel.column, "empty relation");
    p.relations.push_back(std::move(r));
    doc.relation_lines.push_back(rel.line);
  }
  return doc;
}

inline std::string serialize_quiver(const Presentation& p,
                                    const std::string& name = "q") {
  std::ostringstream out;
  out << "quiver " << name << "\n";
  out << "vertices";
  for (const auto& v : p.vertices) out << " " << v;
  out << "\n";
  for (const auto& a : p.arrows) {
    out << "arrow " << a.name << " : " << p.vertices[a.source] << " -> "
        << p.vertices[a.target] << "\n";
  }
  for (const auto& r : p.relations) {
    out << "relation " << format_expr(p, r) << " = 0\n";
  }
  return out.str();
}

inline std::string serialize_quiver(const QuiverDocument& d) {
  return serialize_quiver(d.body, d.name);
}

}  // namespace tiltmut
