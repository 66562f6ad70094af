// Command-line driver. Exit codes: 0 ok, 2 validation, 3 infeasible,
// 4 mismatch, 5 degree cap exceeded, 1 anything else.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "tiltmut/corpus.hpp"
#include "tiltmut/dot.hpp"
#include "tiltmut/dsl.hpp"
#include "tiltmut/families.hpp"
#include "tiltmut/mutation.hpp"
#include "tiltmut/oracle.hpp"
#include "tiltmut/schema.hpp"
#include "tiltmut/simplify.hpp"

using namespace tiltmut;

namespace {

bool g_json = false;
int g_cap = 0;

int cap() { return g_cap > 0 ? g_cap : default_degree_cap(); }

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << text;
}

QuiverDocument load(const std::string& path) {
  std::string text = read_file(path);
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    Json j = Json::parse(text);
    QuiverDocument d;
    d.body = presentation_from_json(j);
    d.name = j.value("name", "q");
    return d;
  }
  return parse_quiver(text);
}

void print_matrix(const IntMatrix& m) {
  for (const auto& row : m) {
    for (std::size_t k = 0; k < row.size(); ++k) std::cout << (k ? " " : "  ") << row[k];
    std::cout << "\n";
  }
}

int fail(ErrorCode code, const std::string& msg, const Json& details = Json::object()) {
  if (g_json) {
    std::cout << Json{{"ok", false}, {"error", error_to_json(code, msg, details)}}.dump(2) << "\n";
  } else {
    std::cerr << "error: " << error_code_name(code) << ": " << msg << "\n";
  }
  return static_cast<int>(code);
}

void emit(const Json& data) { std::cout << Json{{"ok", true}, {"data", data}}.dump(2) << "\n"; }

int cmd_validate(const std::string& file) {
  auto doc = load(file);
  auto rep = validate(doc.body);
  if (!rep.ok()) {
    if (g_json) return fail(ErrorCode::Validation, "invalid presentation", to_json(rep));
    for (const auto& v : rep.violations) std::cerr << v.code << ": " << v.message << "\n";
    return static_cast<int>(ErrorCode::Validation);
  }
  auto t = build_table(doc.body, cap());
  if (g_json) {
    Json out = to_json(rep);
    out["dimension"] = t.dimension();
    emit(out);
  } else {
    std::cout << "valid: " << doc.body.vertex_count() << " vertices, " << doc.body.arrows.size()
              << " arrows, " << doc.body.relations.size() << " relations, dimension "
              << t.dimension() << "\n";
  }
  return 0;
}

int cmd_basis(const std::string& file) {
  auto doc = load(file);
  auto t = build_table(doc.body, cap());
  if (g_json) {
    emit(basis_to_json(t));
    return 0;
  }
  std::cout << "dimension " << t.dimension() << "\n";
  std::cout << "nilIndex " << t.nil_index() << "\n";
  std::cout << "cartan (entry i,j = paths j -> i)\n";
  print_matrix(cartan_matrix(t));
  return 0;
}

int cmd_feasible(const std::string& file, const std::string& vertex) {
  auto doc = load(file);
  auto t = build_table(doc.body, cap());
  auto rep = check_feasible(t, doc.body.vertex(vertex));
  if (g_json) {
    emit(to_json(doc.body, rep));
  } else {
    std::cout << "vertex " << vertex << ": " << (rep.feasible ? "feasible" : "infeasible") << "\n";
    for (const auto& r : rep.reasons) {
      std::cout << "  " << feasibility_code_name(r.code);
      if (r.arrow) std::cout << " (" << doc.body.arrows[*r.arrow].name << ")";
      if (r.witness) std::cout << " witness " << format_expr(doc.body, *r.witness);
      std::cout << "\n";
    }
  }
  return rep.feasible ? 0 : static_cast<int>(ErrorCode::Infeasible);
}

int cmd_mutate(const std::string& file, const std::string& vertex, bool raw,
               const std::string& out, const std::string& dot) {
  auto doc = load(file);
  auto t = build_table(doc.body, cap());
  auto m = mutate(t, doc.body.vertex(vertex));
  std::optional<Presentation> cleaned;
  if (!raw) cleaned = clean(m.result, cap());
  const Presentation& shown = raw ? m.result : *cleaned;
  const std::string name = doc.name + "_mut";
  if (!dot.empty()) write_file(dot, export_dot(shown, name));
  std::string text = g_json ? Json{{"ok", true}, {"data", to_json(doc.body, m, cleaned)}}.dump(2) + "\n"
                            : serialize_quiver(shown, name);
  if (out.empty()) {
    std::cout << text;
  } else {
    write_file(out, text);
  }
  return 0;
}

int cmd_iso(const std::string& f1, const std::string& f2) {
  auto p1 = load(f1).body;
  auto p2 = load(f2).body;
  IsoOptions opt;
  opt.cap = cap();
  auto w = find_isomorphism(p1, p2, opt);
  if (g_json) {
    emit(iso_to_json(p1, p2, w));
  } else if (w) {
    std::cout << "ISOMORPHIC\n";
    for (std::size_t v = 0; v < w->vertex_map.size(); ++v) {
      std::cout << "  " << p1.vertices[v] << " -> " << p2.vertices[w->vertex_map[v]] << "\n";
    }
    for (std::size_t a = 0; a < p1.arrows.size(); ++a) {
      std::cout << "  " << p1.arrows[a].name << " -> " << format_expr(p2, w->arrow_images[a]) << "\n";
    }
  } else {
    std::cout << "NOT ISOMORPHIC\n";
  }
  return w ? 0 : static_cast<int>(ErrorCode::OracleMismatch);
}

int cmd_verify(const std::string& file, const std::string& vertex) {
  auto doc = load(file);
  auto t = build_table(doc.body, cap());
  auto rep = verify(t, doc.body.vertex(vertex));
  if (g_json) {
    emit(to_json(rep));
  } else {
    std::cout << (rep.match ? "MATCH" : "MISMATCH") << " (dimension " << rep.mutated_dimension
              << " vs oracle " << rep.oracle_dimension << ")\n";
    if (rep.witness) {
      for (std::size_t a = 0; a < rep.mutated.arrows.size(); ++a) {
        std::cout << "  " << rep.mutated.arrows[a].name << " -> "
                  << format_expr(rep.oracle, rep.witness->arrow_images[a]) << "\n";
      }
    }
  }
  return rep.match ? 0 : static_cast<int>(ErrorCode::OracleMismatch);
}

int cmd_chain(const std::string& family, int n, int m, const std::string& schedule,
              const std::string& out) {
  if (family != "line") throw ValidationError("unknown family '" + family + "'");
  Presentation start = line_algebra(n, m);
  Schedule s;
  std::optional<Presentation> target;
  if (schedule == "auto") {
    if (m != 3 || n % 2 != 0 || n < 4) {
      throw ValidationError("--schedule auto needs an even n >= 4 and m = 3");
    }
    s = ladkani_schedule(n / 2);
    target = grid(2, n / 2);
  } else {
    s = schedule_from_json(Json::parse(read_file(schedule)));
  }
  std::vector<Presentation> trace;
  try {
    trace = run_schedule(start, s, cap());
  } catch (const ScheduleFailed& e) {
    return fail(ErrorCode::Infeasible, "step " + std::to_string(e.step() + 1) + " (" +
                                           s.steps[e.step()] + "): " + e.what());
  }
  bool ok = true;
  if (target) {
    IsoOptions opt;
    opt.cap = cap();
    ok = find_isomorphism(trace.back(), *target, opt).has_value();
  }
  Json tj = trace_to_json(s, trace);
  if (target) tj["reachesGrid"] = ok;
  if (!out.empty()) write_file(out, tj.dump(2) + "\n");
  if (g_json) {
    emit(tj);
  } else {
    for (std::size_t k = 0; k < s.steps.size(); ++k) {
      auto f = fingerprint(trace[k + 1]);
      std::cout << "step " << k + 1 << ": mutate at " << s.steps[k] << " -> " << f.vertices
                << " vertices, " << f.arrows << " arrows, " << f.relations << " relations\n";
    }
    std::cout << serialize_quiver(trace.back(), "chain_end");
    if (target) std::cout << (ok ? "MATCH" : "MISMATCH") << " grid(2," << n / 2 << ")\n";
  }
  return ok ? 0 : static_cast<int>(ErrorCode::OracleMismatch);
}

int cmd_corpus(std::uint64_t seed, int count) {
  CorpusOptions opt;
  opt.seed = seed;
  opt.count = count;
  opt.cap = std::min(cap(), opt.cap);
  auto rep = run_corpus(opt);
  if (g_json) {
    Json failures = Json::array();
    for (const auto& c : rep.failures) {
      failures.push_back({{"index", c.index}, {"vertex", c.vertex}, {"feasible", c.feasible},
                          {"feasibilityAgrees", c.feasibility_agrees}, {"match", c.match},
                          {"cartanEqual", c.cartan_equal}, {"error", c.error}});
    }
    emit({{"presentations", rep.presentations}, {"pairs", rep.pairs}, {"feasible", rep.feasible},
          {"matches", rep.matches}, {"cartanMatches", rep.cartan_matches},
          {"feasibilityAgreements", rep.feasibility_agreements}, {"failures", failures}});
  } else {
    std::cout << "presentations " << rep.presentations << ", vertex pairs " << rep.pairs
              << ", feasible " << rep.feasible << "\n";
    std::cout << "oracle matches " << rep.matches << "/" << rep.feasible << ", cartan "
              << rep.cartan_matches << "/" << rep.feasible << ", feasibility agreement "
              << rep.feasibility_agreements << "/" << rep.pairs << "\n";
    for (const auto& c : rep.failures) {
      std::cout << "  case " << c.index << " vertex " << c.vertex << ": " << c.error << "\n";
    }
  }
  return rep.ok() ? 0 : static_cast<int>(ErrorCode::OracleMismatch);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Right tilting mutation of bound quivers"};
  app.require_subcommand(1);
  app.add_flag("--json", g_json, "Machine-readable output and diagnostics");
  app.add_option("--cap", g_cap, "Degree cap (default: TILTMUT_DEGREE_CAP or 32)")
      ->check(CLI::PositiveNumber);

  std::string file, file2, vertex, out, dot, schedule = "auto", family;
  bool raw = false, clean_flag = false;
  int n = 0, m = 0, count = 200;
  std::uint64_t seed = 1;

  auto* validate_cmd = app.add_subcommand("validate", "Check a presentation");
  validate_cmd->add_option("file", file)->required();

  auto* basis_cmd = app.add_subcommand("basis", "Dimension, nil index and Cartan matrix");
  basis_cmd->add_option("file", file)->required();
  basis_cmd->add_option("--cap", g_cap, "Degree cap")->check(CLI::PositiveNumber);

  auto* feasible_cmd = app.add_subcommand("feasible", "Decide feasibility at a vertex");
  feasible_cmd->add_option("file", file)->required();
  feasible_cmd->add_option("vertex", vertex)->required();

  auto* mutate_cmd = app.add_subcommand("mutate", "Mutate at a vertex");
  mutate_cmd->add_option("file", file)->required();
  mutate_cmd->add_option("vertex", vertex)->required();
  auto* raw_opt = mutate_cmd->add_flag("--raw", raw, "Skip cleanup");
  mutate_cmd->add_flag("--clean", clean_flag, "Clean up (default)")->excludes(raw_opt);
  mutate_cmd->add_option("-o,--output", out, "Write the result here");
  mutate_cmd->add_option("--dot", dot, "Also write a DOT drawing");
  mutate_cmd->add_flag("--json", g_json, "Print the full outcome as JSON");

  auto* iso_cmd = app.add_subcommand("iso", "Test two presentations for isomorphism");
  iso_cmd->add_option("file1", file)->required();
  iso_cmd->add_option("file2", file2)->required();

  auto* verify_cmd = app.add_subcommand("verify", "Compare a mutation with the oracle");
  verify_cmd->add_option("file", file)->required();
  verify_cmd->add_option("vertex", vertex)->required();

  auto* chain_cmd = app.add_subcommand("chain", "Run a mutation schedule on a family");
  chain_cmd->add_option("family", family)->required()->check(CLI::IsMember({"line"}));
  chain_cmd->add_option("n", n)->required()->check(CLI::Range(1, 64));
  chain_cmd->add_option("m", m)->required()->check(CLI::Range(2, 64));
  chain_cmd->add_option("--schedule", schedule, "auto, or a schedule JSON file");
  chain_cmd->add_option("-o,--output", out, "Write the trace JSON here");

  auto* corpus_cmd = app.add_subcommand("corpus", "Random corpus against the oracle");
  corpus_cmd->add_option("--seed", seed);
  corpus_cmd->add_option("--count", count)->check(CLI::PositiveNumber);

  for (auto* sub : app.get_subcommands({})) {
    if (sub != mutate_cmd) sub->add_flag("--json", g_json, "Machine-readable output");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ErrorCode::Validation);
  }

  try {
    if (*validate_cmd) return cmd_validate(file);
    if (*basis_cmd) return cmd_basis(file);
    if (*feasible_cmd) return cmd_feasible(file, vertex);
    if (*mutate_cmd) return cmd_mutate(file, vertex, raw, out, dot);
    if (*iso_cmd) return cmd_iso(file, file2);
    if (*verify_cmd) return cmd_verify(file, vertex);
    if (*chain_cmd) return cmd_chain(family, n, m, schedule, out);
    if (*corpus_cmd) return cmd_corpus(seed, count);
  } catch (const InfeasibleMutation& e) {
    Json reasons = Json::array();
    for (const auto& r : e.report().reasons) reasons.push_back(feasibility_code_name(r.code));
    return fail(e.code(), e.what(), {{"reasons", reasons}});
  } catch (const ParseError& e) {
    return fail(e.code(), e.what(), {{"line", e.line()}, {"column", e.column()}});
  } catch (const Error& e) {
    return fail(e.code(), e.what());
  } catch (const Json::exception& e) {
    return fail(ErrorCode::Validation, e.what());
  } catch (const std::exception& e) {
    return fail(ErrorCode::Internal, e.what());
  }
  return 0;
}
