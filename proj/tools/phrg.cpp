// phrg: command-line front end for PHR grammars.
//
// Exit status: 0 on success, 1 for a negative verdict (member not found, validation
// failure of a well-formed file), 2 for usage and parse errors.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "phr/engine.hpp"
#include "phr/io/dot.hpp"
#include "phr/io/fixtures.hpp"
#include "phr/io/text_format.hpp"
#include "phr/transforms.hpp"

namespace {

using phr::Json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A path, the path with ".phrg" appended, or "fixtures/<name>" naming a built-in fixture.
phr::GrammarDocument load_grammar(const std::string& path) {
  namespace fs = std::filesystem;
  for (const auto& candidate : {path, path + ".phrg"}) {
    if (fs::is_regular_file(candidate)) {
      const std::string text = read_file(candidate);
      try {
        return phr::parse_grammar(text);
      } catch (const phr::ParseError& e) {
        throw phr::Error(candidate + (e.line() != 0 ? ":" : ": ") + e.what());
      }
    }
  }
  std::string name = path;
  if (name.rfind("fixtures/", 0) == 0) name = name.substr(9);
  for (const auto& f : phr::fixtures::all()) {
    if (f.name == name) return f.make();
  }
  throw UsageError("no such grammar file or fixture: '" + path + "'");
}

struct Loaded {
  phr::PHRGrammar grammar;
  std::optional<phr::ControlAutomaton> control;
};

Loaded load_phr(const std::string& path) {
  const auto doc = load_grammar(path);
  return {phr::as_phr(doc), doc.control};
}

phr::Word parse_word(const std::string& text, const phr::Signature& sig) {
  std::vector<std::string> letters;
  if (text.find_first_of(" \t") != std::string::npos) {
    std::istringstream in(text);
    for (std::string a; in >> a;) letters.push_back(a);
  } else {
    for (std::size_t i = 0; i < text.size();) {
      const std::size_t n = phr::detail::utf8_length(static_cast<unsigned char>(text[i]));
      letters.push_back(text.substr(i, n));
      i += n;
    }
  }
  phr::Word w;
  for (const auto& a : letters) {
    auto x = sig.find(a);
    if (!x || sig.arity(*x) != 2) return {};
    w.push_back(*x);
  }
  return w;
}

Json trace_json(const std::vector<phr::TableIndex>& t) {
  Json out = Json::array();
  for (auto i : t) out.push_back(i);
  return out;
}

Json header() {
  Json out;
  out["format_version"] = phr::format_version;
  return out;
}

void print(const Json& j) { std::cout << j.dump(2) << "\n"; }

void print_grammar(const phr::GrammarDocument& doc, const std::string& out_path) {
  const std::string text = phr::serialize_grammar(doc);
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + out_path + "'");
  out << text;
}

struct LimitFlags {
  phr::Limits limits;
  std::vector<std::string> empty_labels;

  void add_to(CLI::App* cmd, bool with_empty) {
    cmd->add_option("--max-steps", limits.max_steps, "Derivation step bound")->capture_default_str();
    cmd->add_option("--max-nodes", limits.max_nodes, "Node bound")->capture_default_str();
    cmd->add_option("--max-edges", limits.max_edges, "Edge bound")->capture_default_str();
    cmd->add_option("--max-results", limits.max_results, "Result cap")->capture_default_str();
    cmd->add_option("--max-states", limits.max_states, "Search state cap")->capture_default_str();
    if (with_empty) cmd->add_option("--empty-label", empty_labels, "Labels read as the empty word");
  }

  std::set<phr::LabelId> empties(const phr::Signature& sig) const {
    std::set<phr::LabelId> out;
    for (const auto& name : empty_labels) {
      auto x = sig.find(name);
      if (!x) throw UsageError("--empty-label: unknown label '" + name + "'");
      out.insert(*x);
    }
    return out;
  }
};

std::vector<std::string> sorted_words(const phr::Signature& sig, const std::set<phr::Word>& words) {
  std::vector<std::string> out;
  for (const auto& w : words) out.push_back(phr::spell(sig, w));
  std::sort(out.begin(), out.end(), [](const std::string& a, const std::string& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

phr::Mode parse_mode(const std::string& m) { return m == "rf" ? phr::Mode::repetition_free : phr::Mode::general; }

phr::WordAutomaton load_fsa(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return phr::parse_fsa(text);
  } catch (const phr::ParseError& e) {
    throw phr::Error(path + (e.line() != 0 ? ":" : ": ") + e.what());
  }
}

// "a=xy" or "a=x y" or "a=".
std::pair<std::string, std::vector<std::string>> parse_map_entry(const std::string& entry) {
  const auto eq = entry.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError("expected LETTER=WORD, got '" + entry + "'");
  const std::string value = entry.substr(eq + 1);
  std::vector<std::string> letters;
  if (value.find(' ') != std::string::npos) {
    std::istringstream in(value);
    for (std::string a; in >> a;) letters.push_back(a);
  } else {
    for (std::size_t i = 0; i < value.size();) {
      const std::size_t n = phr::detail::utf8_length(static_cast<unsigned char>(value[i]));
      letters.push_back(value.substr(i, n));
      i += n;
    }
  }
  return {entry.substr(0, eq), letters};
}

int run(int argc, char** argv) {
  CLI::App app{"Parallel hyperedge replacement grammars"};
  app.require_subcommand(1);

  std::string file;
  LimitFlags flags;

  auto* validate = app.add_subcommand("validate", "Parse and check a grammar file");
  validate->add_option("file", file, "Grammar file or fixtures/<name>")->required();

  std::string trace_text;
  auto* derive = app.add_subcommand("derive", "Apply a table sequence to the start graph");
  derive->add_option("file", file)->required();
  derive->add_option("--trace", trace_text, "Comma-separated table indices")->required();

  auto* enumerate = app.add_subcommand("enumerate", "Enumerate the generated hypergraphs");
  enumerate->add_option("file", file)->required();
  flags.add_to(enumerate, false);

  auto* strings = app.add_subcommand("strings", "Enumerate the generated string language");
  strings->add_option("file", file)->required();
  flags.add_to(strings, true);

  std::string word;
  auto* member = app.add_subcommand("member", "Bounded membership of a word");
  member->add_option("file", file)->required();
  member->add_option("word", word, "Letters, or space-separated label names")->required();
  flags.add_to(member, false);

  std::string name;
  std::vector<std::string> inputs;
  std::vector<std::string> images;
  std::vector<std::string> map_entries;
  std::string mode = "general";
  std::string out_path;
  bool empty_first = false;
  bool empty_second = false;
  auto* transform = app.add_subcommand("transform", "Run a grammar construction");
  transform
      ->add_option("name", name,
                   "hr-to-phr | et0l-to-phr | et0l-propagating | regular-to-phr | remove-control | remove-unreachable"
                   " | substitute | iterate-substitution | union | concat | plus | hom | inverse-hom | intersect"
                   " | intersect-controlled | free-product")
      ->required();
  transform->add_option("inputs", inputs, "Input grammar (and automaton) files")->required();
  transform->add_option("--image", images, "LETTER=FILE image grammar for substitutions");
  transform->add_option("--map", map_entries, "LETTER=WORD for homomorphisms");
  transform->add_option("--mode", mode, "Repetition-freeness policy")->check(CLI::IsMember({"rf", "general"}));
  transform->add_flag("--empty-in-first", empty_first, "Concatenation: ε is in the first language");
  transform->add_flag("--empty-in-second", empty_second, "Concatenation: ε is in the second language");
  transform->add_option("-o,--output", out_path, "Output file (default stdout)");

  std::string label;
  std::optional<phr::TableIndex> table;
  std::size_t rule_index = 0;
  auto* dot = app.add_subcommand("export-dot", "Render a hypergraph or a rule in DOT");
  dot->add_option("file", file, ".hg.json file, or a grammar with --label")->required();
  dot->add_option("--label", label, "Rule left-hand side");
  dot->add_option("--table", table, "Table index (default: first)");
  dot->add_option("--rule", rule_index, "Rule position within the label's rules");

  auto* fx = app.add_subcommand("fixtures", "Built-in fixture grammars");
  fx->require_subcommand(1);
  auto* fx_list = fx->add_subcommand("list", "List fixture names");
  auto* fx_emit = fx->add_subcommand("emit", "Print a fixture as .phrg text");
  fx_emit->add_option("name", name)->required();
  fx_emit->add_option("-o,--output", out_path, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (validate->parsed()) {
    const auto doc = load_grammar(file);
    Json out = header();
    out["valid"] = true;
    std::visit(
        [&](const auto& g) {
          using G = std::decay_t<decltype(g)>;
          out["kind"] = std::is_same_v<G, phr::PHRGrammar> ? "phr" : std::is_same_v<G, phr::HRGrammar> ? "hr" : "et0l";
          out["labels"] = g.signature().size();
        },
        doc.grammar);
    const auto g = phr::as_phr(doc);
    out["tables"] = g.tables().size();
    out["order"] = g.order();
    out["repetition_free"] = g.repetition_free();
    out["controlled"] = doc.control.has_value();
    print(out);
    return 0;
  }

  if (derive->parsed()) {
    const auto [g, control] = load_phr(file);
    std::vector<phr::TableIndex> trace;
    std::stringstream ss(trace_text);
    for (std::string item; std::getline(ss, item, ',');) {
      try {
        trace.push_back(static_cast<phr::TableIndex>(std::stoul(item)));
      } catch (const std::exception&) {
        throw UsageError("--trace: bad table index '" + item + "'");
      }
    }
    for (auto i : trace) {
      if (g.tables().count(i) == 0) throw UsageError("--trace: unknown table " + std::to_string(i));
    }
    const auto result = phr::trace_derive(g, g.start_graph(), trace);
    Json out = header();
    out["trace"] = trace_json(trace);
    out["count"] = result.size();
    Json graphs = Json::array();
    for (const auto& [key, h] : result) graphs.push_back(phr::hypergraph_json(h, g.signature()));
    out["graphs"] = std::move(graphs);
    print(out);
    return 0;
  }

  if (enumerate->parsed()) {
    const auto [g, control] = load_phr(file);
    const auto r = control ? phr::enumerate_language(phr::ControlledPHRGrammar(g, *control), flags.limits)
                           : phr::enumerate_language(g, flags.limits);
    Json out = header();
    Json graphs = Json::array();
    for (const auto& [key, h] : r.graphs) {
      Json item;
      item["nodes"] = h.node_count();
      item["edges"] = h.edge_count();
      item["trace"] = trace_json(r.traces.at(key));
      item["graph"] = phr::hypergraph_json(h, g.signature());
      graphs.push_back(std::move(item));
    }
    out["count"] = r.graphs.size();
    out["graphs"] = std::move(graphs);
    out["exhaustive"] = r.exhaustive;
    out["saturated"] = r.saturated;
    out["states"] = r.states;
    print(out);
    return 0;
  }

  if (strings->parsed()) {
    const auto [g, control] = load_phr(file);
    const auto empties = flags.empties(g.signature());
    const auto r = control ? phr::enumerate_strings(phr::ControlledPHRGrammar(g, *control), flags.limits, empties)
                           : phr::enumerate_strings(g, flags.limits, empties);
    Json out = header();
    out["strings"] = sorted_words(g.signature(), r.words);
    out["count"] = r.words.size();
    out["exhaustive"] = r.exhaustive;
    out["saturated"] = r.saturated;
    out["states"] = r.states;
    print(out);
    return 0;
  }

  if (member->parsed()) {
    const auto [g, control] = load_phr(file);
    const auto w = parse_word(word, g.signature());
    phr::MemberResult r;
    if (!w.empty()) {
      r = control ? phr::member_string(phr::ControlledPHRGrammar(g, *control), w, flags.limits)
                  : phr::member_string(g, w, flags.limits);
    } else {
      r.verdict = phr::Verdict::no_within_limits;
    }
    Json out = header();
    out["word"] = word;
    out["verdict"] = phr::to_string(r.verdict);
    if (r.verdict == phr::Verdict::yes) out["trace"] = trace_json(r.trace);
    out["exhaustive"] = r.verdict != phr::Verdict::unknown;
    out["states"] = r.states;
    print(out);
    return r.verdict == phr::Verdict::yes ? 0 : 1;
  }

  if (transform->parsed()) {
    const phr::Mode m = parse_mode(mode);
    auto need = [&](std::size_t n) {
      if (inputs.size() != n) {
        throw UsageError("transform " + name + " takes " + std::to_string(n) + " input file(s)");
      }
    };
    auto spec = [&] {
      phr::SubstitutionSpec s;
      for (const auto& entry : images) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("--image expects LETTER=FILE");
        s.emplace(entry.substr(0, eq), phr::as_phr(load_grammar(entry.substr(eq + 1))));
      }
      return s;
    };
    auto hom = [&] {
      phr::Homomorphism h;
      for (const auto& entry : map_entries) h.insert(parse_map_entry(entry));
      return h;
    };
    phr::GrammarDocument out;
    out.name = name;
    if (name == "hr-to-phr") {
      need(1);
      const auto doc = load_grammar(inputs[0]);
      const auto* hr = std::get_if<phr::HRGrammar>(&doc.grammar);
      if (hr == nullptr) throw UsageError("hr-to-phr expects an HR grammar");
      out.grammar = phr::hr_to_phr(*hr);
    } else if (name == "et0l-to-phr" || name == "et0l-propagating") {
      need(1);
      const auto doc = load_grammar(inputs[0]);
      const auto* e = std::get_if<phr::ET0LGrammar>(&doc.grammar);
      if (e == nullptr) throw UsageError(name + " expects an ET0L grammar");
      if (name == "et0l-to-phr") {
        out.grammar = phr::et0l_to_phr(*e);
      } else {
        out.grammar = phr::et0l_propagating(*e);
      }
    } else if (name == "regular-to-phr") {
      need(1);
      out.grammar = phr::regular_to_phr(load_fsa(inputs[0]));
    } else if (name == "remove-control") {
      need(1);
      const auto [g, control] = load_phr(inputs[0]);
      if (!control) throw UsageError("remove-control expects a grammar with a control block");
      out.grammar = phr::remove_control(phr::ControlledPHRGrammar(g, *control));
    } else if (name == "remove-unreachable") {
      need(1);
      out.grammar = phr::remove_unreachable(load_phr(inputs[0]).grammar);
    } else if (name == "substitute" || name == "iterate-substitution") {
      need(1);
      const auto g = load_phr(inputs[0]).grammar;
      out.grammar = name == "substitute" ? phr::substitute(g, spec(), m) : phr::iterate_substitution(g, spec(), m);
    } else if (name == "union" || name == "concat") {
      need(2);
      const phr::RationalOptions opts{empty_first, empty_second};
      out.grammar = phr::rational_ops(load_phr(inputs[0]).grammar, load_phr(inputs[1]).grammar,
                                      name == "union" ? phr::RationalOp::union_ : phr::RationalOp::concat, opts, m);
    } else if (name == "plus") {
      need(1);
      out.grammar = phr::rational_plus(load_phr(inputs[0]).grammar, m);
    } else if (name == "hom") {
      need(1);
      out.grammar = phr::apply_hom(load_phr(inputs[0]).grammar, hom(), m);
    } else if (name == "inverse-hom") {
      need(1);
      out.grammar = phr::inverse_hom(load_phr(inputs[0]).grammar, hom());
    } else if (name == "intersect" || name == "intersect-controlled") {
      need(2);
      const auto g = load_phr(inputs[0]).grammar;
      const auto fsa = load_fsa(inputs[1]);
      if (name == "intersect") {
        out.grammar = phr::rational_intersect(g, fsa);
      } else {
        auto cg = phr::rational_intersect_controlled(g, fsa);
        out.grammar = std::move(cg.underlying);
        out.control = std::move(cg.control);
      }
    } else if (name == "free-product") {
      need(2);
      out.grammar = phr::free_product_wp(load_phr(inputs[0]).grammar, load_phr(inputs[1]).grammar, m);
    } else {
      throw UsageError("unknown transform '" + name + "'");
    }
    print_grammar(out, out_path);
    return 0;
  }

  if (dot->parsed()) {
    if (file.size() >= 8 && file.substr(file.size() - 8) == ".hg.json") {
      const auto doc = phr::parse_hypergraph(read_file(file));
      std::cout << phr::export_dot(doc.graph, doc.signature);
      return 0;
    }
    const auto [g, control] = load_phr(file);
    if (label.empty()) throw UsageError("export-dot on a grammar needs --label");
    const auto x = g.signature().find(label);
    if (!x) throw UsageError("unknown label '" + label + "'");
    const auto& t = table ? g.table(*table) : g.tables().begin()->second;
    const auto& rules = t.rules_for(*x);
    if (rule_index >= rules.size()) throw UsageError("--rule out of range");
    std::cout << phr::export_dot(rules[rule_index], g.signature());
    return 0;
  }

  if (fx_list->parsed()) {
    Json out = header();
    Json names = Json::array();
    for (const auto& f : phr::fixtures::all()) names.push_back(f.name);
    out["fixtures"] = std::move(names);
    print(out);
    return 0;
  }

  if (fx_emit->parsed()) {
    print_grammar(phr::fixtures::get(name), out_path);
    return 0;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "phrg: " << e.what() << "\n";
    return 2;
  } catch (const phr::ParseError& e) {
    std::cerr << "phrg: " << e.what() << "\n";
    return 2;
  } catch (const phr::Error& e) {
    std::cerr << "phrg: " << e.what() << "\n";
    return 2;
  }
}
