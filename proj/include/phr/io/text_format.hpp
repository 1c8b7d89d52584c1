#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "phr/automaton.hpp"
#include "phr/error.hpp"
#include "phr/grammar.hpp"
#include "phr/hypergraph.hpp"
#include "phr/signature.hpp"
#include "phr/transforms/builder.hpp"

namespace phr {

inline constexpr int format_version = 1;

using Json = nlohmann::ordered_json;

/// A grammar file: one PHR, HR or ET0L grammar, with an optional control automaton for PHR.
struct GrammarDocument {
  std::string name;
  std::string description;
  std::variant<PHRGrammar, HRGrammar, ET0LGrammar> grammar;
  std::optional<ControlAutomaton> control;

  bool operator==(const GrammarDocument&) const = default;
};

namespace detail {

inline std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xe) return 3;
  if ((lead >> 3) == 0x1e) return 4;
  return 1;
}

inline bool single_codepoint(std::string_view s) {
  return !s.empty() && utf8_length(static_cast<unsigned char>(s[0])) == s.size();
}

inline bool is_space(char c) { return c == ' ' || c == '\t'; }

/// Word spelled by h when h has exactly the layout of string_graph(word).
inline std::optional<Word> string_layout(const Hypergraph& h) {
  const std::size_t m = h.edge_count();
  if (h.node_count() != m + 1 || h.ext() != std::vector<NodeId>{0, static_cast<NodeId>(m)}) return std::nullopt;
  Word w;
  for (std::size_t i = 0; i < m; ++i) {
    const Edge& e = h.edge(i);
    if (e.att != std::vector<NodeId>{static_cast<NodeId>(i), static_cast<NodeId>(i + 1)}) return std::nullopt;
    w.push_back(e.label);
  }
  return w;
}

inline std::optional<std::string> str_literal(const Word& w, const Signature& sig) {
  bool single = true;
  for (LabelId x : w) single = single && single_codepoint(sig.name(x));
  if (w.size() == 1 && !single) return std::nullopt;
  std::string body;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!single && i > 0) body += ' ';
    body += sig.name(w[i]);
  }
  return "str(" + Json(body).dump() + ")";
}

}  // namespace detail

/// JSON form of a hypergraph: nodes "v<i>", edges "e<i>", labels by name.
inline Json hypergraph_json(const Hypergraph& h, const Signature& sig) {
  auto node = [](NodeId v) { return "v" + std::to_string(v); };
  Json nodes = Json::array();
  for (NodeId v = 0; v < h.node_count(); ++v) nodes.push_back(node(v));
  Json edges = Json::array();
  for (std::size_t e = 0; e < h.edge_count(); ++e) {
    Json att = Json::array();
    for (NodeId v : h.edge(e).att) att.push_back(node(v));
    Json obj;
    obj["id"] = "e" + std::to_string(e);
    obj["label"] = sig.name(h.edge(e).label);
    obj["att"] = std::move(att);
    edges.push_back(std::move(obj));
  }
  Json ext = Json::array();
  for (NodeId v : h.ext()) ext.push_back(node(v));
  Json out;
  out["nodes"] = std::move(nodes);
  out["edges"] = std::move(edges);
  out["ext"] = std::move(ext);
  return out;
}

/// Reads the JSON form. `label` resolves a label name and the attachment length to an id.
template <class Resolve>
Hypergraph hypergraph_from_json(const Json& j, Resolve&& label) {
  auto fail = [](const std::string& m) -> Hypergraph { throw ParseError(0, 0, "hypergraph JSON: " + m); };
  auto exact_keys = [&](const Json& obj, std::initializer_list<const char*> keys, const std::string& what) {
    if (!obj.is_object()) fail(what + " must be an object");
    for (const auto& [k, v] : obj.items()) {
      if (std::find_if(keys.begin(), keys.end(), [&](const char* x) { return k == x; }) == keys.end()) {
        fail("unknown key '" + k + "' in " + what);
      }
    }
    for (const char* k : keys) {
      if (!obj.contains(k)) fail("missing key '" + std::string(k) + "' in " + what);
    }
  };
  exact_keys(j, {"nodes", "edges", "ext"}, "hypergraph");
  std::map<std::string, NodeId> ids;
  if (!j["nodes"].is_array()) fail("'nodes' must be an array");
  for (const auto& n : j["nodes"]) {
    if (!n.is_string()) fail("node ids must be strings");
    if (!ids.emplace(n.get<std::string>(), static_cast<NodeId>(ids.size())).second) {
      fail("duplicate node '" + n.get<std::string>() + "'");
    }
  }
  auto nodes_of = [&](const Json& arr, const std::string& what) {
    if (!arr.is_array()) fail(what + " must be an array");
    std::vector<NodeId> out;
    for (const auto& n : arr) {
      if (!n.is_string()) fail(what + " entries must be node ids");
      auto it = ids.find(n.get<std::string>());
      if (it == ids.end()) fail("unknown node '" + n.get<std::string>() + "' in " + what);
      out.push_back(it->second);
    }
    return out;
  };
  if (!j["edges"].is_array()) fail("'edges' must be an array");
  std::set<std::string> edge_ids;
  std::vector<Edge> edges;
  for (const auto& e : j["edges"]) {
    exact_keys(e, {"id", "label", "att"}, "edge");
    if (!e["id"].is_string() || !e["label"].is_string()) fail("edge id and label must be strings");
    if (!edge_ids.insert(e["id"].get<std::string>()).second) fail("duplicate edge '" + e["id"].get<std::string>() + "'");
    auto att = nodes_of(e["att"], "edge attachment");
    const LabelId x = label(e["label"].get<std::string>(), att.size());
    edges.push_back({x, std::move(att)});
  }
  auto ext = nodes_of(j["ext"], "'ext'");
  return Hypergraph(ids.size(), std::move(edges), std::move(ext));
}

inline Hypergraph hypergraph_from_json(const Json& j, const Signature& sig) {
  return hypergraph_from_json(j, [&](const std::string& name, std::size_t arity) {
    auto x = sig.find(name);
    if (!x) throw ParseError(0, 0, "hypergraph JSON: unknown label '" + name + "'");
    if (sig.arity(*x) != arity) {
      throw ParseError(0, 0, "hypergraph JSON: label '" + name + "' has arity " + std::to_string(sig.arity(*x)) +
                                 " but is attached to " + std::to_string(arity) + " nodes");
    }
    return *x;
  });
}

/// Shortest of str("..."), handle(X), empty(n) that reproduces h exactly, else single-line JSON.
inline std::string format_literal(const Hypergraph& h, const Signature& sig) {
  if (auto w = detail::string_layout(h)) {
    if (auto s = detail::str_literal(*w, sig)) return *s;
  }
  if (h.edge_count() == 1 && is_handle_layout(h, h.edge(0).label)) return "handle(" + sig.name(h.edge(0).label) + ")";
  if (h.edge_count() == 0 && h == discrete_graph(h.node_count())) return "empty(" + std::to_string(h.node_count()) + ")";
  return hypergraph_json(h, sig).dump();
}

/// Parses a hypergraph literal; `column` is where `text` starts on line `line`.
inline Hypergraph parse_literal(std::string_view text, const Signature& sig, std::size_t line, std::size_t column) {
  auto fail = [&](const std::string& m) -> Hypergraph { throw ParseError(line, column, m); };
  auto call = [&](std::string_view head) -> std::optional<std::string_view> {
    if (text.substr(0, head.size()) != head || text.back() != ')') return std::nullopt;
    return text.substr(head.size(), text.size() - head.size() - 1);
  };
  if (text.empty()) fail("missing right-hand side");
  if (auto arg = call("str(")) {
    std::string body;
    try {
      const Json j = Json::parse(*arg);
      if (!j.is_string()) fail("str() expects a quoted string");
      body = j.get<std::string>();
    } catch (const Json::exception&) {
      fail("str() expects a quoted string");
    }
    std::vector<std::string> letters;
    if (std::any_of(body.begin(), body.end(), detail::is_space)) {
      std::size_t i = 0;
      while (i < body.size()) {
        while (i < body.size() && detail::is_space(body[i])) ++i;
        std::size_t j = i;
        while (j < body.size() && !detail::is_space(body[j])) ++j;
        if (j > i) letters.push_back(body.substr(i, j - i));
        i = j;
      }
    } else {
      for (std::size_t i = 0; i < body.size();) {
        const std::size_t n = detail::utf8_length(static_cast<unsigned char>(body[i]));
        letters.push_back(body.substr(i, n));
        i += n;
      }
    }
    Word w;
    for (const auto& a : letters) {
      auto x = sig.find(a);
      if (!x) fail("unknown label '" + a + "' in str()");
      if (sig.arity(*x) != 2) fail("label '" + a + "' in str() has arity " + std::to_string(sig.arity(*x)) + ", not 2");
      w.push_back(*x);
    }
    return string_graph(w, sig);
  }
  if (auto arg = call("handle(")) {
    auto x = sig.find(*arg);
    if (!x) fail("unknown label '" + std::string(*arg) + "' in handle()");
    return handle(*x, sig);
  }
  if (auto arg = call("empty(")) {
    std::size_t n = 0;
    auto [end, ec] = std::from_chars(arg->data(), arg->data() + arg->size(), n);
    if (ec != std::errc() || end != arg->data() + arg->size() || arg->empty()) fail("empty() expects a node count");
    return discrete_graph(n);
  }
  if (text.front() == '{') {
    Json j;
    try {
      j = Json::parse(text);
    } catch (const Json::exception& e) {
      fail(std::string("malformed hypergraph JSON: ") + e.what());
    }
    try {
      return hypergraph_from_json(j, sig);
    } catch (const ParseError& e) {
      fail(e.what());
    }
  }
  return fail("expected str(...), handle(...), empty(...) or a JSON hypergraph");
}

namespace detail {

struct Token {
  std::string text;
  std::size_t column;
};

struct Line {
  std::size_t number;
  std::string text;
  std::vector<Token> tokens;
};

inline std::vector<Line> split_lines(std::string_view input) {
  std::vector<Line> out;
  std::size_t number = 0;
  std::size_t at = 0;
  while (at <= input.size()) {
    std::size_t end = input.find('\n', at);
    if (end == std::string_view::npos) end = input.size();
    std::string text(input.substr(at, end - at));
    if (!text.empty() && text.back() == '\r') text.pop_back();
    ++number;
    at = end + 1;
    Line line{number, text, {}};
    for (std::size_t i = 0; i < text.size();) {
      if (is_space(text[i])) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < text.size() && !is_space(text[j])) ++j;
      line.tokens.push_back({text.substr(i, j - i), i + 1});
      i = j;
    }
    if (!line.tokens.empty() && line.tokens[0].text[0] != '#') out.push_back(std::move(line));
    if (end == input.size()) break;
  }
  return out;
}

inline std::size_t parse_count(const Token& t, std::size_t line, const std::string& what) {
  std::size_t n = 0;
  auto [end, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), n);
  if (ec != std::errc() || end != t.text.data() + t.text.size()) {
    throw ParseError(line, t.column, "expected " + what + ", got '" + t.text + "'");
  }
  return n;
}

class GrammarParser {
 public:
  explicit GrammarParser(std::string_view input) : lines_(split_lines(input)) {}

  GrammarDocument parse() {
    const Line& v = next("format_version");
    expect_arity(v, 2);
    if (v.tokens[0].text != "format_version") error(v, 0, "expected 'format_version'");
    if (parse_count(v.tokens[1], v.number, "a version") != format_version) {
      error(v, 1, "unsupported format_version " + v.tokens[1].text);
    }
    const Line& k = next("kind");
    expect_arity(k, 2);
    if (k.tokens[0].text != "kind") error(k, 0, "expected 'kind'");
    kind_ = k.tokens[1].text;
    if (kind_ != "phr" && kind_ != "hr" && kind_ != "et0l") error(k, 1, "unknown kind '" + kind_ + "'");

    while (pos_ < lines_.size()) {
      const Line& line = lines_[pos_++];
      const std::string& d = line.tokens[0].text;
      if (d == "name") {
        once(line, "name");
        expect_arity(line, 2);
        doc_.name = line.tokens[1].text;
      } else if (d == "description") {
        once(line, "description");
        doc_.description = description(line);
      } else if (d == "signature") {
        once(line, "signature");
        expect_arity(line, 1);
        signature_block();
      } else if (d == "terminals" && kind_ != "hr") {
        once(line, d);
        terminals_ = label_set(line);
      } else if (d == "nonterminals" && kind_ == "hr") {
        once(line, d);
        terminals_ = label_set(line);
      } else if (d == "start") {
        once(line, d);
        expect_arity(line, 2);
        start_ = label(line, 1);
        start_line_ = line.number;
      } else if (d == "order" && kind_ != "et0l") {
        once(line, d);
        expect_arity(line, 2);
        order_ = parse_count(line.tokens[1], line.number, "an order");
      } else if (d == "table" && kind_ != "hr") {
        expect_arity(line, 2);
        table_block(line, parse_index(line, 1));
      } else if (d == "rules" && kind_ == "hr") {
        once(line, d);
        expect_arity(line, 1);
        rules_block();
      } else if (d == "control" && kind_ == "phr") {
        once(line, d);
        expect_arity(line, 1);
        control_block(line);
      } else {
        error(line, 0, "unexpected directive '" + d + "' in a " + kind_ + " grammar");
      }
    }
    return finish();
  }

 private:
  [[noreturn]] void error(const Line& line, std::size_t token, const std::string& m) const {
    const std::size_t col = token < line.tokens.size() ? line.tokens[token].column : line.text.size() + 1;
    throw ParseError(line.number, col, m);
  }

  const Line& next(const std::string& what) {
    if (pos_ >= lines_.size()) {
      throw ParseError(lines_.empty() ? 1 : lines_.back().number + 1, 1, "unexpected end of input, expected " + what);
    }
    return lines_[pos_++];
  }

  void expect_arity(const Line& line, std::size_t n) const {
    if (line.tokens.size() < n) error(line, line.tokens.size(), "missing argument to '" + line.tokens[0].text + "'");
    if (line.tokens.size() > n) error(line, n, "unexpected '" + line.tokens[n].text + "'");
  }

  void once(const Line& line, const std::string& d) {
    if (!seen_.insert(d).second) error(line, 0, "duplicate '" + d + "'");
  }

  void need_signature(const Line& line) const {
    if (!have_signature_) error(line, 0, "'signature' must come before '" + line.tokens[0].text + "'");
  }

  std::string description(const Line& line) const {
    if (line.tokens.size() < 2) error(line, 1, "missing description string");
    const std::size_t col = line.tokens[1].column;
    try {
      const Json j = Json::parse(line.text.substr(col - 1));
      if (j.is_string()) return j.get<std::string>();
    } catch (const Json::exception&) {
    }
    error(line, 1, "description must be one quoted string");
  }

  LabelId label(const Line& line, std::size_t token) const {
    need_signature(line);
    auto x = sig_.find(line.tokens[token].text);
    if (!x) error(line, token, "unknown label '" + line.tokens[token].text + "'");
    return *x;
  }

  std::set<LabelId> label_set(const Line& line) const {
    std::set<LabelId> out;
    for (std::size_t i = 1; i < line.tokens.size(); ++i) {
      if (!out.insert(label(line, i)).second) error(line, i, "label '" + line.tokens[i].text + "' listed twice");
    }
    return out;
  }

  TableIndex parse_index(const Line& line, std::size_t token) const {
    const std::size_t i = parse_count(line.tokens[token], line.number, "a table index");
    if (i > UINT32_MAX) error(line, token, "table index out of range");
    return static_cast<TableIndex>(i);
  }

  template <class F>
  void block(F&& body) {
    while (true) {
      const Line& line = next("'end'");
      if (line.tokens[0].text == "end") {
        expect_arity(line, 1);
        return;
      }
      body(line);
    }
  }

  void signature_block() {
    block([&](const Line& line) {
      expect_arity(line, 1);
      const std::string& t = line.tokens[0].text;
      const std::size_t slash = t.rfind('/');
      if (slash == std::string::npos || slash == 0) error(line, 0, "expected label/arity, got '" + t + "'");
      const std::string name = t.substr(0, slash);
      const std::size_t arity =
          parse_count(Token{t.substr(slash + 1), line.tokens[0].column + slash + 1}, line.number, "an arity");
      if (!is_valid_label_name(name)) error(line, 0, "invalid label name '" + name + "'");
      if (sig_.contains(name)) error(line, 0, "duplicate label '" + name + "'");
      if (kind_ == "et0l" && arity != 2) error(line, 0, "ET0L symbols must have arity 2");
      sig_.add(name, arity);
    });
    have_signature_ = true;
  }

  // `L -> literal`
  std::pair<LabelId, Hypergraph> rule(const Line& line) const {
    if (line.tokens.size() < 3 || line.tokens[1].text != "->") error(line, 1, "expected 'LABEL -> right-hand side'");
    const LabelId x = label(line, 0);
    const std::size_t col = line.tokens[2].column;
    std::string_view rest(line.text);
    rest = rest.substr(col - 1);
    while (!rest.empty() && is_space(rest.back())) rest.remove_suffix(1);
    Hypergraph rhs = parse_literal(rest, sig_, line.number, col);
    if (auto v = validate(rhs, sig_); !v.empty()) throw ParseError(line.number, col, v.front().message);
    if (rhs.type() != sig_.arity(x)) {
      throw ParseError(line.number, col,
                       "right-hand side has type " + std::to_string(rhs.type()) + " but '" + sig_.name(x) +
                           "' has arity " + std::to_string(sig_.arity(x)));
    }
    return {x, std::move(rhs)};
  }

  void table_block(const Line& head, TableIndex i) {
    need_signature(head);
    if (raw_tables_.count(i) != 0) error(head, 1, "duplicate table " + std::to_string(i));
    auto& rules = raw_tables_[i];
    std::set<LabelId> covered;
    block([&](const Line& line) {
      auto [x, rhs] = rule(line);
      if (kind_ == "et0l") {
        auto w = str_extract(rhs, {});
        if (!w) error(line, 2, "ET0L right-hand side must be a string");
        et0l_[i][x].push_back(*w);
      }
      rules[x].push_back(std::move(rhs));
      covered.insert(x);
    });
    for (LabelId x = 0; x < sig_.size(); ++x) {
      if (covered.count(x) == 0) {
        error(head, 0, "table " + std::to_string(i) + " is not left-total: no rule for '" + sig_.name(x) + "'");
      }
    }
  }

  void rules_block() {
    block([&](const Line& line) {
      auto [x, rhs] = rule(line);
      hr_rules_.push_back({x, std::move(rhs)});
    });
  }

  void control_block(const Line& head) {
    need_signature(head);
    std::vector<std::tuple<std::string, TableIndex, std::string, const Line*>> trans;
    std::vector<std::pair<std::string, const Line*>> finals;
    std::optional<std::pair<std::string, const Line*>> init;
    std::vector<std::string> states;
    std::set<std::string> names;
    block([&](const Line& line) {
      const std::string& d = line.tokens[0].text;
      if (d == "state") {
        expect_arity(line, 2);
        if (!names.insert(line.tokens[1].text).second) error(line, 1, "duplicate state '" + line.tokens[1].text + "'");
        states.push_back(line.tokens[1].text);
      } else if (d == "init") {
        expect_arity(line, 2);
        if (init) error(line, 0, "duplicate 'init'");
        init.emplace(line.tokens[1].text, &line);
      } else if (d == "final") {
        if (line.tokens.size() < 2) error(line, 1, "missing state");
        for (std::size_t t = 1; t < line.tokens.size(); ++t) finals.emplace_back(line.tokens[t].text, &line);
      } else if (d == "trans") {
        expect_arity(line, 4);
        trans.emplace_back(line.tokens[1].text, parse_index(line, 2), line.tokens[3].text, &line);
      } else {
        error(line, 0, "unexpected '" + d + "' in control block");
      }
    });
    if (!init) error(head, 0, "control block has no 'init'");
    control_states_ = states;
    control_init_ = *init;
    control_finals_ = finals;
    control_trans_ = trans;
    control_line_ = &head;
  }

  StateId state_of(const ControlAutomaton& m, const std::string& name, const Line& line) const {
    auto q = m.find_state(name);
    if (!q) {
      for (std::size_t t = 0; t < line.tokens.size(); ++t) {
        if (line.tokens[t].text == name) error(line, t, "unknown state '" + name + "'");
      }
      error(line, 0, "unknown state '" + name + "'");
    }
    return *q;
  }

  GrammarDocument finish() {
    const std::size_t eof = lines_.empty() ? 1 : lines_.back().number + 1;
    auto missing = [&](const std::string& what) { throw ParseError(eof, 1, "missing '" + what + "'"); };
    if (!have_signature_) missing("signature");
    if (!start_) missing("start");
    if (!seen_.count(kind_ == "hr" ? "nonterminals" : "terminals")) missing(kind_ == "hr" ? "nonterminals" : "terminals");
    try {
      if (kind_ == "phr") {
        if (raw_tables_.empty()) missing("table");
        std::map<TableIndex, Table> tables;
        for (const auto& [i, rules] : raw_tables_) tables.emplace(i, Table(sig_, rules));
        PHRGrammar g(sig_, terminals_, *start_, std::move(tables), order_);
        if (control_line_ != nullptr) {
          ControlAutomaton m(g.indices());
          for (const auto& s : control_states_) m.add_state(s);
          m.set_initial(state_of(m, control_init_.first, *control_init_.second));
          for (const auto& [s, line] : control_finals_) m.set_final(state_of(m, s, *line));
          for (const auto& [from, i, to, line] : control_trans_) {
            if (g.tables().count(i) == 0) error(*line, 2, "control uses unknown table " + std::to_string(i));
            m.add_transition(state_of(m, from, *line), i, state_of(m, to, *line));
          }
          doc_.control = std::move(m);
        }
        doc_.grammar = std::move(g);
      } else if (kind_ == "hr") {
        doc_.grammar = HRGrammar(sig_, terminals_, *start_, hr_rules_, order_);
      } else {
        if (et0l_.empty()) missing("table");
        doc_.grammar = ET0LGrammar(sig_, terminals_, *start_, et0l_);
      }
    } catch (const GrammarError& e) {
      throw ParseError(start_line_, 1, e.what());
    }
    return std::move(doc_);
  }

  std::vector<Line> lines_;
  std::size_t pos_ = 0;
  std::string kind_;
  std::set<std::string> seen_;
  GrammarDocument doc_;
  Signature sig_;
  bool have_signature_ = false;
  std::set<LabelId> terminals_;
  std::optional<LabelId> start_;
  std::size_t start_line_ = 0;
  std::optional<std::size_t> order_;
  std::map<TableIndex, RuleMap> raw_tables_;
  std::map<TableIndex, ET0LTable> et0l_;
  std::vector<Rule> hr_rules_;
  std::vector<std::string> control_states_;
  std::pair<std::string, const Line*> control_init_;
  std::vector<std::pair<std::string, const Line*>> control_finals_;
  std::vector<std::tuple<std::string, TableIndex, std::string, const Line*>> control_trans_;
  const Line* control_line_ = nullptr;
};

inline void write_signature(std::string& out, const Signature& sig) {
  out += "signature\n";
  for (LabelId x = 0; x < sig.size(); ++x) out += "  " + sig.name(x) + "/" + std::to_string(sig.arity(x)) + "\n";
  out += "end\n";
}

inline void write_labels(std::string& out, const std::string& directive, const Signature& sig,
                         const std::set<LabelId>& labels) {
  out += directive;
  for (LabelId x : labels) out += " " + sig.name(x);
  out += "\n";
}

}  // namespace detail

/// Strict parser for the .phrg text format.
inline GrammarDocument parse_grammar(std::string_view text) { return detail::GrammarParser(text).parse(); }

/// Canonical .phrg text; parse_grammar(serialize_grammar(d)) == d.
inline std::string serialize_grammar(const GrammarDocument& doc) {
  std::string out = "format_version " + std::to_string(format_version) + "\n";
  auto header = [&](const char* kind) {
    out += std::string("kind ") + kind + "\n";
    if (!doc.name.empty()) out += "name " + doc.name + "\n";
    if (!doc.description.empty()) out += "description " + Json(doc.description).dump() + "\n";
  };
  if (const auto* g = std::get_if<PHRGrammar>(&doc.grammar)) {
    const auto& sig = g->signature();
    header("phr");
    detail::write_signature(out, sig);
    detail::write_labels(out, "terminals", sig, g->terminals());
    out += "start " + sig.name(g->start()) + "\n";
    out += "order " + std::to_string(g->order()) + "\n";
    for (const auto& [i, t] : g->tables()) {
      out += "table " + std::to_string(i) + "\n";
      for (LabelId x = 0; x < sig.size(); ++x) {
        for (const auto& r : t.rules_for(x)) out += "  " + sig.name(x) + " -> " + format_literal(r, sig) + "\n";
      }
      out += "end\n";
    }
    if (doc.control) {
      const auto& m = *doc.control;
      out += "control\n";
      for (StateId q = 0; q < m.state_count(); ++q) out += "  state " + m.state_name(q) + "\n";
      if (m.initial()) out += "  init " + m.state_name(*m.initial()) + "\n";
      for (StateId q : m.finals()) out += "  final " + m.state_name(q) + "\n";
      for (StateId q = 0; q < m.state_count(); ++q) {
        for (const auto& [i, targets] : m.transitions_from(q)) {
          for (StateId r : targets) out += "  trans " + m.state_name(q) + " " + std::to_string(i) + " " + m.state_name(r) + "\n";
        }
      }
      out += "end\n";
    }
  } else if (const auto* h = std::get_if<HRGrammar>(&doc.grammar)) {
    const auto& sig = h->signature();
    header("hr");
    detail::write_signature(out, sig);
    detail::write_labels(out, "nonterminals", sig, h->nonterminals());
    out += "start " + sig.name(h->start()) + "\n";
    out += "order " + std::to_string(h->order()) + "\n";
    out += "rules\n";
    for (const auto& r : h->rules()) out += "  " + sig.name(r.lhs) + " -> " + format_literal(r.rhs, sig) + "\n";
    out += "end\n";
  } else {
    const auto& e = std::get<ET0LGrammar>(doc.grammar);
    const auto& sig = e.signature();
    header("et0l");
    detail::write_signature(out, sig);
    detail::write_labels(out, "terminals", sig, e.terminals());
    out += "start " + sig.name(e.start()) + "\n";
    for (const auto& [i, t] : e.tables()) {
      out += "table " + std::to_string(i) + "\n";
      for (const auto& [x, words] : t) {
        for (const auto& w : words) out += "  " + sig.name(x) + " -> " + format_literal(string_graph(w, sig), sig) + "\n";
      }
      out += "end\n";
    }
  }
  return out;
}

/// Strict parser for the .fsa text format.
inline WordAutomaton parse_fsa(std::string_view text) {
  const auto lines = detail::split_lines(text);
  auto fail = [&](const detail::Line& l, std::size_t t, const std::string& m) -> void {
    throw ParseError(l.number, t < l.tokens.size() ? l.tokens[t].column : l.text.size() + 1, m);
  };
  if (lines.size() < 2) throw ParseError(lines.empty() ? 1 : lines.back().number + 1, 1, "truncated automaton file");
  if (lines[0].tokens.size() != 2 || lines[0].tokens[0].text != "format_version" ||
      lines[0].tokens[1].text != std::to_string(format_version)) {
    fail(lines[0], 0, "expected 'format_version 1'");
  }
  if (lines[1].tokens.size() != 2 || lines[1].tokens[0].text != "kind" || lines[1].tokens[1].text != "fsa") {
    fail(lines[1], 0, "expected 'kind fsa'");
  }
  WordAutomaton m;
  bool have_alphabet = false;
  bool have_init = false;
  auto state = [&](const detail::Line& l, std::size_t t) {
    auto q = m.find_state(l.tokens[t].text);
    if (!q) fail(l, t, "unknown state '" + l.tokens[t].text + "'");
    return *q;
  };
  for (std::size_t k = 2; k < lines.size(); ++k) {
    const auto& l = lines[k];
    const auto& d = l.tokens[0].text;
    const std::size_t n = l.tokens.size();
    if (d == "alphabet") {
      if (have_alphabet) fail(l, 0, "duplicate 'alphabet'");
      if (m.state_count() != 0) fail(l, 0, "'alphabet' must come before states");
      have_alphabet = true;
      for (std::size_t t = 1; t < n; ++t) {
        if (m.alphabet().count(l.tokens[t].text) != 0) fail(l, t, "letter listed twice");
        m.add_symbol(l.tokens[t].text);
      }
    } else if (d == "state") {
      if (n != 2) fail(l, std::min<std::size_t>(n, 2), "expected 'state NAME'");
      if (m.find_state(l.tokens[1].text)) fail(l, 1, "duplicate state '" + l.tokens[1].text + "'");
      m.add_state(l.tokens[1].text);
    } else if (d == "init") {
      if (n != 2) fail(l, std::min<std::size_t>(n, 2), "expected 'init STATE'");
      if (have_init) fail(l, 0, "duplicate 'init'");
      have_init = true;
      m.set_initial(state(l, 1));
    } else if (d == "final") {
      if (n < 2) fail(l, 1, "missing state");
      for (std::size_t t = 1; t < n; ++t) m.set_final(state(l, t));
    } else if (d == "trans") {
      if (n != 4) fail(l, std::min<std::size_t>(n, 4), "expected 'trans FROM LETTER TO'");
      if (m.alphabet().count(l.tokens[2].text) == 0) fail(l, 2, "letter '" + l.tokens[2].text + "' is not in the alphabet");
      m.add_transition(state(l, 1), l.tokens[2].text, state(l, 3));
    } else {
      fail(l, 0, "unexpected directive '" + d + "'");
    }
  }
  if (!have_alphabet) throw ParseError(lines.back().number + 1, 1, "missing 'alphabet'");
  if (!have_init) throw ParseError(lines.back().number + 1, 1, "missing 'init'");
  return m;
}

inline std::string serialize_fsa(const WordAutomaton& m) {
  std::string out = "format_version " + std::to_string(format_version) + "\nkind fsa\nalphabet";
  for (const auto& a : m.alphabet()) out += " " + a;
  out += "\n";
  for (StateId q = 0; q < m.state_count(); ++q) out += "state " + m.state_name(q) + "\n";
  if (m.initial()) out += "init " + m.state_name(*m.initial()) + "\n";
  const auto finals = m.finals();
  if (!finals.empty()) {
    out += "final";
    for (StateId q : finals) out += " " + m.state_name(q);
    out += "\n";
  }
  for (StateId q = 0; q < m.state_count(); ++q) {
    for (const auto& [a, targets] : m.transitions_from(q)) {
      for (StateId r : targets) out += "trans " + m.state_name(q) + " " + a + " " + m.state_name(r) + "\n";
    }
  }
  return out;
}

/// A standalone hypergraph; labels not in a grammar take their arity from their attachments.
struct HypergraphDocument {
  Signature signature;
  Hypergraph graph;
};

inline std::string serialize_hypergraph(const Hypergraph& h, const Signature& sig) {
  Json out;
  out["format_version"] = format_version;
  const Json body = hypergraph_json(h, sig);
  for (const auto& [k, v] : body.items()) out[k] = v;
  return out.dump(2) + "\n";
}

inline HypergraphDocument parse_hypergraph(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw ParseError(0, 0, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("format_version") || j["format_version"] != format_version) {
    throw ParseError(0, 0, "expected a hypergraph object with format_version 1");
  }
  j.erase("format_version");
  HypergraphDocument doc;
  doc.graph = hypergraph_from_json(j, [&](const std::string& name, std::size_t arity) {
    if (!is_valid_label_name(name)) throw ParseError(0, 0, "invalid label name '" + name + "'");
    auto x = doc.signature.find(name);
    if (x && doc.signature.arity(*x) != arity) {
      throw ParseError(0, 0, "label '" + name + "' is used with arities " + std::to_string(doc.signature.arity(*x)) +
                                 " and " + std::to_string(arity));
    }
    return x ? *x : doc.signature.add(name, arity);
  });
  return doc;
}

}  // namespace phr
