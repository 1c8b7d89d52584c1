#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "phr/automaton.hpp"
#include "phr/canonical.hpp"
#include "phr/error.hpp"
#include "phr/hypergraph.hpp"
#include "phr/signature.hpp"

namespace phr {

struct Rule {
  LabelId lhs = 0;
  Hypergraph rhs;

  bool repetition_free() const { return rhs.repetition_free(); }
  bool proper() const { return rhs.proper(); }
  bool operator==(const Rule&) const = default;
};

using TableIndex = std::uint32_t;
using Word = std::vector<LabelId>;

/// Rules grouped by left-hand side; the building block of tables and of relational override.
using RuleMap = std::map<LabelId, std::vector<Hypergraph>>;

/// Checks that `rhs` is a hypergraph over `sig` whose type matches the arity of `lhs`.
inline void check_rule(const Signature& sig, LabelId lhs, const Hypergraph& rhs) {
  if (!sig.valid(lhs)) throw GrammarError("rule for unknown label id " + std::to_string(lhs));
  if (auto v = validate(rhs, sig); !v.empty()) {
    throw GrammarError("rule for '" + sig.name(lhs) + "': " + v.front().message);
  }
  if (rhs.type() != sig.arity(lhs)) {
    throw GrammarError("rule for '" + sig.name(lhs) + "' has a right-hand side of type " +
                       std::to_string(rhs.type()) + ", label arity is " + std::to_string(sig.arity(lhs)));
  }
}

/// A left-total finite rule set over a signature. Right-hand sides are kept in insertion order
/// with isomorphic duplicates removed.
class Table {
 public:
  Table() = default;

  Table(const Signature& sig, const RuleMap& rules) : by_label_(sig.size()) {
    std::map<LabelId, std::set<std::string>> seen;
    for (const auto& [lhs, rhss] : rules) {
      for (const auto& rhs : rhss) {
        check_rule(sig, lhs, rhs);
        auto& keys = seen[lhs];
        if (keys.insert(canonical_key(rhs)).second) by_label_[lhs].push_back(rhs);
      }
    }
    for (LabelId x = 0; x < sig.size(); ++x) {
      if (by_label_[x].empty()) throw GrammarError("table is not left-total: no rule for '" + sig.name(x) + "'");
    }
  }

  std::size_t scope() const noexcept { return by_label_.size(); }

  const std::vector<Hypergraph>& rules_for(LabelId x) const { return by_label_.at(x); }

  std::size_t rule_count() const {
    std::size_t n = 0;
    for (const auto& r : by_label_) n += r.size();
    return n;
  }

  RuleMap rule_map() const {
    RuleMap out;
    for (LabelId x = 0; x < by_label_.size(); ++x) out[x] = by_label_[x];
    return out;
  }

  std::vector<Rule> rules() const {
    std::vector<Rule> out;
    for (LabelId x = 0; x < by_label_.size(); ++x) {
      for (const auto& r : by_label_[x]) out.push_back({x, r});
    }
    return out;
  }

  bool operator==(const Table& other) const { return by_label_ == other.by_label_; }

 private:
  std::vector<std::vector<Hypergraph>> by_label_;
};

/// R = {(X, X•) | X ∈ Σ}
inline RuleMap identity_rules(const Signature& sig) {
  RuleMap out;
  for (LabelId x = 0; x < sig.size(); ++x) out[x] = {handle(x, sig)};
  return out;
}

/// base ⊕ overlay: every label present in the overlay takes the overlay's rules.
inline RuleMap override_rules(RuleMap base, const RuleMap& overlay) {
  for (const auto& [lhs, rhss] : overlay) base[lhs] = rhss;
  return base;
}

inline Table table_union_override(const Signature& sig, const RuleMap& base, const RuleMap& overlay) {
  return Table(sig, override_rules(base, overlay));
}

/// Adds the rules of `more` to `into` label by label.
inline void merge_rules(RuleMap& into, const RuleMap& more) {
  for (const auto& [lhs, rhss] : more) {
    auto& dst = into[lhs];
    dst.insert(dst.end(), rhss.begin(), rhss.end());
  }
}

/// A PHR grammar (Σ, A, S, T) of some order k with tables indexed by TableIndex.
class PHRGrammar {
 public:
  PHRGrammar() = default;

  PHRGrammar(Signature sig, std::set<LabelId> terminals, LabelId start, std::map<TableIndex, Table> tables,
             std::optional<std::size_t> order = std::nullopt)
      : sig_(std::move(sig)), terminals_(std::move(terminals)), start_(start), tables_(std::move(tables)) {
    if (!sig_.valid(start_)) throw GrammarError("start label is not in the signature");
    for (LabelId a : terminals_) {
      if (!sig_.valid(a)) throw GrammarError("terminal label id " + std::to_string(a) + " is not in the signature");
    }
    if (tables_.empty()) throw GrammarError("a PHR grammar needs at least one table");
    for (const auto& [i, t] : tables_) {
      if (t.scope() != sig_.size()) {
        throw GrammarError("table " + std::to_string(i) + " was built over a different signature");
      }
    }
    const std::size_t needed = sig_.max_arity();
    order_ = order.value_or(needed);
    if (order_ < needed) {
      throw GrammarError("declared order " + std::to_string(order_) + " is below the maximal rule type " +
                         std::to_string(needed));
    }
  }

  const Signature& signature() const noexcept { return sig_; }
  const std::set<LabelId>& terminals() const noexcept { return terminals_; }
  bool is_terminal(LabelId x) const { return terminals_.count(x) != 0; }
  LabelId start() const noexcept { return start_; }
  const std::map<TableIndex, Table>& tables() const noexcept { return tables_; }
  std::size_t order() const noexcept { return order_; }

  const Table& table(TableIndex i) const {
    auto it = tables_.find(i);
    if (it == tables_.end()) throw GrammarError("unknown table index " + std::to_string(i));
    return it->second;
  }

  std::set<TableIndex> indices() const {
    std::set<TableIndex> out;
    for (const auto& [i, t] : tables_) out.insert(i);
    return out;
  }

  /// Every rule of every table is repetition-free.
  bool repetition_free() const {
    for (const auto& [i, t] : tables_) {
      for (LabelId x = 0; x < sig_.size(); ++x) {
        for (const auto& r : t.rules_for(x)) {
          if (!r.repetition_free()) return false;
        }
      }
    }
    return true;
  }

  bool terminally_labelled(const Hypergraph& h) const {
    return std::all_of(h.edges().begin(), h.edges().end(), [&](const Edge& e) { return is_terminal(e.label); });
  }

  Hypergraph start_graph() const { return handle(start_, sig_); }

  bool operator==(const PHRGrammar&) const = default;

 private:
  Signature sig_;
  std::set<LabelId> terminals_;
  LabelId start_ = 0;
  std::map<TableIndex, Table> tables_;
  std::size_t order_ = 0;
};

using ControlAutomaton = Automaton<TableIndex>;

struct ControlledPHRGrammar {
  PHRGrammar underlying;
  ControlAutomaton control;

  ControlledPHRGrammar(PHRGrammar g, ControlAutomaton m) : underlying(std::move(g)), control(std::move(m)) {
    if (control.alphabet() != underlying.indices()) {
      throw GrammarError("control alphabet differs from the table index set");
    }
    if (!control.initial()) throw GrammarError("control automaton has no initial state");
  }
};

/// A sequential HR grammar (Σ, N, S, P) of order k.
class HRGrammar {
 public:
  HRGrammar(Signature sig, std::set<LabelId> nonterminals, LabelId start, std::vector<Rule> rules,
            std::optional<std::size_t> order = std::nullopt)
      : sig_(std::move(sig)), nonterminals_(std::move(nonterminals)), start_(start), rules_(std::move(rules)) {
    if (nonterminals_.count(start_) == 0) throw GrammarError("start label must be a nonterminal");
    std::size_t needed = 0;
    for (const auto& r : rules_) {
      check_rule(sig_, r.lhs, r.rhs);
      if (nonterminals_.count(r.lhs) == 0) {
        throw GrammarError("rule left-hand side '" + sig_.name(r.lhs) + "' is not a nonterminal");
      }
      needed = std::max(needed, r.rhs.type());
    }
    order_ = order.value_or(needed);
    if (order_ < needed) throw GrammarError("declared order is below the maximal rule type");
  }

  const Signature& signature() const noexcept { return sig_; }
  const std::set<LabelId>& nonterminals() const noexcept { return nonterminals_; }
  LabelId start() const noexcept { return start_; }
  const std::vector<Rule>& rules() const noexcept { return rules_; }
  std::size_t order() const noexcept { return order_; }

  bool repetition_free() const {
    return std::all_of(rules_.begin(), rules_.end(), [](const Rule& r) { return r.repetition_free(); });
  }

  bool operator==(const HRGrammar&) const = default;

 private:
  Signature sig_;
  std::set<LabelId> nonterminals_;
  LabelId start_;
  std::vector<Rule> rules_;
  std::size_t order_;
};

/// ET0L table: for each symbol, its nonempty list of right-hand words.
using ET0LTable = std::map<LabelId, std::vector<Word>>;

/// An ET0L grammar (Σ, A, S, T). Symbols live in a signature whose arities are all 2 so that
/// words and string graphs share one label space.
class ET0LGrammar {
 public:
  ET0LGrammar(Signature sig, std::set<LabelId> terminals, LabelId start, std::map<TableIndex, ET0LTable> tables)
      : sig_(std::move(sig)), terminals_(std::move(terminals)), start_(start), tables_(std::move(tables)) {
    for (LabelId x = 0; x < sig_.size(); ++x) {
      if (sig_.arity(x) != 2) throw GrammarError("ET0L symbol '" + sig_.name(x) + "' must have arity 2");
    }
    if (!sig_.valid(start_)) throw GrammarError("start symbol is not in the alphabet");
    if (tables_.empty()) throw GrammarError("an ET0L grammar needs at least one table");
    for (auto& [i, t] : tables_) {
      for (auto& [x, words] : t) {
        if (!sig_.valid(x)) throw GrammarError("table " + std::to_string(i) + " rewrites an unknown symbol");
        std::sort(words.begin(), words.end());
        words.erase(std::unique(words.begin(), words.end()), words.end());
        for (const auto& w : words) {
          for (LabelId y : w) {
            if (!sig_.valid(y)) throw GrammarError("table " + std::to_string(i) + " uses an unknown symbol");
          }
        }
      }
      for (LabelId x = 0; x < sig_.size(); ++x) {
        auto it = t.find(x);
        if (it == t.end() || it->second.empty()) {
          throw GrammarError("ET0L table " + std::to_string(i) + " is not left-total: no rule for '" +
                             sig_.name(x) + "'");
        }
      }
    }
  }

  const Signature& signature() const noexcept { return sig_; }
  const std::set<LabelId>& terminals() const noexcept { return terminals_; }
  LabelId start() const noexcept { return start_; }
  const std::map<TableIndex, ET0LTable>& tables() const noexcept { return tables_; }

  bool operator==(const ET0LGrammar&) const = default;

  bool propagating() const {
    for (const auto& [i, t] : tables_) {
      for (const auto& [x, words] : t) {
        for (const auto& w : words) {
          if (w.empty()) return false;
        }
      }
    }
    return true;
  }

 private:
  Signature sig_;
  std::set<LabelId> terminals_;
  LabelId start_;
  std::map<TableIndex, ET0LTable> tables_;
};

// ---------------------------------------------------------------------------------------------
// single-step semantics

struct DirectStep {
  std::size_t edge;
  std::size_t rule;  // index into the rule list
  Hypergraph result;  // canonical representative
};

/// H ⇒ H[e/R] for every edge e and rule (lab(e), R).
inline std::vector<DirectStep> direct_derive(const Hypergraph& h, const std::vector<Rule>& rules) {
  std::vector<DirectStep> out;
  for (std::size_t e = 0; e < h.edge_count(); ++e) {
    for (std::size_t r = 0; r < rules.size(); ++r) {
      if (rules[r].lhs != h.edge(e).label) continue;
      out.push_back({e, r, canonical_form(replace(h, {{e, rules[r].rhs}})).graph});
    }
  }
  return out;
}

/// Calls f(slots) once per choice function, where slots[e] points at the rhs chosen for edge e.
template <class F>
void for_each_choice(const Hypergraph& h, const Table& t, F&& f) {
  const std::size_t m = h.edge_count();
  std::vector<const std::vector<Hypergraph>*> options(m);
  for (std::size_t e = 0; e < m; ++e) {
    options[e] = &t.rules_for(h.edge(e).label);
    if (options[e]->empty()) throw GrammarError("no rule for a label present in the hypergraph");
  }
  std::vector<std::size_t> pick(m, 0);
  std::vector<const Hypergraph*> slots(m);
  for (std::size_t e = 0; e < m; ++e) slots[e] = &(*options[e])[0];
  while (true) {
    f(std::span<const Hypergraph* const>(slots));
    std::size_t e = 0;
    while (e < m) {
      if (++pick[e] < options[e]->size()) {
        slots[e] = &(*options[e])[pick[e]];
        break;
      }
      pick[e] = 0;
      slots[e] = &(*options[e])[0];
      ++e;
    }
    if (e == m) return;
  }
}

/// H ⇛_T H' for all choice functions; an edgeless H yields {H}.
inline GraphSet parallel_direct_derive(const Hypergraph& h, const Table& t) {
  GraphSet out;
  for_each_choice(h, t, [&](std::span<const Hypergraph* const> slots) {
    insert_canonical(out, detail::replace_edges(h, slots));
  });
  return out;
}

/// Fold of parallel_direct_derive along `trace`.
inline GraphSet trace_derive(const PHRGrammar& g, const Hypergraph& h, const std::vector<TableIndex>& trace) {
  for (TableIndex i : trace) (void)g.table(i);
  GraphSet current;
  insert_canonical(current, h);
  for (TableIndex i : trace) {
    GraphSet next;
    for (const auto& [key, graph] : current) {
      for (auto& [k, succ] : parallel_direct_derive(graph, g.table(i))) next.emplace(k, std::move(succ));
    }
    current = std::move(next);
  }
  return current;
}

/// σ_T(w): every symbol rewritten simultaneously by a rule of T.
inline std::set<Word> et0l_step(const ET0LTable& t, const Word& w) {
  std::set<Word> current{Word{}};
  for (LabelId x : w) {
    auto it = t.find(x);
    if (it == t.end() || it->second.empty()) throw GrammarError("ET0L table has no rule for a symbol of the word");
    std::set<Word> next;
    for (const auto& prefix : current) {
      for (const auto& rhs : it->second) {
        Word v = prefix;
        v.insert(v.end(), rhs.begin(), rhs.end());
        next.insert(std::move(v));
      }
    }
    current = std::move(next);
  }
  return current;
}

}  // namespace phr
