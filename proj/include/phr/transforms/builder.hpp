#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "phr/automaton.hpp"
#include "phr/error.hpp"
#include "phr/grammar.hpp"
#include "phr/hypergraph.hpp"
#include "phr/signature.hpp"

namespace phr {

/// Automaton over letters named by strings; used for regular languages of words.
using WordAutomaton = Automaton<std::string>;

/// Repetition-freeness policy for transforms that can introduce node merging.
enum class Mode { repetition_free, general };

/// a ↦ word over the target alphabet, letters given by name.
using Homomorphism = std::map<std::string, std::vector<std::string>>;

namespace names {
inline std::string fresh_prefix() { return "$"; }
inline std::string bar(const std::string& x) { return "~" + x; }
inline std::string bar_in(const std::string& owner, const std::string& x) { return "~" + owner + ":" + x; }
inline std::string hat(const std::string& x) { return "^" + x; }
}  // namespace names

/// Default rules for labels an overlay leaves unspecified.
enum class TableBase { identity, failure, none };

/// Incremental construction of a PHR grammar: labels are added as the construction needs
/// them and table bases (R or F) are expanded over the final signature in build().
class GrammarBuilder {
 public:
  /// Adds `name` or returns it if already present with the same arity.
  LabelId label(const std::string& name, std::size_t arity) { return sig_.add_or_get(name, arity); }

  /// Adds a label named `base`, primed until unused.
  LabelId fresh(const std::string& base, std::size_t arity) { return sig_.add(sig_.fresh_name(base), arity); }

  const Signature& signature() const noexcept { return sig_; }

  /// Creates F_0..F_k; required before any table with a failure base.
  void make_failures(std::size_t k) {
    failures_.clear();
    for (std::size_t j = 0; j <= k; ++j) failures_.push_back(fresh("$F" + std::to_string(j), j));
  }

  LabelId failure(std::size_t arity) const {
    if (arity >= failures_.size()) throw TransformError("no failure symbol of arity " + std::to_string(arity));
    return failures_[arity];
  }

  Hypergraph failure_graph(std::size_t arity) const { return handle_of(failure(arity), arity); }
  Hypergraph handle(LabelId x) const { return handle_of(x, sig_.arity(x)); }

  RuleMap& add_table(TableIndex index, TableBase base) {
    if (tables_.count(index) != 0) throw TransformError("duplicate table index " + std::to_string(index));
    bases_[index] = base;
    return tables_[index];
  }

  RuleMap& table(TableIndex index) { return tables_.at(index); }

  PHRGrammar build(std::set<LabelId> terminals, LabelId start, std::optional<std::size_t> order) const {
    std::map<TableIndex, Table> out;
    for (const auto& [i, overlay] : tables_) {
      RuleMap base;
      switch (bases_.at(i)) {
        case TableBase::identity:
          base = identity_rules(sig_);
          break;
        case TableBase::failure:
          for (LabelId x = 0; x < sig_.size(); ++x) base[x] = {failure_graph(sig_.arity(x))};
          break;
        case TableBase::none:
          break;
      }
      out.emplace(i, Table(sig_, override_rules(std::move(base), overlay)));
    }
    return PHRGrammar(sig_, std::move(terminals), start, std::move(out), order);
  }

 private:
  Signature sig_;
  std::vector<LabelId> failures_;
  std::map<TableIndex, RuleMap> tables_;
  std::map<TableIndex, TableBase> bases_;
};

/// Relabels `h` through a dense label map.
inline Hypergraph map_labels(const Hypergraph& h, const std::vector<LabelId>& map) {
  return relabel(h, [&](LabelId x) { return map.at(x); });
}

/// Label names of a word.
inline std::vector<std::string> spell_letters(const Signature& sig, const Word& w) {
  std::vector<std::string> out;
  out.reserve(w.size());
  for (LabelId x : w) out.push_back(sig.name(x));
  return out;
}

/// Concatenated label names, separated by spaces when some name is longer than one byte.
inline std::string spell(const Signature& sig, const Word& w) {
  bool single = true;
  for (LabelId x : w) single = single && sig.name(x).size() == 1;
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!single && i > 0) out += ' ';
    out += sig.name(w[i]);
  }
  return out;
}

/// Words of a string result, spelled.
template <class Words>
std::set<std::string> spell_all(const Signature& sig, const Words& words) {
  std::set<std::string> out;
  for (const auto& w : words) out.insert(spell(sig, w));
  return out;
}

/// The word named by `letters`; every name must be an arity-2 label of `sig`.
inline Word word_of(const Signature& sig, const std::vector<std::string>& letters) {
  Word w;
  for (const auto& a : letters) {
    const LabelId x = sig.id(a);
    if (sig.arity(x) != 2) throw GrammarError("letter '" + a + "' does not have arity 2");
    w.push_back(x);
  }
  return w;
}

/// Names of the terminal labels of a grammar.
inline std::set<std::string> terminal_names(const PHRGrammar& g) {
  std::set<std::string> out;
  for (LabelId a : g.terminals()) out.insert(g.signature().name(a));
  return out;
}

/// Copy of `g` with labels renamed through `renaming`; labels not mentioned keep their names.
inline PHRGrammar rename_labels(const PHRGrammar& g, const std::map<std::string, std::string>& renaming) {
  const auto& sig = g.signature();
  Signature out;
  for (LabelId x = 0; x < sig.size(); ++x) {
    auto it = renaming.find(sig.name(x));
    out.add(it == renaming.end() ? sig.name(x) : it->second, sig.arity(x));
  }
  std::map<TableIndex, Table> tables;
  for (const auto& [i, t] : g.tables()) tables.emplace(i, Table(out, t.rule_map()));
  return PHRGrammar(std::move(out), g.terminals(), g.start(), std::move(tables), g.order());
}

}  // namespace phr
