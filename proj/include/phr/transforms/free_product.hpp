#pragma once

#include <set>
#include <string>

#include "phr/grammar.hpp"
#include "phr/transforms/builder.hpp"
#include "phr/transforms/embed.hpp"
#include "phr/transforms/substitution.hpp"

namespace phr {

/// Core language {X, XY, YX} for the insertion images.
inline WordAutomaton insertion_core() {
  WordAutomaton m({"X", "Y"});
  const auto s0 = m.add_state("s0");
  const auto sx = m.add_state("sx", true);
  const auto sy = m.add_state("sy");
  const auto f = m.add_state("f", true);
  m.set_initial(s0);
  m.add_transition(s0, "X", sx);
  m.add_transition(sx, "Y", f);
  m.add_transition(s0, "Y", sy);
  m.add_transition(sy, "X", f);
  return m;
}

/// Grammar for {a} ∪ a·L ∪ L·a, with L given by `other`.
inline PHRGrammar insertion_image(const std::string& a, const PHRGrammar& other, Mode mode) {
  return substitute(regular_to_phr(insertion_core()), {{"X", word_grammar({a})}, {"Y", other}}, mode);
}

/// Word problem of the free product over A1 ∪ A2 (modulo ε), from grammars g1, g2 for the
/// word problems of the factors. Starting from L1 ∪ L2, the iterated substitution inserts
/// words of the other factor next to each letter: h(a) = {a} ∪ a·L2 ∪ L2·a for a ∈ A1 and
/// symmetrically for A2.
inline PHRGrammar free_product_wp(const PHRGrammar& g1, const PHRGrammar& g2, Mode mode = Mode::general) {
  const auto a1 = terminal_names(g1);
  const auto a2 = terminal_names(g2);
  for (const auto& a : a1) {
    if (a2.count(a) != 0) throw TransformError("free product factors share the letter '" + a + "'");
  }
  const PHRGrammar base = rational_ops(g1, g2, RationalOp::union_, {}, mode);
  SubstitutionSpec h;
  for (const auto& a : a1) h.emplace(a, insertion_image(a, g2, mode));
  for (const auto& b : a2) h.emplace(b, insertion_image(b, g1, mode));
  return iterate_substitution(base, h, mode);
}

}  // namespace phr
