#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "phr/error.hpp"

namespace phr {

using LabelId = std::uint32_t;

/// A label name is any non-empty string without whitespace, control characters or '"'.
/// Names beginning with '#' are reserved for comments in the text format.
inline bool is_valid_label_name(std::string_view name) {
  if (name.empty() || name.front() == '#') return false;
  for (unsigned char c : name) {
    if (c <= 0x20 || c == 0x7f || c == '"') return false;
  }
  return true;
}

/// Label alphabet with an arity per label. Label ids are dense and assigned in insertion order.
class Signature {
 public:
  Signature() = default;

  LabelId add(std::string name, std::size_t arity) {
    if (!is_valid_label_name(name)) throw GrammarError("invalid label name '" + name + "'");
    if (index_.count(name) != 0) throw GrammarError("duplicate label '" + name + "'");
    const auto id = static_cast<LabelId>(names_.size());
    index_.emplace(name, id);
    names_.push_back(std::move(name));
    arities_.push_back(arity);
    return id;
  }

  /// Returns the existing id when the label is present with the same arity.
  LabelId add_or_get(const std::string& name, std::size_t arity) {
    if (auto id = find(name)) {
      if (arities_[*id] != arity) {
        throw GrammarError("label '" + name + "' declared with arity " + std::to_string(arities_[*id]) +
                           " and " + std::to_string(arity));
      }
      return *id;
    }
    return add(name, arity);
  }

  std::optional<LabelId> find(std::string_view name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool contains(std::string_view name) const { return index_.find(name) != index_.end(); }

  LabelId id(std::string_view name) const {
    if (auto found = find(name)) return *found;
    throw GrammarError("unknown label '" + std::string(name) + "'");
  }

  const std::string& name(LabelId id) const { return names_.at(id); }
  std::size_t arity(LabelId id) const { return arities_.at(id); }
  std::size_t size() const noexcept { return names_.size(); }
  bool valid(LabelId id) const noexcept { return id < names_.size(); }

  std::size_t max_arity() const {
    std::size_t best = 0;
    for (auto a : arities_) best = a > best ? a : best;
    return best;
  }

  /// `base` if unused, otherwise `base` followed by as many primes as needed.
  std::string fresh_name(std::string base) const {
    while (contains(base)) base += '\'';
    return base;
  }

  bool operator==(const Signature& other) const {
    return names_ == other.names_ && arities_ == other.arities_;
  }

 private:
  std::vector<std::string> names_;
  std::vector<std::size_t> arities_;
  std::map<std::string, LabelId, std::less<>> index_;
};

}  // namespace phr
