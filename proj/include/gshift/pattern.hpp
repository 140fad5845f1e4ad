#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gshift/group.hpp"

namespace gshift {

using Symbol = std::uint32_t;

class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> symbols);

  std::size_t size() const { return symbols_.size(); }
  const std::string& label(Symbol s) const { return symbols_.at(s); }
  const std::vector<std::string>& labels() const { return symbols_; }
  // Throws MalformedInput for unknown labels.
  Symbol index_of(std::string_view label) const;
  std::optional<Symbol> find(std::string_view label) const;
  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  std::vector<std::string> symbols_;
};

struct CodingEntry {
  Word word;
  Symbol symbol = 0;
  friend bool operator==(const CodingEntry&, const CodingEntry&) = default;
};

struct PatternCoding {
  std::vector<CodingEntry> entries;
};

// A finite assignment over canonical elements, kept in insertion order so
// that iteration is deterministic.
class Pattern {
 public:
  void set(const Element& e, Symbol s);
  std::optional<Symbol> get(const Element& e) const;
  bool contains(const Element& e) const { return index_.count(e) != 0; }
  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }
  const std::vector<std::pair<Element, Symbol>>& cells() const { return cells_; }

  // Same support and values, regardless of insertion order.
  friend bool operator==(const Pattern& a, const Pattern& b);

 private:
  std::vector<std::pair<Element, Symbol>> cells_;
  std::unordered_map<Element, std::size_t, ElementHash> index_;
};

struct ConsistencyResult {
  bool consistent = true;
  Pattern pattern;                     // valid when consistent
  std::pair<Word, Word> witness;       // valid when inconsistent
};

ConsistencyResult check_consistency(const Group& g, const PatternCoding& c);

std::size_t coding_length(const PatternCoding& c);

// Deterministic provider of c_0, c_1, ...; std::nullopt marks the end of a
// finite enumeration.
using CodingEnumeration = std::function<std::optional<PatternCoding>(std::size_t)>;

// Whether c lies in C_n: every word over the non-identity generators with
// length <= L appears exactly once in c, no longer word appears, and c
// contains every entry of c_n.
bool in_completion_set(const Group& g, const PatternCoding& c, const PatternCoding& cn,
                       std::size_t big_l);

bool decidable_completion_contains(const Group& g, const CodingEnumeration& enumeration,
                                   const PatternCoding& c, std::size_t budget = 10000);

Pattern translate_pattern(const Group& g, const Pattern& p, const Element& by);

}  // namespace gshift
