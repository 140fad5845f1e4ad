#include "gshift/pattern.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "gshift/cayley.hpp"
#include "gshift/errors.hpp"

namespace gshift {

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw MalformedInput("alphabet must not be empty");
  std::set<std::string> seen(symbols_.begin(), symbols_.end());
  if (seen.size() != symbols_.size()) throw MalformedInput("alphabet labels must be distinct");
}

std::optional<Symbol> Alphabet::find(std::string_view label) const {
  for (std::size_t i = 0; i < symbols_.size(); ++i)
    if (symbols_[i] == label) return Symbol(i);
  return std::nullopt;
}

Symbol Alphabet::index_of(std::string_view label) const {
  if (auto s = find(label)) return *s;
  throw MalformedInput("symbol '" + std::string(label) + "' is not in the alphabet");
}

void Pattern::set(const Element& e, Symbol s) {
  auto it = index_.find(e);
  if (it != index_.end()) {
    cells_[it->second].second = s;
    return;
  }
  index_.emplace(e, cells_.size());
  cells_.emplace_back(e, s);
}

std::optional<Symbol> Pattern::get(const Element& e) const {
  auto it = index_.find(e);
  if (it == index_.end()) return std::nullopt;
  return cells_[it->second].second;
}

bool operator==(const Pattern& a, const Pattern& b) {
  if (a.size() != b.size()) return false;
  for (const auto& [e, s] : a.cells_) {
    auto t = b.get(e);
    if (!t || *t != s) return false;
  }
  return true;
}

ConsistencyResult check_consistency(const Group& g, const PatternCoding& c) {
  ConsistencyResult out;
  std::vector<Element> canon;
  canon.reserve(c.entries.size());
  for (const auto& e : c.entries) canon.push_back(g.canonical(e.word));

  // Group entries by element; inside a class every symbol must agree.
  std::unordered_map<Element, std::vector<std::size_t>, ElementHash> classes;
  for (std::size_t i = 0; i < canon.size(); ++i) classes[canon[i]].push_back(i);

  std::optional<std::pair<Word, Word>> best;
  auto better = [](const std::pair<Word, Word>& x, const std::pair<Word, Word>& y) {
    if (x.first != y.first) return shortlex_less(x.first, y.first);
    return shortlex_less(x.second, y.second);
  };
  for (const auto& [elem, idx] : classes) {
    for (std::size_t a = 0; a < idx.size(); ++a) {
      for (std::size_t b = a + 1; b < idx.size(); ++b) {
        const auto& u = c.entries[idx[a]];
        const auto& v = c.entries[idx[b]];
        if (u.symbol == v.symbol) continue;
        auto pair = shortlex_less(v.word, u.word) ? std::make_pair(v.word, u.word)
                                                  : std::make_pair(u.word, v.word);
        if (!best || better(pair, *best)) best = pair;
      }
    }
  }
  if (best) {
    out.consistent = false;
    out.witness = *best;
    return out;
  }
  for (std::size_t i = 0; i < canon.size(); ++i) out.pattern.set(canon[i], c.entries[i].symbol);
  return out;
}

std::size_t coding_length(const PatternCoding& c) {
  std::size_t n = 0;
  for (const auto& e : c.entries) n = std::max(n, e.word.size());
  return n;
}

bool in_completion_set(const Group& g, const PatternCoding& c, const PatternCoding& cn,
                       std::size_t big_l) {
  std::map<Word, Symbol> by_word;
  for (const auto& e : c.entries) {
    if (e.word.size() > big_l) return false;
    for (GenId s : e.word.letters)
      if (s == Group::identity_generator()) return false;
    if (!by_word.emplace(e.word, e.symbol).second) return false;
  }
  std::size_t expected = 0;
  bool all_present = true;
  enumerate_words(g, big_l, [&](const Word& w) {
    ++expected;
    if (!by_word.count(w)) all_present = false;
    return all_present;
  });
  if (!all_present || expected != by_word.size()) return false;
  for (const auto& e : cn.entries) {
    auto it = by_word.find(e.word);
    if (it == by_word.end() || it->second != e.symbol) return false;
  }
  return true;
}

bool decidable_completion_contains(const Group& g, const CodingEnumeration& enumeration,
                                   const PatternCoding& c, std::size_t budget) {
  const std::size_t len = coding_length(c);
  std::size_t big_l = 0;
  for (std::size_t n = 0;; ++n) {
    if (n >= budget)
      throw CompletionBudgetExceeded("no decision after " + std::to_string(budget) +
                                     " codings of the enumeration");
    auto cn = enumeration(n);
    // A finite enumeration has been scanned completely without a match.
    if (!cn) return false;
    big_l = std::max(big_l, coding_length(*cn));
    if (big_l > len) return false;
    if (in_completion_set(g, c, *cn, big_l)) return true;
  }
}

Pattern translate_pattern(const Group& g, const Pattern& p, const Element& by) {
  Pattern out;
  for (const auto& [e, s] : p.cells()) out.set(g.multiply(by, e), s);
  return out;
}

}  // namespace gshift
