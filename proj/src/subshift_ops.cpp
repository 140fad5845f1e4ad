#include <algorithm>
#include <unordered_set>

#include "gshift/errors.hpp"
#include "gshift/subshift.hpp"

namespace gshift {

Symbol BlockCode::apply_local(const std::vector<Symbol>& input) const {
  if (input.size() != window.size()) throw MalformedInput("block code input has the wrong size");
  std::size_t idx = 0, place = 1;
  for (Symbol s : input) {
    if (s >= source_size) throw MalformedInput("block code input outside the source alphabet");
    idx += s * place;
    place *= source_size;
  }
  return table[idx];
}

BlockCode make_block_code(std::vector<Element> window, std::size_t source_size,
                          std::size_t target_size,
                          const std::function<Symbol(const std::vector<Symbol>&)>& rule) {
  if (source_size == 0 || target_size == 0) throw MalformedInput("empty block code alphabet");
  BlockCode code{std::move(window), source_size, target_size, {}};
  std::size_t total = 1;
  for (std::size_t i = 0; i < code.window.size(); ++i) {
    if (total > (std::size_t(1) << 24) / source_size)
      throw MalformedInput("block code table too large");
    total *= source_size;
  }
  code.table.reserve(total);
  std::vector<Symbol> input(code.window.size(), 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    for (std::size_t i = 0, c = idx; i < input.size(); ++i, c /= source_size)
      input[i] = Symbol(c % source_size);
    Symbol out = rule(input);
    if (out >= target_size) throw MalformedInput("block code rule leaves the target alphabet");
    code.table.push_back(out);
  }
  return code;
}

Pattern apply_block_code(const Group& g, const Pattern& x, const BlockCode& code) {
  Pattern out;
  std::vector<Symbol> input(code.window.size());
  for (const auto& [e, s] : x.cells()) {
    bool defined = true;
    for (std::size_t i = 0; i < code.window.size() && defined; ++i) {
      auto v = x.get(g.multiply(e, code.window[i]));
      if (!v) defined = false;
      else input[i] = *v;
    }
    if (defined) out.set(e, code.apply_local(input));
  }
  return out;
}

namespace {

std::size_t window_diameter(const Group& g, const std::vector<Element>& window) {
  std::size_t d = 0;
  for (const auto& e : window) d = std::max(d, element_length(g, e));
  return d;
}

std::uint32_t set_id(CompiledWindow& cw, const SymbolSet& s) {
  for (std::uint32_t i = 0; i < cw.sets.size(); ++i)
    if (cw.sets[i] == s) return i;
  cw.sets.push_back(s);
  return std::uint32_t(cw.sets.size() - 1);
}

std::vector<SymbolSet> pinned_domains(const CompiledWindow& cw, const Pattern& x) {
  std::vector<SymbolSet> d(cw.window->size(), full_set(cw.alphabet_size));
  for (const auto& [e, s] : x.cells()) {
    auto idx = cw.window->index_of(e);
    if (!idx) throw MalformedInput("pattern support is not inside the search window");
    if (s >= cw.alphabet_size) throw MalformedInput("pattern symbol outside the alphabet");
    d[*idx] = symbol_set(cw.alphabet_size, {s});
  }
  return d;
}

}  // namespace

// Windowed preimage search: the local rule at each g in supp(y) must produce
// y(g), encoded as forbidden occurrences for every input tuple that does not.
bool factor_window_admissible(const Pattern& y, const SubshiftSpec& spec, const BlockCode& code,
                              std::size_t radius, std::size_t node_budget) {
  const Group& g = *spec.group;
  if (code.source_size != spec.alphabet.size())
    throw MalformedInput("block code source alphabet does not match the subshift");
  for (const auto& [e, s] : y.cells())
    if (s >= code.target_size) throw MalformedInput("pattern symbol outside the target alphabet");
  const std::size_t big = radius + window_diameter(g, code.window);
  auto b = ball(g, big);
  auto cw = compile_window(std::make_shared<Window>(spec.group, b.elements), spec);
  const std::size_t a = cw.alphabet_size;
  std::vector<std::uint32_t> singles(a);
  for (Symbol s = 0; s < a; ++s) singles[s] = set_id(cw, symbol_set(a, {s}));
  const std::size_t total = code.table.size();
  for (const auto& [e, target] : y.cells()) {
    std::vector<std::uint32_t> cells;
    for (const auto& w : code.window) {
      auto idx = cw.window->index_of(g.multiply(e, w));
      if (!idx) throw MalformedInput("preimage support leaves the search window");
      cells.push_back(std::uint32_t(*idx));
    }
    for (std::size_t idx = 0; idx < total; ++idx) {
      if (code.table[idx] == target) continue;
      std::vector<std::pair<std::uint32_t, std::uint32_t>> occ;
      bool clash = false;
      for (std::size_t i = 0, c = idx; i < cells.size(); ++i, c /= a) {
        auto sym = std::uint32_t(c % a);
        auto same = std::find_if(occ.begin(), occ.end(),
                                 [&](const auto& p) { return p.first == cells[i]; });
        if (same != occ.end()) {
          if (same->second != singles[sym]) clash = true;
          continue;
        }
        occ.emplace_back(cells[i], singles[sym]);
      }
      if (clash) continue;
      std::sort(occ.begin(), occ.end());
      cw.occurrences.push_back(std::move(occ));
      cw.tags.push_back("preimage");
    }
  }
  auto r = search_window(cw, pinned_domains(cw, Pattern{}), node_budget);
  if (r.verdict == SearchVerdict::kUndetermined)
    throw Undetermined("factor search exceeded " + std::to_string(node_budget) + " nodes");
  return r.verdict == SearchVerdict::kYes;
}

bool projective_window_admissible(const Group& h, const Pattern& y_h,
                                  const std::vector<Word>& embedding, const SubshiftSpec& spec,
                                  std::size_t radius, std::size_t node_budget) {
  const Group& g = *spec.group;
  if (embedding.size() != h.generator_count())
    throw MalformedInput("embedding must list one word per generator of H");
  auto image_of = [&](GenId s) -> Word {
    GenId base = h.inverse(s);
    if (base < s) return g.inverse_word(embedding[base]);
    return embedding[s];
  };
  Pattern x;
  for (const auto& [e, s] : y_h.cells()) {
    Word w;
    for (GenId letter : e.expand().letters)
      if (letter != Group::identity_generator()) w = concat(w, image_of(letter));
    Element target = g.canonical(w);
    auto prev = x.get(target);
    if (prev && *prev != s) return false;  // non-injective embedding forces a clash
    x.set(target, s);
  }
  return extendable(x, spec, radius, node_budget) == Extendability::kYes;
}

Pattern greedy_delone_configuration(GroupPtr g, std::size_t n, std::size_t radius,
                                    std::optional<std::size_t> window) {
  if (n < 1) throw MalformedInput("delone needs n >= 1");
  if (radius < 4 * n) throw MalformedInput("radius must be at least 4n");
  const std::size_t shown = std::min(radius, window.value_or(radius));
  // Values on B_shown only involve members of D in B_{shown+n}.
  auto big = ball(*g, std::min(radius, shown + n), kDefaultBallBudget, false);
  auto block = ball(*g, 4 * n - 1, kDefaultBallBudget, false).elements;
  auto near = ball(*g, n, kDefaultBallBudget, false).elements;
  // Shortlex scan: every earlier member of D is no longer than the current
  // cell, so D restricted to B_m does not depend on the radius.
  std::vector<char> blocked(big.size(), 0);
  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < big.size(); ++i) {
    if (blocked[i]) continue;
    chosen.push_back(i);
    for (const auto& b : block) {
      auto it = big.index.find(g->multiply(big.elements[i], b));
      if (it != big.index.end()) blocked[it->second] = 1;
    }
  }
  std::vector<Symbol> y(big.size(), 0);
  for (std::size_t i : chosen) {
    for (const auto& b : near) {
      auto it = big.index.find(g->multiply(big.elements[i], b));
      if (it != big.index.end()) y[it->second] = 2;
    }
  }
  for (std::size_t i : chosen) y[i] = 1;
  Pattern out;
  for (std::size_t i = 0; i < big.size(); ++i)
    if (big.distance[i] <= shown) out.set(big.elements[i], y[i]);
  return out;
}

}  // namespace gshift
