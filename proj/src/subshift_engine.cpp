#include <algorithm>
#include <map>
#include <numeric>

#include "gshift/errors.hpp"
#include "gshift/subshift.hpp"

namespace gshift {

SymbolSet symbol_set(std::size_t alphabet_size, std::initializer_list<Symbol> symbols) {
  SymbolSet s(alphabet_size);
  for (Symbol x : symbols) s.set(x);
  return s;
}

SymbolSet full_set(std::size_t alphabet_size) {
  SymbolSet s(alphabet_size);
  s.set();
  return s;
}

SetPattern set_pattern_from(const Pattern& p, std::size_t alphabet_size, std::string tag) {
  SetPattern out;
  out.tag = std::move(tag);
  for (const auto& [e, s] : p.cells()) {
    if (s >= alphabet_size) throw MalformedInput("pattern symbol outside the alphabet");
    out.cells.push_back({e, symbol_set(alphabet_size, {s})});
  }
  return out;
}

Window::Window(GroupPtr g, std::vector<Element> cells) : group_(std::move(g)), cells_(std::move(cells)) {
  std::int64_t longest = 0;
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (!index_.emplace(cells_[i], i).second) throw MalformedInput("window has repeated cells");
    longest = std::max(longest, cells_[i].letter_count());
  }
  diameter_bound_ = 2 * std::size_t(longest);
}

std::optional<std::size_t> Window::index_of(const Element& e) const {
  auto it = index_.find(e);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::vector<std::size_t>& Window::neighbors(std::size_t i) const {
  std::call_once(adjacency_once_, [&] {
    adjacency_.assign(cells_.size(), {});
    for (std::size_t c = 0; c < cells_.size(); ++c)
      for (GenId s : group_->moving_generators())
        if (auto j = index_of(group_->multiply(cells_[c], s)); j && *j != c)
          adjacency_[c].push_back(*j);
  });
  return adjacency_[i];
}

bool GlobalConstraint::violated(const Window& w, const Assignment& a) const {
  for (std::size_t c = 0; c < w.size(); ++c)
    if (a[c] != kUnassigned && violated_at(w, a, c)) return true;
  return false;
}

namespace {

std::uint32_t intern(CompiledWindow& cw, std::map<SymbolSet, std::uint32_t>& table,
                     const SymbolSet& s) {
  auto it = table.find(s);
  if (it != table.end()) return it->second;
  std::uint32_t id = std::uint32_t(cw.sets.size());
  cw.sets.push_back(s);
  table.emplace(s, id);
  return id;
}

}  // namespace

void add_pattern_occurrences(CompiledWindow& cw, const SetPattern& p) {
  const Window& w = *cw.window;
  const Group& g = w.group();
  std::map<SymbolSet, std::uint32_t> table;
  for (std::uint32_t i = 0; i < cw.sets.size(); ++i) table.emplace(cw.sets[i], i);
  if (p.cells.empty()) {
    cw.occurrences.push_back({});
    cw.tags.push_back(p.tag);
    return;
  }
  for (const auto& c : p.cells) {
    if (c.allowed.size() != cw.alphabet_size)
      throw MalformedInput("pattern cell set does not match the alphabet size");
    if (c.allowed.none()) return;  // can never occur
  }
  // Farthest cells first: anchors whose translate leaves the window fail fast.
  std::vector<std::size_t> order(p.cells.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return p.cells[a].offset.letter_count() > p.cells[b].offset.letter_count();
  });
  const Element c0_inv = g.inverse(p.cells[0].offset);
  for (std::size_t wi = 0; wi < w.size(); ++wi) {
    Element anchor = g.multiply(w.cell(wi), c0_inv);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> occ;
    bool fits = true;
    for (std::size_t k : order) {
      auto idx = w.index_of(g.multiply(anchor, p.cells[k].offset));
      if (!idx) {
        fits = false;
        break;
      }
      if (p.cells[k].allowed.all()) continue;  // wildcard cell: only containment matters
      occ.emplace_back(std::uint32_t(*idx), intern(cw, table, p.cells[k].allowed));
    }
    if (!fits) continue;
    std::sort(occ.begin(), occ.end());
    cw.occurrences.push_back(std::move(occ));
    cw.tags.push_back(p.tag);
  }
}

CompiledWindow compile_window(std::shared_ptr<const Window> w, const SubshiftSpec& x) {
  CompiledWindow cw;
  cw.window = std::move(w);
  cw.alphabet_size = x.alphabet.size();
  for (const auto& p :
       x.forbidden->local_patterns(*x.group, cw.alphabet_size, cw.window->diameter_bound()))
    add_pattern_occurrences(cw, p);
  cw.globals = x.forbidden->global_constraints(*x.group);
  return cw;
}

bool assignment_admissible(const CompiledWindow& cw, const Assignment& a, std::string* reason) {
  for (std::size_t o = 0; o < cw.occurrences.size(); ++o) {
    bool all = true;
    for (const auto& [cell, set] : cw.occurrences[o]) {
      if (a[cell] == kUnassigned || !cw.sets[set].test(std::size_t(a[cell]))) {
        all = false;
        break;
      }
    }
    if (all) {
      if (reason) *reason = "forbidden pattern" + (cw.tags[o].empty() ? "" : " [" + cw.tags[o] + "]");
      return false;
    }
  }
  for (const auto& gc : cw.globals) {
    if (gc->violated(*cw.window, a)) {
      if (reason) *reason = "global constraint";
      return false;
    }
  }
  return true;
}

bool locally_admissible(const Pattern& x, const SubshiftSpec& spec) {
  std::vector<Element> cells;
  Assignment a;
  for (const auto& [e, s] : x.cells()) {
    if (s >= spec.alphabet.size()) throw MalformedInput("pattern symbol outside the alphabet");
    cells.push_back(e);
    a.push_back(std::int32_t(s));
  }
  auto cw = compile_window(std::make_shared<Window>(spec.group, std::move(cells)), spec);
  return assignment_admissible(cw, a);
}

namespace {

class Searcher {
 public:
  Searcher(const CompiledWindow& cw, std::vector<SymbolSet> domains, std::size_t budget)
      : cw_(cw), domains_(std::move(domains)), budget_(budget) {
    const std::size_t n = cw.window->size();
    assign_.assign(n, kUnassigned);
    cell_occs_.assign(n, {});
    matched_.assign(cw.occurrences.size(), 0);
    dead_.assign(cw.occurrences.size(), 0);
    for (std::size_t o = 0; o < cw.occurrences.size(); ++o)
      for (const auto& [cell, set] : cw.occurrences[o])
        cell_occs_[cell].emplace_back(std::uint32_t(o), set);
  }

  SearchResult run() {
    SearchResult r;
    for (const auto& occ : cw_.occurrences) {
      if (occ.empty()) {
        r.verdict = SearchVerdict::kNo;
        return r;
      }
      if (occ.size() == 1) domains_[occ[0].first] -= cw_.sets[occ[0].second];
    }
    std::vector<std::size_t> order;
    for (std::size_t c = 0; c < domains_.size(); ++c)
      if (domains_[c].count() == 1) order.push_back(c);
    for (std::size_t c = 0; c < domains_.size(); ++c)
      if (domains_[c].count() != 1) order.push_back(c);
    order_ = std::move(order);
    r.verdict = dfs(0);
    r.nodes = nodes_;
    if (r.verdict == SearchVerdict::kYes) r.witness = witness_;
    return r;
  }

 private:
  struct Change {
    std::size_t cell;
    SymbolSet old;
  };

  bool assign_cell(std::size_t c, Symbol s) {
    assign_[c] = std::int32_t(s);
    bool ok = true;
    for (const auto& [o, set] : cell_occs_[c]) {
      if (cw_.sets[set].test(s)) ++matched_[o];
      else ++dead_[o];
    }
    for (const auto& [o, set] : cell_occs_[c]) {
      if (!ok) break;
      if (dead_[o] != 0) continue;
      const auto& occ = cw_.occurrences[o];
      if (matched_[o] == occ.size()) {
        ok = false;
      } else if (matched_[o] + 1 == occ.size()) {
        for (const auto& [cell, cs] : occ) {
          if (assign_[cell] != kUnassigned) continue;
          if (!domains_[cell].intersects(cw_.sets[cs])) break;
          trail_.push_back({cell, domains_[cell]});
          domains_[cell] -= cw_.sets[cs];
          if (domains_[cell].none()) ok = false;
          break;
        }
      }
    }
    if (ok)
      for (const auto& gc : cw_.globals)
        if (gc->violated_at(*cw_.window, assign_, c)) {
          ok = false;
          break;
        }
    return ok;
  }

  void unassign(std::size_t c, std::size_t mark) {
    Symbol s = Symbol(assign_[c]);
    for (const auto& [o, set] : cell_occs_[c]) {
      if (cw_.sets[set].test(s)) --matched_[o];
      else --dead_[o];
    }
    assign_[c] = kUnassigned;
    while (trail_.size() > mark) {
      domains_[trail_.back().cell] = std::move(trail_.back().old);
      trail_.pop_back();
    }
  }

  SearchVerdict dfs(std::size_t pos) {
    if (pos == order_.size()) {
      witness_ = assign_;
      return SearchVerdict::kYes;
    }
    const std::size_t c = order_[pos];
    const SymbolSet dom = domains_[c];
    for (std::size_t s = dom.find_first(); s != SymbolSet::npos; s = dom.find_next(s)) {
      if (++nodes_ > budget_) return SearchVerdict::kUndetermined;
      std::size_t mark = trail_.size();
      SearchVerdict v = SearchVerdict::kNo;
      if (assign_cell(c, Symbol(s))) v = dfs(pos + 1);
      if (v != SearchVerdict::kNo) return v;
      unassign(c, mark);
    }
    return SearchVerdict::kNo;
  }

  const CompiledWindow& cw_;
  std::vector<SymbolSet> domains_;
  std::size_t budget_;
  std::size_t nodes_ = 0;
  Assignment assign_;
  Assignment witness_;
  std::vector<std::size_t> order_;
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> cell_occs_;
  std::vector<std::uint32_t> matched_, dead_;
  std::vector<Change> trail_;
};

}  // namespace

SearchResult search_window(const CompiledWindow& cw, const std::vector<SymbolSet>& domains,
                           std::size_t node_budget) {
  if (domains.size() != cw.window->size()) throw MalformedInput("domain count mismatch");
  Searcher s(cw, domains, node_budget);
  return s.run();
}

namespace {

std::vector<SymbolSet> domains_for(const CompiledWindow& cw, const Pattern& x) {
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

Extendability extendable(const Pattern& x, const SubshiftSpec& spec, std::size_t radius,
                         std::size_t node_budget) {
  auto b = ball(*spec.group, radius);
  auto cw = compile_window(std::make_shared<Window>(spec.group, b.elements), spec);
  auto r = search_window(cw, domains_for(cw, x), node_budget);
  if (r.verdict == SearchVerdict::kUndetermined)
    throw Undetermined("extendability search exceeded " + std::to_string(node_budget) + " nodes");
  return r.verdict == SearchVerdict::kYes ? Extendability::kYes : Extendability::kNo;
}

bool union_window_admissible(const Pattern& x, const SubshiftSpec& a, const SubshiftSpec& b,
                             std::size_t radius, std::size_t node_budget) {
  if (!(a.alphabet == b.alphabet)) throw MalformedInput("union needs identical alphabets");
  // An undetermined first search must not decide the answer on its own.
  std::optional<Undetermined> pending;
  try {
    if (extendable(x, a, radius, node_budget) == Extendability::kYes) return true;
  } catch (const Undetermined& e) {
    pending = e;
  }
  if (extendable(x, b, radius, node_budget) == Extendability::kYes) return true;
  if (pending) throw *pending;
  return false;
}

}  // namespace gshift
