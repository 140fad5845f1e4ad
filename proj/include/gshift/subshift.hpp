#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "json.hpp"
#include "gshift/cayley.hpp"
#include "gshift/group.hpp"
#include "gshift/pattern.hpp"

namespace gshift {

using SymbolSet = boost::dynamic_bitset<std::uint64_t>;

SymbolSet symbol_set(std::size_t alphabet_size, std::initializer_list<Symbol> symbols);
SymbolSet full_set(std::size_t alphabet_size);

// A forbidden pattern whose cells accept a set of symbols: it occurs at g
// when x(g * offset) lies in `allowed` for every cell. A plain pattern is the
// special case of singleton sets.
struct SetCell {
  Element offset;
  SymbolSet allowed;
};

struct SetPattern {
  std::vector<SetCell> cells;
  std::string tag;  // provenance, free-form
};

SetPattern set_pattern_from(const Pattern& p, std::size_t alphabet_size, std::string tag = {});

// A finite set of cells in a fixed order, with lazily built Cayley adjacency.
class Window {
 public:
  Window(GroupPtr g, std::vector<Element> cells);

  const Group& group() const { return *group_; }
  const GroupPtr& group_ptr() const { return group_; }
  std::size_t size() const { return cells_.size(); }
  const Element& cell(std::size_t i) const { return cells_[i]; }
  const std::vector<Element>& cells() const { return cells_; }
  std::optional<std::size_t> index_of(const Element& e) const;
  // Cells adjacent to cell i through a non-identity generator.
  const std::vector<std::size_t>& neighbors(std::size_t i) const;
  // Upper bound on the diameter: twice the largest canonical letter count.
  std::size_t diameter_bound() const { return diameter_bound_; }

 private:
  GroupPtr group_;
  std::vector<Element> cells_;
  std::unordered_map<Element, std::size_t, ElementHash> index_;
  std::size_t diameter_bound_ = 0;
  mutable std::once_flag adjacency_once_;
  mutable std::vector<std::vector<std::size_t>> adjacency_;
};

inline constexpr std::int32_t kUnassigned = -1;
using Assignment = std::vector<std::int32_t>;  // per window cell, kUnassigned if free

// A constraint too large to list as patterns (unbounded supports), checked
// directly on assignments. Semantics must coincide with its listed patterns.
class GlobalConstraint {
 public:
  virtual ~GlobalConstraint() = default;
  // Whether some forbidden instance entirely inside the assigned cells and
  // involving `last` occurs.
  virtual bool violated_at(const Window& w, const Assignment& a, std::size_t last) const = 0;
  virtual bool violated(const Window& w, const Assignment& a) const;
};

using GlobalPtr = std::shared_ptr<const GlobalConstraint>;

class ForbiddenFamily {
 public:
  virtual ~ForbiddenFamily() = default;
  virtual nlohmann::json to_json(const Group& g, const Alphabet& a) const = 0;
  // Patterns the engine instantiates in a window whose diameter is at most
  // `radius`. Patterns contain 1_G in their support.
  virtual std::vector<SetPattern> local_patterns(const Group& g, std::size_t alphabet_size,
                                                 std::size_t radius) const = 0;
  virtual std::vector<GlobalPtr> global_constraints(const Group&) const { return {}; }
  // Full generated listing up to `radius` (local patterns plus the explicit
  // form of the global constraints).
  virtual std::vector<SetPattern> listed_patterns(const Group& g, std::size_t alphabet_size,
                                                  std::size_t radius) const {
    return local_patterns(g, alphabet_size, radius);
  }
};

using FamilyPtr = std::shared_ptr<const ForbiddenFamily>;

struct SubshiftSpec {
  Alphabet alphabet;
  GroupPtr group;
  FamilyPtr forbidden;
};

FamilyPtr finite_family(std::vector<SetPattern> patterns);
FamilyPtr union_family(std::vector<FamilyPtr> parts);

SubshiftSpec builtin_one_or_less(GroupPtr g, std::size_t k);
SubshiftSpec builtin_mirror(GroupPtr g);
SubshiftSpec builtin_delone(GroupPtr g, std::size_t n);
SubshiftSpec builtin_amenable_witness(GroupPtr g, std::size_t n_max);

SubshiftSpec intersect(const SubshiftSpec& x, const SubshiftSpec& y);

// The engine's view of a subshift restricted to a window.
struct CompiledWindow {
  std::shared_ptr<const Window> window;
  std::size_t alphabet_size = 0;
  std::vector<SymbolSet> sets;
  // occurrence -> (cell, set index) list
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> occurrences;
  std::vector<std::string> tags;
  std::vector<GlobalPtr> globals;
};

CompiledWindow compile_window(std::shared_ptr<const Window> w, const SubshiftSpec& x);
// Adds occurrences of a pattern at every anchor where it fits the window.
void add_pattern_occurrences(CompiledWindow& cw, const SetPattern& p);

bool locally_admissible(const Pattern& x, const SubshiftSpec& spec);
// Full-assignment check on a compiled window.
bool assignment_admissible(const CompiledWindow& cw, const Assignment& a,
                           std::string* reason = nullptr);

enum class SearchVerdict { kYes, kNo, kUndetermined };

struct SearchResult {
  SearchVerdict verdict = SearchVerdict::kUndetermined;
  Assignment witness;
  std::size_t nodes = 0;
};

inline constexpr std::size_t kDefaultSearchBudget = 2000000;

// Backtracking with forward checking: cells in window order (fixed cells
// first), symbols in alphabet order.
SearchResult search_window(const CompiledWindow& cw, const std::vector<SymbolSet>& domains,
                           std::size_t node_budget = kDefaultSearchBudget);

enum class Extendability { kYes, kNo };

// Throws Undetermined when the search budget runs out.
Extendability extendable(const Pattern& x, const SubshiftSpec& spec, std::size_t radius,
                         std::size_t node_budget = kDefaultSearchBudget);

bool union_window_admissible(const Pattern& x, const SubshiftSpec& a, const SubshiftSpec& b,
                             std::size_t radius, std::size_t node_budget = kDefaultSearchBudget);

struct BlockCode {
  std::vector<Element> window;
  std::size_t source_size = 0;
  std::size_t target_size = 0;
  // Mixed-radix index: sum input[i] * source_size^i over window positions.
  std::vector<Symbol> table;

  Symbol apply_local(const std::vector<Symbol>& input) const;
};

BlockCode make_block_code(std::vector<Element> window, std::size_t source_size,
                          std::size_t target_size,
                          const std::function<Symbol(const std::vector<Symbol>&)>& rule);

Pattern apply_block_code(const Group& g, const Pattern& x, const BlockCode& code);

bool factor_window_admissible(const Pattern& y, const SubshiftSpec& spec, const BlockCode& code,
                              std::size_t radius, std::size_t node_budget = kDefaultSearchBudget);

// `embedding[s]` is the word of G for generator s of H (indexed by H's ids;
// entry 0 is ignored).
bool projective_window_admissible(const Group& h, const Pattern& y_h,
                                  const std::vector<Word>& embedding, const SubshiftSpec& spec,
                                  std::size_t radius,
                                  std::size_t node_budget = kDefaultSearchBudget);

// Greedy maximal subset D of B_radius, scanned in shortlex order, with
// pairwise distances >= 4n; y = 1 on D, 2 within distance n of D, else 0.
// With `window`, only the cells of B_window are reported, and only
// B_{window+n} is scanned since the scan order is by length first.
Pattern greedy_delone_configuration(GroupPtr g, std::size_t n, std::size_t radius,
                                    std::optional<std::size_t> window = std::nullopt);

SubshiftSpec subshift_from_json(const nlohmann::json& j);
nlohmann::json subshift_to_json(const SubshiftSpec& s);
Pattern pattern_from_json(const Group& g, const Alphabet& a, const nlohmann::json& j);
nlohmann::json pattern_to_json(const Group& g, const Alphabet& a, const Pattern& p);

}  // namespace gshift
