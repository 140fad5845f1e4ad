#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace gshift {

using GenId = std::uint32_t;

// One symbol of the generating set S. S is closed under inverses and contains
// the identity; the identity symbol always has id 0.
struct GeneratorSymbol {
  GenId id = 0;
  std::string display;
  GenId inverse = 0;
  bool is_identity = false;
};

// A word over S (possibly empty). Letters are generator ids of one group.
struct Word {
  std::vector<GenId> letters;

  Word() = default;
  explicit Word(std::vector<GenId> l) : letters(std::move(l)) {}
  Word(std::initializer_list<GenId> l) : letters(l) {}

  std::size_t size() const { return letters.size(); }
  bool empty() const { return letters.empty(); }
  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word&, const Word&) = default;
};

Word concat(const Word& u, const Word& v);

// Length-then-lexicographic comparison by generator id.
bool shortlex_less(const Word& u, const Word& v);

// A maximal run of one letter inside a canonical form.
struct Syllable {
  GenId letter = 0;
  std::int64_t count = 0;
  friend bool operator==(const Syllable&, const Syllable&) = default;
  friend auto operator<=>(const Syllable&, const Syllable&) = default;
};

// Appends `count` copies of `letter`, merging with a trailing run of the same
// letter. Performs no cancellation.
void append_run(std::vector<Syllable>& runs, GenId letter, std::int64_t count);

// A group element, stored as its canonical word in run-length form. Two
// elements of the same group are equal iff their canonical runs are equal.
class Element {
 public:
  Element() = default;
  explicit Element(std::vector<Syllable> runs);

  const std::vector<Syllable>& runs() const { return runs_; }
  bool is_identity() const { return runs_.empty(); }
  std::size_t hash() const { return hash_; }

  // Total number of letters of the canonical word.
  std::int64_t letter_count() const;

  // Expands the canonical word; throws MalformedInput past `limit` letters.
  Word expand(std::size_t limit = 1u << 20) const;

  friend bool operator==(const Element& a, const Element& b) {
    return a.hash_ == b.hash_ && a.runs_ == b.runs_;
  }
  // Arbitrary but deterministic total order (not shortlex).
  friend std::strong_ordering operator<=>(const Element& a, const Element& b) {
    return a.runs_ <=> b.runs_;
  }

 private:
  std::vector<Syllable> runs_;
  std::size_t hash_ = 0;
};

struct ElementHash {
  std::size_t operator()(const Element& e) const { return e.hash(); }
};

enum class GroupKind {
  kFree,
  kFreeAbelian,
  kBaumslagSolitar,
  kFinite,
  kDirectProduct,
  kFreeProduct,
  kRewriting,
  kGenerated,
};

class Group;
using GroupPtr = std::shared_ptr<const Group>;

// A finitely generated group with decidable word problem. Instances are
// immutable after construction and safe to share between threads.
class Group {
 public:
  virtual ~Group() = default;

  virtual GroupKind kind() const = 0;
  virtual bool is_finite() const = 0;
  // Whether the canonical word of every element is a geodesic, so that
  // |g| equals the canonical letter count.
  virtual bool canonical_is_geodesic() const = 0;
  virtual std::optional<std::size_t> order() const { return std::nullopt; }
  virtual std::vector<GroupPtr> factors() const { return {}; }
  virtual nlohmann::json to_json() const = 0;
  // The group whose canonical forms this group's elements use. Differs from
  // *this only for a group presented through another generating set.
  virtual const Group& element_domain() const { return *this; }

  const std::vector<GeneratorSymbol>& generators() const { return gens_; }
  const GeneratorSymbol& generator(GenId id) const { return gens_.at(id); }
  std::size_t generator_count() const { return gens_.size(); }
  static constexpr GenId identity_generator() { return 0; }
  GenId inverse(GenId s) const { return gens_.at(s).inverse; }
  // Non-identity generators in declaration order.
  const std::vector<GenId>& moving_generators() const { return moving_; }
  std::optional<GenId> find_generator(std::string_view label) const;

  Element identity() const { return Element{}; }
  // g * s^power; power >= 0.
  Element multiply(const Element& g, GenId s, std::int64_t power = 1) const;
  Element multiply(const Element& g, const Element& h) const;
  Element multiply(const Element& g, const Word& w) const;
  Element canonical(const Word& w) const { return multiply(identity(), w); }
  Element inverse(const Element& g) const;
  // g^{-1} h
  Element relative(const Element& g, const Element& h) const {
    return multiply(inverse(g), h);
  }

  // Throws MalformedInput if some letter is not a generator of this group.
  void validate(const Word& w) const;
  Word inverse_word(const Word& w) const;

  std::string label_of(GenId s) const { return gens_.at(s).display; }

 protected:
  Group() = default;
  // `labels` lists the non-identity generators in order; `inverses[i]` is
  // the index (into labels) of the inverse of labels[i].
  void set_generators(const std::vector<std::string>& labels,
                      const std::vector<std::size_t>& inverses);
  // s is a non-identity generator, power >= 1.
  virtual Element right_multiply(const Element& g, GenId s,
                                 std::int64_t power) const = 0;
  // Element-level product and inverse; the defaults go run by run.
  virtual Element compose(const Element& g, const Element& h) const;
  virtual Element invert(const Element& g) const;

 private:
  std::vector<GeneratorSymbol> gens_;
  std::vector<GenId> moving_;
};

struct RewriteRule {
  Word lhs;
  Word rhs;
};

GroupPtr make_free_group(std::size_t rank, std::vector<std::string> labels = {});
GroupPtr make_free_abelian_group(std::size_t rank,
                                 std::vector<std::string> labels = {});
// BS(1,n) = <a, b | a b = b a^n>, n >= 1.
GroupPtr make_baumslag_solitar(std::int64_t n);
// `table[i][j]` is the product of elements i and j. `generator_elements`
// defaults to every non-identity element; it is closed under inverses
// automatically. `labels` names every element (defaults to e0, e1, ...).
GroupPtr make_finite_group(std::vector<std::vector<std::size_t>> table,
                           std::vector<std::size_t> generator_elements = {},
                           std::vector<std::string> labels = {});
GroupPtr make_direct_product(std::vector<GroupPtr> factors);
GroupPtr make_free_product(std::vector<GroupPtr> factors);
// Monoid rewriting over the given labels and their formal inverses; the
// cancellation rules s s^-1 -> e are added automatically. Rules must be
// length non-increasing. `rules` are written over label tokens.
GroupPtr make_rewriting_group(std::vector<std::string> labels,
                              std::vector<std::pair<std::string, std::string>> rules,
                              std::size_t rewrite_budget = 100000);

// The group `base` seen through a new generating set: generator i is the
// element spelled by generators[i] over base, and its formal inverse follows
// it. Elements are base elements, so patterns and tapes carry over unchanged.
GroupPtr make_generated_group(GroupPtr base, std::vector<Word> generators,
                              std::vector<std::string> labels = {});

// For a direct or free product: maps generator ids of factor `factor` to the
// product's generator ids (identity to identity).
std::vector<GenId> factor_embedding(const Group& product, std::size_t factor);

// Critical-pair warnings recorded when a rewriting group was loaded; empty
// for every other kind.
std::vector<std::string> confluence_warnings(const Group& g);

// Parses a whitespace-separated word: each token is a generator label, or
// `label^k` for an integer k (negative k uses the inverse generator).
Word parse_word(const Group& g, std::string_view text);
std::string format_word(const Group& g, const Word& w);
// Canonical word of an element; runs longer than 3 use `label^k` notation.
std::string format_element(const Group& g, const Element& e);

}  // namespace gshift

template <>
struct std::hash<gshift::Element> {
  std::size_t operator()(const gshift::Element& e) const { return e.hash(); }
};
