#include <random>
#include <set>

#include "doctest.h"
#include "gshift/cayley.hpp"
#include "gshift/errors.hpp"
#include "gshift/pattern.hpp"

using namespace gshift;

namespace {

PatternCoding coding(const Group& g, std::vector<std::pair<std::string, Symbol>> xs) {
  PatternCoding c;
  for (auto& [w, s] : xs) c.entries.push_back({parse_word(g, w), s});
  return c;
}

// Pairwise oracle: inconsistent iff two entries are equal in G but differ.
bool brute_consistent(const Group& g, const PatternCoding& c) {
  for (std::size_t i = 0; i < c.entries.size(); ++i)
    for (std::size_t j = i + 1; j < c.entries.size(); ++j)
      if (c.entries[i].symbol != c.entries[j].symbol &&
          solve_word_problem(g, concat(c.entries[i].word, g.inverse_word(c.entries[j].word))))
        return false;
  return true;
}

}  // namespace

TEST_CASE("worked example codings over BS(1,2)") {
  auto bs = make_baumslag_solitar(2);
  auto c1 = coding(*bs, {{"", 0}, {"b", 1}, {"a", 1}, {"a b", 0}, {"b a a", 0}, {"b a", 1}});
  auto r1 = check_consistency(*bs, c1);
  CHECK(r1.consistent);
  CHECK(r1.pattern.size() == 5);
  auto c2 = coding(*bs, {{"", 0}, {"a a", 1}, {"b a b^-1 a", 1}, {"a", 1}, {"b a", 1},
                         {"a b a b^-1", 0}});
  auto r2 = check_consistency(*bs, c2);
  REQUIRE_FALSE(r2.consistent);
  CHECK(format_word(*bs, r2.witness.first) == "a b a b^-1");
  CHECK(format_word(*bs, r2.witness.second) == "b a b^-1 a");
  CHECK(bs->canonical(r2.witness.first) == bs->canonical(r2.witness.second));
  CHECK(check_consistency(*bs, PatternCoding{}).consistent);
  CHECK(check_consistency(*bs, PatternCoding{}).pattern.empty());
}

TEST_CASE("consistency agrees with the pairwise oracle") {
  std::mt19937 rng(1);
  std::vector<GroupPtr> groups = {make_free_group(2), make_free_abelian_group(2),
                                  make_baumslag_solitar(2),
                                  make_free_product({make_finite_group({{0, 1}, {1, 0}}),
                                                     make_finite_group({{0, 1}, {1, 0}})})};
  for (const auto& g : groups) {
    const auto& gens = g->moving_generators();
    for (int t = 0; t < 200; ++t) {
      PatternCoding c;
      std::size_t n = rng() % 7;
      for (std::size_t i = 0; i < n; ++i) {
        Word w;
        std::size_t len = rng() % 4;
        for (std::size_t k = 0; k < len; ++k) w.letters.push_back(gens[rng() % gens.size()]);
        c.entries.push_back({w, Symbol(rng() % 2)});
      }
      auto r = check_consistency(*g, c);
      CHECK(r.consistent == brute_consistent(*g, c));
      if (r.consistent) {
        CHECK(r.pattern.size() <= c.entries.size());
        std::set<Element> distinct;
        for (const auto& e : c.entries) distinct.insert(g->canonical(e.word));
        CHECK(r.pattern.size() == distinct.size());
      } else {
        CHECK(solve_word_problem(*g, concat(r.witness.first, g->inverse_word(r.witness.second))));
      }
    }
  }
}

TEST_CASE("coding length") {
  auto z = make_free_abelian_group(1);
  CHECK(coding_length(coding(*z, {{"", 0}})) == 0);
  CHECK(coding_length(coding(*z, {{"a", 1}, {"a^-1 a", 0}})) == 2);
  CHECK(coding_length(PatternCoding{}) == 0);
}

TEST_CASE("decidable completion") {
  auto z = make_free_abelian_group(1);
  PatternCoding c0 = coding(*z, {{"a", 1}});
  CodingEnumeration one = [&](std::size_t n) -> std::optional<PatternCoding> {
    if (n == 0) return c0;
    return std::nullopt;
  };
  CHECK(decidable_completion_contains(*z, one, coding(*z, {{"", 0}, {"a", 1}, {"a^-1", 0}})));
  CHECK_FALSE(decidable_completion_contains(
      *z, one,
      coding(*z, {{"", 0}, {"a", 1}, {"a^-1", 0}, {"a a", 1}, {"a a^-1", 0}, {"a^-1 a", 0},
                  {"a^-1 a^-1", 0}})));
  CHECK_FALSE(decidable_completion_contains(*z, one, c0));
  CHECK_FALSE(decidable_completion_contains(*z, one, coding(*z, {{"", 0}, {"a", 0}, {"a^-1", 1}})));
  // Constant-length infinite enumeration never matching: budget error.
  CodingEnumeration stuck = [&](std::size_t) -> std::optional<PatternCoding> { return c0; };
  CHECK_THROWS_AS(decidable_completion_contains(*z, stuck, coding(*z, {{"", 0}, {"a", 0}, {"a^-1", 0}}), 50),
                  CompletionBudgetExceeded);
}

TEST_CASE("translate pattern") {
  auto z2 = make_free_abelian_group(2);
  Pattern p;
  p.set(z2->identity(), 1);
  CHECK(translate_pattern(*z2, p, z2->identity()) == p);
  Pattern q = translate_pattern(*z2, p, z2->canonical(parse_word(*z2, "x")));
  CHECK(q.get(z2->canonical(parse_word(*z2, "x"))) == Symbol(1));
  auto f2 = make_free_group(2);
  Pattern r;
  r.set(f2->identity(), 0);
  r.set(f2->canonical(parse_word(*f2, "a")), 1);
  Element b = f2->canonical(parse_word(*f2, "b"));
  Pattern rt = translate_pattern(*f2, r, b);
  CHECK(rt.get(b) == Symbol(0));
  CHECK(rt.get(f2->canonical(parse_word(*f2, "b a"))) == Symbol(1));
  CHECK(translate_pattern(*f2, rt, f2->inverse(b)) == r);
}
