#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gshift/group.hpp"

namespace gshift {

inline constexpr std::size_t kDefaultBallBudget = 200000;

struct CayleyEdge {
  std::size_t from;
  GenId generator;
  std::size_t to;
};

// B_n of the Cayley graph. Elements are in breadth-first (shortlex) order
// with their distances; edges are the internal non-identity edges g -s-> gs.
struct CayleyBall {
  std::size_t radius = 0;
  std::vector<Element> elements;
  std::vector<std::size_t> distance;
  std::vector<CayleyEdge> edges;
  std::unordered_map<Element, std::size_t, ElementHash> index;

  bool contains(const Element& g) const { return index.count(g) != 0; }
  std::size_t size() const { return elements.size(); }
};

CayleyBall ball(const Group& g, std::size_t n, std::size_t budget = kDefaultBallBudget,
                bool with_edges = true);

std::string ball_to_dot(const Group& g, const CayleyBall& b);

bool solve_word_problem(const Group& g, const Word& w);

// |g| for the element of w.
std::size_t word_metric(const Group& g, const Word& w, std::size_t budget = kDefaultBallBudget);
std::size_t element_length(const Group& g, const Element& e,
                           std::size_t budget = kDefaultBallBudget);

// Words over non-identity generators in shortlex order. The callback returns
// false to stop early.
void enumerate_words(const Group& g, std::size_t max_len,
                     const std::function<bool(const Word&)>& visit);
std::vector<Word> enumerate_words(const Group& g, std::size_t max_len);

// Advances w to its shortlex successor over the non-identity generators.
void next_word(const Group& g, Word& w);

struct BallSequences {
  std::vector<Element> g;
  std::vector<Element> h;
  std::vector<Word> g_words;
  std::vector<Word> h_words;
};

BallSequences disjoint_ball_sequences(const Group& g, std::size_t n,
                                      std::size_t budget = kDefaultBallBudget);

std::vector<Element> component_sequence(const Group& g, std::size_t big_n, const Word& seed,
                                        std::size_t n, std::size_t budget = kDefaultBallBudget);

}  // namespace gshift
