#include "gshift/cayley.hpp"

#include <deque>
#include <sstream>
#include <unordered_set>

#include "gshift/errors.hpp"

namespace gshift {

CayleyBall ball(const Group& g, std::size_t n, std::size_t budget, bool with_edges) {
  CayleyBall b;
  b.radius = n;
  b.elements.push_back(g.identity());
  b.distance.push_back(0);
  b.index.emplace(g.identity(), 0);
  for (std::size_t head = 0; head < b.elements.size(); ++head) {
    const std::size_t d = b.distance[head];
    for (GenId s : g.moving_generators()) {
      Element y = g.multiply(b.elements[head], s);
      auto it = b.index.find(y);
      if (it == b.index.end()) {
        if (d == n) continue;
        if (b.elements.size() >= budget)
          throw BallBudgetExceeded("ball of radius " + std::to_string(n) + " exceeds " +
                                   std::to_string(budget) + " elements");
        it = b.index.emplace(y, b.elements.size()).first;
        b.elements.push_back(y);
        b.distance.push_back(d + 1);
      }
      if (with_edges) b.edges.push_back({head, s, it->second});
    }
  }
  return b;
}

std::string ball_to_dot(const Group& g, const CayleyBall& b) {
  std::ostringstream out;
  out << "digraph ball {\n";
  auto name = [&](std::size_t i) {
    std::string s = format_element(g, b.elements[i]);
    return s.empty() ? std::string("1") : s;
  };
  for (std::size_t i = 0; i < b.size(); ++i) out << "  \"" << name(i) << "\";\n";
  for (const auto& e : b.edges)
    out << "  \"" << name(e.from) << "\" -> \"" << name(e.to) << "\" [label=\""
        << g.label_of(e.generator) << "\"];\n";
  out << "}\n";
  return out.str();
}

bool solve_word_problem(const Group& g, const Word& w) { return g.canonical(w).is_identity(); }

std::size_t element_length(const Group& g, const Element& e, std::size_t budget) {
  if (g.canonical_is_geodesic()) return std::size_t(e.letter_count());
  // The canonical word bounds the distance; grow balls up to that bound.
  const std::size_t bound = std::size_t(e.letter_count());
  std::unordered_map<Element, std::size_t, ElementHash> dist{{g.identity(), 0}};
  std::vector<Element> frontier{g.identity()};
  if (e.is_identity()) return 0;
  for (std::size_t d = 1; d <= bound; ++d) {
    std::vector<Element> next;
    for (const auto& x : frontier) {
      for (GenId s : g.moving_generators()) {
        Element y = g.multiply(x, s);
        if (dist.count(y)) continue;
        if (y == e) return d;
        if (dist.size() >= budget)
          throw BallBudgetExceeded("word metric search exceeded the ball budget");
        dist.emplace(y, d);
        next.push_back(std::move(y));
      }
    }
    frontier = std::move(next);
  }
  return bound;
}

std::size_t word_metric(const Group& g, const Word& w, std::size_t budget) {
  return element_length(g, g.canonical(w), budget);
}

void next_word(const Group& g, Word& w) {
  const auto& gens = g.moving_generators();
  if (gens.empty()) throw UnsupportedGroup("group has no non-identity generators");
  // Generator ids are 1..k in order, so the successor is a base-k increment.
  const GenId last = gens.back();
  std::size_t i = w.size();
  while (i > 0 && w.letters[i - 1] == last) {
    w.letters[i - 1] = gens.front();
    --i;
  }
  if (i == 0) {
    w.letters.assign(w.size() + 1, gens.front());
  } else {
    ++w.letters[i - 1];
  }
}

void enumerate_words(const Group& g, std::size_t max_len,
                     const std::function<bool(const Word&)>& visit) {
  Word w;
  if (!visit(w)) return;
  if (g.moving_generators().empty()) return;
  for (;;) {
    next_word(g, w);
    if (w.size() > max_len) return;
    if (!visit(w)) return;
  }
}

std::vector<Word> enumerate_words(const Group& g, std::size_t max_len) {
  std::vector<Word> out;
  enumerate_words(g, max_len, [&](const Word& w) {
    out.push_back(w);
    return true;
  });
  return out;
}

namespace {

// Membership in B_N, answered from letter counts on geodesic kinds and from
// an explicit ball otherwise.
class BallPredicate {
 public:
  BallPredicate(const Group& g, std::size_t n, std::size_t budget) : n_(n) {
    if (!g.canonical_is_geodesic()) explicit_ = ball(g, n, budget, false);
  }
  bool contains(const Element& e) const {
    if (explicit_) return explicit_->contains(e);
    return std::size_t(e.letter_count()) <= n_;
  }

 private:
  std::size_t n_;
  std::optional<CayleyBall> explicit_;
};

}  // namespace

BallSequences disjoint_ball_sequences(const Group& g, std::size_t n, std::size_t budget) {
  if (g.is_finite()) throw UnsupportedGroup("disjoint ball sequences need an infinite group");
  const std::size_t big_n = 1 + 2 * n * (n + 2);
  BallPredicate in_ball(g, big_n, budget);
  std::unordered_set<Element, ElementHash> marked{g.identity()};
  BallSequences out;
  // Marks only grow and B_k grows with k, so a word rejected once stays
  // rejected; the scan can resume instead of restarting at ε.
  Word w;
  for (std::size_t k = 0; k <= n; ++k) {
    CayleyBall bk = ball(g, k, budget, false);
    for (int which = 0; which < 2; ++which) {
      for (;;) {
        if (w.size() > 2 * big_n)
          throw BallBudgetExceeded("no free translate of B_" + std::to_string(k) + " inside B_" +
                                   std::to_string(big_n));
        Element base = g.canonical(w);
        bool free = true;
        std::vector<Element> cells;
        for (const auto& b : bk.elements) {
          Element c = g.multiply(base, b);
          if (!in_ball.contains(c) || marked.count(c)) {
            free = false;
            break;
          }
          cells.push_back(std::move(c));
        }
        if (free) {
          for (auto& c : cells) marked.insert(std::move(c));
          (which == 0 ? out.g : out.h).push_back(base);
          (which == 0 ? out.g_words : out.h_words).push_back(w);
          break;
        }
        next_word(g, w);
      }
    }
  }
  return out;
}

std::vector<Element> component_sequence(const Group& g, std::size_t big_n, const Word& seed,
                                        std::size_t n, std::size_t budget) {
  const Element g0 = g.canonical(seed);
  if (n == 0) return {g0};
  const std::size_t big_m = big_n + n + seed.size();
  BallPredicate inner(g, big_n, budget);
  BallPredicate outer(g, big_m, budget);
  if (inner.contains(g0)) throw MalformedInput("seed lies inside B_N");
  if (!outer.contains(g0)) throw MalformedInput("seed lies outside B_M");

  std::unordered_set<Element, ElementHash> component{g0};
  std::deque<Element> queue{g0};
  while (!queue.empty()) {
    Element x = queue.front();
    queue.pop_front();
    for (GenId s : g.moving_generators()) {
      Element y = g.multiply(x, s);
      if (component.count(y) || inner.contains(y) || !outer.contains(y)) continue;
      if (component.size() >= budget)
        throw BallBudgetExceeded("component exceeds the ball budget");
      component.insert(y);
      queue.push_back(std::move(y));
    }
  }

  std::vector<Element> out{g0};
  std::unordered_set<Element, ElementHash> marked{g0};
  Word w;
  const std::size_t max_len = seed.size() + big_m;
  while (out.size() < n + 1) {
    if (w.size() > max_len || marked.size() == component.size())
      throw ComponentExhausted("component holds only " + std::to_string(out.size()) +
                               " reachable elements");
    Element x = g.multiply(g0, w);
    if (component.count(x) && !marked.count(x)) {
      marked.insert(x);
      out.push_back(std::move(x));
    }
    next_word(g, w);
  }
  return out;
}

}  // namespace gshift
