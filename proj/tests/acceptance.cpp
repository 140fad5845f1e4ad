// Acceptance run: one line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include "gshift/cayley.hpp"
#include "gshift/errors.hpp"
#include "gshift/machine.hpp"
#include "gshift/pattern.hpp"
#include "gshift/reductions.hpp"
#include "gshift/subshift.hpp"

using namespace gshift;
using boost::multiprecision::cpp_int;

namespace {

// A failed expectation inside a criterion.
struct Miss {
  std::string what;
};

void expect(bool ok, const std::string& what) {
  if (!ok) throw Miss{what};
}

std::vector<std::string> letters_of(const std::string& w) {
  std::istringstream in(w);
  std::vector<std::string> out;
  for (std::string t; in >> t;) {
    const auto caret = t.find('^');
    if (caret == std::string::npos || t.substr(caret) == "^-1") {
      out.push_back(t);
      continue;
    }
    const long e = std::stol(t.substr(caret + 1));
    for (long i = 0; i < std::labs(e); ++i) out.push_back(t.substr(0, caret) + (e < 0 ? "^-1" : ""));
  }
  return out;
}

std::vector<std::string> letters_of(const Group& g, const Word& w) {
  std::vector<std::string> out;
  for (GenId s : w.letters) out.push_back(g.label_of(s));
  return out;
}

std::string invert_letter(const std::string& l) {
  return l.size() > 3 && l.substr(l.size() - 3) == "^-1" ? l.substr(0, l.size() - 3) : l + "^-1";
}

std::vector<std::string> free_reduce(const std::vector<std::string>& w) {
  std::vector<std::string> out;
  for (const auto& l : w) {
    if (!out.empty() && out.back() == invert_letter(l)) out.pop_back();
    else out.push_back(l);
  }
  return out;
}

// Coordinates in Z^k from letters named by `names`.
std::vector<long> abelian(const std::vector<std::string>& w, const std::vector<std::string>& names) {
  std::vector<long> v(names.size(), 0);
  for (const auto& l : w) {
    const bool inv = l.size() > 3 && l.substr(l.size() - 3) == "^-1";
    const std::string base = inv ? l.substr(0, l.size() - 3) : l;
    const auto it = std::find(names.begin(), names.end(), base);
    if (it == names.end()) throw Miss{"unexpected letter " + l};
    v[std::size_t(it - names.begin())] += inv ? -1 : 1;
  }
  return v;
}

// BS(1,n) as upper triangular rational matrices a = [[1,1],[0,1]],
// b = [[1/n,0],[0,1]]; faithful, and a b = b a^n holds.
using Q = boost::rational<cpp_int>;
struct Mat {
  Q a{1}, b{0}, d{1};
  Mat operator*(const Mat& o) const { return {a * o.a, a * o.b + b * o.d, d * o.d}; }
  bool operator==(const Mat& o) const { return a == o.a && b == o.b && d == o.d; }
};

Mat bs_matrix(const std::vector<std::string>& w, int n) {
  Mat m;
  for (const auto& l : w) {
    Mat x;
    if (l == "a") x = {Q(1), Q(1), Q(1)};
    else if (l == "a^-1") x = {Q(1), Q(-1), Q(1)};
    else if (l == "b") x = {Q(1, n), Q(0), Q(1)};
    else if (l == "b^-1") x = {Q(n), Q(0), Q(1)};
    else throw Miss{"unexpected letter " + l};
    m = m * x;
  }
  return m;
}

Word random_word(const Group& g, std::mt19937& rng, std::size_t len) {
  const auto& gens = g.moving_generators();
  Word w;
  for (std::size_t i = 0; i < len; ++i) w.letters.push_back(gens[rng() % gens.size()]);
  return w;
}

Word concat(std::initializer_list<Word> parts) {
  Word out;
  for (const auto& p : parts) out.letters.insert(out.letters.end(), p.letters.begin(), p.letters.end());
  return out;
}

GMachineSpec random_machine(GroupPtr g, std::mt19937& rng, std::size_t states, std::size_t symbols,
                            bool with_accept) {
  std::vector<std::string> labels, names;
  for (std::size_t i = 0; i < symbols; ++i) labels.push_back(std::to_string(i));
  for (std::size_t i = 0; i < states; ++i) names.push_back("q" + std::to_string(i));
  std::vector<bool> acc(states, false);
  if (with_accept) acc[states - 1] = true;
  auto m = make_machine(g, Alphabet(labels), 0, names, acc);
  for (Symbol a = 0; a < symbols; ++a)
    for (State q = 0; q < states; ++q)
      m.rule(a, q) = Transition{Symbol(rng() % symbols), State(rng() % states), GenId(rng() % g->generator_count())};
  return m;
}

Pattern random_pattern(const Group& g, std::mt19937& rng, std::size_t symbols, std::size_t radius) {
  Pattern p;
  for (const auto& e : ball(g, radius).elements)
    if (rng() % 2) p.set(e, Symbol(rng() % symbols));
  return p;
}

GroupPtr bs12() { return make_baumslag_solitar(2); }

PatternCoding coding(const Group& g, const std::vector<std::pair<std::string, Symbol>>& entries) {
  PatternCoding c;
  for (const auto& [w, s] : entries) c.entries.push_back({parse_word(g, w), s});
  return c;
}

// ---------------------------------------------------------------------------

void ac1() {
  auto bs = bs12();
  auto c1 = coding(*bs, {{"", 0}, {"b", 1}, {"a", 1}, {"a b", 0}, {"b a a", 0}, {"b a", 1}});
  auto c2 = coding(*bs, {{"", 0}, {"a a", 1}, {"b a b^-1 a", 1}, {"a", 1}, {"b a", 1}, {"a b a b^-1", 0}});
  const auto r1 = check_consistency(*bs, c1);
  expect(r1.consistent, "first coding must be consistent");
  expect(r1.pattern.size() == 5, "first coding support must have 5 cells");
  // Support size from the matrix model: distinct elements among the words.
  std::vector<Mat> distinct;
  for (const auto& e : c1.entries) {
    Mat m = bs_matrix(letters_of(*bs, e.word), 2);
    if (std::find(distinct.begin(), distinct.end(), m) == distinct.end()) distinct.push_back(m);
  }
  expect(distinct.size() == 5, "matrix model disagrees on support size");
  const auto r2 = check_consistency(*bs, c2);
  expect(!r2.consistent, "second coding must be inconsistent");
  const auto u = letters_of(*bs, r2.witness.first), v = letters_of(*bs, r2.witness.second);
  const auto abab = letters_of("a b a b^-1"), baba = letters_of("b a b^-1 a");
  expect(bs_matrix(u, 2) == bs_matrix(v, 2), "witness words differ in G");
  expect(bs_matrix(u, 2) == bs_matrix(abab, 2) && bs_matrix(v, 2) == bs_matrix(baba, 2),
         "witness is not (abab^-1, bab^-1a) up to =_G");
}

struct Kind {
  std::string name;
  GroupPtr g;
  std::vector<Word> relators;
  bool abelian = false;
};

std::vector<Kind> kinds() {
  std::vector<Kind> out;
  auto f2 = make_free_group(2);
  out.push_back({"free", f2, {}, false});
  auto z3 = make_free_abelian_group(3);
  out.push_back({"free_abelian", z3, {}, true});
  auto bs = bs12();
  out.push_back({"bs", bs, {parse_word(*bs, "a b a^-1 a^-1 b^-1")}, false});
  // S3 with every non-identity element as a generator.
  std::vector<std::vector<std::size_t>> s3 = {{0, 1, 2, 3, 4, 5}, {1, 2, 0, 4, 5, 3}, {2, 0, 1, 5, 3, 4},
                                              {3, 5, 4, 0, 2, 1}, {4, 3, 5, 1, 0, 2}, {5, 4, 3, 2, 1, 0}};
  auto fin = make_finite_group(s3);
  std::vector<Word> fin_rel;
  // Relators g_i g_j (g_i g_j)^-1 from the table, over the generator labels.
  for (std::size_t i = 1; i < 6; ++i)
    for (std::size_t j = 1; j < 6; ++j) {
      Word w;
      w.letters = {GenId(i), GenId(j)};
      const std::size_t k = s3[i][j];
      if (k != 0) w.letters.push_back(fin->inverse(GenId(k)));
      fin_rel.push_back(w);
    }
  out.push_back({"finite", fin, fin_rel, false});
  auto dp = make_direct_product({make_free_group(1), make_free_abelian_group(1)});
  std::vector<Word> dp_rel;
  {
    const auto& gens = dp->moving_generators();
    // Commutators across the two factors.
    dp_rel.push_back(Word{{gens[0], gens[2], dp->inverse(gens[0]), dp->inverse(gens[2])}});
  }
  out.push_back({"direct_product", dp, dp_rel, false});
  auto fp = make_free_product({make_finite_group({{0, 1}, {1, 0}}), make_free_abelian_group(1)});
  out.push_back({"free_product", fp, {Word{{fp->moving_generators()[0], fp->moving_generators()[0]}}}, false});
  auto rw = make_rewriting_group({"x", "y"}, {{"y x", "x y"}, {"y^-1 x", "x y^-1"}, {"y x^-1", "x^-1 y"},
                                             {"y^-1 x^-1", "x^-1 y^-1"}});
  out.push_back({"rewriting", rw, {parse_word(*rw, "x y x^-1 y^-1")}, true});
  return out;
}

void ac2() {
  std::mt19937 rng(2024);
  for (const auto& k : kinds()) {
    const Group& g = *k.g;
    for (int i = 0; i < 1000; ++i) {
      const Word u = random_word(g, rng, 1 + rng() % 10);
      Word id;
      switch (i % 3) {
        case 0:
          id = concat({u, g.inverse_word(u)});
          break;
        case 1:
          if (!k.relators.empty()) {
            const Word& r = k.relators[rng() % k.relators.size()];
            id = concat({u, rng() % 2 ? r : g.inverse_word(r), g.inverse_word(u)});
          } else {
            id = concat({u, g.inverse_word(u)});
          }
          break;
        default:
          if (k.abelian) {
            const Word v = random_word(g, rng, 1 + rng() % 6);
            id = concat({u, v, g.inverse_word(u), g.inverse_word(v)});
          } else {
            const Word v = random_word(g, rng, rng() % 6);
            id = concat({v, u, g.inverse_word(u), g.inverse_word(v)});
          }
      }
      expect(solve_word_problem(g, id), k.name + ": identity rejected: " + format_word(g, id));
    }
  }
  auto f2 = make_free_group(2);
  for (int i = 0; i < 1000; ++i) {
    Word w = random_word(*f2, rng, 1 + rng() % 12);
    if (free_reduce(letters_of(*f2, w)).empty()) continue;
    expect(!solve_word_problem(*f2, w), "free group: non-trivial word accepted: " + format_word(*f2, w));
  }
}

// Breadth-first ball sizes over independent representations.
std::size_t bfs_f2(std::size_t n) {
  std::set<std::vector<std::string>> seen{{}};
  std::vector<std::vector<std::string>> frontier{{}};
  for (std::size_t d = 0; d < n; ++d) {
    std::vector<std::vector<std::string>> next;
    for (const auto& w : frontier)
      for (const char* l : {"a", "a^-1", "b", "b^-1"}) {
        auto v = w;
        v.push_back(l);
        v = free_reduce(v);
        if (seen.insert(v).second) next.push_back(v);
      }
    frontier = std::move(next);
  }
  return seen.size();
}

std::size_t bfs_z2(std::size_t n) {
  std::set<std::pair<long, long>> seen{{0, 0}};
  std::vector<std::pair<long, long>> frontier{{0, 0}};
  for (std::size_t d = 0; d < n; ++d) {
    std::vector<std::pair<long, long>> next;
    for (auto [x, y] : frontier)
      for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}})
        if (seen.insert({x + dx, y + dy}).second) next.push_back({x + dx, y + dy});
    frontier = std::move(next);
  }
  return seen.size();
}

void ac3() {
  auto f2 = make_free_group(2);
  std::size_t pow3 = 1;
  for (std::size_t n = 0; n <= 8; ++n, pow3 *= 3) {
    const std::size_t closed = 2 * pow3 - 1;
    expect(bfs_f2(n) == closed, "F2 closed form fails the oracle at n=" + std::to_string(n));
    expect(ball(*f2, n).size() == closed, "F2 |B_" + std::to_string(n) + "|");
  }
  auto z2 = make_free_abelian_group(2);
  for (std::size_t n = 0; n <= 20; ++n) {
    const std::size_t closed = 2 * n * n + 2 * n + 1;
    expect(bfs_z2(n) == closed, "Z2 closed form fails the oracle at n=" + std::to_string(n));
    expect(ball(*z2, n).size() == closed, "Z2 |B_" + std::to_string(n) + "|");
  }
}

std::vector<GroupPtr> machine_groups() {
  return {make_free_abelian_group(1), make_free_abelian_group(2), make_free_group(2), bs12()};
}

void ac4() {
  std::mt19937 rng(4);
  for (const auto& g : machine_groups())
    for (int i = 0; i < 100; ++i) {
      const auto m = random_machine(g, rng, 2 + rng() % 3, 2 + rng() % 2, false);
      const Pattern p = random_pattern(*g, rng, m.alphabet.size(), 1);
      expect(fixed_moving_equivalent(m, p, 500), "not equivalent on machine " + std::to_string(i));
    }
}

std::string ac5() {
  std::ostringstream note;
  for (const auto& g : machine_groups()) {
    const PathMachine pm = build_m_path(g);
    MachineConfig c = initial_config(pm.machine, Pattern{});
    // Independent path model: the ordered list of marked cells.
    std::vector<Element> path;
    std::set<Element> on_path;
    std::size_t longest = 0;
    for (std::size_t step = 1; step <= 100000; ++step) {
      const Element at = c.head;
      const bool was = pm.code.marked(c.tape.get(at));
      step_moving(pm.machine, c);
      const bool now = pm.code.marked(c.tape.get(at));
      if (was == now) continue;
      if (now) {
        if (path.empty()) {
          expect(at.is_identity(), "path not rooted at the origin");
        } else {
          const Element rel = g->relative(path.back(), at);
          bool adjacent = false;
          for (GenId s : g->moving_generators()) adjacent |= rel == g->canonical(Word{s});
          expect(adjacent, "new mark not adjacent to the tip");
        }
        expect(on_path.insert(at).second, "path revisits a cell");
        path.push_back(at);
      } else {
        expect(!path.empty() && path.back() == at, "erased cell is not the tip");
        on_path.erase(at);
        path.pop_back();
      }
      longest = std::max(longest, path.size());
    }
    // Full-tape agreement at the end.
    std::size_t marked = 0;
    for (const auto& [e, s] : c.tape.cells()) marked += pm.code.marked(s);
    expect(marked == path.size(), "tape marks disagree with the path model");
    expect(longest >= 200, "path length stayed below 200");
    note << longest << " ";
  }
  return "longest paths " + note.str();
}

bool covers_before_increment(GroupPtr g, std::size_t n, std::size_t budget) {
  auto vm = build_m_visit(g);
  std::set<Element> seen;
  bool done = false, covered = false;
  // Target ball from an independent BFS over the group operation.
  std::set<Element> target{g->identity()};
  std::vector<Element> frontier{g->identity()};
  for (std::size_t d = 0; d < n; ++d) {
    std::vector<Element> next;
    for (const auto& e : frontier)
      for (GenId s : g->moving_generators()) {
        Element f = g->multiply(e, s);
        if (target.insert(f).second) next.push_back(f);
      }
    frontier = std::move(next);
  }
  run_multihead(vm.spec, Pattern{}, budget, [&](const MultiHeadConfig& c) {
    if (done) return;
    const std::size_t v = visit_counter_value(c);
    if (v == n) seen.insert(c.heads[VisitMachine::kSearch]);
    if (v > n) {
      done = true;
      covered = std::all_of(target.begin(), target.end(), [&](const Element& e) { return seen.count(e) > 0; });
    }
  });
  return done && covered && target.size() == (n == 2 ? 13u : 5u);
}

void ac6() {
  expect(covers_before_increment(make_free_abelian_group(2), 2, 400000), "Z2 B_2 not covered");
  expect(covers_before_increment(make_free_group(2), 1, 400000), "F2 B_1 not covered");
}

std::string ac7() {
  auto z = make_free_abelian_group(1);
  auto target = make_generated_group(z, {parse_word(*z, "a a"), parse_word(*z, "a")}, {"A", "a"});
  // a -> A a^-1, a^-1 -> a^-1: both ways of reaching the neighbours.
  const std::vector<Word> gamma = {Word{}, parse_word(*target, "A a^-1"), parse_word(*target, "a^-1")};
  const std::size_t max_gamma = 2, budget = 1000, scaled = budget * max_gamma + budget;
  std::mt19937 rng(7);
  std::size_t accepted = 0;
  for (int i = 0; i < 20; ++i) {
    const auto m = random_machine(z, rng, 3, 2, true);
    const auto rt = retarget_generators(m, target, gamma);
    for (int k = 0; k < 50; ++k) {
      const Pattern p = random_pattern(*z, rng, 2, 4);
      const auto a = run_accepts(m, p, budget);
      const auto b = run_accepts(rt, p, scaled);
      expect(a.accepted == b.accepted, "verdicts differ for machine " + std::to_string(i));
      if (!a.accepted) expect(!run_accepts(m, p, scaled).accepted, "original accepts between budgets");
      if (a.accepted) expect(b.steps >= a.steps, "retargeted run is faster");
      accepted += a.accepted;
    }
  }
  return std::to_string(accepted) + "/1000 accepting";
}

void ac8() {
  auto z = make_free_abelian_group(1);
  const PatternCoding c0 = coding(*z, {{"a", 1}});
  CodingEnumeration one = [&](std::size_t n) -> std::optional<PatternCoding> {
    if (n == 0) return c0;
    return std::nullopt;
  };
  // Brute-force C_0: every word of length <= 1 exactly once, extending c0.
  const std::vector<std::string> words = {"", "a", "a^-1"};
  std::set<std::set<std::pair<std::string, Symbol>>> c_zero;
  for (Symbol x = 0; x < 2; ++x)
    for (Symbol y = 0; y < 2; ++y) c_zero.insert({{"", x}, {"a", 1}, {"a^-1", y}});
  // Every coding with entries over words of length <= 1: subsets of the 6 entries.
  std::vector<std::pair<std::string, Symbol>> entries;
  for (const auto& w : words)
    for (Symbol s = 0; s < 2; ++s) entries.push_back({w, s});
  for (unsigned mask = 0; mask < 64; ++mask) {
    std::set<std::pair<std::string, Symbol>> chosen;
    std::vector<std::pair<std::string, Symbol>> list;
    for (unsigned i = 0; i < 6; ++i)
      if (mask >> i & 1) {
        chosen.insert(entries[i]);
        list.push_back(entries[i]);
      }
    const bool want = c_zero.count(chosen) > 0;
    expect(decidable_completion_contains(*z, one, coding(*z, list)) == want,
           "membership differs for mask " + std::to_string(mask));
  }
  // Windowed admissibility of the completed family against the original.
  auto to_set = [&](const PatternCoding& c) {
    return set_pattern_from(check_consistency(*z, c).pattern, 2);
  };
  std::vector<SetPattern> original{to_set(c0)}, completed;
  for (const auto& c : c_zero) {
    std::vector<std::pair<std::string, Symbol>> list(c.begin(), c.end());
    completed.push_back(to_set(coding(*z, list)));
  }
  const Alphabet bits({"0", "1"});
  SubshiftSpec x_orig{bits, z, finite_family(original)}, x_done{bits, z, finite_family(completed)};
  const auto b2 = ball(*z, 2).elements;
  const std::size_t radius = 2 + 2 * coding_length(c0);
  for (unsigned mask = 0; mask < (1u << b2.size()); ++mask) {
    Pattern p;
    for (std::size_t i = 0; i < b2.size(); ++i) p.set(b2[i], Symbol(mask >> i & 1));
    expect(extendable(p, x_orig, radius) == extendable(p, x_done, radius),
           "admissibility differs for pattern " + std::to_string(mask));
  }
}

// Group elements as independent values: reduced letters (free) or vectors (abelian).
using Key = std::vector<std::string>;

Key key_of(const Group& g, const std::string& printed, bool free) {
  auto w = letters_of(printed);
  if (free) return free_reduce(w);
  std::vector<std::string> names;
  for (GenId s : g.moving_generators()) {
    const std::string l = g.label_of(s);
    if (l.find("^-1") == std::string::npos) names.push_back(l);
  }
  Key k;
  for (long v : abelian(w, names)) k.push_back(std::to_string(v));
  return k;
}

std::set<Key> oracle_ball(const Group& g, const Key& center_key, const std::string& center, std::size_t r,
                          bool free) {
  std::set<Key> out;
  std::vector<std::string> gens;
  for (GenId s : g.moving_generators()) gens.push_back(g.label_of(s));
  std::set<std::vector<std::string>> words{{}};
  std::vector<std::vector<std::string>> frontier{{}};
  out.insert(center_key);
  for (std::size_t d = 0; d < r; ++d) {
    std::vector<std::vector<std::string>> next;
    for (const auto& w : frontier)
      for (const auto& l : gens) {
        auto v = w;
        v.push_back(l);
        if (words.insert(v).second) next.push_back(v);
        std::string printed = center;
        for (const auto& x : v) printed += " " + x;
        out.insert(key_of(g, printed, free));
      }
    frontier = std::move(next);
  }
  return out;
}

void ac9() {
  std::vector<std::pair<GroupPtr, bool>> groups = {
      {make_free_abelian_group(1), false}, {make_free_abelian_group(2), false}, {make_free_group(2), true}};
  for (const auto& [g, free] : groups)
    for (std::size_t n = 0; n <= 2; ++n) {
      const auto s = disjoint_ball_sequences(*g, n);
      const auto again = disjoint_ball_sequences(*g, n);
      expect(s.g == again.g && s.h == again.h, "sequences not deterministic");
      expect(s.g.size() == n + 1 && s.h.size() == n + 1, "wrong sequence length");
      std::map<Key, int> owner;
      int id = 0;
      for (std::size_t k = 0; k <= n; ++k)
        for (const Element* c : {&s.g[k], &s.h[k]}) {
          const std::string printed = format_element(*g, *c);
          for (const auto& e : oracle_ball(*g, key_of(*g, printed, free), printed, k, free)) {
            expect(!owner.count(e), "balls intersect at n=" + std::to_string(n));
            owner[e] = id;
          }
          ++id;
        }
    }
}

// The three defining families of Y_n on the interior B_{r-4n}.
bool delone_oracle(const Group& g, const Pattern& y, std::size_t n, std::size_t radius, std::string* why) {
  const std::size_t inner = radius - 4 * n;
  auto interior = ball(g, inner).elements;
  auto b4 = ball(g, 4 * n - 1).elements;
  auto bn = ball(g, n).elements;
  auto in_interior = [&](const Element& e) { return element_length(g, e) <= inner; };
  for (const auto& c : interior) {
    bool inside = true, has_one = false;
    for (const auto& b : b4) {
      Element e = g.multiply(c, b);
      if (!in_interior(e)) {
        inside = false;
        break;
      }
      if (*y.get(e) == 1) has_one = true;
    }
    if (inside && !has_one) {
      *why = "a ball of radius 4n-1 without a 1";
      return false;
    }
    if (*y.get(c) != 1) continue;
    for (const auto& b : bn) {
      if (b.is_identity()) continue;
      Element e = g.multiply(c, b);
      if (in_interior(e) && *y.get(e) != 2) {
        *why = "a 1 without its ring of 2s";
        return false;
      }
    }
  }
  std::map<Element, int> comp;
  int next = 0;
  for (const auto& c : interior) {
    Symbol s = *y.get(c);
    if ((s != 1 && s != 2) || comp.count(c)) continue;
    int ones = 0;
    std::vector<Element> stack{c};
    comp[c] = next;
    while (!stack.empty()) {
      Element e = stack.back();
      stack.pop_back();
      if (*y.get(e) == 1) ++ones;
      for (GenId gen : g.moving_generators()) {
        Element f = g.multiply(e, gen);
        if (!in_interior(f) || comp.count(f)) continue;
        Symbol t = *y.get(f);
        if (t != 1 && t != 2) continue;
        comp[f] = next;
        stack.push_back(f);
      }
    }
    if (ones >= 2) {
      *why = "two 1s joined by 2s";
      return false;
    }
    ++next;
  }
  return true;
}

void ac10() {
  auto z = make_free_abelian_group(1);
  for (const auto& g : {z, make_free_abelian_group(2), make_free_group(2)})
    for (std::size_t n : {1u, 2u}) {
      const std::size_t r = 8 * n;
      // The interior window B_{r-4n} is all the families are judged on.
      const Pattern y = greedy_delone_configuration(g, n, r, r - 4 * n);
      std::string why;
      expect(delone_oracle(*g, y, n, r, &why), "n=" + std::to_string(n) + ": " + why);
    }
  const Pattern y = greedy_delone_configuration(z, 1, 8);
  const GenId right = *z->find_generator("a");
  for (long k = -8; k <= 8; ++k) {
    const long m = ((k % 4) + 4) % 4;
    const Symbol want = m == 0 ? 1 : m == 2 ? 0 : 2;
    const Element e = k >= 0 ? z->multiply(Element{}, right, k) : z->multiply(Element{}, z->inverse(right), -k);
    expect(y.get(e) == want, "Z period-4 reference differs at " + std::to_string(k));
  }
}

std::vector<std::string> xtime_labels(const Group& g, const std::vector<Symbol>& xs) {
  const Alphabet a = xtime_alphabet(g);
  std::vector<std::string> out;
  for (Symbol s : xs) out.push_back(a.label(s));
  return out;
}

// Literal concatenation of the blocks.
std::vector<std::string> eager_xtime(const Group& g, std::function<std::size_t(std::size_t)> schedule,
                                     std::function<std::size_t(std::size_t)> time, std::size_t length) {
  std::vector<std::string> gens;
  for (GenId s : g.moving_generators()) gens.push_back(g.label_of(s));
  std::vector<std::string> out{"⋆"};
  for (std::size_t n = 1; out.size() < length; ++n) {
    out.push_back("⊕");
    std::vector<std::vector<std::string>> words{{}};
    for (std::size_t len = 0; len <= schedule(n) && out.size() < length; ++len) {
      for (const auto& u : words) {
        for (const auto& l : u) out.push_back(l);
        out.push_back("▷");
        for (std::size_t i = 0; i < time(n) && out.size() < length + 1; ++i) out.push_back("•");
        for (auto it = u.rbegin(); it != u.rend(); ++it) out.push_back(invert_letter(*it));
        if (out.size() >= length) break;
      }
      std::vector<std::vector<std::string>> longer;
      for (const auto& u : words)
        for (const auto& l : gens) {
          auto v = u;
          v.push_back(l);
          longer.push_back(v);
        }
      words = std::move(longer);
    }
  }
  out.resize(length);
  return out;
}

void ac11() {
  std::uint64_t three = 1;
  for (int i = 0; i < 31; ++i) three *= 3;
  expect(time_value(1) == 1, "time(1)");
  expect(time_value(2) == 128, "time(2)");
  expect(time_value(3) == BigNat(three), "time(3)");

  auto z = make_free_abelian_group(1);
  std::istringstream printed(
      "⋆ ⊕ ▷ • • a ▷ • • A A ▷ • • a ⊕ ▷ • • • a ▷ • • • A A ▷ • • • a a a ▷ • • • A A a A ▷ • • • "
      "a A A a ▷ • • • A a A A ▷ • • • a a");
  std::vector<std::string> want;
  for (std::string t; printed >> t;) want.push_back(t == "A" ? "a^-1" : t);
  const auto p = XTimeParams::worked_example();
  expect(xtime_labels(*z, xtime_prefix(*z, p, want.size())) == want, "worked example prefix");

  auto z2 = make_free_abelian_group(2);
  const auto d = XTimeParams::defaults();
  const auto eager = eager_xtime(*z2, [](std::size_t n) { return 4 * n; },
                                 [](std::size_t n) { return n == 1 ? std::size_t(1) : std::size_t(128); }, 10000);
  const Alphabet a = xtime_alphabet(*z2);
  for (std::size_t i = 0; i < eager.size(); ++i)
    expect(a.label(xtime_symbol(*z2, d, BigNat(i))) == eager[i], "lazy symbol differs at " + std::to_string(i));
}

GMachineSpec z_machine(GroupPtr z, const std::string& kind) {
  const GenId right = *z->find_generator("a");
  if (kind == "accept-immediately") return make_machine(z, Alphabet({"_", "1"}), 0, {"q0"}, {true});
  auto m = make_machine(z, Alphabet({"_", "1"}), 0, {"q0", "acc"}, {false, true});
  for (Symbol a = 0; a < 2; ++a) m.rule(a, 0) = Transition{a, State(kind == "move-right-then-accept" ? 1 : 0), right};
  return m;
}

// Every translate of every forbidden pattern that fits inside the pattern.
bool full_scan(const DominoInstance& inst, const Pattern& w, std::string* why) {
  const Group& g = *inst.group;
  if (w.get(g.identity()) != inst.origin_symbol) {
    *why = "origin symbol missing";
    return false;
  }
  for (const auto& f : inst.forbidden)
    for (const auto& [cell, _] : w.cells()) {
      const Element anchor = g.multiply(cell, g.inverse(f.cells.at(0).offset));
      bool all = true;
      for (const auto& c : f.cells) {
        auto s = w.get(g.multiply(anchor, c.offset));
        if (!s || !c.allowed.test(*s)) {
          all = false;
          break;
        }
      }
      if (all) {
        *why = "forbidden pattern " + f.tag + " occurs";
        return false;
      }
    }
  return true;
}

std::string ac12() {
  auto z = make_free_abelian_group(1);
  const std::size_t radius = 4, height = 6, budget = 20000000;
  std::ostringstream note;
  for (std::string kind : {"accept-immediately", "move-right-then-accept"}) {
    const auto inst = compile_domino(z, z_machine(z, kind), A1Mode::windowed(8));
    const auto r = verify_reduction_window(inst, radius, height, budget);
    expect(r.verdict == WindowVerdict::kUnsatisfiable, kind + " is not unsatisfiable");
    note << kind << " " << r.nodes << " nodes; ";
  }
  const auto loop = z_machine(z, "loop-forever");
  const auto inst = compile_domino(z, loop, A1Mode::windowed(8));
  const auto r = verify_reduction_window(inst, radius, height, budget);
  expect(r.verdict == WindowVerdict::kSatisfiable, "loop-forever is not satisfiable");
  std::string why;
  expect(r.witness.size() == (2 * radius + 1) * (height + 1), "witness does not fill the window");
  expect(full_scan(inst, r.witness, &why), "search witness: " + why);
  expect(full_scan(inst, domino_run_witness(inst, loop, radius, height), &why), "run witness: " + why);
  note << "loop-forever " << r.nodes << " nodes";
  return note.str();
}

// A window of U built from the rules' meaning: levels follow x~ above the
// star, plus levels carry a greedy Delone configuration, dot/play levels
// copy the level below, generator levels translate it.
Pattern u_window(const UShift& u, const XTimeParams& p, std::size_t radius, std::size_t height) {
  const Group& g = *u.levels.base;
  const auto cells = ball(g, radius).elements;
  using Layer = std::function<Symbol(const Element&)>;
  Layer current = [](const Element&) { return Symbol(0); };
  std::size_t plus = 0;
  Pattern w;
  for (std::size_t z = 0; z <= height; ++z) {
    const Symbol x = xtime_symbol(g, p, BigNat(z));
    if (x == kXPlus) {
      ++plus;
      auto y = std::make_shared<Pattern>(greedy_delone_configuration(u.levels.base, plus, radius + height + 8));
      current = [y](const Element& e) { return y->get(e).value_or(0); };
    } else if (x >= kXFirstGen) {
      const GenId s = g.moving_generators()[x - kXFirstGen];
      const Element s_inv = g.canonical(Word{g.inverse(s)});
      Layer below = current;
      current = [below, s_inv, &g](const Element& e) { return below(g.multiply(e, s_inv)); };
    } else if (x == kXStar) {
      current = [](const Element&) { return Symbol(0); };
    }
    for (const auto& e : cells) w.set(u.levels.at(e, std::int64_t(z)), u.encode(x, current(e)));
  }
  return w;
}

bool admissible(const SubshiftSpec& spec, const Pattern& p, std::string* why) {
  std::vector<Element> cells;
  Assignment a;
  for (const auto& [e, s] : p.cells()) {
    cells.push_back(e);
    a.push_back(std::int32_t(s));
  }
  auto cw = compile_window(std::make_shared<Window>(spec.group, cells), spec);
  return assignment_admissible(cw, a, why);
}

void ac13() {
  auto z = make_free_abelian_group(1);
  const GenId right = *z->find_generator("a");
  auto t = make_machine(z, Alphabet({"_", "0", "1"}), 0, {"q0", "look", "acc"}, {false, false, true});
  for (Symbol a = 0; a < 3; ++a) t.rule(a, 0) = Transition{a, 1, right};
  t.rule(2, 1) = Transition{2, 2, 0};
  const Alphabet a({"0", "1"});
  const auto b = build_simulation(z, t, a, 0, XTimeParams::worked_example(), 4, 1);
  const std::size_t sigma = b.wrapped.work.size();
  std::size_t a2 = 0;
  for (const auto& p : b.transition) a2 += p.tag == "A2";
  expect(a2 == sigma * (sigma - 1), "|A2|");
  // The ending family plays A4: one pattern per work symbol, exactly the symbols in state k.
  expect(b.ending.size() == sigma, "|A4| / ending family size");
  std::set<Symbol> covered_work;
  for (const auto& p : b.ending) {
    expect(p.cells.size() == 1, "ending pattern is not a single cell");
    std::set<Symbol> works;
    for (Symbol s = 0; s < b.final_alphabet.size(); ++s) {
      const auto x = b.decode(s);
      if (p.cells[0].allowed.test(s)) {
        expect(x.state == b.k, "ending pattern allows a non-final state");
        works.insert(x.work);
      }
    }
    expect(works.size() == 1, "ending pattern spans several work symbols");
    covered_work.insert(*works.begin());
  }
  expect(covered_work.size() == sigma, "ending family misses a work symbol");
  // phi is total on the final alphabet and reads the star level.
  expect(b.phi.table.size() == b.final_alphabet.size(), "phi table size");
  for (Symbol s = 0; s < b.final_alphabet.size(); ++s) {
    const auto x = b.decode(s);
    const Symbol out = b.phi.apply_local({s});
    expect(out < a.size(), "phi leaves the alphabet");
    expect(out == (x.stream == kXStar ? x.read : b.abar), "phi value");
  }

  struct Case {
    GroupPtr g;
    XTimeParams p;
    std::size_t radius, height, level;
    bool shift;
  };
  auto z2 = make_free_abelian_group(2);
  const std::vector<Case> cases = {{z, XTimeParams::worked_example(), 6, 16, 3, false},
                                   {z2, XTimeParams::worked_example(), 2, 5, 5, true},
                                   {z, XTimeParams::defaults(), 4, 4, 4, true}};
  for (const auto& c : cases) {
    const std::string rule = c.shift ? "shift" : "copy";
    const UShift u = build_u_rules(c.g, c.p, c.height);
    const Pattern w = u_window(u, c.p, c.radius, c.height);
    std::string why;
    expect(admissible(u.spec(), w, &why), "constructed " + rule + " window rejected: " + why);
    Pattern bad;
    bool changed = false;
    for (const auto& [cell, s] : w.cells()) {
      Symbol out = s;
      const Symbol x = u.stream(s);
      const bool right_kind = c.shift ? x >= kXFirstGen : (x == kXDot || x == kXPlay);
      if (!changed && right_kind && cell == u.levels.at(c.g->identity(), std::int64_t(c.level))) {
        out = u.encode(x, (u.layer(s) + 1) % 3);
        changed = true;
      }
      bad.set(cell, out);
    }
    expect(changed, "no " + rule + " level to mutate");
    std::string reason;
    expect(!admissible(u.spec(), bad, &reason), "mutated " + rule + " window accepted");
    expect(reason.find(rule) != std::string::npos, "mutated " + rule + " window rejected for: " + reason);
  }
}

std::string ac14() {
  auto bs = bs12();
  std::mt19937 rng(14);
  std::size_t consistent = 0, inconsistent = 0, accepted = 0;
  for (int t = 0; consistent < 50; ++t) {
    expect(t < 10000, "too few consistent codings generated");
    const auto m = random_machine(bs, rng, 3, 2, true);
    PatternCoding c;
    const std::size_t entries = 1 + rng() % 4;
    for (std::size_t k = 0; k < entries; ++k)
      c.entries.push_back({random_word(*bs, rng, rng() % 4), Symbol(rng() % 2)});
    // Consistency from the matrix model.
    bool ok = true;
    for (std::size_t i = 0; i < c.entries.size(); ++i)
      for (std::size_t j = i + 1; j < c.entries.size(); ++j)
        if (c.entries[i].symbol != c.entries[j].symbol &&
            bs_matrix(letters_of(*bs, c.entries[i].word), 2) == bs_matrix(letters_of(*bs, c.entries[j].word), 2))
          ok = false;
    const auto sim = simulate_with_balls(m, c, 400);
    expect((sim.outcome == BallOutcome::kInconsistent) == !ok, "inconsistency verdict differs");
    if (!ok) {
      ++inconsistent;
      continue;
    }
    ++consistent;
    Pattern p;
    for (const auto& e : c.entries) p.set(bs->canonical(e.word), e.symbol);
    const auto direct = run_accepts(m, p, 400);
    expect((sim.outcome == BallOutcome::kAccepted) == direct.accepted, "acceptance verdict differs");
    if (direct.accepted) expect(sim.steps == direct.steps, "step counts differ");
    accepted += direct.accepted;
  }
  expect(inconsistent > 0, "no inconsistent coding was sampled");
  return std::to_string(accepted) + "/50 accepting, " + std::to_string(inconsistent) + " inconsistent";
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string title;
    double limit_s;  // 0: no time bound
    std::function<std::string()> run;
  };
  auto plain = [](void (*f)()) {
    return [f] {
      f();
      return std::string();
    };
  };
  const std::vector<Criterion> all = {
      {1, "worked example codings over BS(1,2)", 1, plain(ac1)},
      {2, "word problem identities and free-group controls", 5, plain(ac2)},
      {3, "ball counts for F2 and Z2", 0, plain(ac3)},
      {4, "fixed/moving-head conjugacy", 30, plain(ac4)},
      {5, "M_PATH simple rooted path over 1e5 steps", 0, ac5},
      {6, "M_VISIT covers B_n before the counter moves", 0, plain(ac6)},
      {7, "generator retargeting verdicts", 0, ac7},
      {8, "decidable completion against brute force", 0, plain(ac8)},
      {9, "disjoint ball sequences", 0, plain(ac9)},
      {10, "greedy Delone configurations", 0, plain(ac10)},
      {11, "time and x~ values", 0, plain(ac11)},
      {12, "domino compiler on the three-machine suite", 300, ac12},
      {13, "simulation bundle structure", 0, plain(ac13)},
      {14, "simulate_with_balls against run_accepts", 0, ac14},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      detail = c.run();
    } catch (const Miss& m) {
      ok = false;
      detail = m.what;
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (ok && c.limit_s > 0 && secs > c.limit_s) {
      ok = false;
      detail = "took longer than " + std::to_string(int(c.limit_s)) + " s";
    }
    failed += !ok;
    std::cout << "AC" << std::setw(2) << std::left << c.id << " " << (ok ? "PASS" : "FAIL") << "  " << c.title
              << " (" << std::fixed << std::setprecision(2) << secs << " s)" << (detail.empty() ? "" : ": ")
              << detail << "\n";
  }
  std::cout << (all.size() - std::size_t(failed)) << "/" << all.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
