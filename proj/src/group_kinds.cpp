#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>

#include <boost/multiprecision/cpp_int.hpp>

#include "gshift/errors.hpp"
#include "gshift/group.hpp"

namespace gshift {

namespace {

using BigInt = boost::multiprecision::cpp_int;

// Labels for a rank-r family with formal inverses interleaved: x, x^-1, y, ...
void paired_generators(const std::vector<std::string>& base,
                       std::vector<std::string>& labels,
                       std::vector<std::size_t>& inverses) {
  for (std::size_t i = 0; i < base.size(); ++i) {
    labels.push_back(base[i]);
    labels.push_back(base[i] + "^-1");
    inverses.push_back(2 * i + 1);
    inverses.push_back(2 * i);
  }
}

// Multiplies runs by s^p in a group where the only relations are s s^-1 = 1.
void free_append(std::vector<Syllable>& runs, GenId s, GenId s_inv, std::int64_t p) {
  while (p > 0 && !runs.empty() && runs.back().letter == s_inv) {
    std::int64_t c = std::min(p, runs.back().count);
    runs.back().count -= c;
    p -= c;
    if (runs.back().count == 0) runs.pop_back();
  }
  append_run(runs, s, p);
}

class FreeGroup final : public Group {
 public:
  FreeGroup(std::size_t rank, std::vector<std::string> names) : rank_(rank), names_(names) {
    std::vector<std::string> labels;
    std::vector<std::size_t> inverses;
    paired_generators(names, labels, inverses);
    set_generators(labels, inverses);
  }
  GroupKind kind() const override { return GroupKind::kFree; }
  bool is_finite() const override { return rank_ == 0; }
  bool canonical_is_geodesic() const override { return true; }
  std::optional<std::size_t> order() const override {
    if (rank_ == 0) return 1;
    return std::nullopt;
  }
  nlohmann::json to_json() const override {
    return {{"kind", "free"}, {"rank", rank_}, {"labels", names_}};
  }

 protected:
  Element right_multiply(const Element& g, GenId s, std::int64_t p) const override {
    auto runs = g.runs();
    free_append(runs, s, inverse(s), p);
    return Element(std::move(runs));
  }

 private:
  std::size_t rank_;
  std::vector<std::string> names_;
};

class FreeAbelianGroup final : public Group {
 public:
  FreeAbelianGroup(std::size_t rank, std::vector<std::string> names)
      : rank_(rank), names_(names) {
    std::vector<std::string> labels;
    std::vector<std::size_t> inverses;
    paired_generators(names, labels, inverses);
    set_generators(labels, inverses);
  }
  GroupKind kind() const override { return GroupKind::kFreeAbelian; }
  bool is_finite() const override { return rank_ == 0; }
  bool canonical_is_geodesic() const override { return true; }
  std::optional<std::size_t> order() const override {
    if (rank_ == 0) return 1;
    return std::nullopt;
  }
  nlohmann::json to_json() const override {
    return {{"kind", "free_abelian"}, {"rank", rank_}, {"labels", names_}};
  }

 protected:
  Element right_multiply(const Element& g, GenId s, std::int64_t p) const override {
    std::vector<std::int64_t> v(rank_, 0);
    for (const auto& r : g.runs()) {
      std::size_t axis = (r.letter - 1) / 2;
      v[axis] += (r.letter % 2 == 1) ? r.count : -r.count;
    }
    v[(s - 1) / 2] += (s % 2 == 1) ? p : -p;
    std::vector<Syllable> runs;
    for (std::size_t i = 0; i < rank_; ++i) {
      if (v[i] > 0) runs.push_back({GenId(2 * i + 1), v[i]});
      if (v[i] < 0) runs.push_back({GenId(2 * i + 2), -v[i]});
    }
    return Element(std::move(runs));
  }

 private:
  std::size_t rank_;
  std::vector<std::string> names_;
};

// BS(1,n) acts on Z[1/n]: an element is a pair (t, k) with
// (t1,k1)(t2,k2) = (t1 + n^-k1 t2, k1 + k2), a = (1,0), b = (0,1).
class BaumslagSolitar final : public Group {
 public:
  static constexpr GenId kA = 1, kAi = 2, kB = 3, kBi = 4;

  explicit BaumslagSolitar(std::int64_t n) : n_(n) {
    std::vector<std::string> labels;
    std::vector<std::size_t> inverses;
    paired_generators({"a", "b"}, labels, inverses);
    set_generators(labels, inverses);
  }
  GroupKind kind() const override { return GroupKind::kBaumslagSolitar; }
  bool is_finite() const override { return false; }
  bool canonical_is_geodesic() const override { return false; }
  nlohmann::json to_json() const override { return {{"kind", "bs"}, {"n", n_}}; }

 protected:
  struct Affine {
    BigInt num;       // t = num / n^den
    std::int64_t den = 0;
    std::int64_t k = 0;
  };

  void normalize(Affine& x) const {
    if (n_ == 1) {
      x.den = 0;
      return;
    }
    while (x.den > 0 && x.num % n_ == 0) {
      x.num /= n_;
      --x.den;
    }
    if (x.num == 0) x.den = 0;
  }

  BigInt pow_n(std::int64_t e) const {
    BigInt r = 1;
    for (std::int64_t i = 0; i < e; ++i) r *= n_;
    return r;
  }

  // x := x * s^p
  void apply(Affine& x, GenId s, std::int64_t p) const {
    if (s == kB || s == kBi) {
      x.k += (s == kB) ? p : -p;
      return;
    }
    BigInt delta = (s == kA) ? BigInt(p) : BigInt(-p);
    // add n^-k * delta
    if (n_ == 1) {
      x.num += delta;
      return;
    }
    const std::int64_t shift = x.k;  // n^-k = 1 / n^k
    if (shift > x.den) {
      x.num *= pow_n(shift - x.den);
      x.den = shift;
    }
    x.num += delta * pow_n(x.den - shift);
    normalize(x);
  }

  // b^r a^q b^-p with a^q expanded by a^(q0 + n q1) = a^q0 b^-1 a^q1 b.
  Element encode(const Affine& x) const {
    std::int64_t r = std::max<std::int64_t>({x.den, x.k, 0});
    std::int64_t p = r - x.k;
    BigInt q = x.num * pow_n(r - x.den);
    std::vector<Syllable> runs;
    auto push = [&](GenId s, std::int64_t c) {
      if (c == 0) return;
      GenId inv = inverse(s);
      free_append(runs, s, inv, c);
    };
    auto push_b = [&](std::int64_t c) { c >= 0 ? push(kB, c) : push(kBi, -c); };
    auto push_a = [&](const BigInt& c) {
      if (c > 0) push(kA, static_cast<std::int64_t>(c));
      if (c < 0) push(kAi, static_cast<std::int64_t>(-c));
    };
    push_b(r);
    std::int64_t depth = 0;
    if (n_ > 1) {
      while (abs(q) >= n_) {
        BigInt q0 = q % n_;  // truncating: same sign as q
        push_a(q0);
        push_b(-1);
        ++depth;
        q = (q - q0) / n_;
      }
    }
    push_a(q);
    push_b(depth - p);
    return Element(std::move(runs));
  }

  Affine decode(const Element& g) const {
    Affine x;
    for (const auto& r : g.runs()) apply(x, r.letter, r.count);
    return x;
  }

  // num / n^den with den possibly negative, brought to den >= 0.
  void lift(Affine& x) const {
    if (x.den < 0) {
      x.num *= pow_n(-x.den);
      x.den = 0;
    }
  }

  Element compose(const Element& g, const Element& h) const override {
    if (n_ == 1) return Group::compose(g, h);
    Affine x = decode(g), y = decode(h);
    // x.t + n^-x.k y.t
    y.den += x.k;
    lift(y);
    const std::int64_t den = std::max(x.den, y.den);
    Affine z;
    z.num = x.num * pow_n(den - x.den) + y.num * pow_n(den - y.den);
    z.den = den;
    z.k = x.k + y.k;
    normalize(z);
    return encode(z);
  }

  Element invert(const Element& g) const override {
    if (n_ == 1) return Group::invert(g);
    Affine x = decode(g);
    // (t, k)^-1 = (-n^k t, -k)
    Affine z;
    z.num = -x.num;
    z.den = x.den - x.k;
    z.k = -x.k;
    lift(z);
    normalize(z);
    return encode(z);
  }

  Element right_multiply(const Element& g, GenId s, std::int64_t p) const override {
    Affine x = decode(g);
    apply(x, s, p);
    return encode(x);
  }

 private:
  std::int64_t n_;
};

class FiniteGroup final : public Group {
 public:
  FiniteGroup(std::vector<std::vector<std::size_t>> table, std::vector<std::size_t> gen_elems,
              std::vector<std::string> labels)
      : table_(std::move(table)), elem_labels_(std::move(labels)) {
    const std::size_t m = table_.size();
    if (m == 0) throw MalformedInput("finite group table is empty");
    for (const auto& row : table_) {
      if (row.size() != m) throw MalformedInput("finite group table is not square");
      for (auto v : row)
        if (v >= m) throw MalformedInput("finite group table entry out of range");
    }
    identity_ = m;
    for (std::size_t e = 0; e < m && identity_ == m; ++e) {
      bool ok = true;
      for (std::size_t x = 0; x < m && ok; ++x)
        ok = table_[e][x] == x && table_[x][e] == x;
      if (ok) identity_ = e;
    }
    if (identity_ == m) throw MalformedInput("finite group table has no identity");
    for (std::size_t x = 0; x < m; ++x)
      for (std::size_t y = 0; y < m; ++y)
        for (std::size_t z = 0; z < m; ++z)
          if (table_[table_[x][y]][z] != table_[x][table_[y][z]])
            throw MalformedInput("finite group table is not associative");
    inv_.assign(m, m);
    for (std::size_t x = 0; x < m; ++x)
      for (std::size_t y = 0; y < m; ++y)
        if (table_[x][y] == identity_ && table_[y][x] == identity_) inv_[x] = y;
    for (std::size_t x = 0; x < m; ++x)
      if (inv_[x] == m) throw MalformedInput("finite group table lacks inverses");
    if (elem_labels_.empty()) {
      for (std::size_t x = 0; x < m; ++x) elem_labels_.push_back("e" + std::to_string(x));
    }
    if (elem_labels_.size() != m) throw MalformedInput("finite group label count mismatch");

    if (gen_elems.empty()) {
      for (std::size_t x = 0; x < m; ++x)
        if (x != identity_) gen_elems.push_back(x);
    }
    for (std::size_t i = 0; i < gen_elems.size(); ++i) {
      auto x = gen_elems[i];
      if (x >= m || x == identity_) throw MalformedInput("invalid finite generator");
      if (std::find(gen_elems.begin(), gen_elems.end(), inv_[x]) == gen_elems.end())
        gen_elems.push_back(inv_[x]);
    }
    gen_elem_ = gen_elems;
    std::vector<std::string> glabels;
    std::vector<std::size_t> ginv;
    for (auto x : gen_elems) {
      glabels.push_back(elem_labels_[x]);
      ginv.push_back(std::size_t(
          std::find(gen_elems.begin(), gen_elems.end(), inv_[x]) - gen_elems.begin()));
    }
    set_generators(glabels, ginv);

    // Breadth-first search in generator order yields shortlex-minimal words.
    words_.assign(m, {});
    std::vector<bool> seen(m, false);
    std::deque<std::size_t> queue{identity_};
    seen[identity_] = true;
    while (!queue.empty()) {
      auto x = queue.front();
      queue.pop_front();
      for (std::size_t i = 0; i < gen_elem_.size(); ++i) {
        auto y = table_[x][gen_elem_[i]];
        if (seen[y]) continue;
        seen[y] = true;
        words_[y] = words_[x];
        append_run(words_[y], GenId(i + 1), 1);
        queue.push_back(y);
      }
    }
    for (std::size_t x = 0; x < m; ++x) {
      if (!seen[x]) throw MalformedInput("finite generators do not generate the group");
      index_.emplace(Element(words_[x]), x);
    }
  }
  GroupKind kind() const override { return GroupKind::kFinite; }
  bool is_finite() const override { return true; }
  bool canonical_is_geodesic() const override { return true; }
  std::optional<std::size_t> order() const override { return table_.size(); }
  nlohmann::json to_json() const override {
    std::vector<std::size_t> gens(gen_elem_.begin(), gen_elem_.end());
    return {{"kind", "finite"}, {"table", table_}, {"generators", gens},
            {"labels", elem_labels_}};
  }

 protected:
  Element right_multiply(const Element& g, GenId s, std::int64_t p) const override {
    auto x = index_.at(g);
    p %= std::int64_t(table_.size());
    for (std::int64_t i = 0; i < p; ++i) x = table_[x][gen_elem_[s - 1]];
    return Element(words_[x]);
  }

 private:
  std::vector<std::vector<std::size_t>> table_;
  std::vector<std::string> elem_labels_;
  std::size_t identity_ = 0;
  std::vector<std::size_t> inv_;
  std::vector<std::size_t> gen_elem_;
  std::vector<std::vector<Syllable>> words_;
  std::unordered_map<Element, std::size_t, ElementHash> index_;
};

// Shared plumbing for direct and free products: global generator ids are the
// factors' non-identity generators in factor order.
class ProductBase : public Group {
 public:
  explicit ProductBase(std::vector<GroupPtr> factors) : factors_(std::move(factors)) {
    if (factors_.empty()) throw MalformedInput("product needs at least one factor");
    std::map<std::string, int> seen;
    for (const auto& f : factors_)
      for (GenId s : f->moving_generators()) seen[f->label_of(s)]++;
    std::vector<std::string> labels;
    std::vector<std::size_t> inverses;
    for (std::size_t fi = 0; fi < factors_.size(); ++fi) {
      const auto& f = *factors_[fi];
      std::vector<GenId> to_global(f.generator_count(), 0);
      std::size_t base = labels.size();
      for (GenId s : f.moving_generators()) {
        std::string lab = f.label_of(s);
        if (seen[lab] > 1) lab += "_" + std::to_string(fi);
        to_global[s] = GenId(labels.size() + 1);
        labels.push_back(lab);
        owner_.push_back({fi, s});
      }
      for (GenId s : f.moving_generators()) inverses.push_back(base + (f.inverse(s) - 1));
      to_global_.push_back(std::move(to_global));
    }
    set_generators(labels, inverses);
  }
  std::vector<GroupPtr> factors() const override { return factors_; }
  const std::vector<GenId>& embedding(std::size_t f) const { return to_global_.at(f); }
  bool is_finite() const override {
    for (const auto& f : factors_)
      if (!f->is_finite()) return false;
    return true;
  }
  bool canonical_is_geodesic() const override {
    for (const auto& f : factors_)
      if (!f->canonical_is_geodesic()) return false;
    return true;
  }

 protected:
  std::size_t owner(GenId s) const { return owner_[s - 1].first; }
  GenId local(GenId s) const { return owner_[s - 1].second; }
  GenId global(std::size_t f, GenId s) const { return to_global_[f][s]; }

  std::vector<GroupPtr> factors_;
  std::vector<std::pair<std::size_t, GenId>> owner_;
  std::vector<std::vector<GenId>> to_global_;
};

class DirectProduct final : public ProductBase {
 public:
  using ProductBase::ProductBase;
  GroupKind kind() const override { return GroupKind::kDirectProduct; }
  std::optional<std::size_t> order() const override {
    std::size_t n = 1;
    for (const auto& f : factors_) {
      auto o = f->order();
      if (!o) return std::nullopt;
      n *= *o;
    }
    return n;
  }
  nlohmann::json to_json() const override {
    nlohmann::json fs = nlohmann::json::array();
    for (const auto& f : factors_) fs.push_back(f->to_json());
    return {{"kind", "direct_product"}, {"factors", fs}};
  }

 protected:
  Element right_multiply(const Element& g, GenId s, std::int64_t p) const override {
    std::size_t fi = owner(s);
    std::vector<Syllable> before, mine, after;
    for (const auto& r : g.runs()) {
      std::size_t o = owner(r.letter);
      if (o < fi) before.push_back(r);
      else if (o == fi) mine.push_back({local(r.letter), r.count});
      else after.push_back(r);
    }
    Element e = factors_[fi]->multiply(Element(std::move(mine)), local(s), p);
    for (const auto& r : e.runs()) before.push_back({global(fi, r.letter), r.count});
    before.insert(before.end(), after.begin(), after.end());
    return Element(std::move(before));
  }
};

class FreeProduct final : public ProductBase {
 public:
  using ProductBase::ProductBase;
  GroupKind kind() const override { return GroupKind::kFreeProduct; }
  bool is_finite() const override {
    std::size_t nontrivial = 0;
    for (const auto& f : factors_) {
      auto o = f->order();
      if (!o) return false;
      if (*o > 1) ++nontrivial;
    }
    return nontrivial <= 1;
  }
  nlohmann::json to_json() const override {
    nlohmann::json fs = nlohmann::json::array();
    for (const auto& f : factors_) fs.push_back(f->to_json());
    return {{"kind", "free_product"}, {"factors", fs}};
  }

 protected:
  Element right_multiply(const Element& g, GenId s, std::int64_t p) const override {
    std::size_t fi = owner(s);
    std::vector<Syllable> runs = g.runs();
    std::vector<Syllable> mine;
    // The trailing block belongs to factor fi iff its last run does.
    while (!runs.empty() && owner(runs.back().letter) == fi) {
      mine.insert(mine.begin(), {local(runs.back().letter), runs.back().count});
      runs.pop_back();
    }
    Element e = factors_[fi]->multiply(Element(std::move(mine)), local(s), p);
    for (const auto& r : e.runs()) runs.push_back({global(fi, r.letter), r.count});
    return Element(std::move(runs));
  }
};

class RewritingGroup final : public Group {
 public:
  RewritingGroup(std::vector<std::string> names,
                 std::vector<std::pair<std::string, std::string>> rule_text,
                 std::size_t budget)
      : names_(names), rule_text_(rule_text), budget_(budget) {
    std::vector<std::string> labels;
    std::vector<std::size_t> inverses;
    paired_generators(names, labels, inverses);
    set_generators(labels, inverses);
    for (GenId s : moving_generators()) rules_.push_back({Word{s, inverse(s)}, Word{}});
    for (const auto& [l, r] : rule_text) {
      RewriteRule rule{parse_word(*this, l), parse_word(*this, r)};
      if (rule.rhs.size() > rule.lhs.size())
        throw MalformedInput("rewriting rule '" + l + " -> " + r + "' increases length");
      if (rule.lhs.empty()) throw MalformedInput("rewriting rule with empty left side");
      rules_.push_back(rule);
    }
    spot_check();
  }
  GroupKind kind() const override { return GroupKind::kRewriting; }
  bool is_finite() const override { return false; }
  // A confluent length-nonincreasing system maps geodesics to normal forms
  // that are no longer, so normal forms are geodesic.
  bool canonical_is_geodesic() const override { return true; }
  nlohmann::json to_json() const override {
    nlohmann::json rs = nlohmann::json::array();
    for (const auto& [l, r] : rule_text_) rs.push_back({l, r});
    return {{"kind", "rewriting"}, {"generators", names_}, {"rules", rs}};
  }
  const std::vector<std::string>& warnings() const { return warnings_; }

  Word normalize(Word w) const {
    std::size_t steps = 0;
    std::size_t pos = 0;
    std::size_t max_lhs = 0;
    for (const auto& r : rules_) max_lhs = std::max(max_lhs, r.lhs.size());
    while (pos < w.size()) {
      bool applied = false;
      for (const auto& r : rules_) {
        if (pos + r.lhs.size() > w.size()) continue;
        if (!std::equal(r.lhs.letters.begin(), r.lhs.letters.end(), w.letters.begin() + pos))
          continue;
        if (++steps > budget_)
          throw SolverBudgetExceeded("rewriting did not reach a normal form within budget");
        w.letters.erase(w.letters.begin() + pos, w.letters.begin() + pos + r.lhs.size());
        w.letters.insert(w.letters.begin() + pos, r.rhs.letters.begin(), r.rhs.letters.end());
        pos = pos >= max_lhs ? pos - max_lhs : 0;
        applied = true;
        break;
      }
      if (!applied) ++pos;
    }
    return w;
  }

 protected:
  Element right_multiply(const Element& g, GenId s, std::int64_t p) const override {
    Word w = g.expand();
    w.letters.insert(w.letters.end(), std::size_t(p), s);
    w = normalize(std::move(w));
    std::vector<Syllable> runs;
    for (GenId x : w.letters) append_run(runs, x, 1);
    return Element(std::move(runs));
  }

 private:
  // Bounded critical-pair check: every overlap of two left sides must
  // resolve to a common normal form.
  void spot_check() {
    auto resolve = [&](const Word& a, const Word& b, const std::string& what) {
      try {
        if (normalize(a) != normalize(b))
          warnings_.push_back("unresolved critical pair from " + what + ": " +
                              format_word(*this, a) + " vs " + format_word(*this, b));
      } catch (const SolverBudgetExceeded&) {
        warnings_.push_back("critical pair from " + what + " exceeded the rewrite budget");
      }
    };
    for (std::size_t i = 0; i < rules_.size(); ++i) {
      for (std::size_t j = 0; j < rules_.size(); ++j) {
        const Word& u = rules_[i].lhs;
        const Word& v = rules_[j].lhs;
        std::string what = "rules " + std::to_string(i) + "/" + std::to_string(j);
        for (std::size_t k = 1; k <= std::min(u.size(), v.size()); ++k) {
          if (i == j && k == u.size()) continue;
          if (!std::equal(u.letters.end() - k, u.letters.end(), v.letters.begin())) continue;
          Word left = rules_[i].rhs;
          left.letters.insert(left.letters.end(), v.letters.begin() + k, v.letters.end());
          Word right(std::vector<GenId>(u.letters.begin(), u.letters.end() - k));
          right.letters.insert(right.letters.end(), rules_[j].rhs.letters.begin(),
                               rules_[j].rhs.letters.end());
          resolve(left, right, what);
        }
        if (i != j && v.size() < u.size()) {
          for (std::size_t at = 0; at + v.size() <= u.size(); ++at) {
            if (!std::equal(v.letters.begin(), v.letters.end(), u.letters.begin() + at))
              continue;
            Word right(std::vector<GenId>(u.letters.begin(), u.letters.begin() + at));
            right.letters.insert(right.letters.end(), rules_[j].rhs.letters.begin(),
                                 rules_[j].rhs.letters.end());
            right.letters.insert(right.letters.end(), u.letters.begin() + at + v.size(),
                                 u.letters.end());
            resolve(rules_[i].rhs, right, what);
          }
        }
      }
    }
  }

  std::vector<std::string> names_;
  std::vector<std::pair<std::string, std::string>> rule_text_;
  std::size_t budget_;
  std::vector<RewriteRule> rules_;
  std::vector<std::string> warnings_;
};

std::vector<std::string> default_names(std::size_t rank, bool abelian) {
  std::vector<std::string> names;
  if (abelian && rank == 1) return {"a"};
  if (abelian && rank <= 3) {
    const char* xyz[] = {"x", "y", "z"};
    for (std::size_t i = 0; i < rank; ++i) names.push_back(xyz[i]);
    return names;
  }
  for (std::size_t i = 0; i < rank; ++i) {
    if (!abelian && rank <= 26) names.push_back(std::string(1, char('a' + i)));
    else names.push_back("x" + std::to_string(i + 1));
  }
  return names;
}

class GeneratedGroup final : public Group {
 public:
  GeneratedGroup(GroupPtr base, std::vector<Word> words, std::vector<std::string> names)
      : base_(std::move(base)), words_(std::move(words)), names_(std::move(names)) {
    for (const auto& w : words_) base_->validate(w);
    std::vector<std::string> labels;
    std::vector<std::size_t> inverses;
    paired_generators(names_, labels, inverses);
    set_generators(labels, inverses);
    images_.push_back(Word{});
    for (const auto& w : words_) {
      images_.push_back(w);
      images_.push_back(base_->inverse_word(w));
    }
  }
  GroupKind kind() const override { return GroupKind::kGenerated; }
  bool is_finite() const override { return base_->is_finite(); }
  bool canonical_is_geodesic() const override { return false; }
  std::optional<std::size_t> order() const override { return base_->order(); }
  const Group& element_domain() const override { return base_->element_domain(); }
  nlohmann::json to_json() const override {
    nlohmann::json gens = nlohmann::json::array();
    for (const auto& w : words_) gens.push_back(format_word(*base_, w));
    return {{"kind", "generated"}, {"base", base_->to_json()}, {"generators", gens},
            {"labels", names_}};
  }

 protected:
  Element right_multiply(const Element& g, GenId s, std::int64_t p) const override {
    Element out = g;
    for (std::int64_t i = 0; i < p; ++i) out = base_->multiply(out, images_[s]);
    return out;
  }

 private:
  GroupPtr base_;
  std::vector<Word> words_;
  std::vector<std::string> names_;
  std::vector<Word> images_;
};

std::vector<std::string> check_names(std::size_t rank, std::vector<std::string> labels,
                                     bool abelian) {
  if (labels.empty()) return default_names(rank, abelian);
  if (labels.size() != rank) throw MalformedInput("label count does not match rank");
  return labels;
}

}  // namespace

GroupPtr make_free_group(std::size_t rank, std::vector<std::string> labels) {
  return std::make_shared<FreeGroup>(rank, check_names(rank, std::move(labels), false));
}

GroupPtr make_free_abelian_group(std::size_t rank, std::vector<std::string> labels) {
  return std::make_shared<FreeAbelianGroup>(rank, check_names(rank, std::move(labels), true));
}

GroupPtr make_baumslag_solitar(std::int64_t n) {
  if (n < 1) throw MalformedInput("BS(1,n) needs n >= 1");
  return std::make_shared<BaumslagSolitar>(n);
}

GroupPtr make_finite_group(std::vector<std::vector<std::size_t>> table,
                           std::vector<std::size_t> generator_elements,
                           std::vector<std::string> labels) {
  return std::make_shared<FiniteGroup>(std::move(table), std::move(generator_elements),
                                       std::move(labels));
}

GroupPtr make_direct_product(std::vector<GroupPtr> factors) {
  return std::make_shared<DirectProduct>(std::move(factors));
}

GroupPtr make_free_product(std::vector<GroupPtr> factors) {
  return std::make_shared<FreeProduct>(std::move(factors));
}

std::vector<GenId> factor_embedding(const Group& product, std::size_t factor) {
  const auto* p = dynamic_cast<const ProductBase*>(&product);
  if (!p) throw MalformedInput("factor embedding needs a direct or free product");
  if (factor >= p->factors().size()) throw MalformedInput("no such factor");
  return p->embedding(factor);
}

GroupPtr make_rewriting_group(std::vector<std::string> labels,
                              std::vector<std::pair<std::string, std::string>> rules,
                              std::size_t rewrite_budget) {
  if (labels.empty()) throw MalformedInput("rewriting group needs generators");
  return std::make_shared<RewritingGroup>(std::move(labels), std::move(rules), rewrite_budget);
}

GroupPtr make_generated_group(GroupPtr base, std::vector<Word> generators,
                              std::vector<std::string> labels) {
  if (!base) throw MalformedInput("generated group needs a base group");
  if (generators.empty()) throw MalformedInput("generated group needs generators");
  if (labels.empty())
    for (std::size_t i = 0; i < generators.size(); ++i) labels.push_back("s" + std::to_string(i + 1));
  if (labels.size() != generators.size()) throw MalformedInput("label count does not match generators");
  return std::make_shared<GeneratedGroup>(std::move(base), std::move(generators), std::move(labels));
}

std::vector<std::string> confluence_warnings(const Group& g) {
  if (auto* r = dynamic_cast<const RewritingGroup*>(&g)) return r->warnings();
  return {};
}

}  // namespace gshift
