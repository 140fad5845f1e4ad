#include <boost/multiprecision/cpp_int.hpp>

#include "gshift/errors.hpp"
#include "gshift/reductions.hpp"

namespace gshift {

LevelGroup make_level_group(GroupPtr g) {
  LevelGroup lg;
  lg.base = g;
  lg.product = make_direct_product({g, make_free_abelian_group(1, {"t"})});
  lg.embed = factor_embedding(*lg.product, 0);
  lg.t = factor_embedding(*lg.product, 1)[1];
  return lg;
}

Element LevelGroup::at(const Element& g, std::int64_t level) const {
  Word w;
  for (GenId s : g.expand().letters) w.letters.push_back(embed[s]);
  Element e = product->canonical(w);
  if (level > 0) e = product->multiply(e, t, level);
  if (level < 0) e = product->multiply(e, product->inverse(t), -level);
  return e;
}

// ---------------------------------------------------------------------------

BigNat time_value(std::size_t n) {
  if (n == 0) throw MalformedInput("time(n) needs n >= 1");
  if (n == 1) return 1;
  BigNat exponent = boost::multiprecision::pow(BigNat(n), unsigned(n)) + n + 1;
  // Refuse values with more than 2^24 bits.
  if (exponent * (boost::multiprecision::msb(BigNat(n)) + 1) > (BigNat(1) << 24))
    throw MalformedInput("time(" + std::to_string(n) + ") is too large to write out");
  return boost::multiprecision::pow(BigNat(n), exponent.convert_to<unsigned>());
}

Alphabet xtime_alphabet(const Group& g) {
  std::vector<std::string> labels = {"•", "⋆", "⊕", "▷"};
  for (GenId s : g.moving_generators()) labels.push_back(g.label_of(s));
  return Alphabet(labels);
}

XTimeParams XTimeParams::defaults() {
  return {[](std::size_t n) { return 4 * n; }, [](std::size_t n) { return time_value(n); }};
}

XTimeParams XTimeParams::worked_example() {
  return {[](std::size_t n) { return n; }, [](std::size_t n) { return BigNat(n + 1); }};
}

namespace {

BigNat checked_time(const XTimeParams& p, std::size_t n) {
  BigNat t = p.time_fn(n);
  if (t < 1) throw MalformedInput("time function must be at least 1");
  return t;
}

}  // namespace

BigNat xtime_block_length(const Group& g, const XTimeParams& p, std::size_t n) {
  if (n == 0) throw MalformedInput("blocks are numbered from 1");
  const std::size_t k = g.moving_generators().size();
  const BigNat t = checked_time(p, n);
  BigNat total = 1, words = 1;
  for (std::size_t len = 0; len <= p.length_schedule(n); ++len) {
    total += words * (2 * len + 1 + t);
    words *= k;
  }
  return total;
}

Symbol xtime_symbol(const Group& g, const XTimeParams& p, const BigNat& index) {
  if (index < 0) throw MalformedInput("negative stream index");
  if (index == 0) return kXStar;
  const auto& gens = g.moving_generators();
  const std::size_t k = gens.size();
  BigNat r = index - 1;
  for (std::size_t n = 1;; ++n) {
    BigNat block = xtime_block_length(g, p, n);
    if (r >= block) {
      r -= block;
      continue;
    }
    if (r == 0) return kXPlus;
    r -= 1;
    const BigNat t = checked_time(p, n);
    BigNat words = 1;
    for (std::size_t len = 0; len <= p.length_schedule(n); ++len, words *= k) {
      const BigNat size = 2 * len + 1 + t;
      if (r >= words * size) {
        r -= words * size;
        continue;
      }
      BigNat j = r / size, off = r % size;
      std::vector<std::size_t> digits(len);
      for (std::size_t i = len; i-- > 0;) {
        digits[i] = (j % k).convert_to<std::size_t>();
        j /= k;
      }
      if (off < len) return Symbol(kXFirstGen + digits[off.convert_to<std::size_t>()]);
      if (off == len) return kXPlay;
      if (off < len + 1 + t) return kXDot;
      const std::size_t i = (off - len - 1 - t).convert_to<std::size_t>();
      GenId inv = g.inverse(gens[digits[len - 1 - i]]);
      for (std::size_t d = 0; d < k; ++d)
        if (gens[d] == inv) return Symbol(kXFirstGen + d);
      throw MalformedInput("generator set is not closed under inverses");
    }
    throw MalformedInput("stream index arithmetic went out of range");
  }
}

BigNat oplus_position(const Group& g, const XTimeParams& p, std::size_t n) {
  if (n == 0) throw MalformedInput("plus positions are numbered from 1");
  BigNat pos = 1;
  for (std::size_t i = 1; i < n; ++i) pos += xtime_block_length(g, p, i);
  return pos;
}

std::vector<Symbol> xtime_prefix(const Group& g, const XTimeParams& p, std::size_t length) {
  if (length > kMaxXTimePrefix)
    throw MalformedInput("prefix requests are limited to " + std::to_string(kMaxXTimePrefix));
  std::vector<Symbol> out;
  out.reserve(length);
  auto emit = [&](Symbol s) {
    if (out.size() < length) out.push_back(s);
    return out.size() < length;
  };
  if (!emit(kXStar)) return out;
  const auto& gens = g.moving_generators();
  const std::size_t k = gens.size();
  std::vector<std::size_t> inverse_pos(k);
  for (std::size_t d = 0; d < k; ++d)
    for (std::size_t e = 0; e < k; ++e)
      if (gens[e] == g.inverse(gens[d])) inverse_pos[d] = e;
  for (std::size_t n = 1;; ++n) {
    if (!emit(kXPlus)) return out;
    const BigNat t = checked_time(p, n);
    for (std::size_t len = 0; len <= p.length_schedule(n); ++len) {
      std::vector<std::size_t> u(len, 0);
      for (;;) {
        for (std::size_t d : u)
          if (!emit(Symbol(kXFirstGen + d))) return out;
        if (!emit(kXPlay)) return out;
        const std::size_t room = length - out.size();
        const std::size_t dots = t > room ? room : t.convert_to<std::size_t>();
        for (std::size_t i = 0; i < dots; ++i) out.push_back(kXDot);
        if (out.size() == length) return out;
        for (std::size_t i = len; i-- > 0;)
          if (!emit(Symbol(kXFirstGen + inverse_pos[u[i]]))) return out;
        // next word of this length in lexicographic order
        std::size_t i = len;
        while (i > 0 && u[i - 1] + 1 == k) u[--i] = 0;
        if (i == 0) break;
        ++u[i - 1];
      }
    }
  }
}

// ---------------------------------------------------------------------------

namespace {

SymbolSet where(std::size_t size, const std::function<bool(Symbol)>& pred) {
  SymbolSet s(size);
  for (Symbol a = 0; a < size; ++a)
    if (pred(a)) s.set(a);
  return s;
}

// Y_n's connectivity rule lifted to the level k_n above a star: a 1 there
// joined through 2s to another 1 of the same level.
class LiftedDeloneConnectivity final : public GlobalConstraint {
 public:
  LiftedDeloneConnectivity(const UShift& u, std::vector<std::size_t> levels)
      : levels_(u.levels), plus_levels_(std::move(levels)) {}

  bool violated_at(const Window& w, const Assignment& a, std::size_t last) const override {
    const auto v = a[last];
    if (v == kUnassigned) return false;
    if (Symbol(v) / 3 != kXStar && Symbol(v) % 3 == 0) return false;
    return violated(w, a);
  }

  bool violated(const Window& w, const Assignment& a) const override {
    const Group& g = w.group();
    std::vector<Element> moves;
    for (GenId s : levels_.base->moving_generators()) moves.push_back(levels_.lift(s));
    for (std::size_t c = 0; c < w.size(); ++c) {
      if (a[c] == kUnassigned || Symbol(a[c]) / 3 != kXStar) continue;
      for (std::size_t up : plus_levels_) {
        auto start = w.index_of(levels_.product->multiply(w.cell(c), levels_.t, std::int64_t(up)));
        if (!start || a[*start] == kUnassigned || Symbol(a[*start]) % 3 != 1) continue;
        std::vector<char> seen(w.size(), 0);
        std::vector<std::size_t> stack{*start};
        seen[*start] = 1;
        while (!stack.empty()) {
          std::size_t x = stack.back();
          stack.pop_back();
          for (const auto& m : moves) {
            auto y = w.index_of(g.multiply(w.cell(x), m));
            if (!y || seen[*y] || a[*y] == kUnassigned) continue;
            seen[*y] = 1;
            if (Symbol(a[*y]) % 3 == 1) return true;
            if (Symbol(a[*y]) % 3 == 2) stack.push_back(*y);
          }
        }
      }
    }
    return false;
  }

 private:
  LevelGroup levels_;
  std::vector<std::size_t> plus_levels_;
};

class UFamily final : public ForbiddenFamily {
 public:
  UFamily(UShift u, std::vector<SetPattern> fixed, std::vector<std::pair<std::size_t, std::size_t>> plus)
      : u_(std::move(u)), fixed_(std::move(fixed)), plus_(std::move(plus)) {}

  nlohmann::json to_json(const Group& g, const Alphabet& a) const override {
    nlohmann::json plus = nlohmann::json::array();
    for (auto [n, level] : plus_) plus.push_back({{"n", n}, {"level", level}});
    return {{"kind", "u_rules"},
            {"height", u_.height},
            {"plus_levels", plus},
            {"finite", finite_family(fixed_)->to_json(g, a)}};
  }

  std::vector<SetPattern> local_patterns(const Group&, std::size_t size,
                                         std::size_t radius) const override {
    return lifted(size, radius, false);
  }

  std::vector<GlobalPtr> global_constraints(const Group&) const override {
    std::vector<std::size_t> levels;
    for (auto [n, level] : plus_) levels.push_back(level);
    if (levels.empty()) return {};
    return {std::make_shared<LiftedDeloneConnectivity>(u_, levels)};
  }

  std::vector<SetPattern> listed_patterns(const Group&, std::size_t size,
                                          std::size_t radius) const override {
    return lifted(size, radius, true);
  }

 private:
  std::vector<SetPattern> lifted(std::size_t size, std::size_t radius, bool listed) const {
    std::vector<SetPattern> out = fixed_;
    const Group& base = *u_.levels.base;
    for (auto [n, level] : plus_) {
      auto delone = builtin_delone(u_.levels.base, n);
      auto source = listed ? delone.forbidden->listed_patterns(base, 3, radius)
                           : delone.forbidden->local_patterns(base, 3, radius);
      for (const auto& dp : source) {
        SetPattern p;
        p.tag = "delone_" + std::to_string(n);
        p.cells.push_back({u_.levels.product->identity(),
                           where(size, [&](Symbol s) { return u_.stream(s) == kXStar; })});
        for (const auto& c : dp.cells) {
          p.cells.push_back({u_.levels.at(c.offset, std::int64_t(level)),
                             where(size, [&](Symbol s) { return c.allowed.test(u_.layer(s)); })});
        }
        out.push_back(std::move(p));
      }
    }
    return out;
  }

  UShift u_;
  std::vector<SetPattern> fixed_;
  std::vector<std::pair<std::size_t, std::size_t>> plus_;
};

}  // namespace

UShift build_u_rules(GroupPtr g, const XTimeParams& p, std::size_t height) {
  UShift u;
  u.levels = make_level_group(g);
  u.height = height;
  const Alphabet xs = xtime_alphabet(*g);
  std::vector<std::string> labels;
  for (const auto& l : xs.labels())
    for (int y = 0; y < 3; ++y) labels.push_back(l + "/" + std::to_string(y));
  u.alphabet = Alphabet(labels);
  const std::size_t size = labels.size();
  const auto& gens = g->moving_generators();
  const Element one = u.levels.product->identity();

  std::vector<SetPattern> fixed;
  for (std::size_t m = 1; m <= height; ++m) {
    const Symbol want = xtime_symbol(*g, p, BigNat(m));
    fixed.push_back({{{one, where(size, [&](Symbol s) { return u.stream(s) == kXStar; })},
                      {u.levels.at(g->identity(), std::int64_t(m)),
                       where(size, [&](Symbol s) { return u.stream(s) != want; })}},
                     "x_time"});
  }
  for (GenId s : gens) {
    for (Symbol v = 0; v < xs.size(); ++v) {
      fixed.push_back({{{one, where(size, [&](Symbol a) { return u.stream(a) == v; })},
                        {u.levels.lift(s), where(size, [&](Symbol a) { return u.stream(a) != v; })}},
                       "periodic"});
    }
  }
  const Element up = u.levels.at(g->identity(), 1);
  for (Symbol v = 0; v < 3; ++v) {
    fixed.push_back({{{one, where(size, [&](Symbol a) { return u.layer(a) == v; })},
                      {up, where(size, [&](Symbol a) {
                         return (u.stream(a) == kXPlay || u.stream(a) == kXDot) && u.layer(a) != v;
                       })}},
                     "copy"});
  }
  for (std::size_t d = 0; d < gens.size(); ++d) {
    const Element target = u.levels.at(g->canonical(Word{gens[d]}), 1);
    for (Symbol v = 0; v < 3; ++v) {
      fixed.push_back({{{one, where(size, [&](Symbol a) { return u.layer(a) == v; })},
                        {target, where(size, [&](Symbol a) {
                           return u.stream(a) == kXFirstGen + d && u.layer(a) != v;
                         })}},
                       "shift"});
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> plus;
  for (std::size_t n = 1;; ++n) {
    BigNat level = oplus_position(*g, p, n);
    if (level > height) break;
    plus.emplace_back(n, level.convert_to<std::size_t>());
  }
  u.rules = std::make_shared<UFamily>(u, std::move(fixed), std::move(plus));
  return u;
}

}  // namespace gshift
