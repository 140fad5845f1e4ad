#include <algorithm>
#include <deque>

#include "gshift/errors.hpp"
#include "gshift/io.hpp"
#include "gshift/subshift.hpp"

namespace gshift {

namespace {

nlohmann::json set_pattern_json(const Group& g, const Alphabet& a, const SetPattern& p) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : p.cells) {
    nlohmann::json sym;
    if (c.allowed.all()) {
      sym = "*";
    } else if (c.allowed.count() == 1) {
      sym = a.label(Symbol(c.allowed.find_first()));
    } else {
      sym = nlohmann::json::array();
      for (auto s = c.allowed.find_first(); s != SymbolSet::npos; s = c.allowed.find_next(s))
        sym.push_back(a.label(Symbol(s)));
    }
    cells.push_back({format_element(g, c.offset), sym});
  }
  nlohmann::json out = {{"support", cells}};
  if (!p.tag.empty()) out["tag"] = p.tag;
  return out;
}

SetPattern set_pattern_from_json(const Group& g, const Alphabet& a, const nlohmann::json& j) {
  SetPattern p;
  if (j.contains("tag")) p.tag = j.at("tag").get<std::string>();
  for (const auto& cell : j.at("support")) {
    if (!cell.is_array() || cell.size() != 2) throw MalformedInput("pattern cell must be [word, symbol]");
    Element e = g.canonical(parse_word(g, cell[0].get<std::string>()));
    SymbolSet s(a.size());
    if (cell[1].is_array()) {
      for (const auto& x : cell[1]) s.set(a.index_of(x.get<std::string>()));
    } else if (cell[1].get<std::string>() == "*" && !a.find("*")) {
      s.set();
    } else {
      s.set(a.index_of(cell[1].get<std::string>()));
    }
    p.cells.push_back({e, s});
  }
  return p;
}

class FiniteFamily final : public ForbiddenFamily {
 public:
  explicit FiniteFamily(std::vector<SetPattern> ps) : patterns_(std::move(ps)) {}
  nlohmann::json to_json(const Group& g, const Alphabet& a) const override {
    nlohmann::json ps = nlohmann::json::array();
    for (const auto& p : patterns_) ps.push_back(set_pattern_json(g, a, p));
    return {{"kind", "finite"}, {"patterns", ps}};
  }
  std::vector<SetPattern> local_patterns(const Group&, std::size_t, std::size_t) const override {
    return patterns_;
  }

 private:
  std::vector<SetPattern> patterns_;
};

class UnionFamily final : public ForbiddenFamily {
 public:
  explicit UnionFamily(std::vector<FamilyPtr> parts) : parts_(std::move(parts)) {}
  nlohmann::json to_json(const Group& g, const Alphabet& a) const override {
    nlohmann::json ps = nlohmann::json::array();
    for (const auto& p : parts_) ps.push_back(p->to_json(g, a));
    return {{"kind", "union"}, {"parts", ps}};
  }
  std::vector<SetPattern> local_patterns(const Group& g, std::size_t n,
                                         std::size_t r) const override {
    std::vector<SetPattern> out;
    for (const auto& p : parts_) {
      auto ps = p->local_patterns(g, n, r);
      out.insert(out.end(), ps.begin(), ps.end());
    }
    return out;
  }
  std::vector<GlobalPtr> global_constraints(const Group& g) const override {
    std::vector<GlobalPtr> out;
    for (const auto& p : parts_) {
      auto gs = p->global_constraints(g);
      out.insert(out.end(), gs.begin(), gs.end());
    }
    return out;
  }
  std::vector<SetPattern> listed_patterns(const Group& g, std::size_t n,
                                          std::size_t r) const override {
    std::vector<SetPattern> out;
    for (const auto& p : parts_) {
      auto ps = p->listed_patterns(g, n, r);
      out.insert(out.end(), ps.begin(), ps.end());
    }
    return out;
  }

 private:
  std::vector<FamilyPtr> parts_;
};

// At most one cell carries a symbol from `special`.
class AtMostOne final : public GlobalConstraint {
 public:
  explicit AtMostOne(SymbolSet special) : special_(std::move(special)) {}
  bool violated_at(const Window& w, const Assignment& a, std::size_t last) const override {
    if (!special_.test(std::size_t(a[last]))) return false;
    for (std::size_t c = 0; c < w.size(); ++c)
      if (c != last && a[c] != kUnassigned && special_.test(std::size_t(a[c]))) return true;
    return false;
  }
  bool violated(const Window& w, const Assignment& a) const override {
    std::size_t n = 0;
    for (std::size_t c = 0; c < w.size(); ++c)
      if (a[c] != kUnassigned && special_.test(std::size_t(a[c]))) ++n;
    return n > 1;
  }

 private:
  SymbolSet special_;
};

class OneOrLessFamily final : public ForbiddenFamily {
 public:
  OneOrLessFamily(std::size_t k, SymbolSet special, std::string name)
      : k_(k), special_(std::move(special)), name_(std::move(name)) {}
  nlohmann::json to_json(const Group&, const Alphabet&) const override {
    if (name_ == "one_or_less") return {{"kind", "builtin"}, {"name", name_}, {"k", k_}};
    return {{"kind", "builtin"}, {"name", name_}};
  }
  std::vector<SetPattern> local_patterns(const Group&, std::size_t, std::size_t) const override {
    return {};
  }
  std::vector<GlobalPtr> global_constraints(const Group&) const override {
    return {std::make_shared<AtMostOne>(special_)};
  }
  std::vector<SetPattern> listed_patterns(const Group& g, std::size_t n,
                                          std::size_t r) const override {
    std::vector<SetPattern> out;
    for (const auto& e : ball(g, r, kDefaultBallBudget, false).elements) {
      if (e.is_identity()) continue;
      out.push_back({{{g.identity(), special_}, {e, special_}}, "one_or_less"});
    }
    (void)n;
    return out;
  }

 private:
  std::size_t k_;
  SymbolSet special_;
  std::string name_;
};

constexpr Symbol kWhite = 0, kBlack = 1, kRed = 2;

class MirrorRows final : public GlobalConstraint {
 public:
  MirrorRows(GenId right, GenId left) : right_(right), left_(left) {}
  bool violated_at(const Window& w, const Assignment& a, std::size_t last) const override {
    // Maximal run of assigned cells in the row through `last`.
    const Group& g = w.group();
    std::deque<std::int32_t> row{a[last]};
    Element e = w.cell(last);
    for (;;) {
      e = g.multiply(e, left_);
      auto i = w.index_of(e);
      if (!i || a[*i] == kUnassigned) break;
      row.push_front(a[*i]);
    }
    e = w.cell(last);
    for (;;) {
      e = g.multiply(e, right_);
      auto i = w.index_of(e);
      if (!i || a[*i] == kUnassigned) break;
      row.push_back(a[*i]);
    }
    return row_violates(std::vector<std::int32_t>(row.begin(), row.end()));
  }

  static bool row_violates(const std::vector<std::int32_t>& row) {
    std::size_t reds = std::count(row.begin(), row.end(), std::int32_t(kRed));
    if (reds > 1) return true;
    for (std::size_t r = 0; r < row.size(); ++r) {
      if (row[r] != std::int32_t(kRed)) continue;
      for (std::size_t d = 1; d <= r && r + d < row.size(); ++d) {
        auto lo = row[r - d], hi = row[r + d];
        if ((lo == std::int32_t(kBlack) && hi == std::int32_t(kWhite)) ||
            (lo == std::int32_t(kWhite) && hi == std::int32_t(kBlack)))
          return true;
        if (lo != hi) break;
      }
    }
    return false;
  }

 private:
  GenId right_, left_;
};

class MirrorFamily final : public ForbiddenFamily {
 public:
  nlohmann::json to_json(const Group&, const Alphabet&) const override {
    return {{"kind", "builtin"}, {"name", "mirror"}};
  }
  std::vector<SetPattern> local_patterns(const Group& g, std::size_t n,
                                         std::size_t) const override {
    Element up = g.canonical(Word{3});
    auto one = [&](Symbol s) { return symbol_set(n, {s}); };
    return {{{{g.identity(), one(kRed)}, {up, one(kWhite)}}, "mirror-vertical"},
            {{{g.identity(), one(kRed)}, {up, one(kBlack)}}, "mirror-vertical"},
            {{{g.identity(), one(kWhite)}, {up, one(kRed)}}, "mirror-vertical"},
            {{{g.identity(), one(kBlack)}, {up, one(kRed)}}, "mirror-vertical"}};
  }
  std::vector<GlobalPtr> global_constraints(const Group&) const override {
    return {std::make_shared<MirrorRows>(1, 2)};
  }
  std::vector<SetPattern> listed_patterns(const Group& g, std::size_t n,
                                          std::size_t r) const override {
    auto out = local_patterns(g, n, r);
    auto at = [&](std::size_t i) { return g.canonical(Word(std::vector<GenId>(i, 1))); };
    auto one = [&](Symbol s) { return symbol_set(n, {s}); };
    for (std::size_t len = 0; len <= r; ++len) {
      SetPattern rr{{{at(0), one(kRed)}}, "mirror-red-red"};
      for (std::size_t i = 1; i <= len; ++i) rr.cells.push_back({at(i), full_set(n)});
      rr.cells.push_back({at(len + 1), one(kRed)});
      out.push_back(rr);
      std::size_t total = 1;
      for (std::size_t i = 0; i < len; ++i) total *= 3;
      for (std::size_t code = 0; code < total; ++code) {
        std::vector<Symbol> w(len);
        for (std::size_t i = 0, c = code; i < len; ++i, c /= 3) w[i] = Symbol(c % 3);
        for (auto [first, last] : {std::pair{kBlack, kWhite}, std::pair{kWhite, kBlack}}) {
          SetPattern p{{{at(0), one(first)}}, "mirror-schema"};
          for (std::size_t i = 0; i < len; ++i) p.cells.push_back({at(i + 1), one(w[i])});
          p.cells.push_back({at(len + 1), one(kRed)});
          for (std::size_t i = 0; i < len; ++i)
            p.cells.push_back({at(len + 2 + i), one(w[len - 1 - i])});
          p.cells.push_back({at(2 * len + 2), one(last)});
          out.push_back(p);
        }
      }
    }
    return out;
  }
};

// Two cells carrying 1 joined inside the window by cells from {1,2}.
class DeloneConnectivity final : public GlobalConstraint {
 public:
  bool violated_at(const Window& w, const Assignment& a, std::size_t last) const override {
    if (a[last] != 1 && a[last] != 2) return false;
    return component_ones(w, a, last, nullptr) >= 2;
  }
  bool violated(const Window& w, const Assignment& a) const override {
    std::vector<char> seen(w.size(), 0);
    for (std::size_t c = 0; c < w.size(); ++c) {
      if (seen[c] || (a[c] != 1 && a[c] != 2)) continue;
      if (component_ones(w, a, c, &seen) >= 2) return true;
    }
    return false;
  }

 private:
  static std::size_t component_ones(const Window& w, const Assignment& a, std::size_t start,
                                    std::vector<char>* seen_out) {
    std::vector<char> local;
    std::vector<char>& seen = seen_out ? *seen_out : local;
    if (!seen_out) local.assign(w.size(), 0);
    std::vector<std::size_t> stack{start};
    seen[start] = 1;
    std::size_t ones = 0;
    while (!stack.empty()) {
      std::size_t c = stack.back();
      stack.pop_back();
      if (a[c] == 1) ++ones;
      for (std::size_t d : w.neighbors(c)) {
        if (seen[d] || (a[d] != 1 && a[d] != 2)) continue;
        seen[d] = 1;
        stack.push_back(d);
      }
    }
    return ones;
  }
};

class DeloneFamily final : public ForbiddenFamily {
 public:
  explicit DeloneFamily(std::size_t n) : n_(n) {}
  nlohmann::json to_json(const Group&, const Alphabet&) const override {
    return {{"kind", "builtin"}, {"name", "delone"}, {"n", n_}};
  }
  std::vector<SetPattern> local_patterns(const Group& g, std::size_t n,
                                         std::size_t) const override {
    std::vector<SetPattern> out;
    // (i) stored as one set pattern: every cell of B_4n avoids 1.
    SetPattern no_one{{}, "delone-i"};
    for (const auto& e : ball(g, 4 * n_, kDefaultBallBudget, false).elements)
      no_one.cells.push_back({e, symbol_set(n, {0, 2})});
    out.push_back(std::move(no_one));
    // (ii) a 1 whose n-ball has a cell other than 2; full-ball support.
    auto bn = ball(g, n_, kDefaultBallBudget, false).elements;
    for (const auto& bad : bn) {
      if (bad.is_identity()) continue;
      SetPattern p{{{g.identity(), symbol_set(n, {1})}}, "delone-ii"};
      for (const auto& e : bn) {
        if (e.is_identity()) continue;
        p.cells.push_back({e, e == bad ? symbol_set(n, {0, 1}) : full_set(n)});
      }
      out.push_back(std::move(p));
    }
    return out;
  }
  std::vector<GlobalPtr> global_constraints(const Group&) const override {
    return {std::make_shared<DeloneConnectivity>()};
  }
  // Adds the minimal instances of (iii): simple paths 1 2 ... 2 1.
  std::vector<SetPattern> listed_patterns(const Group& g, std::size_t n,
                                          std::size_t r) const override {
    auto out = local_patterns(g, n, r);
    std::vector<Element> path{g.identity()};
    std::function<void()> extend = [&] {
      if (path.size() >= 2) {
        SetPattern p{{}, "delone-iii"};
        for (std::size_t i = 0; i < path.size(); ++i) {
          bool end = i == 0 || i + 1 == path.size();
          p.cells.push_back({path[i], symbol_set(n, {Symbol(end ? 1 : 2)})});
        }
        out.push_back(std::move(p));
      }
      if (path.size() > r) return;
      for (GenId s : g.moving_generators()) {
        Element next = g.multiply(path.back(), s);
        if (std::find(path.begin(), path.end(), next) != path.end()) continue;
        path.push_back(next);
        extend();
        path.pop_back();
      }
    };
    extend();
    return out;
  }

 private:
  std::size_t n_;
};

class AmenableFamily final : public ForbiddenFamily {
 public:
  AmenableFamily(std::size_t n_max, FamilyPtr inner) : n_max_(n_max), inner_(std::move(inner)) {}
  nlohmann::json to_json(const Group&, const Alphabet&) const override {
    return {{"kind", "builtin"}, {"name", "amenable_witness"}, {"n_max", n_max_}};
  }
  std::vector<SetPattern> local_patterns(const Group& g, std::size_t n,
                                         std::size_t r) const override {
    return inner_->local_patterns(g, n, r);
  }
  std::vector<GlobalPtr> global_constraints(const Group& g) const override {
    return inner_->global_constraints(g);
  }
  std::vector<SetPattern> listed_patterns(const Group& g, std::size_t n,
                                          std::size_t r) const override {
    return inner_->listed_patterns(g, n, r);
  }

 private:
  std::size_t n_max_;
  FamilyPtr inner_;
};

}  // namespace

FamilyPtr finite_family(std::vector<SetPattern> patterns) {
  return std::make_shared<FiniteFamily>(std::move(patterns));
}

FamilyPtr union_family(std::vector<FamilyPtr> parts) {
  return std::make_shared<UnionFamily>(std::move(parts));
}

SubshiftSpec builtin_one_or_less(GroupPtr g, std::size_t k) {
  if (k < 1) throw MalformedInput("one_or_less needs k >= 1");
  std::vector<std::string> labels;
  for (std::size_t i = 0; i <= k; ++i) labels.push_back(std::to_string(i));
  SymbolSet special = full_set(k + 1);
  special.reset(0);
  return {Alphabet(labels), std::move(g),
          std::make_shared<OneOrLessFamily>(k, special, "one_or_less")};
}

SubshiftSpec builtin_mirror(GroupPtr g) {
  if (g->kind() != GroupKind::kFreeAbelian || g->generator_count() != 5)
    throw UnsupportedGroup("the mirror shift is defined over Z^2");
  return {Alphabet({"white", "black", "red"}), std::move(g), std::make_shared<MirrorFamily>()};
}

SubshiftSpec builtin_delone(GroupPtr g, std::size_t n) {
  if (n < 1) throw MalformedInput("delone needs n >= 1");
  return {Alphabet({"0", "1", "2"}), std::move(g), std::make_shared<DeloneFamily>(n)};
}

SubshiftSpec builtin_amenable_witness(GroupPtr g, std::size_t n_max) {
  if (g->is_finite()) throw UnsupportedGroup("amenable witness needs an infinite group");
  const std::size_t a = 3;
  auto seq = disjoint_ball_sequences(*g, n_max);
  std::vector<SetPattern> y2;
  for (std::size_t n = 0; n <= n_max; ++n) {
    for (const auto& b : ball(*g, n, kDefaultBallBudget, false).elements) {
      Element gb = g->multiply(seq.g[n], b), hb = g->multiply(seq.h[n], b);
      for (Symbol s = 0; s < 3; ++s)
        for (Symbol t = 0; t < 3; ++t) {
          if (s == t) continue;
          y2.push_back({{{g->identity(), symbol_set(a, {2})}, {gb, symbol_set(a, {s})},
                         {hb, symbol_set(a, {t})}},
                        "amenable-y2"});
        }
    }
  }
  auto y1 = std::make_shared<OneOrLessFamily>(1, symbol_set(a, {2}), "one_or_less_2");
  auto fam = union_family({y1, finite_family(std::move(y2))});
  return {Alphabet({"0", "1", "2"}), g, std::make_shared<AmenableFamily>(n_max, fam)};
}

SubshiftSpec intersect(const SubshiftSpec& x, const SubshiftSpec& y) {
  if (!(x.alphabet == y.alphabet)) throw MalformedInput("intersection needs identical alphabets");
  if (x.group != y.group && x.group->to_json() != y.group->to_json())
    throw MalformedInput("intersection needs the same group");
  return {x.alphabet, x.group, union_family({x.forbidden, y.forbidden})};
}

Pattern pattern_from_json(const Group& g, const Alphabet& a, const nlohmann::json& j) {
  Pattern p;
  try {
    for (const auto& cell : j.at("support")) {
      if (!cell.is_array() || cell.size() != 2)
        throw MalformedInput("pattern cell must be [word, symbol]");
      p.set(g.canonical(parse_word(g, cell[0].get<std::string>())),
            a.index_of(cell[1].get<std::string>()));
    }
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInput(std::string("bad pattern: ") + e.what());
  }
  return p;
}

nlohmann::json pattern_to_json(const Group& g, const Alphabet& a, const Pattern& p) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& [e, s] : p.cells()) cells.push_back({format_element(g, e), a.label(s)});
  return {{"support", cells}};
}

namespace {

FamilyPtr family_from_json(const GroupPtr& g, const Alphabet& a, const nlohmann::json& j,
                           Alphabet* builtin_alphabet) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "finite") {
    std::vector<SetPattern> ps;
    for (const auto& p : j.at("patterns")) ps.push_back(set_pattern_from_json(*g, a, p));
    return finite_family(std::move(ps));
  }
  if (kind == "union") {
    std::vector<FamilyPtr> parts;
    for (const auto& p : j.at("parts")) parts.push_back(family_from_json(g, a, p, nullptr));
    return union_family(std::move(parts));
  }
  if (kind == "builtin") {
    const std::string name = j.at("name").get<std::string>();
    SubshiftSpec s;
    if (name == "one_or_less") s = builtin_one_or_less(g, j.value("k", std::size_t(1)));
    else if (name == "mirror") s = builtin_mirror(g);
    else if (name == "delone") s = builtin_delone(g, j.at("n").get<std::size_t>());
    else if (name == "amenable_witness")
      s = builtin_amenable_witness(g, j.at("n_max").get<std::size_t>());
    else throw MalformedInput("unknown builtin family '" + name + "'");
    if (builtin_alphabet) *builtin_alphabet = s.alphabet;
    else if (!(s.alphabet == a)) throw MalformedInput("builtin alphabet mismatch");
    return s.forbidden;
  }
  throw MalformedInput("unknown forbidden family kind '" + kind + "'");
}

}  // namespace

SubshiftSpec subshift_from_json(const nlohmann::json& j) {
  try {
    SubshiftSpec s;
    s.group = group_from_json(j.at("group"));
    const auto& f = j.at("forbidden");
    if (f.at("kind") == "builtin") {
      Alphabet a;
      s.forbidden = family_from_json(s.group, a, f, &a);
      s.alphabet = a;
      if (j.contains("alphabet") &&
          !(Alphabet(j.at("alphabet").get<std::vector<std::string>>()) == a))
        throw MalformedInput("alphabet does not match the builtin family");
    } else {
      s.alphabet = Alphabet(j.at("alphabet").get<std::vector<std::string>>());
      s.forbidden = family_from_json(s.group, s.alphabet, f, nullptr);
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInput(std::string("bad subshift description: ") + e.what());
  }
}

nlohmann::json subshift_to_json(const SubshiftSpec& s) {
  return {{"alphabet", s.alphabet.labels()},
          {"group", s.group->to_json()},
          {"forbidden", s.forbidden->to_json(*s.group, s.alphabet)}};
}

}  // namespace gshift
