#include <algorithm>
#include <bit>
#include <memory>
#include <unordered_set>

#include "gshift/cayley.hpp"
#include "gshift/errors.hpp"
#include "gshift/io.hpp"
#include "gshift/reductions.hpp"

namespace gshift {

namespace {

SymbolSet where(std::size_t size, const std::function<bool(Symbol)>& pred) {
  SymbolSet s(size);
  for (Symbol a = 0; a < size; ++a)
    if (pred(a)) s.set(a);
  return s;
}

std::size_t ast_stride(const DominoInstance& inst) { return inst.finite_factor ? 2 : 1; }

// q0 -> 1, the accepting state -> k, the rest in order.
std::vector<std::size_t> domino_state_numbers(const GMachineSpec& m) {
  std::vector<std::size_t> out(m.state_count());
  std::size_t next = 2;
  for (State q = 0; q < m.state_count(); ++q) {
    if (m.accepting[q]) out[q] = m.state_count();
    else if (q == 0) out[q] = 1;
    else out[q] = next++;
  }
  return out;
}

}  // namespace

Symbol DominoInstance::encode(Symbol tape, Symbol head, bool star, bool ast) const {
  return Symbol(((tape * head_size + head) * 2 + (star ? 1 : 0)) * ast_stride(*this) +
                (ast ? 1 : 0));
}

Symbol DominoInstance::tape_of(Symbol s) const {
  return Symbol(s / ast_stride(*this) / 2 / head_size);
}

Symbol DominoInstance::head_of(Symbol s) const {
  return Symbol(s / ast_stride(*this) / 2 % head_size);
}

bool DominoInstance::star_of(Symbol s) const { return (s / ast_stride(*this)) % 2 == 1; }

bool DominoInstance::ast_of(Symbol s) const { return finite_factor && s % 2 == 1; }

std::size_t DominoInstance::count(const std::string& tag) const {
  return std::size_t(std::count_if(forbidden.begin(), forbidden.end(),
                                   [&](const SetPattern& p) { return p.tag == tag; }));
}

SubshiftSpec DominoInstance::spec() const { return {alphabet, group, finite_family(forbidden)}; }

DominoInstance compile_domino(GroupPtr g, const GMachineSpec& m, const A1Mode& a1) {
  if (m.group != g && m.group->to_json() != g->to_json())
    throw MalformedInput("machine runs on a different group");
  std::vector<State> acc;
  for (State q = 0; q < m.state_count(); ++q)
    if (m.accepting[q]) acc.push_back(q);
  if (acc.size() != 1) throw MalformedInput("the machine needs exactly one accepting state");

  DominoInstance inst;
  inst.levels = make_level_group(g);
  inst.group = inst.levels.product;
  inst.k = m.state_count();
  inst.tape_size = m.alphabet.size();

  if (acc[0] == 0 && m.state_count() > 1)
    throw MalformedInput("an accepting start state is only allowed in a one-state machine");
  const auto renumber = domino_state_numbers(m);

  if (a1.cover) {
    const auto& cover = *a1.cover;
    if (cover.group != g && cover.group->to_json() != g->to_json())
      throw MalformedInput("cover subshift lives on a different group");
    if (a1.state_of.size() != cover.alphabet.size())
      throw MalformedInput("cover needs one state per cover symbol");
    for (std::size_t s : a1.state_of)
      if (s > inst.k) throw MalformedInput("cover maps a symbol past the last state");
    inst.head_size = cover.alphabet.size();
    inst.state_of_head = a1.state_of;
  } else {
    inst.head_size = inst.k + 1;
    for (std::size_t j = 0; j <= inst.k; ++j) inst.state_of_head.push_back(j);
  }

  std::vector<std::string> labels;
  for (Symbol a = 0; a < inst.tape_size; ++a)
    for (std::size_t h = 0; h < inst.head_size; ++h)
      for (int star = 0; star < 2; ++star) {
        std::string head = a1.cover ? a1.cover->alphabet.label(Symbol(h)) : std::to_string(h);
        labels.push_back(m.alphabet.label(a) + "|" + head + "|" + (star ? "*" : "0"));
      }
  inst.alphabet = Alphabet(labels);
  const std::size_t size = labels.size();

  auto state = [&](Symbol s) { return inst.state_of_head[inst.head_of(s)]; };
  auto tape_is = [&](Symbol a) { return [&, a](Symbol s) { return inst.tape_of(s) == a; }; };
  const Element one = inst.group->identity();
  const Element up = inst.levels.at(g->identity(), 1);

  // A1
  if (a1.cover) {
    const auto& cover = *a1.cover;
    for (const auto& p : cover.forbidden->listed_patterns(*g, cover.alphabet.size(), a1.radius)) {
      SetPattern lifted{{}, "A1"};
      for (const auto& c : p.cells)
        lifted.cells.push_back({inst.levels.at(c.offset, 0), where(size, [&](Symbol s) {
                                  return c.allowed.test(inst.head_of(s));
                                })});
      inst.forbidden.push_back(std::move(lifted));
    }
  } else {
    const auto b = ball(*g, a1.radius, kDefaultBallBudget, false);
    const SymbolSet head = where(size, [&](Symbol s) { return state(s) != 0; });
    for (const auto& e : b.elements) {
      if (e.is_identity()) continue;
      inst.forbidden.push_back({{{one, head}, {inst.levels.at(e, 0), head}}, "A1"});
    }
  }

  // A2: without a head the tape symbol is kept.
  for (Symbol a = 0; a < inst.tape_size; ++a)
    for (Symbol b = 0; b < inst.tape_size; ++b) {
      if (a == b) continue;
      inst.forbidden.push_back(
          {{{one, where(size, [&](Symbol s) { return inst.tape_of(s) == a && state(s) == 0; })},
            {up, where(size, tape_is(b))}},
           "A2"});
    }

  // B1, B2: one group of patterns per rule (a, q) -> (b, r, s).
  for (State q = 0; q < m.state_count(); ++q) {
    if (m.accepting[q]) continue;
    for (Symbol a = 0; a < inst.tape_size; ++a) {
      const auto& rule = m.rule(a, q);
      if (!rule) continue;
      const std::size_t qq = renumber[q], rr = renumber[rule->next];
      const SymbolSet here =
          where(size, [&](Symbol s) { return inst.tape_of(s) == a && state(s) == qq; });
      for (Symbol c = 0; c < inst.tape_size; ++c) {
        if (c == rule->write) continue;
        inst.forbidden.push_back({{{one, here}, {up, where(size, tape_is(c))}}, "B1"});
      }
      const Element target = inst.levels.at(g->canonical(Word{rule->move}), 1);
      for (std::size_t t = 0; t <= inst.k; ++t) {
        if (t == rr) continue;
        inst.forbidden.push_back(
            {{{one, here}, {target, where(size, [&](Symbol s) { return state(s) == t; })}}, "B2"});
      }
    }
  }

  // A4: the accepting state never appears.
  for (Symbol a = 0; a < inst.tape_size; ++a)
    inst.forbidden.push_back(
        {{{one, where(size, [&](Symbol s) { return inst.tape_of(s) == a && state(s) == inst.k; })}},
         "A4"});

  // X_aux: a star fills its whole G-coset.
  for (GenId s : g->moving_generators())
    inst.forbidden.push_back({{{one, where(size, [&](Symbol x) { return inst.star_of(x); })},
                               {inst.levels.at(g->canonical(Word{s}), 0),
                                where(size, [&](Symbol x) { return !inst.star_of(x); })}},
                              "X_aux"});

  // A star sits on blank tape.
  inst.forbidden.push_back(
      {{{one, where(size, [&](Symbol s) { return inst.star_of(s) && inst.tape_of(s) != m.blank; })}},
       "star_rule"});

  std::optional<Symbol> origin_head;
  for (std::size_t h = 0; h < inst.head_size && !origin_head; ++h)
    if (inst.state_of_head[h] == 1) origin_head = Symbol(h);
  if (!origin_head) throw MalformedInput("cover has no symbol for the initial state");
  inst.origin_symbol = inst.encode(m.blank, *origin_head, true);
  return inst;
}

DominoInstance free_product_layer(GroupPtr h, const DominoInstance& base) {
  if (!h->is_finite()) throw MalformedInput("the free factor must be finite");
  if (h->order().value_or(0) < 2) throw MalformedInput("the free factor must be nontrivial");
  if (base.finite_factor) throw MalformedInput("instance already has a free factor");
  if (!base.origin_symbol) throw MalformedInput("instance has no origin symbol");

  DominoInstance out = base;
  out.finite_factor = h;
  out.group = make_free_product({base.group, h});
  const auto left = factor_embedding(*out.group, 0);
  const auto right = factor_embedding(*out.group, 1);
  auto move = [&](const Element& e, const std::vector<GenId>& emb) {
    Word w;
    for (GenId s : e.expand().letters) w.letters.push_back(emb[s]);
    return out.group->canonical(w);
  };

  std::vector<std::string> labels;
  for (const auto& l : base.alphabet.labels()) {
    labels.push_back(l + "|0");
    labels.push_back(l + "|∗");
  }
  out.alphabet = Alphabet(labels);
  const std::size_t size = labels.size();
  auto base_of = [](Symbol s) { return Symbol(s / 2); };

  out.forbidden.clear();
  for (const auto& p : base.forbidden) {
    SetPattern q{{}, p.tag};
    for (const auto& c : p.cells)
      q.cells.push_back({move(c.offset, left),
                         where(size, [&](Symbol s) { return c.allowed.test(base_of(s)); })});
    out.forbidden.push_back(std::move(q));
  }

  // Y_aux: every H-coset carries exactly one asterisk.
  const auto elems = ball(*h, *h->order(), kDefaultBallBudget, false).elements;
  const std::size_t n = elems.size();
  for (std::size_t mask = 0; mask < (std::size_t(1) << n); ++mask) {
    if (std::popcount(mask) == 1) continue;
    SetPattern p{{}, "Y_aux"};
    for (std::size_t i = 0; i < n; ++i) {
      const bool want = (mask >> i) & 1;
      p.cells.push_back({move(elems[i], right), where(size, [&](Symbol s) { return (s % 2 == 1) == want; })});
    }
    // The engine expects the identity first.
    auto id = std::find_if(p.cells.begin(), p.cells.end(),
                           [](const SetCell& c) { return c.offset.is_identity(); });
    std::iter_swap(p.cells.begin(), id);
    out.forbidden.push_back(std::move(p));
  }
  const Symbol origin = *base.origin_symbol;
  out.forbidden.push_back(
      {{{out.group->identity(), where(size, [&](Symbol s) { return s % 2 == 1 && base_of(s) != origin; })}},
       "Y_aux"});
  out.origin_symbol.reset();
  return out;
}

std::vector<Element> reduction_window(const DominoInstance& inst, std::size_t radius,
                                      std::size_t height) {
  const auto b = ball(*inst.levels.base, radius, kDefaultBallBudget, false);
  std::vector<Element> cells;
  std::vector<Element> coset;
  std::vector<GenId> left, right;
  if (inst.finite_factor) {
    const Group& h = **inst.finite_factor;
    left = factor_embedding(*inst.group, 0);
    right = factor_embedding(*inst.group, 1);
    for (const auto& e : ball(h, *h.order(), kDefaultBallBudget, false).elements) {
      if (e.is_identity()) continue;
      Word w;
      for (GenId s : e.expand().letters) w.letters.push_back(right[s]);
      coset.push_back(inst.group->canonical(w));
    }
  }
  for (std::size_t z = 0; z <= height; ++z) {
    for (const auto& g : b.elements) {
      Element c = inst.levels.at(g, std::int64_t(z));
      if (inst.finite_factor) {
        Word w;
        for (GenId s : c.expand().letters) w.letters.push_back(left[s]);
        c = inst.group->canonical(w);
      }
      cells.push_back(c);
      for (const auto& x : coset) cells.push_back(inst.group->multiply(c, x));
    }
  }
  return cells;
}

namespace {

Pattern to_pattern(const Window& w, const Assignment& a) {
  Pattern p;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (a[i] != kUnassigned) p.set(w.cell(i), Symbol(a[i]));
  return p;
}

}  // namespace

WindowResult verify_reduction_window(const DominoInstance& inst, std::size_t radius,
                                     std::size_t height, std::size_t budget) {
  auto w = std::make_shared<const Window>(inst.group, reduction_window(inst, radius, height));
  const CompiledWindow cw = compile_window(w, inst.spec());
  std::vector<SymbolSet> domains(w->size(), full_set(inst.alphabet.size()));
  if (inst.origin_symbol) domains[0] = symbol_set(inst.alphabet.size(), {*inst.origin_symbol});
  const SearchResult r = search_window(cw, domains, budget);
  WindowResult out;
  out.nodes = r.nodes;
  switch (r.verdict) {
    case SearchVerdict::kYes:
      out.verdict = WindowVerdict::kSatisfiable;
      out.witness = to_pattern(*w, r.witness);
      break;
    case SearchVerdict::kNo:
      out.verdict = WindowVerdict::kUnsatisfiable;
      break;
    case SearchVerdict::kUndetermined:
      out.verdict = WindowVerdict::kUndetermined;
      break;
  }
  return out;
}

bool check_reduction_witness(const DominoInstance& inst, const Pattern& p, std::size_t radius,
                             std::size_t height, std::string* why) {
  auto w = std::make_shared<const Window>(inst.group, reduction_window(inst, radius, height));
  Assignment a(w->size(), kUnassigned);
  for (std::size_t i = 0; i < w->size(); ++i) {
    auto s = p.get(w->cell(i));
    if (!s) {
      if (why) *why = "window cell " + format_element(*inst.group, w->cell(i)) + " is unassigned";
      return false;
    }
    if (*s >= inst.alphabet.size()) {
      if (why) *why = "symbol out of range";
      return false;
    }
    a[i] = std::int32_t(*s);
  }
  if (inst.origin_symbol && Symbol(a[0]) != *inst.origin_symbol) {
    if (why) *why = "origin does not carry the origin symbol";
    return false;
  }
  return assignment_admissible(compile_window(w, inst.spec()), a, why);
}

Pattern domino_run_witness(const DominoInstance& inst, const GMachineSpec& m, std::size_t radius,
                           std::size_t height) {
  if (inst.state_of_head.size() != inst.k + 1 || inst.head_size != inst.k + 1)
    throw MalformedInput("run witnesses need the windowed state layer");
  const Group& g = *inst.levels.base;
  const auto renumber = domino_state_numbers(m);
  const auto b = ball(g, radius, kDefaultBallBudget, false);

  // Base-layer symbol for every cell of B_radius x [0, height].
  std::vector<std::vector<Symbol>> levels;
  MachineConfig c = initial_config(m, Pattern{});
  bool running = true;
  for (std::size_t z = 0; z <= height; ++z) {
    std::vector<Symbol> row;
    for (const auto& e : b.elements) {
      Symbol head = 0;
      if (running && e == c.head) head = Symbol(renumber[c.state]);
      row.push_back(inst.encode(c.tape.get(e), head, z == 0));
    }
    levels.push_back(std::move(row));
    if (running) {
      if (m.accepting[c.state] || !m.rule(c.tape.get(c.head), c.state)) running = false;
      else step_moving(m, c);
    }
  }

  Pattern out;
  const auto cells = reduction_window(inst, radius, height);
  if (!inst.finite_factor) {
    std::size_t i = 0;
    for (const auto& row : levels)
      for (Symbol s : row) out.set(cells[i++], s);
    return out;
  }
  // Free-product form: the main sheet carries the run; each other coset puts
  // its asterisk on its first off-sheet cell, which then shows the origin.
  const std::size_t per = *(*inst.finite_factor)->order();
  std::size_t i = 0;
  for (std::size_t z = 0; z <= height; ++z) {
    for (std::size_t e = 0; e < b.elements.size(); ++e) {
      const bool is_origin = z == 0 && e == 0;
      out.set(cells[i], levels[z][e] + (is_origin ? 1 : 0));
      for (std::size_t j = 1; j < per; ++j) {
        const bool marked = !is_origin && j == 1;
        out.set(cells[i + j], marked ? inst.encode(m.blank, 1, true, true)
                                     : inst.encode(m.blank, 0, false, false));
      }
      i += per;
    }
  }
  return out;
}

nlohmann::json domino_to_json(const DominoInstance& inst) {
  const auto fam = finite_family(inst.forbidden)->to_json(*inst.group, inst.alphabet);
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& p : inst.forbidden) counts[p.tag] = counts.value(p.tag, 0) + 1;
  nlohmann::json out = {{"group", inst.group->to_json()},
                        {"base_group", inst.levels.base->to_json()},
                        {"alphabet", inst.alphabet.labels()},
                        {"components",
                         {{"tape", inst.tape_size},
                          {"head", inst.head_size},
                          {"states", inst.k},
                          {"state_of_head", inst.state_of_head}}},
                        {"forbidden", fam.at("patterns")},
                        {"counts", counts}};
  out["free_factor"] = inst.finite_factor ? (*inst.finite_factor)->to_json() : nlohmann::json(nullptr);
  out["origin_symbol"] = inst.origin_symbol ? nlohmann::json(inst.alphabet.label(*inst.origin_symbol))
                                            : nlohmann::json(nullptr);
  return out;
}

DominoInstance domino_from_json(const nlohmann::json& j) {
  try {
    DominoInstance inst;
    inst.levels = make_level_group(group_from_json(j.at("base_group")));
    inst.group = inst.levels.product;
    if (j.contains("free_factor") && !j.at("free_factor").is_null()) {
      GroupPtr h = group_from_json(j.at("free_factor"));
      inst.finite_factor = h;
      inst.group = make_free_product({inst.levels.product, h});
    }
    if (inst.group->to_json() != j.at("group"))
      throw MalformedInput("instance group does not match its base group and free factor");
    inst.alphabet = Alphabet(j.at("alphabet").get<std::vector<std::string>>());
    const auto& c = j.at("components");
    inst.tape_size = c.at("tape").get<std::size_t>();
    inst.head_size = c.at("head").get<std::size_t>();
    inst.k = c.at("states").get<std::size_t>();
    inst.state_of_head = c.at("state_of_head").get<std::vector<std::size_t>>();
    if (inst.state_of_head.size() != inst.head_size ||
        inst.tape_size * inst.head_size * 2 * (inst.finite_factor ? 2 : 1) != inst.alphabet.size())
      throw MalformedInput("instance components do not match the alphabet");
    SubshiftSpec spec = subshift_from_json({{"alphabet", j.at("alphabet")},
                                            {"group", j.at("group")},
                                            {"forbidden", {{"kind", "finite"}, {"patterns", j.at("forbidden")}}}});
    inst.forbidden = spec.forbidden->local_patterns(*inst.group, inst.alphabet.size(), 0);
    if (j.contains("origin_symbol") && !j.at("origin_symbol").is_null())
      inst.origin_symbol = inst.alphabet.index_of(j.at("origin_symbol").get<std::string>());
    return inst;
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInput(std::string("domino instance: ") + e.what());
  }
}

}  // namespace gshift
