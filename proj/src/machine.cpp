#include "gshift/machine.hpp"

#include <algorithm>
#include <unordered_set>

#include "gshift/cayley.hpp"
#include "gshift/errors.hpp"

namespace gshift {

const Transition& GMachineSpec::at(Symbol a, State q) const {
  if (a >= alphabet.size() || q >= states.size())
    throw MalformedInput("machine read outside its alphabet or state set");
  const auto& r = rule(a, q);
  if (!r) {
    for (const auto& [sym, st] : exhausted)
      if (sym == a && st == q)
        throw GroupExhausted("every direction from the origin is exhausted (state " + states[q] +
                             ")");
    throw UndefinedTransition("no transition for symbol '" + alphabet.label(a) + "' in state " +
                              states[q]);
  }
  return *r;
}

bool GMachineSpec::is_total() const {
  return std::all_of(delta.begin(), delta.end(), [](const auto& r) { return r.has_value(); });
}

std::optional<State> GMachineSpec::find_state(const std::string& name) const {
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i] == name) return State(i);
  return std::nullopt;
}

GMachineSpec make_machine(GroupPtr g, Alphabet alphabet, Symbol blank,
                          std::vector<std::string> states, std::vector<bool> accepting) {
  if (states.empty()) throw MalformedInput("machine needs at least one state");
  if (accepting.size() != states.size()) throw MalformedInput("accepting flags do not match states");
  if (blank >= alphabet.size()) throw MalformedInput("blank outside the alphabet");
  GMachineSpec m;
  m.group = std::move(g);
  m.blank = blank;
  m.delta.assign(alphabet.size() * states.size(), std::nullopt);
  m.alphabet = std::move(alphabet);
  m.states = std::move(states);
  m.accepting = std::move(accepting);
  return m;
}

Symbol Tape::get(const Element& e) const {
  auto it = cells_.find(e);
  return it == cells_.end() ? blank_ : it->second;
}

void Tape::set(const Element& e, Symbol s) {
  if (s == blank_) cells_.erase(e);
  else cells_[e] = s;
}

Tape tape_from_pattern(const Pattern& p, Symbol blank) {
  Tape t(blank);
  for (const auto& [e, s] : p.cells()) t.set(e, s);
  return t;
}

Tape FixedConfig::observable(const Group& g) const {
  Tape out(stored.blank());
  Element inv = g.inverse(offset);
  for (const auto& [e, s] : stored.cells()) out.set(g.multiply(inv, e), s);
  return out;
}

namespace {

void check_pattern(const GMachineSpec& m, const Pattern& p) {
  for (const auto& [e, s] : p.cells())
    if (s >= m.alphabet.size()) throw MalformedInput("pattern symbol outside the tape alphabet");
}

}  // namespace

MachineConfig initial_config(const GMachineSpec& m, const Pattern& p) {
  check_pattern(m, p);
  return {tape_from_pattern(p, m.blank), m.group->identity(), 0, 0};
}

FixedConfig initial_fixed_config(const GMachineSpec& m, const Pattern& p) {
  check_pattern(m, p);
  return {tape_from_pattern(p, m.blank), m.group->identity(), 0, 0};
}

void step_moving(const GMachineSpec& m, MachineConfig& c) {
  const Transition& t = m.at(c.tape.get(c.head), c.state);
  c.tape.set(c.head, t.write);
  c.head = m.group->multiply(c.head, t.move);
  c.state = t.next;
  ++c.steps;
}

void step_fixed(const GMachineSpec& m, FixedConfig& c) {
  const Transition& t = m.at(c.stored.get(c.offset), c.state);
  c.stored.set(c.offset, t.write);
  c.offset = m.group->multiply(c.offset, t.move);
  c.state = t.next;
  ++c.steps;
}

RunResult run_accepts(const GMachineSpec& m, const Pattern& p, std::size_t budget,
                      const TraceSink& trace) {
  MachineConfig c = initial_config(m, p);
  if (m.accepting[c.state]) return {true, 0};
  while (c.steps < budget) {
    Element at = c.head;
    step_moving(m, c);
    if (trace) trace({c.steps, c.state, at, c.tape.get(at)});
    if (m.accepting[c.state]) return {true, c.steps};
  }
  return {false, c.steps};
}

bool fixed_moving_equivalent(const GMachineSpec& m, const Pattern& p, std::size_t steps) {
  const Group& g = *m.group;
  MachineConfig mv = initial_config(m, p);
  FixedConfig fx = initial_fixed_config(m, p);
  auto same_tapes = [&]() {
    Tape shifted(m.blank);
    Element inv = g.inverse(mv.head);
    for (const auto& [e, s] : mv.tape.cells()) shifted.set(g.multiply(inv, e), s);
    return shifted == fx.observable(g);
  };
  // Both runs are deterministic, so agreeing states and read symbols at every
  // step pin down the writes; whole tapes are compared at t = 0, 1, 2, 4, ...
  // and at the end.
  for (std::size_t t = 0, next_full = 0;; ++t) {
    if (mv.state != fx.state) return false;
    if (mv.tape.get(mv.head) != fx.stored.get(fx.offset)) return false;
    if (t == next_full || t == steps) {
      if (!same_tapes()) return false;
      next_full = next_full == 0 ? 1 : 2 * next_full;
    }
    if (t == steps) return true;
    step_moving(m, mv);
    step_fixed(m, fx);
  }
}

GMachineSpec retarget_generators(const GMachineSpec& m, GroupPtr target,
                                 const std::vector<Word>& gamma) {
  const Group& old_g = *m.group;
  if (gamma.size() != old_g.generator_count())
    throw MalformedInput("gamma must give one word per generator of the machine's group");
  const Group& dom = old_g.element_domain();
  const Group& tdom = target->element_domain();
  if (&dom != &tdom && dom.to_json() != tdom.to_json())
    throw RetargetUnsound("target generating set belongs to a different group");
  for (GenId s : old_g.moving_generators()) {
    target->validate(gamma[s]);
    if (!(target->canonical(gamma[s]) == old_g.canonical(Word{s})))
      throw RetargetUnsound("gamma(" + old_g.label_of(s) + ") is not equal to it in G");
  }
  const std::size_t q = m.state_count();
  std::vector<std::string> names = m.states;
  std::vector<bool> acc = m.accepting;
  // walk[r][s'][i] = state r_{s', s_{i+1}}
  std::vector<std::vector<std::vector<State>>> walk(q, std::vector<std::vector<State>>(gamma.size()));
  for (State r = 0; r < q; ++r)
    for (GenId s : old_g.moving_generators())
      for (std::size_t i = 0; i < gamma[s].size(); ++i) {
        walk[r][s].push_back(State(names.size()));
        names.push_back(m.states[r] + "[" + old_g.label_of(s) + "," + std::to_string(i + 1) + "]");
        acc.push_back(false);
      }
  GMachineSpec out = make_machine(target, m.alphabet, m.blank, names, acc);
  out.exhausted = m.exhausted;
  for (Symbol a = 0; a < m.alphabet.size(); ++a) {
    for (State st = 0; st < q; ++st) {
      const auto& r = m.rule(a, st);
      if (!r) continue;
      if (r->move == Group::identity_generator() || gamma[r->move].empty()) {
        out.rule(a, st) = Transition{r->write, r->next, Group::identity_generator()};
        continue;
      }
      out.rule(a, st) = Transition{r->write, walk[r->next][r->move][0], gamma[r->move].letters[0]};
    }
  }
  for (State r = 0; r < q; ++r)
    for (GenId s : old_g.moving_generators()) {
      const auto& w = gamma[s].letters;
      for (std::size_t i = 0; i < w.size(); ++i)
        for (Symbol a = 0; a < m.alphabet.size(); ++a) {
          if (i + 1 < w.size()) out.rule(a, walk[r][s][i]) = Transition{a, walk[r][s][i + 1], w[i + 1]};
          else out.rule(a, walk[r][s][i]) = Transition{a, r, Group::identity_generator()};
        }
    }
  return out;
}

boost::multiprecision::cpp_int acceptance_bound(const GMachineSpec& m, std::size_t support_size) {
  using boost::multiprecision::cpp_int;
  cpp_int out = cpp_int(m.state_count()) * support_size;
  out *= boost::multiprecision::pow(cpp_int(m.alphabet.size()), unsigned(support_size));
  return out;
}

namespace {

GenId move_from_label(const Group& g, const std::string& label) {
  if (label.empty() || label == "1" || label == "ε") return Group::identity_generator();
  auto s = g.find_generator(label);
  if (!s) throw MalformedInput("unknown move '" + label + "'");
  return *s;
}

}  // namespace

GMachineSpec machine_from_json(GroupPtr g, const nlohmann::json& j) {
  try {
    Alphabet a(j.at("alphabet").get<std::vector<std::string>>());
    auto states = j.at("states").get<std::vector<std::string>>();
    std::vector<bool> acc(states.size(), false);
    GMachineSpec probe;
    probe.states = states;
    for (const auto& name : j.value("accepting", std::vector<std::string>{})) {
      auto q = probe.find_state(name);
      if (!q) throw MalformedInput("unknown accepting state '" + name + "'");
      acc[*q] = true;
    }
    Symbol blank = a.index_of(j.value("blank", a.label(0)));
    GMachineSpec m = make_machine(g, a, blank, states, acc);
    for (const auto& r : j.at("delta")) {
      Symbol read = m.alphabet.index_of(r.at("read").get<std::string>());
      auto q = m.find_state(r.at("state").get<std::string>());
      auto next = m.find_state(r.at("next").get<std::string>());
      if (!q || !next) throw MalformedInput("transition names an unknown state");
      if (m.rule(read, *q)) throw MalformedInput("duplicate transition");
      m.rule(read, *q) = Transition{m.alphabet.index_of(r.at("write").get<std::string>()), *next,
                                    move_from_label(*g, r.value("move", std::string{}))};
    }
    // Accepting states halt the run, so their rules may be omitted.
    for (Symbol s = 0; s < m.alphabet.size(); ++s)
      for (State q = 0; q < m.state_count(); ++q) {
        if (m.rule(s, q)) continue;
        if (!m.accepting[q])
          throw MalformedInput("delta is not total: missing (" + m.alphabet.label(s) + ", " +
                               m.states[q] + ")");
        m.rule(s, q) = Transition{s, q, Group::identity_generator()};
      }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInput(std::string("bad machine description: ") + e.what());
  }
}

nlohmann::json machine_to_json(const GMachineSpec& m) {
  nlohmann::json acc = nlohmann::json::array(), delta = nlohmann::json::array();
  for (State q = 0; q < m.state_count(); ++q)
    if (m.accepting[q]) acc.push_back(m.states[q]);
  for (Symbol s = 0; s < m.alphabet.size(); ++s)
    for (State q = 0; q < m.state_count(); ++q) {
      const auto& r = m.rule(s, q);
      if (!r) continue;
      delta.push_back({{"read", m.alphabet.label(s)},
                       {"state", m.states[q]},
                       {"write", m.alphabet.label(r->write)},
                       {"next", m.states[r->next]},
                       {"move", r->move == 0 ? std::string("1") : m.group->label_of(r->move)}});
    }
  return {{"states", m.states},   {"accepting", acc},
          {"alphabet", m.alphabet.labels()}, {"blank", m.alphabet.label(m.blank)},
          {"delta", delta}};
}

// ---------------------------------------------------------------------------

MultiHeadSpec single_head(const GMachineSpec& m) {
  auto shared = std::make_shared<GMachineSpec>(m);
  MultiHeadSpec mh;
  mh.group = m.group;
  mh.layers = {{"machine", m.alphabet, m.blank}};
  mh.initial_states = {0};
  mh.delta = [shared](const HeadReader& r, const std::vector<State>& q) {
    const Transition& t = shared->at(r.own(0), q[0]);
    return MultiStep{{t.write}, {t.next}, {t.move}};
  };
  mh.accepting = [shared](std::size_t, State q) { return bool(shared->accepting[q]); };
  return mh;
}

MultiHeadConfig initial_multi_config(const MultiHeadSpec& mh, const Pattern& p) {
  MultiHeadConfig c;
  for (const auto& l : mh.layers) c.tapes.emplace_back(l.blank);
  if (c.tapes.empty()) throw MalformedInput("multi-head machine needs a layer");
  for (const auto& [e, s] : p.cells()) {
    if (s >= mh.layers[0].alphabet.size()) throw MalformedInput("pattern symbol outside layer 1");
    c.tapes[0].set(e, s);
  }
  c.heads.assign(mh.heads(), mh.group->identity());
  c.states = mh.initial_states;
  if (c.states.size() != mh.heads()) throw MalformedInput("initial states do not match heads");
  return c;
}

void step_multihead(const MultiHeadSpec& mh, MultiHeadConfig& c) {
  MultiStep st = mh.delta(HeadReader(c), c.states);
  const std::size_t n = mh.heads();
  if (st.write.size() != n || st.next.size() != n || st.move.size() != n)
    throw MalformedInput("multi-head transition has the wrong arity");
  std::vector<Element> previous = c.heads;
  for (std::size_t i = 0; i < n; ++i) {
    c.tapes[i].set(c.heads[i], st.write[i]);
    c.heads[i] = mh.group->multiply(c.heads[i], st.move[i]);
  }
  c.states = std::move(st.next);
  ++c.steps;
  if (mh.supervisor) mh.supervisor(c, previous);
}

namespace {

bool any_accepting(const MultiHeadSpec& mh, const MultiHeadConfig& c) {
  if (!mh.accepting) return false;
  for (std::size_t i = 0; i < c.states.size(); ++i)
    if (mh.accepting(i, c.states[i])) return true;
  return false;
}

}  // namespace

RunResult run_multihead(const MultiHeadSpec& mh, const Pattern& p, std::size_t budget,
                        const MultiObserver& observe) {
  MultiHeadConfig c = initial_multi_config(mh, p);
  if (observe) observe(c);
  if (any_accepting(mh, c)) return {true, 0};
  while (c.steps < budget) {
    step_multihead(mh, c);
    if (observe) observe(c);
    if (any_accepting(mh, c)) return {true, c.steps};
  }
  return {false, c.steps};
}

// ---------------------------------------------------------------------------

PathMachine build_m_path(GroupPtr g) {
  if (g->is_finite()) throw UnsupportedGroup("M_PATH needs an infinite group");
  PathMachine pm;
  pm.directions = g->moving_generators();
  const std::size_t k = pm.directions.size();
  if (k == 0) throw UnsupportedGroup("M_PATH needs a non-identity generator");
  pm.code.k = k;
  const PathAlphabet& c = pm.code;

  std::vector<std::string> first = {"_", ">"}, third = {"_"};
  for (GenId s : pm.directions) {
    first.push_back(g->label_of(s));
    third.push_back(g->label_of(s));
  }
  std::vector<std::string> labels(c.size());
  for (std::size_t a1 = 0; a1 < k + 2; ++a1)
    for (std::size_t a2 = 0; a2 < 2; ++a2)
      for (std::size_t a3 = 0; a3 <= k; ++a3)
        labels[c.encode(a1, a2, a3)] =
            "(" + first[a1] + "," + (a2 ? "x" : "_") + "," + third[a3] + ")";
  std::vector<std::string> states = {"I", "B"};
  for (GenId s : pm.directions) {
    states.push_back(g->label_of(s) + "<");
    states.push_back(g->label_of(s) + ">");
  }
  pm.machine = make_machine(g, Alphabet(labels), 0, states, std::vector<bool>(states.size(), false));
  GMachineSpec& m = pm.machine;
  const Symbol blank = c.encode(0, 0, 0);
  const GenId stay = Group::identity_generator();

  m.rule(blank, pm.init) = Transition{c.encode(1, 1, 1), pm.left(0), pm.directions[0]};
  for (std::size_t i = 0; i < k; ++i) {
    m.rule(blank, pm.left(i)) = Transition{c.encode(2 + i, 1, 0), pm.right(0), stay};
    for (std::size_t a1 = 0; a1 < k + 2; ++a1)
      for (std::size_t a3 = 0; a3 <= k; ++a3) {
        Symbol here = c.encode(a1, 1, a3);
        m.rule(here, pm.right(i)) = Transition{c.encode(a1, 1, 1 + i), pm.left(i), pm.directions[i]};
        m.rule(here, pm.left(i)) = Transition{here, pm.back, g->inverse(pm.directions[i])};
      }
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      Symbol here = c.encode(2 + j, 1, 1 + i);
      if (i + 1 < k) m.rule(here, pm.back) = Transition{here, pm.right(i + 1), stay};
      else m.rule(here, pm.back) = Transition{blank, pm.back, g->inverse(pm.directions[j])};
    }
    Symbol root = c.encode(1, 1, 1 + i);
    if (i + 1 < k) m.rule(root, pm.back) = Transition{root, pm.right(i + 1), stay};
    else m.exhausted.emplace_back(root, pm.back);
  }
  return pm;
}

std::optional<std::vector<Element>> marked_path(const PathMachine& pm, const Tape& t,
                                                std::string* why) {
  const Group& g = *pm.machine.group;
  const PathAlphabet& c = pm.code;
  auto fail = [&](std::string msg) -> std::optional<std::vector<Element>> {
    if (why) *why = std::move(msg);
    return std::nullopt;
  };
  std::size_t marked = 0;
  std::optional<Element> root;
  for (const auto& [e, s] : t.cells()) {
    if (!c.marked(s)) continue;
    ++marked;
    if (c.first(s) == PathAlphabet::kStart) {
      if (root) return fail("two root cells");
      root = e;
    }
  }
  std::vector<Element> path;
  if (marked == 0) return path;
  if (!root) return fail("marked cells without a root");
  std::unordered_set<Element, ElementHash> seen;
  Element cur = *root;
  for (;;) {
    if (!seen.insert(cur).second) return fail("path revisits a cell");
    path.push_back(cur);
    Symbol s = t.get(cur);
    std::size_t d = c.third(s);
    if (d == 0) break;
    Element next = g.multiply(cur, pm.directions[d - 1]);
    Symbol ns = t.get(next);
    if (!c.marked(ns) || c.first(ns) != d + 1) break;
    // The predecessor link of the successor must lead back here.
    if (!(g.multiply(next, g.inverse(pm.directions[d - 1])) == cur)) return fail("broken link");
    cur = next;
  }
  if (path.size() != marked) return fail("marked cells off the path");
  return path;
}

bool PathTracker::update(const Element& cell, Symbol before, Symbol after, std::string* why) {
  const Group& g = *pm_->machine.group;
  const PathAlphabet& c = pm_->code;
  auto fail = [&](const char* msg) {
    if (why) *why = msg;
    return false;
  };
  if (before == after) return true;
  const bool was = c.marked(before), is = c.marked(after);
  if (!was && !is) return true;
  if (was && is) {
    if (path_.empty() || !(cell == path_.back())) return fail("an interior path cell changed");
    if (c.first(before) != c.first(after)) return fail("a path cell changed its predecessor");
    symbols_.back() = after;
    return true;
  }
  if (was) {
    if (path_.empty() || !(cell == path_.back())) return fail("erased a cell that is not the tip");
    path_.pop_back();
    symbols_.pop_back();
    return true;
  }
  const std::size_t f = c.first(after);
  if (path_.empty()) {
    if (f != PathAlphabet::kStart) return fail("first marked cell is not a root");
    path_.push_back(cell);
    symbols_.push_back(after);
    return true;
  }
  if (f < 2) return fail("second root cell");
  const GenId arrived = pm_->directions[f - 2];
  if (!(g.multiply(path_.back(), arrived) == cell)) return fail("new cell is not next to the tip");
  if (c.third(symbols_.back()) + 1 != f) return fail("tip does not point at the new cell");
  path_.push_back(cell);
  symbols_.push_back(after);
  return true;
}

// ---------------------------------------------------------------------------

namespace {

// Counter head modes; the state is mode * (k + 1) + direction.
enum CounterMode : State { kInit, kProbe, kRetry, kReturn, kTrack, kIncrease, kModeCount };

}  // namespace

VisitMachine build_m_visit(GroupPtr g) {
  VisitMachine vm;
  vm.path = build_m_path(g);
  auto pm = std::make_shared<PathMachine>(vm.path);
  const std::size_t k = pm->code.k;
  const State wait = State(2 + 2 * k);
  const GenId stay = Group::identity_generator();

  vm.spec.group = g;
  vm.spec.layers = {{"path", pm->machine.alphabet, 0},
                    {"counter", Alphabet({"_", "1", "end"}), 0},
                    {"search", pm->machine.alphabet, 0}};
  vm.spec.initial_states = {pm->init, State(kInit * (k + 1)), wait};
  vm.spec.accepting = [](std::size_t, State) { return false; };

  vm.spec.delta = [pm, k, wait, stay](const HeadReader& r, const std::vector<State>& q) {
    const PathAlphabet& c = pm->code;
    const Group& grp = *pm->machine.group;
    MultiStep out{{0, 0, 0}, {0, 0, 0}, {stay, stay, stay}};

    const Transition& t0 = pm->machine.at(r.own(0), q[0]);
    out.write[0] = t0.write;
    out.next[0] = t0.next;
    out.move[0] = t0.move;

    const Symbol under = r.at(0, 1);  // path layer at the counter head
    const Symbol mark = r.own(1);
    const State mode = q[1] / State(k + 1);
    const std::size_t dir = q[1] % (k + 1);
    auto counter = [&](State m, std::size_t d = 0) { return State(m * (k + 1) + d); };
    auto forward_dir = [&]() -> std::optional<std::size_t> {
      std::size_t d = c.third(under);
      if (d == 0) return std::nullopt;
      return d - 1;
    };
    auto back_move = [&]() { return grp.inverse(pm->directions[c.first(under) - 2]); };

    // Search layer: bounded copy of the path machine.
    const Symbol s = r.own(2);
    int depth_change = 0;
    bool ball_done = false;
    out.write[2] = s;
    out.next[2] = q[2];
    if (q[2] == wait) {
      if (mode == kTrack) out.next[2] = pm->init;
    } else if (c.marked(s) && q[2] >= 2 && (q[2] - 2) % 2 == 1 && mark != VisitMachine::kMark) {
      // Depth n reached: treat the direction as blocked.
      std::size_t i = (q[2] - 2) / 2;
      out.write[2] = c.encode(c.first(s), 1, 1 + i);
      out.next[2] = pm->back;
    } else if (q[2] == pm->back && c.marked(s) && c.first(s) == PathAlphabet::kStart &&
               c.third(s) == k) {
      out.write[2] = 0;
      out.next[2] = wait;
      ball_done = true;
    } else {
      const Transition& t2 = pm->machine.at(s, q[2]);
      out.write[2] = t2.write;
      out.next[2] = t2.next;
      out.move[2] = t2.move;
      if (t2.move != stay) {
        // Forward moves leave from I or an arrow-right state.
        bool forward = q[2] == pm->init || (q[2] >= 2 && (q[2] - 2) % 2 == 1);
        depth_change = forward ? 1 : -1;
      }
    }

    // Counter layer.
    out.write[1] = mark;
    out.next[1] = q[1];
    switch (mode) {
      case kInit:
        if (c.marked(under)) {
          out.write[1] = VisitMachine::kMark;
          if (auto d = forward_dir()) {
            out.move[1] = pm->directions[*d];
            out.next[1] = counter(kProbe, *d);
          } else {
            out.next[1] = counter(kRetry);
          }
        }
        break;
      case kProbe:
        if (c.marked(under) && c.first(under) == dir + 2) {
          out.write[1] = VisitMachine::kEnd;
          out.move[1] = grp.inverse(pm->directions[dir]);
          out.next[1] = counter(kReturn);
        } else {
          out.move[1] = grp.inverse(pm->directions[dir]);
          out.next[1] = counter(kRetry);
        }
        break;
      case kRetry:
        if (auto d = forward_dir()) {
          out.move[1] = pm->directions[*d];
          out.next[1] = counter(kProbe, *d);
        }
        break;
      case kReturn:
        if (c.first(under) == PathAlphabet::kStart) out.next[1] = counter(kTrack);
        else out.move[1] = back_move();
        break;
      case kTrack:
        if (ball_done) {
          out.next[1] = counter(kIncrease);
        } else if (depth_change > 0) {
          out.move[1] = pm->directions[*forward_dir()];
        } else if (depth_change < 0) {
          out.move[1] = back_move();
        }
        break;
      case kIncrease:
        if (mark == VisitMachine::kMark) {
          out.move[1] = pm->directions[*forward_dir()];
        } else {
          out.write[1] = VisitMachine::kMark;
          if (auto d = forward_dir()) {
            out.move[1] = pm->directions[*d];
            out.next[1] = counter(kProbe, *d);
          } else {
            out.next[1] = counter(kRetry);
          }
        }
        break;
      default:
        throw UndefinedTransition("counter head in an unknown mode");
    }
    return out;
  };

  vm.spec.supervisor = [k, wait](MultiHeadConfig& c, const std::vector<Element>& prev) {
    // The path layer erased a cell the counter relies on: restart layers 2-3.
    const Element& erased = prev[VisitMachine::kPath];
    if (c.tapes[VisitMachine::kPath].get(erased) != 0) return;
    if (c.tapes[VisitMachine::kCounter].get(erased) == 0) return;
    c.tapes[VisitMachine::kCounter].clear();
    c.tapes[VisitMachine::kSearch].clear();
    c.heads[VisitMachine::kCounter] = Element{};
    c.heads[VisitMachine::kSearch] = Element{};
    c.states[VisitMachine::kCounter] = State(kInit * (k + 1));
    c.states[VisitMachine::kSearch] = wait;
  };
  return vm;
}

std::size_t visit_counter_value(const MultiHeadConfig& c) {
  std::size_t n = 0;
  for (const auto& [e, s] : c.tapes[VisitMachine::kCounter].cells())
    if (s == VisitMachine::kMark) ++n;
  return n;
}

// ---------------------------------------------------------------------------

BallSimulation simulate_with_balls(const GMachineSpec& m, const PatternCoding& c,
                                   std::size_t budget) {
  BallSimulation out;
  auto cons = check_consistency(*m.group, c);
  if (!cons.consistent) {
    out.outcome = BallOutcome::kInconsistent;
    out.witness = cons.witness;
    return out;
  }
  // N = 2 max |w|; at stage k the machine runs k steps, during which its
  // head cannot leave B_k, so the finite ball suffices.
  const std::size_t big_n = 2 * coding_length(c);
  MachineConfig cfg = initial_config(m, cons.pattern);
  if (m.accepting[cfg.state]) {
    out.outcome = BallOutcome::kAccepted;
    out.k = big_n;
    return out;
  }
  for (std::size_t k = std::max<std::size_t>(big_n, 1); k <= budget; ++k) {
    // Each stage replays the same deterministic run; continue where the
    // previous stage stopped instead of restarting.
    while (cfg.steps < k) {
      step_moving(m, cfg);
      if (m.accepting[cfg.state]) {
        out.outcome = BallOutcome::kAccepted;
        out.steps = cfg.steps;
        out.k = k;
        return out;
      }
    }
  }
  out.steps = cfg.steps;
  out.k = budget;
  return out;
}

}  // namespace gshift
