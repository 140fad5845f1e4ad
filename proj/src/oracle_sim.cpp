#include <array>

#include "gshift/errors.hpp"
#include "gshift/machine.hpp"

namespace gshift {

Alphabet oracle_input_alphabet(const Group& g, const Alphabet& pattern_alphabet) {
  std::vector<std::string> labels = {"_", "#", ":"};
  for (GenId s : g.moving_generators()) labels.push_back(g.label_of(s));
  for (const auto& l : pattern_alphabet.labels()) labels.push_back("=" + l);
  return Alphabet(labels);
}

ClassicalMachine make_classical(const Group& g, const Alphabet& pattern_alphabet,
                                std::vector<std::string> states, std::vector<bool> accepting,
                                Alphabet work_alphabet) {
  if (states.empty()) throw MalformedInput("classical machine needs a state");
  if (accepting.size() != states.size()) throw MalformedInput("accepting flags do not match states");
  if (work_alphabet.size() == 0) throw MalformedInput("work alphabet needs a blank");
  ClassicalMachine t;
  t.states = std::move(states);
  t.accepting = std::move(accepting);
  t.input_alphabet = oracle_input_alphabet(g, pattern_alphabet);
  t.work_alphabet = std::move(work_alphabet);
  t.delta.assign(t.states.size() * t.input_alphabet.size() * t.work_alphabet.size(), std::nullopt);
  return t;
}

ClassicalMachine classical_from_json(const Group& g, const Alphabet& pattern_alphabet,
                                     const nlohmann::json& j) {
  try {
    auto states = j.at("states").get<std::vector<std::string>>();
    std::vector<bool> acc(states.size(), false);
    auto state_of = [&](const std::string& name) -> State {
      for (std::size_t i = 0; i < states.size(); ++i)
        if (states[i] == name) return State(i);
      throw MalformedInput("unknown classical state '" + name + "'");
    };
    for (const auto& a : j.value("accepting", nlohmann::json::array()))
      acc[state_of(a.get<std::string>())] = true;
    ClassicalMachine t = make_classical(g, pattern_alphabet, states, acc,
                                        Alphabet(j.at("work_alphabet").get<std::vector<std::string>>()));
    if (j.contains("query")) {
      t.query = state_of(j.at("query").get<std::string>());
      t.yes = state_of(j.at("yes").get<std::string>());
      t.no = state_of(j.at("no").get<std::string>());
    }
    auto moves = [](const nlohmann::json& r, const char* key) {
      int m = r.value(key, 0);
      if (m < -1 || m > 1) throw MalformedInput(std::string(key) + " must be -1, 0 or 1");
      return m;
    };
    // Rules with fewer "*" fields win.
    for (int pass = 2; pass >= 0; --pass) {
      for (const auto& r : j.at("delta")) {
        const std::string in = r.at("input").get<std::string>();
        const std::string work = r.at("work").get<std::string>();
        if (int(in == "*") + int(work == "*") != pass) continue;
        State q = state_of(r.at("state").get<std::string>());
        State next = state_of(r.at("next").get<std::string>());
        const std::string write = r.value("write", std::string("*"));
        for (Symbol a = 0; a < t.input_alphabet.size(); ++a) {
          if (in != "*" && a != t.input_alphabet.index_of(in)) continue;
          for (Symbol b = 0; b < t.work_alphabet.size(); ++b) {
            if (work != "*" && b != t.work_alphabet.index_of(work)) continue;
            Symbol w = write == "*" ? b : t.work_alphabet.index_of(write);
            t.rule(q, a, b) = ClassicalMachine::Rule{w, next, moves(r, "input_move"),
                                                     moves(r, "work_move")};
          }
        }
      }
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInput(std::string("classical machine JSON: ") + e.what());
  }
}

namespace {

enum Phase : std::uint32_t {
  kRRoot, kRErase, kRHome,                       // reset the simulation
  kStep, kScan, kToRootW, kWorkFind, kSetWork,   // one classical step
  kToRootI, kInFind, kSetIn, kToRootEnd,
  kHalt, kAccept,
  kQMark, kQRead, kQBack, kQUnread,              // oracle query
  kWSeekRoot, kWSeekEnd, kWHash, kWLet, kWSym,   // append an entry
  kAdvance,                                      // move forward along the path, then `cont`
  kPhaseCount
};

enum AuxState : State { kAIdle, kACopy, kABack, kAResume };

// Mixed-radix packing of the simulation head's state.
struct SimState {
  std::uint32_t phase = kRRoot, cont = 0, cq = 0, a_in = 0, a_work = 0, probe = 0, flags = 0;
};

struct SimCodec {
  std::array<std::uint64_t, 7> radix{};

  State pack(const SimState& s) const {
    const std::array<std::uint64_t, 7> v = {s.phase, s.cont, s.cq, s.a_in, s.a_work, s.probe, s.flags};
    std::uint64_t out = 0;
    for (std::size_t i = 7; i-- > 0;) out = out * radix[i] + v[i];
    return State(out);
  }
  SimState unpack(State q) const {
    std::array<std::uint64_t, 7> v{};
    std::uint64_t x = q;
    for (std::size_t i = 0; i < 7; ++i) {
      v[i] = x % radix[i];
      x /= radix[i];
    }
    return SimState{std::uint32_t(v[0]), std::uint32_t(v[1]), std::uint32_t(v[2]),
                    std::uint32_t(v[3]), std::uint32_t(v[4]), std::uint32_t(v[5]),
                    std::uint32_t(v[6])};
  }
};

// Simulation tape cell: input token with head flag, work token with head
// flag, and whether the work cell was ever used.
struct Cell {
  Symbol in = 0, work = 0;
  bool in_head = false, work_head = false, touched = false;
};

struct CellCodec {
  std::size_t nin = 0, nw = 0;
  Symbol encode(const Cell& c) const {
    return Symbol((((c.in * 2 + c.in_head) * nw + c.work) * 2 + c.work_head) * 2 + c.touched);
  }
  Cell decode(Symbol s) const {
    Cell c;
    c.touched = s % 2;
    s /= 2;
    c.work_head = s % 2;
    s /= 2;
    c.work = Symbol(s % nw);
    s /= Symbol(nw);
    c.in_head = s % 2;
    c.in = Symbol(s / 2);
    return c;
  }
};

constexpr Symbol kTokHash = 1, kTokColon = 2, kTokFirstLetter = 3;

}  // namespace

OracleSimulator build_oracle_simulator(GroupPtr g, const Alphabet& pattern_alphabet,
                                       ClassicalMachine classical) {
  if (classical.input_alphabet != oracle_input_alphabet(*g, pattern_alphabet))
    throw MalformedInput("classical machine was built for a different input alphabet");
  if (classical.accepting.size() != classical.states.size())
    throw MalformedInput("accepting flags do not match states");
  if (classical.query && (!classical.yes || !classical.no))
    throw MalformedInput("a query state needs yes and no states");

  OracleSimulator os;
  os.visit = build_m_visit(g);
  os.classical = std::move(classical);
  auto pm = std::make_shared<PathMachine>(os.visit.path);
  auto visit = std::make_shared<MultiHeadSpec>(os.visit.spec);
  auto t = std::make_shared<ClassicalMachine>(os.classical);
  const std::size_t k = pm->code.k;

  CellCodec cells{t->input_alphabet.size(), t->work_alphabet.size()};
  SimCodec codec;
  codec.radix = {kPhaseCount, kPhaseCount, t->states.size(), cells.nin, cells.nw, k + 1, 4};
  std::uint64_t total = 1;
  for (auto r : codec.radix) total *= r;
  if (total > 0xffffffffu) throw MalformedInput("classical machine too large to simulate");

  // Work symbols that spell generators in queries.
  std::vector<GenId> letter(cells.nw, Group::identity_generator());
  for (Symbol b = 0; b < cells.nw; ++b)
    for (GenId s : pm->directions)
      if (t->work_alphabet.label(b) == g->label_of(s)) letter[b] = s;
  std::vector<Symbol> token_of_dir(k);
  for (std::size_t i = 0; i < k; ++i) token_of_dir[i] = Symbol(kTokFirstLetter + i);
  const Symbol first_symbol_token = Symbol(kTokFirstLetter + k);

  std::vector<std::string> sim_labels;
  sim_labels.reserve(cells.nin * cells.nw * 8);
  for (Symbol s = 0; s < cells.nin * cells.nw * 8; ++s) {
    Cell c = cells.decode(s);
    sim_labels.push_back(t->input_alphabet.label(c.in) + (c.in_head ? "^" : "") + "|" +
                         t->work_alphabet.label(c.work) + (c.work_head ? "^" : "") +
                         (c.touched ? "+" : ""));
  }

  const auto& vl = os.visit.spec.layers;
  os.spec.group = g;
  os.spec.layers = {{"store", pattern_alphabet, 0},
                    vl[0],
                    vl[1],
                    vl[2],
                    {"aux", Alphabet({"_"}), 0},
                    {"oracle", Alphabet({"_", "o"}), 0},
                    {"sim", Alphabet(sim_labels), 0}};
  SimState init;
  init.flags = 1;  // nothing to erase yet
  const State sim_init = codec.pack(init);
  os.spec.initial_states = {0,     visit->initial_states[0], visit->initial_states[1],
                            visit->initial_states[2], kAIdle, 0, sim_init};
  os.spec.accepting = [codec](std::size_t layer, State q) {
    return layer == OracleSimulator::kSim && codec.unpack(q).phase == kAccept;
  };

  using OS = OracleSimulator;
  os.spec.delta = [pm, visit, t, cells, codec, letter, token_of_dir, first_symbol_token](
                      const HeadReader& r, const std::vector<State>& q) {
    const PathAlphabet& c = pm->code;
    const Group& grp = *pm->machine.group;
    const GenId stay = Group::identity_generator();
    MultiStep out{std::vector<Symbol>(7, 0), std::vector<State>(q), std::vector<GenId>(7, stay)};
    for (std::size_t i = 0; i < 7; ++i) out.write[i] = r.own(i);

    // Layers 1-3: M_VISIT. Counter and search freeze while an entry is copied.
    const MultiStep v = visit->delta(r.shifted(OS::kPath), {q[1], q[2], q[3]});
    out.write[OS::kPath] = v.write[0];
    out.next[OS::kPath] = v.next[0];
    out.move[OS::kPath] = v.move[0];

    const Symbol stored = r.at(OS::kStore, OS::kSearch);
    const bool event = (q[3] == pm->right(0) || q[3] == pm->init) && stored != 0;
    const State aux = q[4];
    SimState st = codec.unpack(q[6]);
    const bool freeze = aux == kACopy || aux == kABack || (event && aux == kAIdle);
    if (!freeze) {
      for (std::size_t i = 1; i < 3; ++i) {
        out.write[OS::kPath + i] = v.write[i];
        out.next[OS::kPath + i] = v.next[i];
        out.move[OS::kPath + i] = v.move[i];
      }
    }
    if (aux == kAResume) out.next[OS::kAux] = kAIdle;

    // Auxiliary walker returning to the origin along the search path.
    const Symbol under_aux = r.at(OS::kSearch, OS::kAux);
    if (aux == kABack) {
      if (!c.marked(under_aux) || c.first(under_aux) == PathAlphabet::kStart)
        out.next[OS::kAux] = kAResume;
      else
        out.move[OS::kAux] = grp.inverse(pm->directions[c.first(under_aux) - 2]);
    }

    if (event && aux == kAIdle && st.probe == 0 && (st.phase == kStep || st.phase == kHalt)) {
      out.next[OS::kAux] = kACopy;
      st.phase = kWSeekRoot;
      out.next[OS::kSim] = codec.pack(st);
      return out;
    }

    // Simulation head.
    const Symbol under = r.at(OS::kPath, OS::kSim);
    Cell x = cells.decode(r.own(OS::kSim));
    const Symbol oracle_cell = r.own(OS::kOracle);
    GenId& sim_move = out.move[OS::kSim];
    auto finish = [&]() {
      out.write[OS::kSim] = cells.encode(x);
      out.next[OS::kSim] = codec.pack(st);
      return out;
    };

    if (st.probe != 0) {
      const std::size_t d = st.probe - 1;
      st.probe = 0;
      if (!(c.marked(under) && c.first(under) == d + 2)) {
        sim_move = grp.inverse(pm->directions[d]);  // not the successor yet; retry
        return finish();
      }
      st.phase = st.cont;
    }
    if (!c.marked(under)) return finish();  // the path has not reached this cell yet
    const bool at_root = c.first(under) == PathAlphabet::kStart;
    auto forward = [&](std::uint32_t cont) {
      st.phase = kAdvance;
      st.cont = cont;
      const std::size_t d = c.third(under);
      if (d == 0) return;
      sim_move = pm->directions[d - 1];
      st.probe = std::uint32_t(d);
    };
    auto back = [&]() { sim_move = grp.inverse(pm->directions[c.first(under) - 2]); };
    auto rule = [&]() -> const ClassicalMachine::Rule& {
      return *t->rule(st.cq, st.a_in, st.a_work);
    };

    switch (st.phase) {
      case kAdvance:
        forward(st.cont);
        break;
      case kRRoot:
        if (at_root) st.phase = kRErase;
        else back();
        break;
      case kRErase: {
        const bool used = x.touched || x.work_head || x.work != 0;
        if (x.in_head) st.flags |= 1;
        x.in_head = x.work_head = x.touched = false;
        x.work = 0;
        if (!used && (st.flags & 1)) st.phase = kRHome;
        else forward(kRErase);
        break;
      }
      case kRHome:
        if (at_root) {
          x.in_head = x.work_head = x.touched = true;
          st.cq = 0;
          st.flags = 0;
          st.phase = kStep;
        } else {
          back();
        }
        break;
      case kStep:
        st.flags = 0;
        if (t->accepting[st.cq]) st.phase = kAccept;
        else if (t->query && st.cq == *t->query) st.phase = kQMark;
        else st.phase = kScan;
        break;
      case kScan:
        if (x.in_head) {
          st.a_in = x.in;
          st.flags |= 1;
        }
        if (x.work_head) {
          st.a_work = x.work;
          st.flags |= 2;
        }
        if (st.flags == 3) st.phase = t->rule(st.cq, st.a_in, st.a_work) ? kToRootW : kHalt;
        else forward(kScan);
        break;
      case kToRootW:
        if (at_root) st.phase = kWorkFind;
        else back();
        break;
      case kWorkFind:
        if (!x.work_head) {
          forward(kWorkFind);
          break;
        }
        x.work = rule().write;
        x.touched = true;
        st.phase = kToRootI;
        if (rule().work_move > 0) {
          x.work_head = false;
          forward(kSetWork);
        } else if (rule().work_move < 0 && !at_root) {
          x.work_head = false;
          back();
          st.phase = kSetWork;
        }
        break;
      case kSetWork:
        x.work_head = x.touched = true;
        st.phase = kToRootI;
        break;
      case kToRootI:
        if (at_root) st.phase = kInFind;
        else back();
        break;
      case kInFind:
        if (!x.in_head) {
          forward(kInFind);
          break;
        }
        st.phase = kToRootEnd;
        if (rule().input_move > 0) {
          x.in_head = false;
          forward(kSetIn);
        } else if (rule().input_move < 0 && !at_root) {
          x.in_head = false;
          back();
          st.phase = kSetIn;
        }
        break;
      case kSetIn:
        x.in_head = true;
        st.phase = kToRootEnd;
        break;
      case kToRootEnd:
        if (at_root) {
          st.cq = rule().next;
          st.phase = kStep;
        } else {
          back();
        }
        break;
      case kHalt:
      case kAccept:
        break;
      case kQMark:
        out.write[OS::kOracle] = 1;
        st.phase = kQRead;
        break;
      case kQRead:
        if (letter[x.work] != Group::identity_generator()) {
          out.move[OS::kOracle] = letter[x.work];
          forward(kQRead);
        } else {
          st.flags = oracle_cell == 1 ? 1 : 0;
          st.phase = kQBack;
        }
        break;
      case kQBack:
        if (at_root) {
          out.write[OS::kOracle] = 0;
          st.cq = st.flags ? *t->yes : *t->no;
          st.flags = 0;
          st.phase = kStep;
        } else {
          back();
          st.phase = kQUnread;
        }
        break;
      case kQUnread:
        out.move[OS::kOracle] = grp.inverse(letter[x.work]);
        st.phase = kQBack;
        break;
      case kWSeekRoot:
        if (at_root) st.phase = kWSeekEnd;
        else back();
        break;
      case kWSeekEnd:
        if (x.in == 0) st.phase = kWHash;
        else forward(kWSeekEnd);
        break;
      case kWHash:
        x.in = kTokHash;
        forward(kWLet);
        break;
      case kWLet: {
        const std::size_t d = c.marked(under_aux) ? c.third(under_aux) : 0;
        if (d == 0) {
          x.in = kTokColon;
          forward(kWSym);
        } else {
          x.in = token_of_dir[d - 1];
          out.move[OS::kAux] = pm->directions[d - 1];
          forward(kWLet);
        }
        break;
      }
      case kWSym:
        x.in = Symbol(first_symbol_token + stored);
        out.next[OS::kAux] = kABack;
        st = SimState{};
        st.phase = kRRoot;
        break;
      default:
        throw UndefinedTransition("simulation head in an unknown phase");
    }
    return finish();
  };

  const State search_wait = visit->initial_states[2];
  const State counter_init = visit->initial_states[1];
  os.spec.supervisor = [sim_init, search_wait, counter_init](MultiHeadConfig& c,
                                                              const std::vector<Element>& prev) {
    // The path layer erased a cell other layers were using: restart them.
    const Element& erased = prev[OS::kPath];
    if (c.tapes[OS::kPath].get(erased) != 0) return;
    if (c.tapes[OS::kCounter].get(erased) == 0 && c.tapes[OS::kSim].get(erased) == 0) return;
    for (std::size_t i = OS::kCounter; i <= OS::kSim; ++i) {
      c.tapes[i].clear();
      c.heads[i] = Element{};
    }
    c.states[OS::kCounter] = counter_init;
    c.states[OS::kSearch] = search_wait;
    c.states[OS::kAux] = kAIdle;
    c.states[OS::kOracle] = 0;
    c.states[OS::kSim] = sim_init;
  };
  return os;
}

std::vector<Symbol> simulated_input(const OracleSimulator& os, const MultiHeadConfig& c) {
  std::vector<Symbol> out;
  auto path = marked_path(os.visit.path, c.tapes[OracleSimulator::kPath]);
  if (!path) return out;
  CellCodec cells{os.classical.input_alphabet.size(), os.classical.work_alphabet.size()};
  for (const auto& e : *path) {
    Symbol tok = cells.decode(c.tapes[OracleSimulator::kSim].get(e)).in;
    if (tok == 0) break;
    out.push_back(tok);
  }
  return out;
}

std::optional<State> simulated_state(const OracleSimulator& os, const MultiHeadConfig& c) {
  SimCodec codec;
  const std::size_t k = os.visit.path.code.k;
  codec.radix = {kPhaseCount, kPhaseCount, os.classical.states.size(),
                 os.classical.input_alphabet.size(), os.classical.work_alphabet.size(), k + 1, 4};
  SimState st = codec.unpack(c.states[OracleSimulator::kSim]);
  if (st.phase == kRRoot || st.phase == kRErase || st.phase == kRHome) return std::nullopt;
  if (st.phase >= kWSeekRoot && st.phase <= kWSym) return std::nullopt;
  if (st.phase == kAdvance && (st.cont == kRErase || (st.cont >= kWSeekRoot && st.cont <= kWSym)))
    return std::nullopt;
  return st.cq;
}

}  // namespace gshift
