#include <map>

#include "gshift/cayley.hpp"
#include "gshift/errors.hpp"
#include "gshift/reductions.hpp"

namespace gshift {

namespace {

SymbolSet where(std::size_t size, const std::function<bool(Symbol)>& pred) {
  SymbolSet s(size);
  for (Symbol a = 0; a < size; ++a)
    if (pred(a)) s.set(a);
  return s;
}

// What a state of T~ does with the work symbol under the head.
enum class WorkOp { kKeep, kCopy, kErase };

struct ScriptStep {
  WorkOp op = WorkOp::kKeep;
  GenId move = 0;
  State next = 0;
};

struct RunKey {
  State q;
  std::size_t t;
  std::vector<GenId> path;
  auto operator<=>(const RunKey&) const = default;
};

class WrappedBuilder {
 public:
  WrappedBuilder(const GMachineSpec& t, const Alphabet& reading, std::size_t n_max)
      : t_(t), reading_(reading), n_max_(n_max), g_(*t.group) {
    for (Symbol a = 0; a < reading.size(); ++a) {
      auto w = t.alphabet.find(reading.label(a));
      if (!w) throw MalformedInput("machine alphabet lacks the symbol " + reading.label(a));
      copy_of_.push_back(*w);
    }
  }

  GMachineSpec build() {
    names_.push_back("start");
    kind_.push_back(Kind::kScript);
    script_.emplace_back();
    run_.emplace_back();
    State entry = 0;
    for (std::size_t n = 1; n <= n_max_; ++n) {
      for (std::size_t k = 1; k <= n; ++k) {
        const std::string stage = "n" + std::to_string(n) + "k" + std::to_string(k);
        const State copy_end = walk_script(entry, k, WorkOp::kCopy, stage + ".copy");
        const State erase = add_script(stage + ".erase", {});
        const State erase_end = walk_script(erase, std::max(k, n), WorkOp::kErase, stage + ".erase");
        const State run = run_state({0, 0, {}}, n, erase, stage);
        script_[copy_end] = {WorkOp::kKeep, 0, run};
        entry = add_script(stage + ".next", {});
        script_[erase_end] = {WorkOp::kKeep, 0, entry};
      }
    }
    kind_[entry] = Kind::kDone;
    names_[entry] = "done";
    accept_ = State(names_.size());
    names_.push_back("accept");
    kind_.push_back(Kind::kAccept);
    script_.emplace_back();
    run_.emplace_back();
    for (State id : pending_accept_) script_[id].next = accept_;

    std::vector<bool> accepting(names_.size(), false);
    accepting[accept_] = true;
    std::vector<std::string> pairs;
    for (Symbol a = 0; a < reading_.size(); ++a)
      for (Symbol w = 0; w < t_.alphabet.size(); ++w)
        pairs.push_back(reading_.label(a) + ":" + t_.alphabet.label(w));
    GMachineSpec m = make_machine(t_.group, Alphabet(pairs), Symbol(t_.blank), names_, accepting);
    const std::size_t nw = t_.alphabet.size();
    for (State q = 0; q < names_.size(); ++q) {
      for (Symbol a = 0; a < reading_.size(); ++a) {
        for (Symbol w = 0; w < nw; ++w) {
          const Symbol sym = Symbol(a * nw + w);
          switch (kind_[q]) {
            case Kind::kAccept:
              break;
            case Kind::kDone:
              m.rule(sym, q) = Transition{sym, q, 0};
              break;
            case Kind::kScript: {
              const auto& s = script_[q];
              Symbol out = w;
              if (s.op == WorkOp::kCopy) out = copy_of_[a];
              if (s.op == WorkOp::kErase) out = t_.blank;
              m.rule(sym, q) = Transition{Symbol(a * nw + out), s.next, s.move};
              break;
            }
            case Kind::kRun: {
              const auto& r = run_[q];
              auto it = r.on.find(w);
              m.rule(sym, q) = it == r.on.end() ? Transition{sym, r.halted, 0}
                                                : Transition{Symbol(a * nw + it->second.write),
                                                             it->second.next, it->second.move};
              break;
            }
          }
        }
      }
    }
    return m;
  }

 private:
  enum class Kind { kScript, kRun, kDone, kAccept };
  struct RunState {
    std::map<Symbol, Transition> on;  // work symbol -> rule
    State halted = 0;                 // where to go when T has no rule
  };

  State add_script(const std::string& name, ScriptStep s) {
    names_.push_back(name + "." + std::to_string(names_.size()));
    kind_.push_back(Kind::kScript);
    script_.push_back(s);
    run_.emplace_back();
    return State(names_.size() - 1);
  }

  // Visits every word of length <= radius from `first`, applying op at its
  // end and walking back. Returns the last state, whose step is left for the
  // caller.
  State walk_script(State first, std::size_t radius, WorkOp op, const std::string& name) {
    State cur = first;
    auto chain = [&](WorkOp o, GenId move) {
      State nxt = add_script(name, {});
      script_[cur] = {o, move, nxt};
      cur = nxt;
    };
    for (const Word& u : enumerate_words(g_, radius)) {
      for (GenId s : u.letters) chain(WorkOp::kKeep, s);
      chain(op, u.empty() ? 0 : g_.inverse(u.letters.back()));
      for (std::size_t i = u.size(); i-- > 1;) chain(WorkOp::kKeep, g_.inverse(u.letters[i - 1]));
    }
    return cur;
  }

  // Walks back along `path` and continues at `after`.
  State return_state(std::vector<GenId> path, State after) {
    if (path.empty()) return after;
    auto key = std::make_pair(path, after);
    auto it = returns_.find(key);
    if (it != returns_.end()) return it->second;
    const State id = add_script("return", {});
    returns_.emplace(key, id);
    const GenId last = path.back();
    path.pop_back();
    const State next = return_state(path, after);
    script_[id] = {WorkOp::kKeep, g_.inverse(last), next};
    return id;
  }

  State run_state(const RunKey& key, std::size_t n, State after, const std::string& stage) {
    auto full = std::make_tuple(key, n, after);
    auto it = runs_.find(full);
    if (it != runs_.end()) return it->second;
    if (key.t == n) return return_state(key.path, after);
    if (t_.accepting[key.q]) {
      const State id = add_script("to-accept", {});
      pending_accept_.push_back(id);
      runs_.emplace(full, id);
      return id;
    }
    const State id = State(names_.size());
    names_.push_back(stage + ".run." + t_.states[key.q] + "." + std::to_string(id));
    kind_.push_back(Kind::kRun);
    script_.emplace_back();
    run_.emplace_back();
    runs_.emplace(full, id);
    RunState rs;
    rs.halted = return_state(key.path, after);
    for (Symbol w = 0; w < t_.alphabet.size(); ++w) {
      const auto& rule = t_.rule(w, key.q);
      if (!rule) continue;
      RunKey next{rule->next, key.t + 1, key.path};
      if (rule->move != 0) next.path.push_back(rule->move);
      State target;
      if (t_.accepting[rule->next]) {
        target = add_script("to-accept", {});
        pending_accept_.push_back(target);
      } else {
        target = run_state(next, n, after, stage);
      }
      rs.on[w] = Transition{rule->write, target, rule->move};
    }
    run_[id] = std::move(rs);
    return id;
  }

  const GMachineSpec& t_;
  const Alphabet& reading_;
  std::size_t n_max_;
  const Group& g_;
  std::vector<Symbol> copy_of_;
  std::vector<std::string> names_;
  std::vector<Kind> kind_;
  std::vector<ScriptStep> script_;
  std::vector<RunState> run_;
  std::map<std::tuple<RunKey, std::size_t, State>, State> runs_;
  std::map<std::pair<std::vector<GenId>, State>, State> returns_;
  std::vector<State> pending_accept_;  // states whose next is the accept state
  State accept_ = 0;
};

// Patterns of a family over a small alphabet, read through s -> s / factor.
class ProjectedConstraint final : public GlobalConstraint {
 public:
  ProjectedConstraint(GlobalPtr inner, std::size_t factor) : inner_(std::move(inner)), factor_(factor) {}
  bool violated_at(const Window& w, const Assignment& a, std::size_t last) const override {
    return inner_->violated_at(w, project(a), last);
  }
  bool violated(const Window& w, const Assignment& a) const override {
    return inner_->violated(w, project(a));
  }

 private:
  Assignment project(const Assignment& a) const {
    Assignment out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      out[i] = a[i] == kUnassigned ? kUnassigned : std::int32_t(std::size_t(a[i]) / factor_);
    return out;
  }
  GlobalPtr inner_;
  std::size_t factor_;
};

class ProjectedFamily final : public ForbiddenFamily {
 public:
  ProjectedFamily(FamilyPtr inner, std::size_t inner_size, std::size_t factor, Alphabet inner_alphabet)
      : inner_(std::move(inner)), inner_size_(inner_size), factor_(factor),
        inner_alphabet_(std::move(inner_alphabet)) {}

  nlohmann::json to_json(const Group& g, const Alphabet&) const override {
    return {{"kind", "projected"}, {"factor", factor_}, {"inner", inner_->to_json(g, inner_alphabet_)}};
  }
  std::vector<SetPattern> local_patterns(const Group& g, std::size_t size,
                                         std::size_t radius) const override {
    return lift(inner_->local_patterns(g, inner_size_, radius), size);
  }
  std::vector<SetPattern> listed_patterns(const Group& g, std::size_t size,
                                          std::size_t radius) const override {
    return lift(inner_->listed_patterns(g, inner_size_, radius), size);
  }
  std::vector<GlobalPtr> global_constraints(const Group& g) const override {
    std::vector<GlobalPtr> out;
    for (auto& c : inner_->global_constraints(g))
      out.push_back(std::make_shared<ProjectedConstraint>(c, factor_));
    return out;
  }

 private:
  std::vector<SetPattern> lift(std::vector<SetPattern> ps, std::size_t size) const {
    for (auto& p : ps)
      for (auto& c : p.cells) {
        SymbolSet s(size);
        for (Symbol a = 0; a < size; ++a)
          if (c.allowed.test(a / factor_)) s.set(a);
        c.allowed = std::move(s);
      }
    return ps;
  }
  FamilyPtr inner_;
  std::size_t inner_size_, factor_;
  Alphabet inner_alphabet_;
};

}  // namespace

WrappedMachine build_wrapped_machine(const GMachineSpec& t, const Alphabet& reading,
                                     std::size_t n_max) {
  if (n_max == 0) throw MalformedInput("the wrapped machine needs n_max >= 1");
  WrappedMachine out;
  out.reading = reading;
  out.work = t.alphabet;
  out.n_max = n_max;
  out.machine = WrappedBuilder(t, reading, n_max).build();
  return out;
}

Symbol SimulationBundle::encode(const Parts& p) const {
  const std::size_t na = wrapped.reading.size(), nw = wrapped.work.size();
  return Symbol((((std::size_t(p.stream) * 3 + p.layer) * na + p.read) * nw + p.work) * (k + 1) +
                p.state);
}

SimulationBundle::Parts SimulationBundle::decode(Symbol s) const {
  const std::size_t na = wrapped.reading.size(), nw = wrapped.work.size();
  Parts p;
  p.state = Symbol(s % (k + 1));
  s = Symbol(s / (k + 1));
  p.work = Symbol(s % nw);
  s = Symbol(s / nw);
  p.read = Symbol(s % na);
  s = Symbol(s / na);
  p.layer = Symbol(s % 3);
  p.stream = Symbol(s / 3);
  return p;
}

std::vector<SetPattern> SimulationBundle::all_patterns() const {
  std::vector<SetPattern> out;
  for (const auto* f : {&configuration, &starting, &ending, &transition})
    out.insert(out.end(), f->begin(), f->end());
  return out;
}

SubshiftSpec SimulationBundle::spec() const {
  const std::size_t factor = final_alphabet.size() / u.alphabet.size();
  auto lifted = std::make_shared<ProjectedFamily>(u.rules, u.alphabet.size(), factor, u.alphabet);
  return {final_alphabet, u.levels.product, union_family({lifted, finite_family(all_patterns())})};
}

SimulationBundle build_simulation(GroupPtr g, const GMachineSpec& mx, const Alphabet& a,
                                  Symbol abar, const XTimeParams& p, std::size_t height,
                                  std::size_t n_max) {
  if (abar >= a.size()) throw MalformedInput("abar is not a symbol of the alphabet");
  if (mx.group != g && mx.group->to_json() != g->to_json())
    throw MalformedInput("machine runs on a different group");
  SimulationBundle b;
  b.u = build_u_rules(g, p, height);
  b.wrapped = build_wrapped_machine(mx, a, n_max);
  b.abar = abar;
  const GMachineSpec& m = b.wrapped.machine;
  b.k = m.state_count();  // state q of T~ is numbered q + 1; accept is last

  const Alphabet xs = xtime_alphabet(*g);
  const Alphabet& work = b.wrapped.work;
  std::vector<std::string> labels;
  for (Symbol x = 0; x < xs.size(); ++x)
    for (int y = 0; y < 3; ++y)
      for (Symbol r = 0; r < a.size(); ++r)
        for (Symbol w = 0; w < work.size(); ++w)
          for (std::size_t q = 0; q <= b.k; ++q)
            labels.push_back(xs.label(x) + "/" + std::to_string(y) + "/" + a.label(r) + "/" +
                             work.label(w) + "/" + std::to_string(q));
  b.final_alphabet = Alphabet(labels);
  const std::size_t size = labels.size();
  auto is = [&](auto pred) { return where(size, [&, pred](Symbol s) { return pred(b.decode(s)); }); };
  using P = SimulationBundle::Parts;

  const LevelGroup& lv = b.u.levels;
  const Element one = lv.product->identity();
  const Element up = lv.at(g->identity(), 1);
  const Symbol blank = Symbol(mx.blank);

  for (Symbol r = 0; r < a.size(); ++r)
    b.configuration.push_back({{{one, is([r](const P& x) { return x.read == r; })},
                                {up, is([r](const P& x) { return x.read != r; })}},
                               "configuration"});

  b.starting.push_back(
      {{{one, is([blank](const P& x) { return x.stream == kXPlay && x.work != blank; })}}, "starting"});
  b.starting.push_back(
      {{{one, is([](const P& x) { return x.stream == kXPlay && x.layer == 1 && x.state != 1; })}},
       "starting"});
  b.starting.push_back(
      {{{one, is([](const P& x) { return x.stream == kXPlay && x.layer != 1 && x.state != 0; })}},
       "starting"});

  const std::size_t k = b.k;
  for (Symbol w = 0; w < work.size(); ++w)
    b.ending.push_back({{{one, is([w, k](const P& x) { return x.work == w && x.state == k; })}}, "ending"});

  // Transitions act between a level and the dot level above it.
  for (Symbol w = 0; w < work.size(); ++w)
    for (Symbol w2 = 0; w2 < work.size(); ++w2) {
      if (w == w2) continue;
      b.transition.push_back(
          {{{one, is([w](const P& x) { return x.work == w && x.state == 0; })},
            {up, is([w2](const P& x) { return x.stream == kXDot && x.work == w2; })}},
           "A2"});
    }
  // A head on a 0 cell is frozen.
  for (Symbol w = 0; w < work.size(); ++w)
    b.transition.push_back(
        {{{one, is([w](const P& x) { return x.work == w && x.state != 0 && x.layer == 0; })},
          {up, is([w](const P& x) { return x.stream == kXDot && x.work != w; })}},
         "frozen"});
  for (std::size_t q = 1; q <= k; ++q)
    b.transition.push_back(
        {{{one, is([q](const P& x) { return x.state == q && x.layer == 0; })},
          {up, is([q](const P& x) { return x.stream == kXDot && x.state != q; })}},
         "frozen"});
  const std::size_t nw = work.size();
  for (State q = 0; q < m.state_count(); ++q) {
    for (Symbol r = 0; r < a.size(); ++r) {
      for (Symbol w = 0; w < nw; ++w) {
        const auto& rule = m.rule(Symbol(r * nw + w), q);
        if (!rule) continue;
        const Symbol w2 = Symbol(rule->write % nw);
        const std::size_t qq = q + 1, rr = rule->next + 1;
        const SymbolSet here = is([=](const P& x) {
          return x.read == r && x.work == w && x.state == qq && x.layer != 0;
        });
        for (Symbol c = 0; c < nw; ++c) {
          if (c == w2) continue;
          b.transition.push_back(
              {{{one, here}, {up, is([c](const P& x) { return x.stream == kXDot && x.work == c; })}},
               "B1"});
        }
        b.transition.push_back(
            {{{one, here},
              {lv.at(g->canonical(Word{rule->move}), 1),
               is([rr](const P& x) { return x.stream == kXDot && x.state != rr; })}},
             "B2"});
      }
    }
  }

  b.phi = make_block_code({g->identity()}, size, a.size(), [&b](const std::vector<Symbol>& in) {
    const auto x = b.decode(in[0]);
    return x.stream == kXStar ? x.read : b.abar;
  });
  b.phi.window = {one};
  return b;
}

namespace {

nlohmann::json intervals(const SymbolSet& s) {
  nlohmann::json out = nlohmann::json::array();
  for (auto a = s.find_first(); a != SymbolSet::npos;) {
    auto b = a;
    while (b + 1 < s.size() && s.test(b + 1)) ++b;
    out.push_back({a, b});
    a = b + 1 < s.size() ? s.find_next(b) : SymbolSet::npos;
  }
  return out;
}

nlohmann::json family_json(const Group& g, const std::vector<SetPattern>& ps) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : ps) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : p.cells) cells.push_back({format_element(g, c.offset), intervals(c.allowed)});
    out.push_back({{"tag", p.tag}, {"support", cells}});
  }
  return out;
}

}  // namespace

nlohmann::json simulation_to_json(const SimulationBundle& b) {
  const Group& g = *b.u.levels.product;
  nlohmann::json phi = nlohmann::json::array();
  for (Symbol s : b.phi.table) phi.push_back(s);
  return {{"group", g.to_json()},
          {"components",
           {{"stream", xtime_alphabet(*b.u.levels.base).labels()},
            {"layer", {"0", "1", "2"}},
            {"reading", b.wrapped.reading.labels()},
            {"work", b.wrapped.work.labels()},
            {"states", b.k}}},
          {"symbol_index", "(((stream * 3 + layer) * |reading| + read) * |work| + work) * (states + 1) + state"},
          {"alphabet_size", b.final_alphabet.size()},
          {"abar", b.wrapped.reading.label(b.abar)},
          {"wrapped_machine", machine_to_json(b.wrapped.machine)},
          {"n_max", b.wrapped.n_max},
          {"u_rules", b.u.rules->to_json(g, b.u.alphabet)},
          {"configuration", family_json(g, b.configuration)},
          {"starting", family_json(g, b.starting)},
          {"ending", family_json(g, b.ending)},
          {"transition", family_json(g, b.transition)},
          {"phi", phi}};
}

Symbol simulation_filler(const SimulationBundle& b, Symbol x) {
  return b.encode({kXDot, 0, x, Symbol(b.wrapped.machine.blank % b.wrapped.work.size()), 0});
}

}  // namespace gshift
