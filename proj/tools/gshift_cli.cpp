#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "gshift/cayley.hpp"
#include "gshift/errors.hpp"
#include "gshift/io.hpp"
#include "gshift/machine.hpp"
#include "gshift/pattern.hpp"
#include "gshift/reductions.hpp"
#include "gshift/subshift.hpp"

using namespace gshift;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr int kOk = 0, kNegative = 1, kUsage = 2, kBudget = 3;

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MalformedInput("cannot read " + path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 14];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) EVP_DigestUpdate(ctx, buf, std::size_t(in.gcount()));
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return hex.str();
}

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

// Everything a subcommand reports: the result, text lines, and manifest data.
struct Run {
  std::string format = "text";
  std::string output;    // -o target for the main artifact
  std::string manifest;  // manifest file; stderr when empty
  std::size_t budget = 0;
  std::map<std::string, std::string> inputs;  // path -> digest
  json parameters = json::object();
  json result = json::object();
  std::vector<std::string> text;
  std::string outcome;

  json load(const std::string& path) {
    inputs[path] = sha256_file(path);
    return read_json_file(path);
  }
  GroupPtr group(const std::string& path) { return group_from_json(load(path)); }
  void say(std::string line) { text.push_back(std::move(line)); }
};

std::size_t default_budget(std::size_t fallback) {
  if (const char* env = std::getenv("GSHIFT_BUDGET")) {
    try {
      return std::size_t(std::stod(env));
    } catch (...) {
      throw MalformedInput("GSHIFT_BUDGET must be a number");
    }
  }
  return fallback;
}

std::size_t parse_count(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || v < 0) throw std::invalid_argument(s);
    return std::size_t(v);
  } catch (const std::exception&) {
    throw MalformedInput("not a count: " + s);
  }
}

Alphabet alphabet_of(const json& j) { return Alphabet(j.at("alphabet").get<std::vector<std::string>>()); }

PatternCoding coding_of(const Group& g, const Alphabet& a, const json& j) {
  PatternCoding c;
  for (const auto& e : j.at("entries")) {
    if (!e.is_array() || e.size() != 2) throw MalformedInput("coding entry must be [word, symbol]");
    c.entries.push_back({parse_word(g, e[0].get<std::string>()), a.index_of(e[1].get<std::string>())});
  }
  return c;
}

json coding_json(const Group& g, const Alphabet& a, const PatternCoding& c) {
  json entries = json::array();
  for (const auto& e : c.entries) entries.push_back({format_word(g, e.word), a.label(e.symbol)});
  return {{"alphabet", a.labels()}, {"entries", entries}};
}

std::string path_dot(const Group& g, const std::vector<Element>& path) {
  std::ostringstream out;
  out << "digraph path {\n";
  for (std::size_t i = 0; i < path.size(); ++i)
    out << "  n" << i << " [label=\"" << format_element(g, path[i]) << "\"];\n";
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const Element step = g.relative(path[i], path[i + 1]);
    out << "  n" << i << " -> n" << i + 1 << " [label=\"" << format_element(g, step) << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

std::string pattern_dot(const Group& g, const Alphabet& a, const Pattern& p) {
  std::ostringstream out;
  out << "graph pattern {\n";
  std::map<Element, std::size_t> id;
  for (const auto& [e, s] : p.cells()) {
    id.emplace(e, id.size());
    out << "  n" << id[e] << " [label=\"" << format_element(g, e) << ":" << a.label(s) << "\"];\n";
  }
  for (const auto& [e, s] : p.cells())
    for (GenId gen : g.moving_generators()) {
      auto it = id.find(g.multiply(e, gen));
      if (it != id.end() && id[e] < it->second)
        out << "  n" << id[e] << " -- n" << it->second << " [label=\"" << g.label_of(gen) << "\"];\n";
    }
  out << "}\n";
  return out.str();
}

std::string shown(std::string s) { return s.empty() ? "ε" : s; }

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MalformedInput("cannot write " + path);
  out << body;
}

// ---------------------------------------------------------------------------

struct Options {
  std::string group, word, coding, enumeration, subshift, pattern, machine, target, classical,
      instance, schedule = "paper-example", a1 = "windowed:2", abar, free_factor, seed, alphabet;
  std::size_t n = 1, big_n = 2, radius = 2, height = 6, steps = 1000, max_len = 2, n_max = 1, index = 0;
  std::string budget;
  bool trace = false, component = false;
  std::vector<std::string> maps;
};

std::size_t budget_of(const Options& o, std::size_t fallback) {
  return o.budget.empty() ? default_budget(fallback) : parse_count(o.budget);
}

int cmd_wp(Run& r, const Options& o) {
  auto g = r.group(o.group);
  const bool id = solve_word_problem(*g, parse_word(*g, o.word));
  r.result = {{"word", o.word}, {"identity", id}};
  r.say(id ? "true" : "false");
  r.outcome = id ? "identity" : "not identity";
  return id ? kOk : kNegative;
}

int cmd_canon(Run& r, const Options& o) {
  auto g = r.group(o.group);
  const Element e = g->canonical(parse_word(*g, o.word));
  const std::string c = format_word(*g, e.expand());
  r.result = {{"word", o.word}, {"canonical", c}, {"letters", e.letter_count()}};
  r.say(shown(c));
  r.outcome = "canonical form";
  return kOk;
}

int cmd_ball(Run& r, const Options& o) {
  auto g = r.group(o.group);
  const auto b = ball(*g, o.n, budget_of(o, kDefaultBallBudget), r.format == "dot");
  json elems = json::array();
  for (std::size_t i = 0; i < b.size(); ++i)
    elems.push_back({{"element", format_element(*g, b.elements[i])}, {"distance", b.distance[i]}});
  r.result = {{"radius", o.n}, {"size", b.size()}, {"elements", elems}};
  if (r.format == "dot") r.say(ball_to_dot(*g, b));
  else {
    r.say("|B_" + std::to_string(o.n) + "| = " + std::to_string(b.size()));
    for (std::size_t i = 0; i < b.size(); ++i)
      r.say(std::to_string(b.distance[i]) + " " + shown(format_element(*g, b.elements[i])));
  }
  r.outcome = "ball of size " + std::to_string(b.size());
  return kOk;
}

int cmd_words(Run& r, const Options& o) {
  auto g = r.group(o.group);
  json ws = json::array();
  for (const auto& w : enumerate_words(*g, o.max_len)) {
    ws.push_back(format_word(*g, w));
    r.say(shown(format_word(*g, w)));
  }
  r.result = {{"max_len", o.max_len}, {"words", ws}};
  r.outcome = std::to_string(ws.size()) + " words";
  return kOk;
}

int cmd_sequences(Run& r, const Options& o) {
  auto g = r.group(o.group);
  const std::size_t budget = budget_of(o, kDefaultBallBudget);
  if (o.component) {
    const auto seq = component_sequence(*g, o.big_n, parse_word(*g, o.seed), o.n, budget);
    json xs = json::array();
    for (const auto& e : seq) {
      xs.push_back(format_element(*g, e));
      r.say(shown(format_element(*g, e)));
    }
    r.result = {{"big_n", o.big_n}, {"n", o.n}, {"seed", o.seed}, {"sequence", xs}};
    r.outcome = "component sequence";
    return kOk;
  }
  const auto s = disjoint_ball_sequences(*g, o.n, budget);
  json gs = json::array(), hs = json::array();
  for (std::size_t i = 0; i < s.g.size(); ++i) {
    gs.push_back(format_word(*g, s.g_words[i]));
    hs.push_back(format_word(*g, s.h_words[i]));
    r.say("g" + std::to_string(i) + " = " + format_word(*g, s.g_words[i]) + "   h" + std::to_string(i) +
          " = " + format_word(*g, s.h_words[i]));
  }
  r.result = {{"n", o.n}, {"g", gs}, {"h", hs}};
  r.outcome = "disjoint ball sequences";
  return kOk;
}

int cmd_coding_check(Run& r, const Options& o) {
  auto g = r.group(o.group);
  const json j = r.load(o.coding);
  const Alphabet a = alphabet_of(j);
  const auto res = check_consistency(*g, coding_of(*g, a, j));
  if (res.consistent) {
    r.result = {{"consistent", true}, {"pattern", pattern_to_json(*g, a, res.pattern)}};
    r.say("CONSISTENT");
    for (const auto& [e, s] : res.pattern.cells()) r.say("  " + shown(format_element(*g, e)) + " -> " + a.label(s));
    r.outcome = "consistent";
    return kOk;
  }
  const std::string u = format_word(*g, res.witness.first), v = format_word(*g, res.witness.second);
  r.result = {{"consistent", false}, {"witness", {u, v}}};
  r.say("INCONSISTENT");
  r.say("  " + u + " = " + v);
  r.outcome = "inconsistent";
  return kNegative;
}

int cmd_completion(Run& r, const Options& o) {
  auto g = r.group(o.group);
  const json e = r.load(o.enumeration);
  const json c = r.load(o.coding);
  const Alphabet a = alphabet_of(e);
  std::vector<PatternCoding> list;
  for (const auto& x : e.at("codings")) list.push_back(coding_of(*g, a, x));
  CodingEnumeration en = [list](std::size_t i) -> std::optional<PatternCoding> {
    if (i < list.size()) return list[i];
    return std::nullopt;
  };
  const bool member = decidable_completion_contains(*g, en, coding_of(*g, a, c), budget_of(o, 10000));
  r.result = {{"member", member}};
  r.say(member ? "member" : "not a member");
  r.outcome = member ? "member" : "not a member";
  return member ? kOk : kNegative;
}

int cmd_subshift_check(Run& r, const Options& o) {
  const SubshiftSpec s = subshift_from_json(r.load(o.subshift));
  const Pattern p = pattern_from_json(*s.group, s.alphabet, r.load(o.pattern));
  const bool ok = locally_admissible(p, s);
  r.result = {{"locally_admissible", ok}};
  r.say(ok ? "locally admissible" : "contains a forbidden pattern");
  r.outcome = ok ? "admissible" : "forbidden";
  return ok ? kOk : kNegative;
}

int cmd_subshift_extend(Run& r, const Options& o) {
  const SubshiftSpec s = subshift_from_json(r.load(o.subshift));
  const Pattern p = pattern_from_json(*s.group, s.alphabet, r.load(o.pattern));
  const bool ok = extendable(p, s, o.radius, budget_of(o, kDefaultSearchBudget)) == Extendability::kYes;
  r.result = {{"radius", o.radius}, {"extendable", ok}};
  r.say(ok ? "extendable" : "not extendable");
  r.outcome = ok ? "extendable" : "not extendable";
  return ok ? kOk : kNegative;
}

int cmd_delone(Run& r, const Options& o) {
  auto g = r.group(o.group);
  const Pattern y = greedy_delone_configuration(g, o.n, o.radius);
  const Alphabet a({"0", "1", "2"});
  r.result = {{"n", o.n}, {"radius", o.radius}, {"pattern", pattern_to_json(*g, a, y)}};
  if (r.format == "dot") r.say(pattern_dot(*g, a, y));
  else
    for (const auto& [e, s] : y.cells()) r.say(shown(format_element(*g, e)) + " " + a.label(s));
  r.outcome = "delone configuration";
  return kOk;
}

GMachineSpec load_machine(Run& r, GroupPtr g, const std::string& path) {
  return machine_from_json(g, r.load(path));
}

Pattern load_pattern(Run& r, const Group& g, const Alphabet& a, const std::string& path) {
  if (path.empty()) return Pattern{};
  return pattern_from_json(g, a, r.load(path));
}

int cmd_machine_run(Run& r, const Options& o) {
  auto g = r.group(o.group);
  const auto m = load_machine(r, g, o.machine);
  const Pattern p = load_pattern(r, *g, m.alphabet, o.pattern);
  json trace = json::array();
  TraceSink sink = nullptr;
  if (o.trace)
    sink = [&](const TraceRecord& t) {
      trace.push_back({{"step", t.step}, {"state", m.states[t.state]}, {"head", format_element(*g, t.head)},
                       {"written", m.alphabet.label(t.written)}});
      r.say(std::to_string(t.step) + " " + m.states[t.state] + " " + shown(format_element(*g, t.head)) + " " +
            m.alphabet.label(t.written));
    };
  const std::size_t budget = budget_of(o, 100000);
  const auto res = run_accepts(m, p, budget, sink);
  r.result = {{"accepted", res.accepted}, {"steps", res.steps}, {"budget", budget}};
  if (o.trace) r.result["trace"] = trace;
  r.say(res.accepted ? "accepted after " + std::to_string(res.steps) + " steps"
                     : "not accepted within " + std::to_string(budget) + " steps");
  r.outcome = res.accepted ? "accepted" : "undetermined";
  return res.accepted ? kOk : kBudget;
}

int cmd_machine_path(Run& r, const Options& o) {
  auto g = r.group(o.group);
  const PathMachine pm = build_m_path(g);
  MachineConfig c = initial_config(pm.machine, Pattern{});
  PathTracker tracker(pm);
  std::size_t longest = 0;
  for (std::size_t i = 0; i < o.steps; ++i) {
    const Element at = c.head;
    const Symbol before = c.tape.get(at);
    step_moving(pm.machine, c);
    std::string why;
    if (!tracker.update(at, before, c.tape.get(at), &why)) throw Error("path invariant broken: " + why);
    longest = std::max(longest, tracker.path().size());
  }
  const auto& path = tracker.path();
  json cells = json::array();
  for (const auto& e : path) cells.push_back(format_element(*g, e));
  r.result = {{"steps", o.steps}, {"length", path.size()}, {"longest", longest}, {"path", cells},
              {"state", pm.machine.states[c.state]}};
  if (r.format == "dot") r.say(path_dot(*g, path));
  else {
    r.say("path of " + std::to_string(path.size()) + " cells after " + std::to_string(o.steps) + " steps");
    for (const auto& e : path) r.say("  " + shown(format_element(*g, e)));
  }
  r.outcome = "simple path of " + std::to_string(path.size()) + " cells";
  return kOk;
}

int cmd_machine_visit(Run& r, const Options& o) {
  auto g = r.group(o.group);
  const VisitMachine vm = build_m_visit(g);
  MultiHeadConfig c = initial_multi_config(vm.spec, Pattern{});
  const std::size_t budget = budget_of(o, 1000000);
  std::set<Element> visited;
  std::vector<Element> order;
  while (c.steps < budget && visit_counter_value(c) < o.n) {
    step_multihead(vm.spec, c);
    const Element& h = c.heads[VisitMachine::kSearch];
    if (visited.insert(h).second) order.push_back(h);
  }
  const bool reached = visit_counter_value(c) >= o.n;
  json cells = json::array();
  for (const auto& e : order) cells.push_back(format_element(*g, e));
  r.result = {{"n", o.n}, {"reached", reached}, {"steps", c.steps}, {"visited", cells}};
  r.say(reached ? "counter reached " + std::to_string(o.n) + " after " + std::to_string(c.steps) + " steps"
                : "counter below " + std::to_string(o.n) + " after " + std::to_string(c.steps) + " steps");
  r.say(std::to_string(order.size()) + " distinct cells visited by the search head");
  r.outcome = reached ? "counter reached" : "undetermined";
  return reached ? kOk : kBudget;
}

int cmd_machine_equiv(Run& r, const Options& o) {
  auto g = r.group(o.group);
  const auto m = load_machine(r, g, o.machine);
  const Pattern p = load_pattern(r, *g, m.alphabet, o.pattern);
  const bool eq = fixed_moving_equivalent(m, p, o.steps);
  r.result = {{"steps", o.steps}, {"equivalent", eq}};
  r.say(eq ? "equivalent" : "not equivalent");
  r.outcome = eq ? "equivalent" : "not equivalent";
  return eq ? kOk : kNegative;
}

int cmd_machine_retarget(Run& r, const Options& o) {
  auto g = r.group(o.group);
  const auto m = load_machine(r, g, o.machine);
  auto t = r.group(o.target);
  std::vector<Word> gamma(g->generator_count());
  std::vector<bool> seen(g->generator_count(), false);
  for (const auto& spec : o.maps) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw MalformedInput("--map expects label=word");
    auto s = g->find_generator(spec.substr(0, eq));
    if (!s) throw MalformedInput("unknown generator " + spec.substr(0, eq));
    gamma[*s] = parse_word(*t, spec.substr(eq + 1));
    seen[*s] = true;
  }
  for (GenId s : g->moving_generators())
    if (!seen[s] && seen[g->inverse(s)]) {
      gamma[s] = t->inverse_word(gamma[g->inverse(s)]);
      seen[s] = true;
    }
  for (GenId s : g->moving_generators())
    if (!seen[s]) throw MalformedInput("--map missing for generator " + g->label_of(s));
  const auto out = retarget_generators(m, t, gamma);
  r.result = machine_to_json(out);
  r.say(r.result.dump(2));
  r.outcome = "retargeted machine with " + std::to_string(out.state_count()) + " states";
  return kOk;
}

int cmd_machine_balls(Run& r, const Options& o) {
  auto g = r.group(o.group);
  const auto m = load_machine(r, g, o.machine);
  const json j = r.load(o.coding);
  const auto res = simulate_with_balls(m, coding_of(*g, m.alphabet, j), budget_of(o, 10000));
  const char* names[] = {"accepted", "inconsistent", "exhausted"};
  const std::string name = names[int(res.outcome)];
  r.result = {{"outcome", name}, {"steps", res.steps}, {"k", res.k}};
  if (res.outcome == BallOutcome::kInconsistent)
    r.result["witness"] = {format_word(*g, res.witness.first), format_word(*g, res.witness.second)};
  r.say(name + " (steps " + std::to_string(res.steps) + ", radius " + std::to_string(res.k) + ")");
  r.outcome = name;
  return res.outcome == BallOutcome::kAccepted ? kOk
         : res.outcome == BallOutcome::kInconsistent ? kNegative
                                                       : kBudget;
}

int cmd_machine_oracle(Run& r, const Options& o) {
  auto g = r.group(o.group);
  const json pj = r.load(o.pattern);
  const Alphabet a = alphabet_of(pj);
  const auto cm = classical_from_json(*g, a, r.load(o.classical));
  const auto os = build_oracle_simulator(g, a, cm);
  const Pattern p = pattern_from_json(*g, a, pj);
  const std::size_t budget = budget_of(o, 200000);
  const auto res = run_multihead(os.spec, p, budget);
  r.result = {{"accepted", res.accepted}, {"steps", res.steps}, {"budget", budget}};
  r.say(res.accepted ? "accepted after " + std::to_string(res.steps) + " steps"
                     : "not accepted within " + std::to_string(budget) + " steps");
  r.outcome = res.accepted ? "accepted" : "undetermined";
  return res.accepted ? kOk : kBudget;
}

A1Mode parse_a1(Run& r, GroupPtr g, const std::string& text, std::size_t states) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (kind == "windowed") return A1Mode::windowed(arg.empty() ? 2 : parse_count(arg));
  if (kind == "cover") {
    // cover:<file> with {"subshift": {...}, "state_of": [...], "radius": r}
    const json j = r.load(arg);
    A1Mode m;
    m.cover = subshift_from_json(j.at("subshift"));
    m.state_of = j.at("state_of").get<std::vector<std::size_t>>();
    m.radius = j.value("radius", std::size_t(2));
    if (m.cover->group->to_json() != g->to_json()) throw MalformedInput("cover group differs");
    (void)states;
    return m;
  }
  throw MalformedInput("--a1 expects windowed:<radius> or cover:<file>");
}

int cmd_compile_domino(Run& r, const Options& o) {
  auto g = r.group(o.group);
  const auto m = load_machine(r, g, o.machine);
  DominoInstance inst = compile_domino(g, m, parse_a1(r, g, o.a1, m.state_count()));
  if (!o.free_factor.empty()) inst = free_product_layer(r.group(o.free_factor), inst);
  const json j = domino_to_json(inst);
  r.result = {{"patterns", inst.forbidden.size()}, {"alphabet", inst.alphabet.size()}, {"counts", j.at("counts")}};
  if (!r.output.empty()) write_file(r.output, j.dump(1) + "\n");
  else r.result["instance"] = j;
  r.say(std::to_string(inst.forbidden.size()) + " forbidden patterns over " +
        std::to_string(inst.alphabet.size()) + " symbols");
  for (const auto& [tag, n] : j.at("counts").items()) r.say("  " + tag + ": " + std::to_string(n.get<int>()));
  r.outcome = "domino instance";
  return kOk;
}

XTimeParams schedule_of(const std::string& s) {
  if (s == "paper-example") return XTimeParams::worked_example();
  if (s == "default") return XTimeParams::defaults();
  throw MalformedInput("--schedule expects paper-example or default");
}

int cmd_compile_simulate(Run& r, const Options& o) {
  auto g = r.group(o.group);
  const auto m = load_machine(r, g, o.machine);
  std::vector<std::string> labels;
  if (o.alphabet.empty()) {
    for (Symbol s = 0; s < m.alphabet.size(); ++s)
      if (s != m.blank) labels.push_back(m.alphabet.label(s));
  } else {
    std::stringstream in(o.alphabet);
    for (std::string t; std::getline(in, t, ',');) labels.push_back(t);
  }
  const Alphabet a(labels);
  const Symbol abar = a.index_of(o.abar);
  const auto b = build_simulation(g, m, a, abar, schedule_of(o.schedule), o.height, o.n_max);
  const json j = simulation_to_json(b);
  r.result = {{"alphabet_size", b.final_alphabet.size()},
              {"states", b.k},
              {"configuration", b.configuration.size()},
              {"starting", b.starting.size()},
              {"ending", b.ending.size()},
              {"transition", b.transition.size()}};
  if (!r.output.empty()) write_file(r.output, j.dump(1) + "\n");
  else r.result["bundle"] = j;
  r.say("final alphabet of " + std::to_string(b.final_alphabet.size()) + " symbols, T~ has " +
        std::to_string(b.k) + " states");
  for (const char* f : {"configuration", "starting", "ending", "transition"})
    r.say(std::string("  ") + f + ": " + std::to_string(r.result[f].get<std::size_t>()));
  r.outcome = "simulation bundle";
  return kOk;
}

GroupPtr xtime_group(Run& r, const Options& o) {
  return o.group.empty() ? make_free_abelian_group(1, {"a"}) : r.group(o.group);
}

int cmd_xtime_prefix(Run& r, const Options& o) {
  auto g = xtime_group(r, o);
  const auto xs = xtime_prefix(*g, schedule_of(o.schedule), o.n);
  const Alphabet a = xtime_alphabet(*g);
  json out = json::array();
  std::string line;
  for (Symbol s : xs) {
    out.push_back(a.label(s));
    line += (line.empty() ? "" : " ") + a.label(s);
  }
  r.result = {{"n", o.n}, {"schedule", o.schedule}, {"prefix", out}};
  r.say(line);
  r.outcome = "prefix of " + std::to_string(xs.size());
  return kOk;
}

int cmd_xtime_kpos(Run& r, const Options& o) {
  auto g = xtime_group(r, o);
  const auto p = schedule_of(o.schedule);
  const BigNat k = oplus_position(*g, p, o.n);
  r.result = {{"n", o.n}, {"schedule", o.schedule}, {"position", k.str()}};
  r.say(k.str());
  r.outcome = "plus position";
  return kOk;
}

int cmd_xtime_symbol(Run& r, const Options& o) {
  auto g = xtime_group(r, o);
  const Symbol s = xtime_symbol(*g, schedule_of(o.schedule), BigNat(o.index));
  r.result = {{"index", o.index}, {"symbol", xtime_alphabet(*g).label(s)}};
  r.say(xtime_alphabet(*g).label(s));
  r.outcome = "symbol";
  return kOk;
}

int cmd_verify_window(Run& r, const Options& o) {
  const DominoInstance inst = domino_from_json(r.load(o.instance));
  const std::size_t budget = budget_of(o, kDefaultSearchBudget);
  const auto res = verify_reduction_window(inst, o.radius, o.height, budget);
  const char* names[] = {"satisfiable", "unsatisfiable", "undetermined"};
  const std::string name = names[int(res.verdict)];
  r.result = {{"verdict", name}, {"nodes", res.nodes}, {"radius", o.radius}, {"height", o.height}};
  if (res.verdict == WindowVerdict::kSatisfiable)
    r.result["witness"] = pattern_to_json(*inst.group, inst.alphabet, res.witness);
  r.say(name + " (" + std::to_string(res.nodes) + " nodes)");
  r.outcome = name;
  return res.verdict == WindowVerdict::kSatisfiable     ? kOk
         : res.verdict == WindowVerdict::kUnsatisfiable ? kNegative
                                                        : kBudget;
}

// ---------------------------------------------------------------------------

void emit(Run& r, int code, const std::string& command) {
  json manifest = {{"tool", "gshift_cli"},
                   {"version", kVersion},
                   {"command", command},
                   {"inputs", r.inputs},
                   {"parameters", r.parameters},
                   {"outcome", r.outcome},
                   {"exit_code", code},
                   {"timestamp", utc_now()}};
  if (r.format == "json") {
    std::cout << json({{"result", r.result}, {"manifest", manifest}}).dump(2) << "\n";
  } else {
    for (const auto& l : r.text) std::cout << l << (l.empty() || l.back() != '\n' ? "\n" : "");
  }
  if (!r.manifest.empty()) write_file(r.manifest, manifest.dump(2) + "\n");
  else if (r.format != "json") std::cerr << "manifest " << manifest.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symbolic dynamics over finitely generated groups"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Run run;
  Options o;
  std::function<int(Run&, const Options&)> action;
  CLI::App* selected = nullptr;
  app.option_defaults()->always_capture_default();

  auto common = [&](CLI::App* c, const std::vector<std::string>& formats = {"text", "json"}) {
    c->add_option("--format", run.format, "Output format")->check(CLI::IsMember(formats));
    c->add_option("--manifest", run.manifest, "Write the run manifest to this file");
    c->add_option("--budget", o.budget, "Step, node or ball budget (accepts 1e7)");
  };
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help,
                  std::function<int(Run&, const Options&)> f) {
    CLI::App* c = parent->add_subcommand(name, help);
    c->callback([&action, &selected, c, f] {
      action = f;
      selected = c;
    });
    return c;
  };
  auto group_opt = [&](CLI::App* c, bool required = true) {
    auto* opt = c->add_option("--group", o.group, "Group JSON file");
    if (required) opt->required();
  };

  auto* wp = leaf(&app, "wp", "Decide whether a word is the identity", cmd_wp);
  group_opt(wp);
  wp->add_option("--word", o.word, "Word, e.g. \"a b a^-1\"")->required();
  common(wp);

  auto* canon = leaf(&app, "canon", "Canonical form of a word", cmd_canon);
  group_opt(canon);
  canon->add_option("--word", o.word, R"(Word, e.g. "a b a^-1")")->required();
  common(canon);

  auto* b = leaf(&app, "ball", "Elements of the ball B_n", cmd_ball);
  group_opt(b);
  b->add_option("--n", o.n, "Radius")->required();
  common(b, {"text", "json", "dot"});

  auto* words = leaf(&app, "words", "Words in shortlex order", cmd_words);
  group_opt(words);
  words->add_option("--max-len", o.max_len, "Maximum word length");
  common(words);

  auto* seq = leaf(&app, "sequences", "Disjoint ball sequences or a component sequence", cmd_sequences);
  group_opt(seq);
  seq->add_option("--n", o.n, "Last index of the sequences");
  seq->add_flag("--component", o.component, "Component sequence instead of disjoint balls");
  seq->add_option("--big-n", o.big_n, "Component sequence length");
  seq->add_option("--seed", o.seed, "Seed word for --component");
  common(seq);

  auto* coding = app.add_subcommand("coding", "Pattern codings");
  coding->require_subcommand(1);
  auto* cc = leaf(coding, "check", "Consistency of a pattern coding", cmd_coding_check);
  group_opt(cc);
  cc->add_option("--coding", o.coding, "Coding JSON: {\"alphabet\":[..],\"entries\":[[word,sym],..]}")->required();
  common(cc);

  auto* comp = leaf(&app, "completion", "Membership in the decidable completion", cmd_completion);
  group_opt(comp);
  comp->add_option("--enumeration", o.enumeration, "JSON: {\"alphabet\":[..],\"codings\":[{\"entries\":..},..]}")
      ->required();
  comp->add_option("--coding", o.coding, R"(Coding JSON: {"alphabet":[..],"entries":[[word,sym],..]})")->required();
  common(comp);

  auto* sub = app.add_subcommand("subshift", "Subshift admissibility");
  sub->require_subcommand(1);
  auto* sc = leaf(sub, "check", "Local admissibility of a pattern", cmd_subshift_check);
  sc->add_option("--subshift", o.subshift, R"(Subshift JSON: {"alphabet","group","forbidden"})")->required();
  sc->add_option("--pattern", o.pattern, R"(Pattern JSON: {"support":[[word,sym],..]})")->required();
  common(sc);
  auto* se = leaf(sub, "extend", "Windowed extendability of a pattern", cmd_subshift_extend);
  se->add_option("--subshift", o.subshift, R"(Subshift JSON: {"alphabet","group","forbidden"})")->required();
  se->add_option("--pattern", o.pattern, R"(Pattern JSON: {"support":[[word,sym],..]})")->required();
  se->add_option("--radius", o.radius, "Radius");
  common(se);

  auto* del = app.add_subcommand("delone", "Delone configurations");
  del->require_subcommand(1);
  auto* dg = leaf(del, "gen", "Greedy configuration of Y_n on a ball", cmd_delone);
  group_opt(dg);
  dg->add_option("--n", o.n, "Delone parameter");
  dg->add_option("--radius", o.radius, "Radius");
  common(dg, {"text", "json", "dot"});

  auto* mach = app.add_subcommand("machine", "G-machines");
  mach->require_subcommand(1);
  auto* mr = leaf(mach, "run", "Run a machine on a pattern", cmd_machine_run);
  group_opt(mr);
  mr->add_option("--machine", o.machine, R"(Machine JSON: {"states","accepting","alphabet","blank","delta"})")->required();
  mr->add_option("--pattern", o.pattern, R"(Pattern JSON: {"support":[[word,sym],..]})");
  mr->add_flag("--trace", o.trace, "Print every step");
  common(mr);
  auto* mp = leaf(mach, "path", "Run the path-marking machine", cmd_machine_path);
  group_opt(mp);
  mp->add_option("--steps", o.steps, "Number of steps");
  common(mp, {"text", "json", "dot"});
  auto* mv = leaf(mach, "visit", "Run the ball-visiting machine until its counter reaches n", cmd_machine_visit);
  group_opt(mv);
  mv->add_option("--n", o.n, "Counter value to reach");
  common(mv);
  auto* me = leaf(mach, "equiv", "Compare fixed-head and moving-head runs", cmd_machine_equiv);
  group_opt(me);
  me->add_option("--machine", o.machine, R"(Machine JSON: {"states","accepting","alphabet","blank","delta"})")->required();
  me->add_option("--pattern", o.pattern, R"(Pattern JSON: {"support":[[word,sym],..]})");
  me->add_option("--steps", o.steps, "Number of steps");
  common(me);
  auto* mt = leaf(mach, "retarget", "Rewrite moves over another generating set", cmd_machine_retarget);
  group_opt(mt);
  mt->add_option("--machine", o.machine, R"(Machine JSON: {"states","accepting","alphabet","blank","delta"})")->required();
  mt->add_option("--target", o.target, "Target group JSON")->required();
  mt->add_option("--map", o.maps, "label=word, one per generator");
  common(mt);
  auto* mb = leaf(mach, "simulate-balls", "Run a machine on a coding through growing balls", cmd_machine_balls);
  group_opt(mb);
  mb->add_option("--machine", o.machine, R"(Machine JSON: {"states","accepting","alphabet","blank","delta"})")->required();
  mb->add_option("--coding", o.coding, R"(Coding JSON: {"alphabet":[..],"entries":[[word,sym],..]})")->required();
  common(mb);
  auto* mo = leaf(mach, "oracle-sim", "Run a classical oracle machine on a G-machine", cmd_machine_oracle);
  group_opt(mo);
  mo->add_option("--classical", o.classical, "Classical oracle machine JSON")->required();
  mo->add_option("--pattern", o.pattern, "Pattern JSON with an \"alphabet\" field")->required();
  common(mo);

  auto* compile = app.add_subcommand("compile", "Reductions");
  compile->require_subcommand(1);
  auto* cd = leaf(compile, "domino", "Machine to origin-constrained domino instance", cmd_compile_domino);
  group_opt(cd);
  cd->add_option("--machine", o.machine, R"(Machine JSON: {"states","accepting","alphabet","blank","delta"})")->required();
  cd->add_option("--a1", o.a1, "windowed:<radius> or cover:<file>");
  cd->add_option("--free-factor", o.free_factor, "Finite group JSON for the free-product layer");
  cd->add_option("-o,--output", run.output, "Write the result to this file");
  common(cd);
  auto* cs = leaf(compile, "simulate", "Simulation bundle for a pattern-recognizing machine", cmd_compile_simulate);
  group_opt(cs);
  cs->add_option("--machine", o.machine, R"(Machine JSON: {"states","accepting","alphabet","blank","delta"})")->required();
  cs->add_option("--abar", o.abar, "Symbol whose uniform configuration lies in X")->required();
  cs->add_option("--alphabet", o.alphabet, "Comma-separated alphabet of X (default: machine symbols but blank)");
  cs->add_option("--schedule", o.schedule, "paper-example or default");
  cs->add_option("--height", o.height, "Window height in Z");
  cs->add_option("--n-max", o.n_max, "Number of simulation stages");
  cs->add_option("-o,--output", run.output, "Write the result to this file");
  common(cs);

  auto* xt = app.add_subcommand("xtime", "The stream x~");
  xt->require_subcommand(1);
  auto* xp = leaf(xt, "prefix", "First n symbols", cmd_xtime_prefix);
  group_opt(xp, false);
  xp->add_option("--n", o.n, "Number of symbols")->required();
  xp->add_option("--schedule", o.schedule, "paper-example or default");
  common(xp);
  auto* xk = leaf(xt, "kpos", "Position of the n-th plus", cmd_xtime_kpos);
  group_opt(xk, false);
  xk->add_option("--n", o.n, "Which plus (1-based)")->required();
  xk->add_option("--schedule", o.schedule, "paper-example or default");
  common(xk);
  auto* xs = leaf(xt, "symbol", "Symbol at an index", cmd_xtime_symbol);
  group_opt(xs, false);
  xs->add_option("--index", o.index, "Position in x~")->required();
  xs->add_option("--schedule", o.schedule, "paper-example or default");
  common(xs);

  auto* ver = app.add_subcommand("verify", "Bounded searches");
  ver->require_subcommand(1);
  auto* vw = leaf(ver, "window", "Search a window of a domino instance", cmd_verify_window);
  vw->add_option("--instance", o.instance, "Domino instance JSON from compile domino")->required();
  vw->add_option("--radius", o.radius, "Radius");
  vw->add_option("--height", o.height, "Window height in Z");
  common(vw);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  std::string command;
  for (int i = 0; i < argc; ++i) command += (i ? " " : "") + std::string(argv[i]);
  // Every option of the chosen subcommand, explicit or defaulted.
  for (const CLI::Option* opt : selected->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help" || name == "format" || name == "manifest" || name == "output") continue;
    const auto& res = opt->results();
    if (opt->get_expected_max() > 1) run.parameters[name] = res;
    else if (!res.empty()) run.parameters[name] = opt->get_expected_max() == 0 ? json(true) : json(res.front());
    else if (!opt->get_default_str().empty()) run.parameters[name] = opt->get_default_str();
  }
  if (const char* env = std::getenv("GSHIFT_BUDGET")) run.parameters["GSHIFT_BUDGET"] = env;
  int code = kOk;
  try {
    code = action(run, o);
  } catch (const MalformedInput& e) {
    std::cerr << "error: " << e.what() << "\n(see --help for the expected input schema)\n";
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << "\n(see --help for the expected input schema)\n";
    return kUsage;
  } catch (const Undetermined& e) {
    run.outcome = std::string("undetermined: ") + e.what();
    run.result = {{"undetermined", e.what()}};
    run.say(run.outcome);
    code = kBudget;
  } catch (const BallBudgetExceeded& e) {
    run.outcome = std::string("budget exceeded: ") + e.what();
    run.result = {{"budget_exceeded", e.what()}};
    run.say(run.outcome);
    code = kBudget;
  } catch (const SolverBudgetExceeded& e) {
    run.outcome = std::string("budget exceeded: ") + e.what();
    run.result = {{"budget_exceeded", e.what()}};
    run.say(run.outcome);
    code = kBudget;
  } catch (const CompletionBudgetExceeded& e) {
    run.outcome = std::string("budget exceeded: ") + e.what();
    run.result = {{"budget_exceeded", e.what()}};
    run.say(run.outcome);
    code = kBudget;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  emit(run, code, command);
  return code;
}
