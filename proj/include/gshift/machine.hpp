#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "json.hpp"
#include "gshift/group.hpp"
#include "gshift/pattern.hpp"

namespace gshift {

using State = std::uint32_t;

struct Transition {
  Symbol write = 0;
  State next = 0;
  GenId move = 0;
};

// A deterministic G-machine. delta is indexed by (symbol, state); entries
// left empty are unreachable in a correct run and raise UndefinedTransition.
struct GMachineSpec {
  GroupPtr group;
  Alphabet alphabet;
  Symbol blank = 0;
  std::vector<std::string> states;  // states[0] is q0
  std::vector<bool> accepting;
  std::vector<std::optional<Transition>> delta;
  // (symbol, state) pairs whose firing means the search exhausted the group.
  std::vector<std::pair<Symbol, State>> exhausted;

  std::size_t state_count() const { return states.size(); }
  std::optional<Transition>& rule(Symbol a, State q) { return delta[a * states.size() + q]; }
  const std::optional<Transition>& rule(Symbol a, State q) const {
    return delta[a * states.size() + q];
  }
  const Transition& at(Symbol a, State q) const;
  bool is_total() const;
  std::optional<State> find_state(const std::string& name) const;
};

// Empty machine with the given states and alphabet; every rule unset.
GMachineSpec make_machine(GroupPtr g, Alphabet alphabet, Symbol blank,
                          std::vector<std::string> states, std::vector<bool> accepting);

// Finite-support tape; cells holding the blank are never stored.
class Tape {
 public:
  explicit Tape(Symbol blank = 0) : blank_(blank) {}
  Symbol get(const Element& e) const;
  void set(const Element& e, Symbol s);
  Symbol blank() const { return blank_; }
  std::size_t support_size() const { return cells_.size(); }
  const std::unordered_map<Element, Symbol, ElementHash>& cells() const { return cells_; }
  void clear() { cells_.clear(); }
  friend bool operator==(const Tape& a, const Tape& b) {
    return a.blank_ == b.blank_ && a.cells_ == b.cells_;
  }

 private:
  Symbol blank_;
  std::unordered_map<Element, Symbol, ElementHash> cells_;
};

Tape tape_from_pattern(const Pattern& p, Symbol blank);

struct MachineConfig {
  Tape tape;
  Element head;
  State state = 0;
  std::size_t steps = 0;
};

// Fixed-head configuration: the observable tape is y(g) = stored(offset * g),
// so the head always reads y(1_G) and a move by s shifts y by s^-1.
struct FixedConfig {
  Tape stored;
  Element offset;
  State state = 0;
  std::size_t steps = 0;

  Tape observable(const Group& g) const;
};

MachineConfig initial_config(const GMachineSpec& m, const Pattern& p);
FixedConfig initial_fixed_config(const GMachineSpec& m, const Pattern& p);

void step_moving(const GMachineSpec& m, MachineConfig& c);
void step_fixed(const GMachineSpec& m, FixedConfig& c);

struct TraceRecord {
  std::size_t step = 0;
  State state = 0;
  Element head;
  Symbol written = 0;
};

struct RunResult {
  bool accepted = false;
  std::size_t steps = 0;  // steps taken (accepting step count when accepted)
};

using TraceSink = std::function<void(const TraceRecord&)>;

RunResult run_accepts(const GMachineSpec& m, const Pattern& p, std::size_t budget,
                      const TraceSink& trace = nullptr);

bool fixed_moving_equivalent(const GMachineSpec& m, const Pattern& p, std::size_t steps);

// Replaces every move s' of m by the walk gamma[s'] over the generators of
// `target` (a presentation of the same group). gamma is indexed by m's
// generator ids; gamma[0] is ignored (stay moves remain stay moves).
GMachineSpec retarget_generators(const GMachineSpec& m, GroupPtr target,
                                 const std::vector<Word>& gamma);

// |Q| * support_size * |Sigma|^support_size, exact.
boost::multiprecision::cpp_int acceptance_bound(const GMachineSpec& m, std::size_t support_size);

GMachineSpec machine_from_json(GroupPtr g, const nlohmann::json& j);
nlohmann::json machine_to_json(const GMachineSpec& m);

// ---------------------------------------------------------------------------
// Multi-head machines.

struct MultiHeadConfig {
  std::vector<Tape> tapes;
  std::vector<Element> heads;
  std::vector<State> states;
  std::size_t steps = 0;
};

struct MultiStep {
  std::vector<Symbol> write;
  std::vector<State> next;
  std::vector<GenId> move;
};

// What a transition may look at: the symbol of any tape at the position of
// any head. Each head still writes only its own tape.
class HeadReader {
 public:
  // `base` shifts layer indices so a sub-machine can run on layers
  // base, base + 1, ... of a larger composition.
  explicit HeadReader(const MultiHeadConfig& c, std::size_t base = 0) : c_(c), base_(base) {}
  Symbol at(std::size_t tape, std::size_t head) const {
    return c_.tapes[base_ + tape].get(c_.heads[base_ + head]);
  }
  Symbol own(std::size_t i) const { return at(i, i); }
  HeadReader shifted(std::size_t by) const { return HeadReader(c_, base_ + by); }

 private:
  const MultiHeadConfig& c_;
  std::size_t base_;
};

struct LayerSpec {
  std::string role;
  Alphabet alphabet;
  Symbol blank = 0;
};

struct MultiHeadSpec {
  GroupPtr group;
  std::vector<LayerSpec> layers;
  std::function<MultiStep(const HeadReader&, const std::vector<State>&)> delta;
  std::function<bool(std::size_t layer, State)> accepting;
  // Optional rule applied after every synchronous step (layer resets).
  std::function<void(MultiHeadConfig&, const std::vector<Element>& previous_heads)> supervisor;
  std::vector<State> initial_states;

  std::size_t heads() const { return layers.size(); }
};

MultiHeadSpec single_head(const GMachineSpec& m);
MultiHeadConfig initial_multi_config(const MultiHeadSpec& mh, const Pattern& p);
void step_multihead(const MultiHeadSpec& mh, MultiHeadConfig& c);

using MultiObserver = std::function<void(const MultiHeadConfig&)>;

RunResult run_multihead(const MultiHeadSpec& mh, const Pattern& p, std::size_t budget,
                        const MultiObserver& observe = nullptr);

// ---------------------------------------------------------------------------
// Constructions.

// Path-marking machine. Symbols are triples (a1, a2, a3) with a1 in
// {_, >} u S', a2 in {_, x}, a3 in {_} u S'.
struct PathAlphabet {
  std::size_t k = 0;  // |S'|
  static constexpr std::size_t kBlank1 = 0, kStart = 1;
  Symbol encode(std::size_t a1, std::size_t a2, std::size_t a3) const {
    return Symbol((a1 * 2 + a2) * (k + 1) + a3);
  }
  std::size_t first(Symbol s) const { return s / (2 * (k + 1)); }
  bool marked(Symbol s) const { return (s / (k + 1)) % 2 == 1; }
  std::size_t third(Symbol s) const { return s % (k + 1); }
  std::size_t size() const { return (k + 2) * 2 * (k + 1); }
};

struct PathMachine {
  GMachineSpec machine;
  PathAlphabet code;
  std::vector<GenId> directions;  // g_1 < ... < g_k
  State init = 0, back = 1;
  State left(std::size_t i) const { return State(2 + 2 * i); }   // g_{i+1} arrow left
  State right(std::size_t i) const { return State(3 + 2 * i); }  // g_{i+1} arrow right
};

PathMachine build_m_path(GroupPtr g);

// Checks that the marked cells form a simple path rooted at the > cell.
// Returns the path from the root, or nullopt with a reason.
std::optional<std::vector<Element>> marked_path(const PathMachine& pm, const Tape& t,
                                                std::string* why = nullptr);

// Follows the path layer one cell change at a time and checks that every
// change keeps the marked cells a simple path rooted at the > cell: new marks
// extend the tip from its pointed direction, erasures remove the tip, and
// interior cells never change.
class PathTracker {
 public:
  explicit PathTracker(const PathMachine& pm) : pm_(&pm) {}
  bool update(const Element& cell, Symbol before, Symbol after, std::string* why = nullptr);
  const std::vector<Element>& path() const { return path_; }

 private:
  const PathMachine* pm_;
  std::vector<Element> path_;
  std::vector<Symbol> symbols_;
};

// Three layers: path, counter (unary marks on the path cells, then an end
// marker), and a depth-first search bounded by the counter.
struct VisitMachine {
  MultiHeadSpec spec;
  PathMachine path;
  static constexpr std::size_t kPath = 0, kCounter = 1, kSearch = 2;
  // Counter tape symbols.
  static constexpr Symbol kMark = 1, kEnd = 2;
};

VisitMachine build_m_visit(GroupPtr g);

// Counter value n encoded on the counter tape (number of kMark cells).
std::size_t visit_counter_value(const MultiHeadConfig& c);

enum class BallOutcome { kAccepted, kInconsistent, kExhausted };

struct BallSimulation {
  BallOutcome outcome = BallOutcome::kExhausted;
  std::size_t steps = 0;
  std::size_t k = 0;  // ball radius reached
  std::pair<Word, Word> witness;
};

BallSimulation simulate_with_balls(const GMachineSpec& m, const PatternCoding& c,
                                   std::size_t budget);

// ---------------------------------------------------------------------------
// Oracle machines run on a G-machine.

// A one-sided machine with a read-only input tape and a work tape. In the
// query state the work tape from cell 0 up to the first non-letter is asked
// as a word problem; the machine continues in `yes` or `no`. A missing rule
// halts without accepting.
struct ClassicalMachine {
  struct Rule {
    Symbol write = 0;
    State next = 0;
    int input_move = 0;  // -1, 0 or +1; moving left from cell 0 stays
    int work_move = 0;
  };
  std::vector<std::string> states;  // states[0] is the start state
  std::vector<bool> accepting;
  Alphabet input_alphabet;  // see oracle_input_alphabet
  Alphabet work_alphabet;   // symbol 0 is the blank; generator labels are query letters
  std::optional<State> query, yes, no;
  std::vector<std::optional<Rule>> delta;

  std::optional<Rule>& rule(State q, Symbol in, Symbol work) {
    return delta[(q * input_alphabet.size() + in) * work_alphabet.size() + work];
  }
  const std::optional<Rule>& rule(State q, Symbol in, Symbol work) const {
    return delta[(q * input_alphabet.size() + in) * work_alphabet.size() + work];
  }
};

// Input tokens: "_", "#" (entry start), ":" (word/symbol separator), one
// token per non-identity generator label, and "=" + label per pattern symbol.
// An entry (w, a) is written "# w_1 ... w_m : =a".
Alphabet oracle_input_alphabet(const Group& g, const Alphabet& pattern_alphabet);

ClassicalMachine make_classical(const Group& g, const Alphabet& pattern_alphabet,
                                std::vector<std::string> states, std::vector<bool> accepting,
                                Alphabet work_alphabet);

ClassicalMachine classical_from_json(const Group& g, const Alphabet& pattern_alphabet,
                                     const nlohmann::json& j);

struct OracleSimulator {
  MultiHeadSpec spec;
  VisitMachine visit;
  ClassicalMachine classical;
  static constexpr std::size_t kStore = 0, kPath = 1, kCounter = 2, kSearch = 3, kAux = 4,
                               kOracle = 5, kSim = 6;
};

// Layers: the input pattern (blank = symbol 0), M_VISIT on layers 1-3, an
// auxiliary walker that copies each visited non-blank cell as an entry onto
// the simulated input tape, the oracle walker, and the simulation of the
// classical machine on the cells of the path. The classical machine restarts
// whenever an entry is appended.
OracleSimulator build_oracle_simulator(GroupPtr g, const Alphabet& pattern_alphabet,
                                       ClassicalMachine classical);

// Current simulated input tape (tokens up to the first blank).
std::vector<Symbol> simulated_input(const OracleSimulator& os, const MultiHeadConfig& c);
// Current classical state, or nullopt while the simulation is being reset.
std::optional<State> simulated_state(const OracleSimulator& os, const MultiHeadConfig& c);

}  // namespace gshift
