#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "json.hpp"
#include "gshift/group.hpp"
#include "gshift/machine.hpp"
#include "gshift/pattern.hpp"
#include "gshift/subshift.hpp"

namespace gshift {

using BigNat = boost::multiprecision::cpp_int;

// G x Z with the Z generator labeled t; elements addressed as (g, level).
struct LevelGroup {
  GroupPtr base;
  GroupPtr product;
  std::vector<GenId> embed;  // base generator id -> product generator id
  GenId t = 0;

  Element at(const Element& g, std::int64_t level) const;
  Element lift(GenId s) const { return product->canonical(Word{embed[s]}); }
};

LevelGroup make_level_group(GroupPtr g);

// ---------------------------------------------------------------------------
// The time function and the stream x~.

// n^(n^n + n + 1), exact. Rejects n = 0.
BigNat time_value(std::size_t n);

// Stream alphabet {., *, +, >} followed by the non-identity generators.
inline constexpr Symbol kXDot = 0, kXStar = 1, kXPlus = 2, kXPlay = 3, kXFirstGen = 4;
Alphabet xtime_alphabet(const Group& g);

struct XTimeParams {
  std::function<std::size_t(std::size_t)> length_schedule;  // n -> longest enumerated word
  std::function<BigNat(std::size_t)> time_fn;

  static XTimeParams defaults();       // 4n and time(n)
  static XTimeParams worked_example();  // n and time(n) = n + 1
};

// |w_n| for n >= 1.
BigNat xtime_block_length(const Group& g, const XTimeParams& p, std::size_t n);
// Symbol x~_k, without materializing the dot runs.
Symbol xtime_symbol(const Group& g, const XTimeParams& p, const BigNat& k);
// Index of the n-th plus symbol (n >= 1).
BigNat oplus_position(const Group& g, const XTimeParams& p, std::size_t n);

inline constexpr std::size_t kMaxXTimePrefix = 1000000;
std::vector<Symbol> xtime_prefix(const Group& g, const XTimeParams& p, std::size_t length);

// ---------------------------------------------------------------------------
// The universal subshift U over G x Z, alphabet A_X x {0, 1, 2}.

struct UShift {
  LevelGroup levels;
  Alphabet alphabet;
  FamilyPtr rules;
  std::size_t height = 0;  // levels above a star covered by the listed rules

  Symbol encode(Symbol x, Symbol y) const { return Symbol(x * 3 + y); }
  Symbol stream(Symbol s) const { return s / 3; }
  Symbol layer(Symbol s) const { return s % 3; }
  SubshiftSpec spec() const { return {alphabet, levels.product, rules}; }
};

// Families: the stream rule above a star (levels 1..height), the periodic
// extension along G, Y_n at the n-th plus level above a star (for every
// plus level <= height), copy at > and dot levels, shift at generator levels.
UShift build_u_rules(GroupPtr g, const XTimeParams& p, std::size_t height);

// ---------------------------------------------------------------------------
// Machine -> domino instance over G x Z.

struct A1Mode {
  // Windowed: the two-head patterns of X_{<=k} with offsets up to `radius`.
  // Cover: `cover` is an SFT over G whose symbols project to states through
  // `state_of`; its patterns are immersed on the state component.
  std::size_t radius = 0;
  std::optional<SubshiftSpec> cover;
  std::vector<std::size_t> state_of;

  static A1Mode windowed(std::size_t radius) { return A1Mode{radius, std::nullopt, {}}; }
};

struct DominoInstance {
  GroupPtr group;      // G x Z, or (G x Z) * H after the free-product layer
  LevelGroup levels;   // the G x Z part
  Alphabet alphabet;
  std::vector<SetPattern> forbidden;  // tag = provenance
  std::optional<Symbol> origin_symbol;
  // Component layout: symbol = ((tape * states + head) * 2 + star) * stars2 + ast,
  // where stars2 is 2 after the free-product layer and 1 before.
  std::size_t tape_size = 0, head_size = 0;
  std::vector<std::size_t> state_of_head;  // head component -> machine state 0..k
  std::size_t k = 0;
  std::optional<GroupPtr> finite_factor;

  Symbol encode(Symbol tape, Symbol head, bool star, bool ast = false) const;
  Symbol tape_of(Symbol s) const;
  Symbol head_of(Symbol s) const;
  bool star_of(Symbol s) const;
  bool ast_of(Symbol s) const;
  std::size_t count(const std::string& tag) const;
  SubshiftSpec spec() const;
};

// m must have exactly one accepting state. States are renumbered 1..k with
// q0 -> 1 and the accepting state -> k.
DominoInstance compile_domino(GroupPtr g, const GMachineSpec& m, const A1Mode& a1);

// Adds the {0, *} layer of a finite group H and moves the instance to
// (G x Z) * H; the origin constraint is replaced by the H-coset rule.
DominoInstance free_product_layer(GroupPtr h, const DominoInstance& base);

// The configuration of the proof for a machine that does not accept the
// empty input: level z holds the machine after z steps, level 0 carries star.
Pattern domino_run_witness(const DominoInstance& inst, const GMachineSpec& m,
                           std::size_t radius, std::size_t height);

// Cells of B_radius(G) x [0, height], level-major then shortlex; after the
// free-product layer every cell is followed by the rest of its H-coset.
std::vector<Element> reduction_window(const DominoInstance& inst, std::size_t radius,
                                      std::size_t height);

enum class WindowVerdict { kSatisfiable, kUnsatisfiable, kUndetermined };

struct WindowResult {
  WindowVerdict verdict = WindowVerdict::kUndetermined;
  Pattern witness;
  std::size_t nodes = 0;
};

WindowResult verify_reduction_window(const DominoInstance& inst, std::size_t radius,
                                     std::size_t height, std::size_t budget);
// Full constraint scan of a total assignment of the window.
bool check_reduction_witness(const DominoInstance& inst, const Pattern& w, std::size_t radius,
                             std::size_t height, std::string* why = nullptr);

nlohmann::json domino_to_json(const DominoInstance& inst);
DominoInstance domino_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// The simulation bundle.

// T~: iterates n = 1..n_max and k = 1..n: copy the reading tape on B_k to
// the work tape, run T for n steps (accept if T accepts), erase B_max(k,n)
// and return; after the last stage it idles. Tape symbols are pairs
// (reading symbol, work symbol) and the reading component is never changed.
struct WrappedMachine {
  GMachineSpec machine;
  Alphabet reading;       // A
  Alphabet work;          // T's tape alphabet
  std::size_t n_max = 0;

  Symbol encode(Symbol read, Symbol w) const { return Symbol(read * work.size() + w); }
};

WrappedMachine build_wrapped_machine(const GMachineSpec& t, const Alphabet& reading,
                                     std::size_t n_max);

struct SimulationBundle {
  UShift u;
  WrappedMachine wrapped;
  Alphabet final_alphabet;  // stream x {0,1,2} x A x Sigma x {0..k}
  std::size_t k = 0;        // states of T~ are 1..k, k accepting
  Symbol abar = 0;
  std::vector<SetPattern> configuration, starting, ending, transition;
  BlockCode phi;

  struct Parts {
    Symbol stream, layer, read, work, state;
  };
  Symbol encode(const Parts& p) const;
  Parts decode(Symbol s) const;
  std::vector<SetPattern> all_patterns() const;
  SubshiftSpec spec() const;  // the four families over G x Z
};

// mX recognizes the forbidden patterns of X (its tape alphabet contains the
// labels of `a`); abar names a symbol of `a` whose uniform configuration is in X.
SimulationBundle build_simulation(GroupPtr g, const GMachineSpec& mx, const Alphabet& a,
                                  Symbol abar, const XTimeParams& p, std::size_t height,
                                  std::size_t n_max);

// Component alphabets, the wrapped machine, the U rules, phi, and the four
// families with symbol sets written as index intervals.
nlohmann::json simulation_to_json(const SimulationBundle& b);

// Fill symbol for the levels below the star level: (., 0, x, blank, 0).
Symbol simulation_filler(const SimulationBundle& b, Symbol x);

}  // namespace gshift
