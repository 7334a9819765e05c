#pragma once

// Formula <-> game compilers, play <-> execution translators, the two-counter
// machine encoding with its simulation strategy, and the library games.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pvg/game.hpp"
#include "pvg/logic.hpp"
#include "pvg/normalform.hpp"
#include "pvg/solver.hpp"

namespace pvg {

// ---------------------------------------------------------------------------
// Formulas and games

/// Game with implicit acceptance φ. `bound` defaults to threshold(φ); a
/// smaller explicit bound is trusted.
Game formula_to_game(const Formula& phi, const Alphabet& alphabet,
                     std::optional<unsigned> bound = {});

/// Game whose rows are the clauses of normalize(φ, B, m_cap); B and m_cap
/// default to threshold(φ).
Game formula_to_game_explicit(const Formula& phi, const Alphabet& alphabet,
                              std::optional<unsigned> bound = {},
                              std::optional<unsigned> m_cap = {},
                              const NormalizeOptions& options = {});

/// The normal form read off the rows (families expanded), canonicalized.
NormalForm game_normal_form(const Game& g);

/// ⋁ over rows of ⋀ over (ℓ, θ) of ∃^{⋈n} y.(θ(y) ∧ ψ_{B,ℓ}(y)).
/// Throws InvalidArgument for implicit acceptance.
Formula game_to_formula(const Game& g);

// ---------------------------------------------------------------------------
// Plays and executions

/// π(w). Throws InvalidArgument when w is not normalized for g.
Play execution_to_play(const Execution& w, const Game& g);

/// w(π) with process identities assigned by mem: moves are served in
/// lexicographic (ℓ, ℓ′) order, locations compared by letter name, and each
/// move takes the lowest free ids. Ids are 1..ks for s, then e, then se.
Execution play_to_execution(const Play& p, const Game& g);

/// Lexicographic order on locations with letters sorted by name.
bool location_name_less(const Location& a, const Location& b,
                        const Alphabet& alphabet);

// ---------------------------------------------------------------------------
// Two-counter machines

enum class TcmOpKind : std::uint8_t { kInc, kDec, kZero };

struct TcmTransition {
  std::string name;
  std::string from;
  TcmOpKind op = TcmOpKind::kZero;
  unsigned counter = 1;  // 1 or 2
  std::string to;
  friend bool operator==(const TcmTransition&, const TcmTransition&) = default;
};

struct TwoCounterMachine {
  std::vector<std::string> states;
  std::vector<TcmTransition> transitions;
  std::string initial;
  std::string halting;

  /// Throws InvalidArgument on unknown states, duplicate names or names
  /// clashing with the encoding letters a1, a2, b.
  void validate() const;
  friend bool operator==(const TwoCounterMachine&,
                         const TwoCounterMachine&) = default;
};

/// `states q0 qh; init q0; halt qh; t1: q0 --c1==0--> qh;` with operations
/// c1++, c1--, c1==0 and the same for c2.
TwoCounterMachine parse_2cm(std::string_view text);
std::string to_string(const TwoCounterMachine& m);
std::string op_name(const TcmTransition& t);

struct TcmConfiguration {
  std::string state;
  std::uint64_t c1 = 0;
  std::uint64_t c2 = 0;
  friend bool operator==(const TcmConfiguration&,
                         const TcmConfiguration&) = default;
  friend auto operator<=>(const TcmConfiguration&,
                          const TcmConfiguration&) = default;
};

struct TcmStep {
  std::size_t transition = 0;  // index into M.transitions
  TcmConfiguration after;
  friend bool operator==(const TcmStep&, const TcmStep&) = default;
};

using TcmRun = std::vector<TcmStep>;

std::optional<TcmConfiguration> tcm_apply(const TwoCounterMachine& m,
                                          const TcmConfiguration& c,
                                          std::size_t transition);

/// Shortest halting run of at most `step_bound` steps from (q0, 0, 0).
std::optional<TcmRun> tcm_run_bounded(const TwoCounterMachine& m,
                                      std::size_t step_bound);

/// The acceptance rows of the simulation game: B = 4, A_s = Q ∪ Δ ∪ {a1, a2},
/// A_e = {b}. The zero-test rows of condition (c) also require the target
/// state token, like the other rows of that condition.
Game encode_2cm(const TwoCounterMachine& m);

/// C ∈ ℂ(γ): C encodes the M-configuration γ.
bool encodes(const Game& g, const TwoCounterMachine& m, const Configuration& c,
             const TcmConfiguration& gamma);

/// Positional strategy simulating a halting run. Throws InvalidArgument when
/// the run is not a valid halting run or repeats an M-configuration.
StrategyFn tcm_strategy(const TwoCounterMachine& m, const TcmRun& run);

// ---------------------------------------------------------------------------
// Library games

Game lemma4_game();
Game lemma5_game();
Game example5_game();

StrategyFn lemma4_strategy(const Game& g);
StrategyFn lemma5_strategy(const Game& g);
StrategyFn example5_strategy(const Game& g);

/// Z = {⟨a^i d^j⟩ : i = 2 ≠ j or j = 2 ≠ i} over {0..3}^{a,d}.
std::vector<Location> example5_red_locations(const Alphabet& alphabet);

/// Names accepted by library_game / library_strategy.
std::vector<std::string> library_names();
/// Throws InvalidArgument for unknown names.
Game library_game(std::string_view name);
StrategyFn library_strategy(std::string_view name, const Game& g);

}  // namespace pvg
