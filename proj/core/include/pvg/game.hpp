#pragma once

// Parameterized vector games: acceptance conditions, transitions, legal
// moves and plays.

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pvg/abstraction.hpp"
#include "pvg/normalform.hpp"

namespace pvg {

/// One (⋈, n) pair per type s, e, se.
struct LocalCondition {
  std::array<Count, 3> c{};

  bool holds(const Triple& t) const {
    return c[0].holds(t[0]) && c[1].holds(t[1]) && c[2].holds(t[2]);
  }
  static LocalCondition any() { return {}; }
  static LocalCondition none() {
    return {{Count{Cmp::kEq, 0}, Count{Cmp::kEq, 0}, Count{Cmp::kEq, 0}}};
  }
  /// (=0, =0, ⋈n) and friends: a condition on se tokens only.
  static LocalCondition se_only(Count se) {
    return {{Count{Cmp::kEq, 0}, Count{Cmp::kEq, 0}, se}};
  }
  std::uint32_t max_constant() const {
    return std::max({c[0].n, c[1].n, c[2].n});
  }
  friend bool operator==(const LocalCondition&, const LocalCondition&) = default;
};

/// Predicate selecting a family of locations for a row.
enum class LocationFamily : std::uint8_t {
  kNone,
  /// Σ env-letter counts > Σ sys-letter counts.
  kEnvExceedsSys,
};

bool in_family(LocationFamily f, const Location& l, const Alphabet& alphabet);
std::string_view family_name(LocationFamily f);

/// κ ∈ 𝔈^L: explicit entries, default elsewhere. A row with a family stands
/// for the union, over every ℓ in the family, of the row that additionally
/// puts `family_cond` on ℓ; `family_cond` must fail on (0,0,0) and listed
/// locations may not belong to the family.
struct AcceptanceRow {
  std::vector<std::pair<Location, LocalCondition>> locs;  // sorted by location
  LocalCondition fallback = LocalCondition::none();
  LocationFamily family = LocationFamily::kNone;
  LocalCondition family_cond = LocalCondition::none();

  /// Explicit entry or default (family ignored).
  const LocalCondition& condition_at(const Location& l) const;
  void set(const Location& l, const LocalCondition& cond);
  bool holds(const Configuration& c, const Alphabet& alphabet) const;
  std::uint32_t max_constant() const;
  /// The family-free rows this row stands for.
  std::vector<AcceptanceRow> expand(const Alphabet& alphabet,
                                    unsigned bound) const;
  friend bool operator==(const AcceptanceRow&, const AcceptanceRow&) = default;
};

/// 𝒢 = (A, B, 𝔉) with 𝔉 given either by explicit rows or by an FO[~]
/// sentence evaluated on canonical executions.
class Game {
 public:
  Game() = default;
  static Game with_rows(Alphabet alphabet, unsigned bound,
                        std::vector<AcceptanceRow> rows);
  /// Implicit acceptance; `bound` defaults to threshold(φ).
  static Game with_formula(Alphabet alphabet, const Formula& phi,
                           std::optional<unsigned> bound = {});

  const Alphabet& alphabet() const { return alphabet_; }
  unsigned bound() const { return bound_; }
  bool is_explicit() const { return !formula_; }
  const std::vector<AcceptanceRow>& rows() const { return rows_; }
  const std::optional<Formula>& formula() const { return formula_; }

  /// C ⊨ 𝔉. Implicit verdicts are cached (thread-safe).
  bool accepts(const Configuration& c) const;

  /// Largest constant in 𝔉 (explicit acceptance only).
  std::optional<std::uint32_t> max_constant() const;

  /// Throws InvalidArgument when C does not match the game's shape.
  void check_shape(const Configuration& c) const;

  Location origin() const { return zero_location(alphabet_); }
  Configuration initial(std::uint32_t ks, std::uint32_t ke,
                        std::uint32_t kse) const {
    return initial_configuration(alphabet_, bound_, ks, ke, kse);
  }

 private:
  struct Cache;

  Alphabet alphabet_;
  unsigned bound_ = 0;
  std::vector<AcceptanceRow> rows_;
  std::optional<Formula> formula_;
  std::shared_ptr<const ConfigEvaluator> eval_;
  std::shared_ptr<Cache> cache_;
};

enum class Side : std::uint8_t { kSystem, kEnvironment };
std::string_view side_name(Side s);

/// Token types a side may move.
inline bool moves_type(Side s, ProcType t) {
  return s == Side::kSystem ? t != ProcType::kEnv : t != ProcType::kSys;
}

struct Move {
  Location from;
  Location to;
  Triple n{0, 0, 0};
  friend bool operator==(const Move&, const Move&) = default;
  friend auto operator<=>(const Move&, const Move&) = default;
};

/// τ restricted to its non-zero off-diagonal entries, sorted by (from, to).
class Transition {
 public:
  Transition() = default;
  /// Canonicalizes (merges duplicates, drops zero triples and self-loops)
  /// and validates side discipline and letter-extension targets.
  Transition(Side side, std::vector<Move> moves, const Alphabet& alphabet,
             unsigned bound);
  static Transition pass(Side side = Side::kSystem) {
    Transition t;
    t.side_ = side;
    return t;
  }

  Side side() const { return side_; }
  const std::vector<Move>& moves() const { return moves_; }
  bool empty() const { return moves_.empty(); }

  friend bool operator==(const Transition&, const Transition&) = default;

 private:
  Side side_ = Side::kSystem;
  std::vector<Move> moves_;
};

bool applicable(const Transition& t, const Configuration& c);
/// τ(C); throws InvalidArgument if τ is not applicable.
Configuration apply(const Transition& t, const Configuration& c);

inline constexpr std::uint32_t kUnlimited = std::numeric_limits<std::uint32_t>::max();

struct MoveCaps {
  std::uint32_t max_tokens_per_move = kUnlimited;
  std::uint32_t max_letters_per_token = kUnlimited;

  bool unlimited() const {
    return max_tokens_per_move == kUnlimited &&
           max_letters_per_token == kUnlimited;
  }
  friend bool operator==(const MoveCaps&, const MoveCaps&) = default;
};

struct LegalMove {
  Transition transition;
  Configuration result;
};

/// All effective moves of `side` from C within caps whose result satisfies 𝔉
/// (system) or falsifies it (environment), in a deterministic order.
/// Throws BudgetExceeded if more than `limit` candidates would be generated.
std::vector<LegalMove> legal_moves(const Game& g, const Configuration& c,
                                   Side side, const MoveCaps& caps,
                                   std::uint64_t limit = 5'000'000);

/// Calls `visit` for every candidate effective move (before the acceptance
/// filter); stops early when `visit` returns false.
void for_each_move(const Game& g, const Configuration& c, Side side,
                   const MoveCaps& caps,
                   const std::function<bool(const Transition&,
                                            const Configuration&)>& visit);

struct Play {
  Configuration initial;
  std::vector<std::pair<Transition, Configuration>> steps;

  const Configuration& last() const {
    return steps.empty() ? initial : steps.back().second;
  }
  std::vector<Configuration> configurations() const;
};

struct PlayCheck {
  bool ok = true;
  std::string reason;
  explicit operator bool() const { return ok; }
};

PlayCheck validate_play(const Game& g, const Play& p);

std::string to_string(const Transition& t, const Alphabet& alphabet);

}  // namespace pvg
