#pragma once

// Exact solving of parameterized vector games from one initial
// configuration, strategy checking, and a direct solver for the normalized
// synthesis game on executions.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "pvg/game.hpp"

namespace pvg {

enum class Winner : std::uint8_t { kSystem, kEnvironment };
std::string_view winner_name(Winner w);

struct Verdict {
  Winner winner = Winner::kEnvironment;
  std::uint64_t explored = 0;  // memoized positions
};

/// Maps system-turn configurations to the transition System plays there.
/// An empty transition is the initial pass.
using PositionalStrategy = std::map<Configuration, Transition>;

/// Programmatic strategy; nullopt means "undefined here".
using StrategyFn =
    std::function<std::optional<Transition>(const Configuration&)>;

StrategyFn as_function(PositionalStrategy s);

/// Memo-entry budget from PVG_BUDGET, or 10^7.
std::uint64_t default_budget();

struct SolveOptions {
  MoveCaps caps;
  std::uint64_t budget = default_budget();
  bool extract_strategy = true;
};

struct SolveResult {
  Verdict verdict;
  std::optional<PositionalStrategy> strategy;  // set on System wins
};

/// Backward induction over (configuration, turn). Throws BudgetExceeded
/// when the memo grows beyond options.budget.
SolveResult solve(const Game& g, const Configuration& c0,
                  const SolveOptions& options = {});

struct VerifyResult {
  bool ok = true;
  std::string reason;
  std::optional<Play> counterexample;
  std::uint64_t explored = 0;
};

/// Explores every f-compatible play, enumerating all environment replies
/// within caps.
VerifyResult verify_strategy(const Game& g, const Configuration& c0,
                             const StrategyFn& f, const MoveCaps& caps = {},
                             std::uint64_t budget = default_budget());

/// The play obtained by following f against an environment that always picks
/// its `choice(i, moves)`-th legal reply (first reply by default).
Play induced_play(const Game& g, const Configuration& c0, const StrategyFn& f,
                  const MoveCaps& caps = {},
                  const std::function<std::size_t(std::size_t, std::size_t)>&
                      choice = {});

struct BruteforceOptions {
  /// Per-process letter counts are tracked up to this cap (default
  /// threshold(φ) + 1).
  std::optional<unsigned> cap;
  /// Maximal number of blocks; unlimited by default (plays are finite anyway).
  std::optional<std::uint32_t> block_bound;
  std::uint64_t budget = default_budget();
};

/// Decides the normalized synthesis game for φ on concrete processes of the
/// given sizes, evaluating φ with model_check on executions.
Verdict bruteforce_synthesis(const Formula& phi, const Alphabet& alphabet,
                             const Triple& sizes,
                             const BruteforceOptions& options = {});

}  // namespace pvg
