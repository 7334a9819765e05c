#pragma once

// Cutoff bound for Game(ℕ, {k_e}, {k_se}), the decision procedure built on
// it, and winner scans along one component of the initial triple.

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "pvg/game.hpp"
#include "pvg/solver.hpp"

namespace pvg {

struct CutoffBound {
  std::uint64_t K = 0;
  std::uint64_t Max = 0;
  std::uint64_t locations = 0;  // |L| = (B+1)^|A|
  std::uint64_t hatN = 0;
  bool saturated = false;       // hatN overflowed and is clamped to 2^64-1
};

/// hatN = |L|^(Max+1) · K with Max = (k_e + k_se)·|A_e|·B. K defaults to the
/// largest constant of the rows; implicit games need an explicit K.
CutoffBound cutoff_bound(const Game& g, std::uint32_t ke, std::uint32_t kse,
                         std::optional<std::uint64_t> K = {});

/// Upper bound on the constants of normalize(φ, B, threshold(φ)), usable as
/// K for the implicit game of φ.
std::uint64_t formula_constant_bound(const Formula& phi);

enum class DecisionKind : std::uint8_t {
  kNonempty,
  kEmpty,
  kEmptyUpTo,  // no winner up to a user cap below hatN
  kInconclusive,
};
std::string_view decision_name(DecisionKind k);

struct DecideOptions {
  MoveCaps caps;
  /// Memo entries summed over all instances.
  std::uint64_t budget = default_budget();
  std::optional<std::uint64_t> n_max;
  std::optional<std::uint64_t> K;
  unsigned jobs = 1;
};

struct Decision {
  CutoffBound bound;
  DecisionKind kind = DecisionKind::kEmpty;
  std::optional<std::uint64_t> witness;
  std::uint64_t searched_up_to = 0;    // last N examined
  std::uint64_t instances_solved = 0;  // N values 0..searched_up_to
};

/// Solves C_(N, k_e, k_se) for N = 0, 1, … up to hatN (or n_max) and reports
/// the least N where System wins. With jobs > 1 instances run in parallel
/// and the answer is the sequential one, except that near the budget the
/// point where it runs out may differ.
Decision decide(const Game& g, std::uint32_t ke, std::uint32_t kse,
                const DecideOptions& options = {});

enum class Axis : std::uint8_t { kS, kE, kSE };
std::string_view axis_name(Axis a);
/// "s", "e" or "se"; throws InvalidArgument otherwise.
Axis parse_axis(std::string_view s);

struct ScanOptions {
  MoveCaps caps;
  std::uint64_t budget = default_budget();
  unsigned jobs = 1;
};

struct ScanResult {
  Axis axis = Axis::kSE;
  Triple fixed{0, 0, 0};
  std::uint32_t from = 0;
  std::vector<std::optional<Winner>> winners;  // nullopt: budget exceeded
  /// Start of the longest constant suffix, as an axis value.
  std::optional<std::uint32_t> stable_from;
  /// The constant suffix has at least two entries.
  bool eventually_constant = false;
};

/// Solves the instances whose `axis` component ranges over [from, to]; the
/// other two components come from `fixed`. An empty range gives an empty
/// table.
ScanResult scan_winning(const Game& g, Axis axis, const Triple& fixed,
                        std::uint32_t from, std::uint32_t to,
                        const ScanOptions& options = {});

}  // namespace pvg
