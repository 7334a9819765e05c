#pragma once

// Thresholds, truth of FO[~] sentences on configurations, and the counting
// normal form: disjunctions of conjunctions of ∃^{⋈m} y.(θ(y) ∧ ψ_{B,ℓ}(y)).

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "pvg/abstraction.hpp"
#include "pvg/logic.hpp"

namespace pvg {

enum class Cmp : std::uint8_t { kEq, kGe };

/// `= n` or `≥ n` on a natural number.
struct Count {
  Cmp cmp = Cmp::kGe;
  std::uint32_t n = 0;

  bool holds(std::uint32_t v) const { return cmp == Cmp::kEq ? v == n : v >= n; }
  bool trivial() const { return cmp == Cmp::kGe && n == 0; }
  friend bool operator==(const Count&, const Count&) = default;
  friend auto operator<=>(const Count&, const Count&) = default;
};

std::string to_string(const Count& c);  // "=2", ">=0"
/// Accepts "=n", ">=n" and "≥n".
Count parse_count(std::string_view text);

struct CountingConstraint {
  Count count;
  ProcType type = ProcType::kSys;
  Location loc;

  bool holds(const Configuration& c) const {
    return count.holds(c.at(loc, type));
  }
  friend bool operator==(const CountingConstraint&,
                         const CountingConstraint&) = default;
  friend auto operator<=>(const CountingConstraint&,
                          const CountingConstraint&) = default;
};

using Clause = std::vector<CountingConstraint>;

struct NormalForm {
  unsigned bound = 0;
  std::vector<Clause> clauses;
  friend bool operator==(const NormalForm&, const NormalForm&) = default;
};

/// True iff a process of type t can carry the letters of ℓ (s processes have
/// no environment letters, e processes no system letters).
bool realizable(ProcType t, const Location& l, const Alphabet& alphabet);

/// max(1, quantifier_rank(φ)). Throws InvalidArgument outside FO[~].
unsigned threshold(const Formula& f);

/// Truth of a FO[~] sentence on canonical_execution(C), compiled once.
class ConfigEvaluator {
 public:
  /// Rejects configurations whose bound is below threshold(φ) unless
  /// `trust_bound` is set.
  ConfigEvaluator(const Formula& f, const Alphabet& alphabet,
                  bool trust_bound = false);

  bool operator()(const Configuration& c) const;
  const Alphabet& alphabet() const { return alphabet_; }
  const Formula& formula() const { return formula_; }

 private:
  Formula formula_;
  Alphabet alphabet_;
  unsigned threshold_;
  bool trust_bound_;
  std::shared_ptr<const Evaluator> eval_;
};

bool holds_on_config(const Formula& f, const Configuration& c,
                     const Alphabet& alphabet, bool trust_bound = false);

/// ψ_{B,ℓ}(y): the class of y carries exactly ℓ(a) letters a when ℓ(a) < B
/// and at least B otherwise.
Formula location_formula(const Location& l, const Alphabet& alphabet,
                         unsigned bound, const std::string& y);
Formula to_formula(const NormalForm& nf, const Alphabet& alphabet);

struct NormalizeOptions {
  /// Upper bound on the number of block-count vectors evaluated per round.
  std::uint64_t budget = 1u << 16;
  /// Random configurations checked against the table per round.
  unsigned samples = 400;
  /// Random table cells probed for block splits per round, on top of all
  /// cells with at most three tokens. Small tables are probed in full.
  unsigned substitution_cells = 1500;
  std::uint64_t seed = 0x5eed;
};

/// Semantic normal form of φ at bound B with class-count cap m_cap.
/// Realizable profiles are grouped into blocks of interchangeable profiles,
/// the truth table over capped block counts {0..m_cap, ≥m_cap+1} is
/// evaluated on representatives, and blocks are split whenever a probe shows
/// two members behave differently. Throws BudgetExceeded when the table does
/// not fit `options.budget`.
NormalForm normalize(const Formula& f, const Alphabet& alphabet,
                     unsigned bound, unsigned m_cap,
                     const NormalizeOptions& options = {});

/// Drops trivial constraints and constraints on unrealizable profiles, drops
/// unsatisfiable clauses, sorts constraints and clauses, removes duplicates.
NormalForm canonicalize(NormalForm nf, const Alphabet& alphabet);

bool nf_holds(const NormalForm& nf, const Configuration& c);

/// A finite model of φ with as few processes as the search finds, or
/// nothing when no configuration with at most `count_cap` tokens per profile
/// satisfies φ.
std::optional<Execution> satisfiable(const Formula& f, const Alphabet& alphabet,
                                     std::optional<unsigned> count_cap = {});

}  // namespace pvg
