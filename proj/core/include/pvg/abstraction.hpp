#pragma once

// Locations (letter counts capped at B) and token configurations, with the
// two bridges between executions and configurations.

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "pvg/logic.hpp"

namespace pvg {

/// ℓ ∈ {0..B}^A, indexed by LetterId.
using Location = std::vector<std::uint8_t>;

/// Token counts (n_s, n_e, n_se), indexed by ProcType.
using Triple = std::array<std::uint32_t, 3>;

inline std::size_t idx(ProcType t) { return static_cast<std::size_t>(t); }
inline bool is_zero(const Triple& t) { return t[0] == 0 && t[1] == 0 && t[2] == 0; }

/// Largest supported bound; counts are stored in one byte.
inline constexpr unsigned kMaxBound = 255;

Location zero_location(const Alphabet& alphabet);
Location loc_add(const Location& l, LetterId a, unsigned bound);
Location loc_add(const Location& l, const std::vector<LetterId>& word,
                 unsigned bound);
/// Word given by action names; throws InvalidArgument on unknown names.
Location loc_add(const Alphabet& alphabet, const Location& l,
                 const std::vector<std::string>& word, unsigned bound);

/// ⟨a²b⟩ is rendered `a^2 b`; ℓ0 is rendered `0`.
std::string to_string(const Location& l, const Alphabet& alphabet);
/// Inverse of to_string(Location); counts above `bound` are rejected.
Location parse_location(std::string_view text, const Alphabet& alphabet,
                        unsigned bound);

/// |L| = (B+1)^|A|, saturating at UINT64_MAX.
std::uint64_t location_count(const Alphabet& alphabet, unsigned bound);
/// All locations in lexicographic order. Throws BudgetExceeded above `limit`.
std::vector<Location> all_locations(const Alphabet& alphabet, unsigned bound,
                                    std::uint64_t limit = 1u << 20);

/// Sum of letter counts of ℓ.
unsigned letter_sum(const Location& l);

/// A configuration C: L → ℕ^𝕋 over a fixed bound. Entries are kept sorted by
/// location and never hold (0,0,0), so structural equality is semantic
/// equality.
class Configuration {
 public:
  using Entry = std::pair<Location, Triple>;

  Configuration() = default;
  explicit Configuration(unsigned bound);

  unsigned bound() const { return bound_; }
  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  Triple at(const Location& l) const;
  std::uint32_t at(const Location& l, ProcType t) const { return at(l)[idx(t)]; }

  /// Adds `delta` tokens of type t at ℓ; throws if the count would go negative.
  void add(const Location& l, ProcType t, std::int64_t delta);
  void set(const Location& l, const Triple& counts);

  /// Per-type token totals.
  Triple totals() const;
  std::uint64_t token_count() const;

  std::size_t hash() const;

  friend bool operator==(const Configuration&, const Configuration&) = default;
  friend auto operator<=>(const Configuration&, const Configuration&) = default;

 private:
  std::vector<Entry>::iterator find_slot(const Location& l);

  unsigned bound_ = 0;
  std::vector<Entry> entries_;
};

struct ConfigurationHash {
  std::size_t operator()(const Configuration& c) const { return c.hash(); }
};

/// C_(ks,ke,kse): all tokens at ℓ0.
Configuration initial_configuration(const Alphabet& alphabet, unsigned bound,
                                    std::uint32_t ks, std::uint32_t ke,
                                    std::uint32_t kse);

/// One token per process at its capped letter-count location.
Configuration abstract_execution(const Execution& x, unsigned bound);

/// Execution with C(ℓ,θ) fresh processes of type θ per location ℓ, each
/// emitting exactly ℓ(a) copies of every letter a. Ids are 1.. allocated to
/// s, then e, then se tokens, locations in ascending order.
Execution canonical_execution(const Configuration& c, const Alphabet& alphabet);

/// Σ over tokens of Σ_a ℓ(a).
std::uint64_t potential(const Configuration& c);

/// `{s: ⟨a⟩×1, ...}`-style single-line rendering for diagnostics.
std::string to_string(const Configuration& c, const Alphabet& alphabet);

/// A (type, location) pair.
struct Profile {
  ProcType type = ProcType::kSys;
  Location loc;
  friend bool operator==(const Profile&, const Profile&) = default;
  friend auto operator<=>(const Profile&, const Profile&) = default;
};

/// Locations reachable from ℓ by words over one side's letters whose minimal
/// length is at most `max_letters` (including ℓ itself), in ascending order.
std::vector<Location> successors(const Location& l, const Alphabet& alphabet,
                                 unsigned bound, bool system_side,
                                 std::uint32_t max_letters);

/// True iff ℓ′ = ℓ + w for some word w over the given side's letters.
bool reachable_by_side(const Location& from, const Location& to,
                       const Alphabet& alphabet, unsigned bound,
                       bool system_side);

}  // namespace pvg
