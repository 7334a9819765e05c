#include "pvg/cutoff.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <thread>

#include "pvg/errors.hpp"
#include "pvg/normalform.hpp"

namespace pvg {

namespace {

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b, bool& saturated) {
  std::uint64_t r;
  if (__builtin_mul_overflow(a, b, &r)) {
    saturated = true;
    return UINT64_MAX;
  }
  return r;
}

std::uint64_t sat_pow(std::uint64_t base, std::uint64_t exp, bool& saturated) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    r = sat_mul(r, base, saturated);
    if (saturated || r == 0) break;
  }
  return r;
}

enum class Outcome : std::uint8_t { kSystem, kEnvironment, kBudget };

Outcome run_instance(const Game& g, const Configuration& c0,
                     const MoveCaps& caps, std::uint64_t budget,
                     std::uint64_t* explored = nullptr) {
  SolveOptions o;
  o.caps = caps;
  o.budget = budget;
  o.extract_strategy = false;
  try {
    Verdict v = solve(g, c0, o).verdict;
    if (explored) *explored = v.explored;
    return v.winner == Winner::kSystem ? Outcome::kSystem
                                       : Outcome::kEnvironment;
  } catch (const BudgetExceeded&) {
    return Outcome::kBudget;
  }
}

// Runs fn(0..n) and returns the least index whose outcome satisfies `stop`,
// together with that outcome. Indices after it are skipped where possible.
template <class Fn, class Stop>
std::optional<std::pair<std::uint64_t, Outcome>> first_index(
    std::uint64_t n, unsigned jobs, Fn fn, Stop stop) {
  if (jobs <= 1) {
    for (std::uint64_t i = 0;; ++i) {
      Outcome o = fn(i);
      if (stop(o)) return std::pair{i, o};
      if (i == n) return std::nullopt;
    }
  }
  std::atomic<std::uint64_t> next{0};
  std::atomic<std::uint64_t> best{UINT64_MAX};
  std::mutex mu;
  std::map<std::uint64_t, Outcome> hits;
  std::exception_ptr failure;
  auto worker = [&] {
    while (true) {
      std::uint64_t i = next.fetch_add(1);
      if (i > n || i > best.load()) return;
      Outcome o;
      try {
        o = fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        best.store(0);
        return;
      }
      if (!stop(o)) continue;
      std::lock_guard lock(mu);
      hits.emplace(i, o);
      if (i < best.load()) best.store(i);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  if (hits.empty()) return std::nullopt;
  return *hits.begin();
}

}  // namespace

CutoffBound cutoff_bound(const Game& g, std::uint32_t ke, std::uint32_t kse,
                         std::optional<std::uint64_t> K) {
  CutoffBound b;
  if (K) {
    b.K = *K;
  } else {
    auto m = g.max_constant();
    if (!m)
      throw InvalidArgument(
          "cutoff bound of an implicit game needs an explicit K");
    b.K = *m;
  }
  const Alphabet& a = g.alphabet();
  bool sat = false;
  b.Max = sat_mul(sat_mul(std::uint64_t{ke} + kse, a.env_size(), sat),
                  g.bound(), sat);
  b.locations = sat_pow(g.bound() + 1, a.size(), sat);
  std::uint64_t exp = b.Max == UINT64_MAX ? UINT64_MAX : b.Max + 1;
  b.hatN = b.K == 0 ? 0 : sat_mul(sat_pow(b.locations, exp, sat), b.K, sat);
  b.saturated = sat && b.K != 0;
  return b;
}

std::uint64_t formula_constant_bound(const Formula& phi) {
  return std::uint64_t{threshold(phi)} + 1;
}

std::string_view decision_name(DecisionKind k) {
  switch (k) {
    case DecisionKind::kNonempty: return "nonempty";
    case DecisionKind::kEmpty: return "empty";
    case DecisionKind::kEmptyUpTo: return "empty-up-to";
    case DecisionKind::kInconclusive: return "inconclusive";
  }
  return "?";
}

Decision decide(const Game& g, std::uint32_t ke, std::uint32_t kse,
                const DecideOptions& options) {
  Decision d;
  d.bound = cutoff_bound(g, ke, kse, options.K);
  std::uint64_t limit = d.bound.hatN;
  bool capped = options.n_max && *options.n_max < limit;
  if (capped) limit = *options.n_max;
  std::atomic<std::uint64_t> used{0};
  auto hit = first_index(
      limit, options.jobs,
      [&](std::uint64_t n) {
        std::uint64_t spent = used.load();
        if (n > UINT32_MAX || spent >= options.budget) return Outcome::kBudget;
        std::uint64_t explored = 0;
        Outcome o = run_instance(
            g, g.initial(static_cast<std::uint32_t>(n), ke, kse), options.caps,
            options.budget - spent, &explored);
        if (used.fetch_add(explored) + explored > options.budget)
          return Outcome::kBudget;
        return o;
      },
      [](Outcome o) { return o != Outcome::kEnvironment; });
  if (!hit) {
    d.kind = capped ? DecisionKind::kEmptyUpTo : DecisionKind::kEmpty;
    d.searched_up_to = limit;
  } else {
    d.searched_up_to = hit->first;
    if (hit->second == Outcome::kSystem) {
      d.kind = DecisionKind::kNonempty;
      d.witness = hit->first;
    } else {
      d.kind = DecisionKind::kInconclusive;
    }
  }
  d.instances_solved = d.searched_up_to + 1;
  return d;
}

std::string_view axis_name(Axis a) {
  switch (a) {
    case Axis::kS: return "s";
    case Axis::kE: return "e";
    case Axis::kSE: return "se";
  }
  return "?";
}

Axis parse_axis(std::string_view s) {
  if (s == "s") return Axis::kS;
  if (s == "e") return Axis::kE;
  if (s == "se") return Axis::kSE;
  throw InvalidArgument("unknown axis '" + std::string(s) +
                        "' (expected s, e or se)");
}

ScanResult scan_winning(const Game& g, Axis axis, const Triple& fixed,
                        std::uint32_t from, std::uint32_t to,
                        const ScanOptions& options) {
  ScanResult r;
  r.axis = axis;
  r.fixed = fixed;
  r.from = from;
  if (from > to) return r;
  std::size_t count = static_cast<std::size_t>(to - from) + 1;
  std::vector<Outcome> out(count, Outcome::kBudget);
  auto solve_at = [&](std::uint64_t i) {
    Triple k = fixed;
    k[static_cast<std::size_t>(axis)] = from + static_cast<std::uint32_t>(i);
    out[i] = run_instance(g, g.initial(k[0], k[1], k[2]), options.caps,
                          options.budget);
    return out[i];
  };
  first_index(count - 1, options.jobs, solve_at,
              [](Outcome) { return false; });
  for (Outcome o : out) {
    if (o == Outcome::kBudget)
      r.winners.push_back(std::nullopt);
    else
      r.winners.push_back(o == Outcome::kSystem ? Winner::kSystem
                                                : Winner::kEnvironment);
  }
  std::size_t start = count - 1;
  while (start > 0 && r.winners[start - 1] == r.winners.back() &&
         r.winners.back().has_value())
    --start;
  if (r.winners.back()) {
    r.stable_from = from + static_cast<std::uint32_t>(start);
    r.eventually_constant = count - start >= 2;
  }
  return r;
}

}  // namespace pvg
