#pragma once

// Seeded structural property runners shared by the unit suite and the
// acceptance driver. Each returns the number of checked cases and the first
// failure, if any.

#include <random>
#include <string>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "pvg/solver.hpp"

namespace pvgtest {

struct PropertyRun {
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string first_failure;

  void fail(const std::string& why) {
    if (failures++ == 0) first_failure = why;
  }
  bool ok() const { return failures == 0; }
};

inline Game random_small_game(std::mt19937_64& rng) {
  Alphabet A({"a"}, {"b"});
  unsigned bound = 1 + static_cast<unsigned>(rng() % 2);
  auto locs = all_locations(A, bound);
  auto count = [&] {
    return Count{rng() % 2 ? Cmp::kEq : Cmp::kGe, static_cast<std::uint32_t>(rng() % 3)};
  };
  auto cond = [&] { return LocalCondition{{count(), count(), count()}}; };
  std::vector<AcceptanceRow> rows(1 + rng() % 3);
  for (auto& r : rows) {
    r.fallback = rng() % 2 ? LocalCondition::any() : LocalCondition::none();
    std::size_t k = 1 + rng() % 3;
    for (std::size_t i = 0; i < k; ++i) r.set(locs[rng() % locs.size()], cond());
  }
  return Game::with_rows(A, bound, rows);
}

inline std::vector<Game> property_games() {
  std::vector<Game> gs = {lemma4_game(), lemma5_game(), example5_game(), tiny_cutoff_game()};
  gs.push_back(encode_2cm(parse_2cm(kMachineM1)));
  return gs;
}

/// Potential strictly increases and per-type totals are preserved along
/// every legal move from configurations reached by random plays.
inline void check_moves(std::uint64_t seed, std::size_t configs, PropertyRun& potential_run,
                        PropertyRun& conservation_run) {
  std::mt19937_64 rng(seed);
  auto games = property_games();
  MoveCaps caps{3, 3};
  std::size_t done = 0;
  while (done < configs) {
    const Game& g = games[rng() % games.size()];
    Configuration c0 = g.initial(static_cast<std::uint32_t>(rng() % 3),
                                 static_cast<std::uint32_t>(rng() % 3),
                                 static_cast<std::uint32_t>(rng() % 4));
    Play p = random_play(g, c0, rng, caps, 6);
    for (const Configuration& c : p.configurations()) {
      if (done++ >= configs) break;
      for (Side side : {Side::kSystem, Side::kEnvironment}) {
        for_each_move(g, c, side, caps, [&](const Transition&, const Configuration& r) {
          ++potential_run.cases;
          ++conservation_run.cases;
          if (!(potential(r) > potential(c)))
            potential_run.fail("potential did not increase from " + to_string(c, g.alphabet()));
          if (r.totals() != c.totals())
            conservation_run.fail("token totals changed from " + to_string(c, g.alphabet()));
          return true;
        });
      }
    }
  }
}

/// FO[~] sentences cannot tell similar executions apart.
inline PropertyRun check_order_blindness(std::uint64_t seed, std::size_t cases) {
  PropertyRun run;
  std::mt19937_64 rng(seed);
  Alphabet A({"a", "b"}, {"c"});
  FormulaGen gen(A, rng);
  for (std::size_t i = 0; i < cases; ++i) {
    Formula f = gen.sentence(2);
    Execution x = random_execution(A, rng, rng() % 3, rng() % 3, rng() % 3, 3);
    std::vector<Event> ev = x.events();
    std::shuffle(ev.begin(), ev.end(), rng);
    Execution y(A, x.universe(), ev);
    ++run.cases;
    if (!similar(x, y)) {
      run.fail("shuffled execution not similar: " + to_string(x));
      continue;
    }
    if (model_check(x, f) != model_check(y, f))
      run.fail("order changed the value of " + to_string(f) + " on " + to_string(x));
  }
  return run;
}

/// Every System verdict comes with a strategy that passes verification.
inline PropertyRun check_certificates(std::uint64_t seed, std::size_t cases) {
  PropertyRun run;
  std::mt19937_64 rng(seed);
  std::size_t tried = 0;
  while (run.cases < cases && tried < 50 * cases) {
    ++tried;
    Game g = random_small_game(rng);
    Configuration c0 = g.initial(static_cast<std::uint32_t>(rng() % 3),
                                 static_cast<std::uint32_t>(rng() % 3),
                                 static_cast<std::uint32_t>(rng() % 3));
    SolveResult r = solve(g, c0);
    if (r.verdict.winner != Winner::kSystem) continue;
    ++run.cases;
    if (!r.strategy) {
      run.fail("System verdict without a strategy");
      continue;
    }
    VerifyResult v = verify_strategy(g, c0, as_function(*r.strategy));
    if (!v.ok) run.fail("extracted strategy fails: " + v.reason);
  }
  return run;
}

}  // namespace pvgtest
