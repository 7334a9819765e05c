#include "pvg/solver.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "pvg/errors.hpp"

namespace pvg {

std::string_view winner_name(Winner w) {
  return w == Winner::kSystem ? "System" : "Environment";
}

StrategyFn as_function(PositionalStrategy s) {
  auto shared = std::make_shared<const PositionalStrategy>(std::move(s));
  return [shared](const Configuration& c) -> std::optional<Transition> {
    auto it = shared->find(c);
    if (it == shared->end()) return std::nullopt;
    return it->second;
  };
}

std::uint64_t default_budget() {
  if (const char* env = std::getenv("PVG_BUDGET")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return 10'000'000;
}

namespace {

std::uint64_t depth_bound(const Game& g, const Configuration& c) {
  return 2 * c.token_count() * g.alphabet().size() * g.bound() + 2;
}

class Solver {
 public:
  Solver(const Game& g, const SolveOptions& options, std::uint64_t max_depth)
      : g_(g), options_(options), max_depth_(max_depth) {}

  bool win_sys(const Configuration& c, bool initial, std::uint64_t depth) {
    enter(depth);
    if (auto it = sys_memo_.find(c); it != sys_memo_.end()) return it->second;
    bool win = false;
    if (initial && g_.accepts(c) && win_env(c, depth + 1)) {
      win = true;
      record(c, Transition::pass());
    } else {
      std::unordered_set<Configuration, ConfigurationHash> tried;
      for_each_move(g_, c, Side::kSystem, options_.caps,
                    [&](const Transition& t, const Configuration& d) {
                      if (!tried.insert(d).second || !g_.accepts(d)) return true;
                      if (win_env(d, depth + 1)) {
                        win = true;
                        record(c, t);
                        return false;
                      }
                      return true;
                    });
    }
    sys_memo_.emplace(c, win);
    check_budget();
    return win;
  }

  bool win_env(const Configuration& d, std::uint64_t depth) {
    enter(depth);
    if (auto it = env_memo_.find(d); it != env_memo_.end()) return it->second;
    bool win = true;
    std::unordered_set<Configuration, ConfigurationHash> tried;
    for_each_move(g_, d, Side::kEnvironment, options_.caps,
                  [&](const Transition&, const Configuration& e) {
                    if (!tried.insert(e).second || g_.accepts(e)) return true;
                    if (!win_sys(e, false, depth + 1)) {
                      win = false;
                      return false;
                    }
                    return true;
                  });
    env_memo_.emplace(d, win);
    check_budget();
    return win;
  }

  std::uint64_t explored() const { return sys_memo_.size() + env_memo_.size(); }
  PositionalStrategy take_strategy() { return std::move(strategy_); }

 private:
  void enter(std::uint64_t depth) const {
    if (depth > max_depth_)
      throw Error("internal: play longer than the potential bound");
  }
  void check_budget() const {
    if (explored() > options_.budget)
      throw BudgetExceeded("solver explored more than " +
                           std::to_string(options_.budget) + " positions");
  }
  void record(const Configuration& c, const Transition& t) {
    if (options_.extract_strategy) strategy_.emplace(c, t);
  }

  const Game& g_;
  const SolveOptions& options_;
  std::uint64_t max_depth_;
  std::unordered_map<Configuration, bool, ConfigurationHash> sys_memo_;
  std::unordered_map<Configuration, bool, ConfigurationHash> env_memo_;
  PositionalStrategy strategy_;
};

}  // namespace

SolveResult solve(const Game& g, const Configuration& c0,
                  const SolveOptions& options) {
  g.check_shape(c0);
  Solver s(g, options, depth_bound(g, c0));
  bool win = s.win_sys(c0, true, 0);
  SolveResult r;
  r.verdict = {win ? Winner::kSystem : Winner::kEnvironment, s.explored()};
  if (win && options.extract_strategy) r.strategy = s.take_strategy();
  return r;
}

namespace {

class Verifier {
 public:
  Verifier(const Game& g, const Configuration& c0, const StrategyFn& f,
           const MoveCaps& caps, std::uint64_t budget)
      : g_(g), f_(f), caps_(caps), budget_(budget) {
    play_.initial = c0;
  }

  bool sys_turn(const Configuration& c, bool initial) {
    if (good_.count(c)) return true;
    if (++explored_ > budget_)
      throw BudgetExceeded("strategy check explored more than " +
                           std::to_string(budget_) + " positions");
    std::optional<Transition> t = f_(c);
    if (!t) return fail("strategy undefined at " + to_string(c, g_.alphabet()));
    if (t->side() != Side::kSystem)
      return fail("strategy returned an environment transition");
    if (!applicable(*t, c))
      return fail("strategy move not applicable at " +
                  to_string(c, g_.alphabet()));
    for (const Move& m : t->moves())
      if (!reachable_by_side(m.from, m.to, g_.alphabet(), g_.bound(), true))
        return fail("strategy move uses a non-system location change");
    if (t->empty() && !initial)
      return fail("strategy passes after an environment move");
    Configuration d = apply(*t, c);
    play_.steps.emplace_back(*t, d);
    if (!g_.accepts(d))
      return fail("strategy move leads to a rejecting configuration");
    bool ok = env_turn(d);
    if (!ok) return false;
    play_.steps.pop_back();
    good_.insert(c);
    return true;
  }

  bool env_turn(const Configuration& d) {
    bool ok = true;
    for_each_move(g_, d, Side::kEnvironment, caps_,
                  [&](const Transition& t, const Configuration& e) {
                    if (g_.accepts(e)) return true;
                    play_.steps.emplace_back(t, e);
                    if (!sys_turn(e, false)) {
                      ok = false;
                      return false;
                    }
                    play_.steps.pop_back();
                    return true;
                  });
    return ok;
  }

  VerifyResult result(bool ok) {
    VerifyResult r;
    r.ok = ok;
    r.explored = explored_;
    if (!ok) {
      r.reason = reason_;
      r.counterexample = play_;
    }
    return r;
  }

 private:
  bool fail(std::string why) {
    reason_ = std::move(why);
    return false;
  }

  const Game& g_;
  const StrategyFn& f_;
  MoveCaps caps_;
  std::uint64_t budget_;
  std::uint64_t explored_ = 0;
  std::unordered_set<Configuration, ConfigurationHash> good_;
  Play play_;
  std::string reason_;
};

}  // namespace

VerifyResult verify_strategy(const Game& g, const Configuration& c0,
                             const StrategyFn& f, const MoveCaps& caps,
                             std::uint64_t budget) {
  g.check_shape(c0);
  Verifier v(g, c0, f, caps, budget);
  bool ok = v.sys_turn(c0, true);
  return v.result(ok);
}

Play induced_play(const Game& g, const Configuration& c0, const StrategyFn& f,
                  const MoveCaps& caps,
                  const std::function<std::size_t(std::size_t, std::size_t)>&
                      choice) {
  Play p;
  p.initial = c0;
  Configuration cur = c0;
  for (std::size_t round = 0;; ++round) {
    auto t = f(cur);
    if (!t || !applicable(*t, cur)) break;
    if (t->empty() && round > 0) break;
    Configuration d = apply(*t, cur);
    p.steps.emplace_back(*t, d);
    auto replies = legal_moves(g, d, Side::kEnvironment, caps);
    if (replies.empty()) break;
    std::size_t k = choice ? choice(round, replies.size()) % replies.size() : 0;
    p.steps.emplace_back(replies[k].transition, replies[k].result);
    cur = replies[k].result;
  }
  return p;
}

// ---------------------------------------------------------------------------
// Normalized synthesis on concrete processes

namespace {

struct ProcState {
  // Capped per-process letter counts, sorted within each type.
  std::array<std::vector<Location>, 3> procs;
  friend bool operator==(const ProcState&, const ProcState&) = default;
  friend auto operator<=>(const ProcState&, const ProcState&) = default;
};

class Synthesizer {
 public:
  Synthesizer(const Formula& phi, const Alphabet& alphabet, unsigned cap,
              const BruteforceOptions& options)
      : alphabet_(alphabet), cap_(cap), options_(options), eval_(phi, alphabet) {}

  bool holds(const ProcState& s) {
    if (auto it = truth_.find(s); it != truth_.end()) return it->second;
    ProcessUniverse u;
    std::vector<Event> events;
    ProcessId next = 1;
    for (ProcType t : kAllTypes)
      for (const Location& l : s.procs[idx(t)]) {
        ProcessId p = next++;
        u.of(t).push_back(p);
        for (std::size_t a = 0; a < l.size(); ++a)
          for (unsigned k = 0; k < l[a]; ++k)
            events.push_back({static_cast<LetterId>(a), p});
      }
    bool v = eval_(Execution(alphabet_, std::move(u), std::move(events)));
    truth_.emplace(s, v);
    return v;
  }

  std::vector<ProcState> moves(const ProcState& s, bool system) {
    std::vector<std::pair<ProcType, std::size_t>> movers;
    for (ProcType t : kAllTypes) {
      bool mine = system ? t != ProcType::kEnv : t != ProcType::kSys;
      if (!mine) continue;
      for (std::size_t i = 0; i < s.procs[idx(t)].size(); ++i)
        movers.emplace_back(t, i);
    }
    std::vector<std::vector<Location>> targets;
    for (auto [t, i] : movers)
      targets.push_back(successors(s.procs[idx(t)][i], alphabet_, cap_, system,
                                   kUnlimited));
    std::set<ProcState> out;
    std::vector<std::size_t> pick(movers.size(), 0);
    while (true) {
      ProcState n = s;
      for (std::size_t k = 0; k < movers.size(); ++k)
        n.procs[idx(movers[k].first)][movers[k].second] = targets[k][pick[k]];
      for (auto& v : n.procs) std::sort(v.begin(), v.end());
      if (!(n == s)) out.insert(std::move(n));
      std::size_t k = movers.size();
      while (k > 0 && ++pick[k - 1] == targets[k - 1].size()) pick[--k] = 0;
      if (k == 0) break;
    }
    return {out.begin(), out.end()};
  }

  bool win_sys(const ProcState& s, bool initial, std::uint32_t blocks) {
    auto key = std::make_pair(s, initial);
    if (auto it = sys_memo_.find(key); it != sys_memo_.end()) return it->second;
    bool win = false;
    if (initial && holds(s) && win_env(s, blocks)) win = true;
    if (!win && within(blocks + 1)) {
      for (const ProcState& n : moves(s, true))
        if (holds(n) && win_env(n, blocks + 1)) {
          win = true;
          break;
        }
    }
    sys_memo_.emplace(key, win);
    budget();
    return win;
  }

  bool win_env(const ProcState& s, std::uint32_t blocks) {
    if (auto it = env_memo_.find(s); it != env_memo_.end()) return it->second;
    bool win = true;
    if (within(blocks + 1)) {
      for (const ProcState& n : moves(s, false))
        if (!holds(n) && !win_sys(n, false, blocks + 1)) {
          win = false;
          break;
        }
    }
    env_memo_.emplace(s, win);
    budget();
    return win;
  }

  std::uint64_t explored() const { return sys_memo_.size() + env_memo_.size(); }

 private:
  bool within(std::uint32_t blocks) const {
    return !options_.block_bound || blocks <= *options_.block_bound;
  }
  void budget() const {
    if (explored() > options_.budget)
      throw BudgetExceeded("synthesis search explored more than " +
                           std::to_string(options_.budget) + " positions");
  }

  Alphabet alphabet_;
  unsigned cap_;
  BruteforceOptions options_;
  Evaluator eval_;
  std::map<ProcState, bool> truth_;
  std::map<std::pair<ProcState, bool>, bool> sys_memo_;
  std::map<ProcState, bool> env_memo_;
};

}  // namespace

Verdict bruteforce_synthesis(const Formula& phi, const Alphabet& alphabet,
                             const Triple& sizes,
                             const BruteforceOptions& options) {
  unsigned cap = options.cap.value_or(threshold(phi) + 1);
  if (!free_variables(phi).empty())
    throw InvalidArgument("synthesis expects a sentence");
  Synthesizer s(phi, alphabet, cap, options);
  ProcState init;
  for (ProcType t : kAllTypes)
    init.procs[idx(t)].assign(sizes[idx(t)], zero_location(alphabet));
  bool win = s.win_sys(init, true, 0);
  return {win ? Winner::kSystem : Winner::kEnvironment, s.explored()};
}

}  // namespace pvg
