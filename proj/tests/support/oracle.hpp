#pragma once

// Reference implementations used as test oracles. They follow the textbook
// definitions directly and share no code with the library beyond its data
// types.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "pvg/abstraction.hpp"
#include "pvg/game.hpp"
#include "pvg/logic.hpp"
#include "pvg/reductions.hpp"

namespace pvgtest {

using namespace pvg;

// ---------------------------------------------------------------------------
// Satisfaction

struct Elem {
  bool is_process = true;
  std::uint32_t v = 0;  // process id or 1-based position
  bool operator==(const Elem&) const = default;
};

class NaiveModel {
 public:
  explicit NaiveModel(const Execution& x) : x_(x) {
    for (ProcType t : kAllTypes)
      for (ProcessId p : x.universe().of(t)) elems_.push_back({true, p});
    for (std::uint32_t i = 1; i <= x.length(); ++i) elems_.push_back({false, i});
  }

  bool holds(const Formula& f) const {
    std::map<std::string, Elem> env;
    return eval(f, env);
  }

 private:
  ProcessId owner(const Elem& e) const {
    return e.is_process ? e.v : x_.at(e.v).process;
  }

  // ∃^{≥m} y. φ as "there are y1 < ... < ym, pairwise distinct, all satisfying φ".
  bool at_least(std::uint32_t m, const std::string& y, const Formula& body,
                std::map<std::string, Elem>& env, std::size_t from) const {
    if (m == 0) return true;
    for (std::size_t i = from; i < elems_.size(); ++i) {
      auto saved = env.find(y) == env.end() ? std::nullopt : std::optional(env[y]);
      env[y] = elems_[i];
      bool ok = eval(body, env);
      if (saved) env[y] = *saved; else env.erase(y);
      if (ok && at_least(m - 1, y, body, env, i + 1)) return true;
    }
    return false;
  }

  bool eval(const Formula& f, std::map<std::string, Elem>& env) const {
    switch (f.kind()) {
      case FormulaKind::kTrue: return true;
      case FormulaKind::kFalse: return false;
      case FormulaKind::kType: {
        const Elem& e = env.at(f.var());
        if (!e.is_process) return false;
        const auto& ps = x_.universe().of(f.type());
        return std::find(ps.begin(), ps.end(), e.v) != ps.end();
      }
      case FormulaKind::kAction: {
        const Elem& e = env.at(f.var());
        return !e.is_process &&
               x_.alphabet().name(x_.at(e.v).action) == f.action();
      }
      case FormulaKind::kEqual: return env.at(f.var()) == env.at(f.var2());
      case FormulaKind::kSim: return owner(env.at(f.var())) == owner(env.at(f.var2()));
      case FormulaKind::kLess: {
        const Elem &a = env.at(f.var()), &b = env.at(f.var2());
        return !a.is_process && !b.is_process && a.v < b.v;
      }
      case FormulaKind::kSucc: {
        const Elem &a = env.at(f.var()), &b = env.at(f.var2());
        return !a.is_process && !b.is_process && b.v == a.v + 1;
      }
      case FormulaKind::kNot: return !eval(f.child(0), env);
      case FormulaKind::kOr: return eval(f.child(0), env) || eval(f.child(1), env);
      case FormulaKind::kAnd: return eval(f.child(0), env) && eval(f.child(1), env);
      case FormulaKind::kImplies: return !eval(f.child(0), env) || eval(f.child(1), env);
      case FormulaKind::kIff: return eval(f.child(0), env) == eval(f.child(1), env);
      case FormulaKind::kExists: return at_least(1, f.var(), f.child(0), env, 0);
      case FormulaKind::kForall:
        return !at_least(1, f.var(), Formula::Not(f.child(0)), env, 0);
      case FormulaKind::kAtLeast:
        return at_least(f.count(), f.var(), f.child(0), env, 0);
      case FormulaKind::kExactly:
        return at_least(f.count(), f.var(), f.child(0), env, 0) &&
               !at_least(f.count() + 1, f.var(), f.child(0), env, 0);
    }
    return false;
  }

  const Execution& x_;
  std::vector<Elem> elems_;
};

inline bool oracle_holds(const Execution& x, const Formula& f) {
  return NaiveModel(x).holds(f);
}

/// Nesting depth after writing ∃^{≥m} as m nested ∃ and ∃^{=m} as
/// ∃^{≥m} ∧ ¬∃^{≥m+1}.
inline std::size_t oracle_rank(const Formula& f) {
  std::size_t kids = 0;
  for (std::size_t i = 0; i < f.arity(); ++i) kids = std::max(kids, oracle_rank(f.child(i)));
  switch (f.kind()) {
    case FormulaKind::kExists:
    case FormulaKind::kForall: return 1 + kids;
    case FormulaKind::kAtLeast: return f.count() == 0 ? 0 : f.count() + kids;
    case FormulaKind::kExactly: return f.count() + 1 + kids;
    default: return kids;
  }
}

// ---------------------------------------------------------------------------
// Abstraction

/// Per-process letter counts capped at B, tallied per (type, location).
inline std::map<std::pair<int, Location>, std::uint32_t> oracle_profile_counts(
    const Execution& x, unsigned bound) {
  std::map<ProcessId, Location> loc;
  std::map<ProcessId, int> type;
  for (ProcType t : kAllTypes)
    for (ProcessId p : x.universe().of(t)) {
      loc[p] = Location(x.alphabet().size(), 0);
      type[p] = static_cast<int>(t);
    }
  for (const Event& e : x.events()) {
    auto& c = loc[e.process][e.action];
    if (c < bound) ++c;
  }
  std::map<std::pair<int, Location>, std::uint32_t> out;
  for (const auto& [p, l] : loc) ++out[{type[p], l}];
  return out;
}

inline std::map<std::pair<int, Location>, std::uint32_t> config_counts(
    const Configuration& c) {
  std::map<std::pair<int, Location>, std::uint32_t> out;
  for (const auto& [l, n] : c.entries())
    for (int t = 0; t < 3; ++t)
      if (n[t]) out[{t, l}] = n[t];
  return out;
}

/// Multiset of letters per process, keyed by process id.
inline std::map<ProcessId, std::multiset<LetterId>> letter_multisets(const Execution& x) {
  std::map<ProcessId, std::multiset<LetterId>> out;
  for (ProcType t : kAllTypes)
    for (ProcessId p : x.universe().of(t)) out[p];
  for (const Event& e : x.events()) out[e.process].insert(e.action);
  return out;
}

// ---------------------------------------------------------------------------
// Cutoff arithmetic

struct OracleBound {
  std::uint64_t locations, Max, hatN;
};

inline OracleBound oracle_cutoff(std::size_t letters, std::size_t env_letters,
                                 unsigned bound, std::uint64_t K,
                                 std::uint64_t ke, std::uint64_t kse) {
  OracleBound b{1, (ke + kse) * env_letters * bound, 0};
  for (std::size_t i = 0; i < letters; ++i) b.locations *= bound + 1;
  std::uint64_t p = 1;
  for (std::uint64_t i = 0; i <= b.Max; ++i) p *= b.locations;
  b.hatN = p * K;
  return b;
}

// ---------------------------------------------------------------------------
// Two-counter machines

/// Length of the shortest halting run, by breadth-first search over
/// (state, c1, c2) with counters bounded by the step limit.
inline std::optional<std::size_t> oracle_halting_length(const TwoCounterMachine& m,
                                                        std::size_t limit) {
  struct Cfg {
    std::string q;
    std::int64_t c1, c2;
    auto operator<=>(const Cfg&) const = default;
  };
  std::deque<std::pair<Cfg, std::size_t>> queue{{{m.initial, 0, 0}, 0}};
  std::set<Cfg> seen{{m.initial, 0, 0}};
  while (!queue.empty()) {
    auto [c, d] = queue.front();
    queue.pop_front();
    if (c.q == m.halting) return d;
    if (d == limit) continue;
    for (const auto& t : m.transitions) {
      if (t.from != c.q) continue;
      Cfg n = c;
      std::int64_t& v = t.counter == 1 ? n.c1 : n.c2;
      if (t.op == TcmOpKind::kInc) ++v;
      if (t.op == TcmOpKind::kDec) {
        if (v == 0) continue;
        --v;
      }
      if (t.op == TcmOpKind::kZero && v != 0) continue;
      n.q = t.to;
      if (seen.insert(n).second) queue.push_back({n, d + 1});
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Generators

/// Random FO[~] sentence whose quantifier rank (after expansion) is at most
/// `max_rank`.
class FormulaGen {
 public:
  FormulaGen(const Alphabet& a, std::mt19937_64& rng) : a_(a), rng_(rng) {}

  Formula sentence(std::size_t max_rank) {
    Formula f = quant({}, max_rank, 0);
    return f;
  }

 private:
  std::size_t pick(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }

  // Innermost variable first; binary atoms relate it to an outer one when
  // there is one.
  Formula atom(const std::vector<std::string>& vars) {
    const std::string& x = pick(4) ? vars.back() : vars[pick(vars.size())];
    const std::string& y =
        vars.size() > 1 ? vars[pick(vars.size() - 1)] : vars.back();
    switch (pick(6)) {
      case 0: return Formula::Type(kAllTypes[pick(3)], x);
      case 1:
      case 2: return Formula::Action(a_.name(static_cast<LetterId>(pick(a_.size()))), x);
      case 3:
      case 4: return Formula::Sim(x, y);
      default: return Formula::Equal(x, y);
    }
  }

  Formula body(const std::vector<std::string>& vars, std::size_t rank, int depth) {
    std::size_t r = depth > 3 ? 9 : pick(10);
    if (r < 3 || vars.empty()) {
      if (rank > 0 && (vars.empty() || r < 2)) return quant(vars, rank, depth + 1);
      if (vars.empty()) return pick(2) ? Formula::True() : Formula::False();
      return atom(vars);
    }
    if (r < 5) return Formula::Not(body(vars, rank, depth + 1));
    if (r < 7) return Formula::And(body(vars, rank, depth + 1), body(vars, rank, depth + 1));
    if (r < 8) return Formula::Or(body(vars, rank, depth + 1), body(vars, rank, depth + 1));
    if (rank > 0 && r < 9) return quant(vars, rank, depth + 1);
    return atom(vars);
  }

  Formula quant(std::vector<std::string> vars, std::size_t rank, int depth) {
    std::string v = "v" + std::to_string(vars.size());
    vars.push_back(v);
    std::size_t k = pick(4);
    if (k == 3 && rank >= 2) {
      return Formula::AtLeast(2, v, body(vars, rank - 2, depth));
    }
    Formula b = body(vars, rank - 1, depth);
    return k % 2 ? Formula::Forall(v, b) : Formula::Exists(v, b);
  }

  const Alphabet& a_;
  std::mt19937_64& rng_;
};

/// Random execution with the given process counts; every process emits at
/// most `max_letters` letters of its permitted side(s).
inline Execution random_execution(const Alphabet& a, std::mt19937_64& rng,
                                  std::size_t s, std::size_t e, std::size_t se,
                                  std::size_t max_letters) {
  ProcessUniverse u = ProcessUniverse::with_sizes(s, e, se);
  std::vector<Event> events;
  for (ProcType t : kAllTypes)
    for (ProcessId p : u.of(t)) {
      std::vector<LetterId> allowed;
      for (LetterId id = 0; id < a.size(); ++id) {
        bool sys = a.is_sys(id);
        if ((sys && t != ProcType::kEnv) || (!sys && t != ProcType::kSys))
          allowed.push_back(id);
      }
      if (allowed.empty()) continue;
      std::size_t n = rng() % (max_letters + 1);
      for (std::size_t i = 0; i < n; ++i)
        events.push_back({allowed[rng() % allowed.size()], p});
    }
  std::shuffle(events.begin(), events.end(), rng);
  return Execution(a, u, events);
}

/// Random valid play: each step picks a uniformly random legal move; the
/// play may stop early with probability 1/8 per step, or at the first
/// position without legal moves.
inline Play random_play(const Game& g, const Configuration& c0, std::mt19937_64& rng,
                        const MoveCaps& caps, std::size_t max_steps = 12) {
  Play p;
  p.initial = c0;
  Configuration cur = c0;
  Side side = Side::kSystem;
  if (g.accepts(c0) && rng() % 2 == 0) {
    p.steps.emplace_back(Transition::pass(Side::kSystem), cur);
    side = Side::kEnvironment;
  }
  for (std::size_t i = 0; i < max_steps; ++i) {
    if (i > 0 && rng() % 8 == 0) break;
    auto moves = legal_moves(g, cur, side, caps);
    if (moves.empty()) break;
    const LegalMove& m = moves[rng() % moves.size()];
    cur = m.result;
    p.steps.emplace_back(m.transition, cur);
    side = side == Side::kSystem ? Side::kEnvironment : Side::kSystem;
  }
  return p;
}

}  // namespace pvgtest
