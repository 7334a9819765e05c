#include "pvg/game.hpp"

#include <algorithm>
#include <mutex>
#include <tuple>
#include <unordered_map>

#include "pvg/errors.hpp"

namespace pvg {

bool in_family(LocationFamily f, const Location& l, const Alphabet& alphabet) {
  switch (f) {
    case LocationFamily::kNone:
      return false;
    case LocationFamily::kEnvExceedsSys: {
      unsigned sys = 0, env = 0;
      for (std::size_t a = 0; a < l.size(); ++a)
        (alphabet.is_sys(static_cast<LetterId>(a)) ? sys : env) += l[a];
      return env > sys;
    }
  }
  return false;
}

std::string_view family_name(LocationFamily f) {
  return f == LocationFamily::kEnvExceedsSys ? "env_exceeds_sys" : "none";
}

const LocalCondition& AcceptanceRow::condition_at(const Location& l) const {
  auto it = std::lower_bound(
      locs.begin(), locs.end(), l,
      [](const auto& e, const Location& key) { return e.first < key; });
  if (it != locs.end() && it->first == l) return it->second;
  return fallback;
}

void AcceptanceRow::set(const Location& l, const LocalCondition& cond) {
  auto it = std::lower_bound(
      locs.begin(), locs.end(), l,
      [](const auto& e, const Location& key) { return e.first < key; });
  if (it != locs.end() && it->first == l) it->second = cond;
  else locs.insert(it, {l, cond});
}

bool AcceptanceRow::holds(const Configuration& c,
                          const Alphabet& alphabet) const {
  const Triple zero{0, 0, 0};
  // Occupied locations violating the base conditions.
  std::vector<const Location*> bad;
  for (const auto& [l, t] : c.entries())
    if (!condition_at(l).holds(t)) bad.push_back(&l);
  for (const auto& [l, cond] : locs)
    if (c.at(l) == zero && !cond.holds(zero)) return false;
  if (!fallback.holds(zero)) {
    // Every unlisted location must be occupied.
    const std::uint64_t limit = 1u << 20;
    if (location_count(alphabet, c.bound()) > limit) return false;
    for (const Location& l : all_locations(alphabet, c.bound(), limit))
      if (c.at(l) == zero && !condition_at(l).holds(zero)) return false;
  }
  if (family == LocationFamily::kNone) return bad.empty();
  if (bad.size() > 1) return false;
  for (const auto& [l, t] : c.entries()) {
    if (!in_family(family, l, alphabet) || !family_cond.holds(t)) continue;
    if (bad.empty() || *bad.front() == l) return true;
  }
  return false;
}

std::uint32_t AcceptanceRow::max_constant() const {
  std::uint32_t k = std::max(fallback.max_constant(),
                             family == LocationFamily::kNone
                                 ? 0u
                                 : family_cond.max_constant());
  for (const auto& [l, cond] : locs) k = std::max(k, cond.max_constant());
  return k;
}

std::vector<AcceptanceRow> AcceptanceRow::expand(const Alphabet& alphabet,
                                                 unsigned bound) const {
  if (family == LocationFamily::kNone) return {*this};
  std::vector<AcceptanceRow> out;
  AcceptanceRow base = *this;
  base.family = LocationFamily::kNone;
  base.family_cond = LocalCondition::none();
  for (const Location& l : all_locations(alphabet, bound)) {
    if (!in_family(family, l, alphabet)) continue;
    AcceptanceRow r = base;
    r.set(l, family_cond);
    out.push_back(std::move(r));
  }
  return out;
}

struct Game::Cache {
  std::mutex mutex;
  std::unordered_map<Configuration, bool, ConfigurationHash> verdicts;
};

Game Game::with_rows(Alphabet alphabet, unsigned bound,
                     std::vector<AcceptanceRow> rows) {
  if (bound < 1 || bound > kMaxBound)
    throw InvalidArgument("bound must lie in 1.." + std::to_string(kMaxBound));
  for (auto& row : rows) {
    std::sort(row.locs.begin(), row.locs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < row.locs.size(); ++i) {
      const Location& l = row.locs[i].first;
      if (l.size() != alphabet.size())
        throw InvalidArgument("acceptance row location has wrong arity");
      for (auto v : l)
        if (v > bound) throw InvalidArgument("acceptance row location exceeds B");
      if (i > 0 && row.locs[i - 1].first == l)
        throw InvalidArgument("acceptance row lists a location twice");
      if (in_family(row.family, l, alphabet))
        throw InvalidArgument("acceptance row lists a family location");
    }
    if (row.family != LocationFamily::kNone &&
        row.family_cond.holds(Triple{0, 0, 0}))
      throw InvalidArgument("family condition must fail on empty locations");
  }
  Game g;
  g.alphabet_ = std::move(alphabet);
  g.bound_ = bound;
  g.rows_ = std::move(rows);
  return g;
}

Game Game::with_formula(Alphabet alphabet, const Formula& phi,
                        std::optional<unsigned> bound) {
  unsigned b = bound.value_or(threshold(phi));
  if (b < 1 || b > kMaxBound)
    throw InvalidArgument("bound must lie in 1.." + std::to_string(kMaxBound));
  Game g;
  g.alphabet_ = std::move(alphabet);
  g.bound_ = b;
  g.formula_ = phi;
  g.eval_ = std::make_shared<ConfigEvaluator>(phi, g.alphabet_,
                                              /*trust_bound=*/bound.has_value());
  g.cache_ = std::make_shared<Cache>();
  return g;
}

void Game::check_shape(const Configuration& c) const {
  if (c.bound() != bound_)
    throw InvalidArgument("configuration bound " + std::to_string(c.bound()) +
                          " differs from game bound " + std::to_string(bound_));
  for (const auto& [l, t] : c.entries())
    if (l.size() != alphabet_.size())
      throw InvalidArgument("configuration location has wrong arity");
}

bool Game::accepts(const Configuration& c) const {
  check_shape(c);
  if (!formula_) {
    return std::any_of(rows_.begin(), rows_.end(), [&](const AcceptanceRow& r) {
      return r.holds(c, alphabet_);
    });
  }
  {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    auto it = cache_->verdicts.find(c);
    if (it != cache_->verdicts.end()) return it->second;
  }
  bool v = (*eval_)(c);
  std::lock_guard<std::mutex> lock(cache_->mutex);
  if (cache_->verdicts.size() > (1u << 21)) cache_->verdicts.clear();
  cache_->verdicts.emplace(c, v);
  return v;
}

std::optional<std::uint32_t> Game::max_constant() const {
  if (formula_) return std::nullopt;
  std::uint32_t k = 0;
  for (const auto& r : rows_) k = std::max(k, r.max_constant());
  return k;
}

std::string_view side_name(Side s) {
  return s == Side::kSystem ? "system" : "environment";
}

Transition::Transition(Side side, std::vector<Move> moves,
                       const Alphabet& alphabet, unsigned bound)
    : side_(side) {
  std::sort(moves.begin(), moves.end(), [](const Move& a, const Move& b) {
    return std::tie(a.from, a.to) < std::tie(b.from, b.to);
  });
  for (Move& m : moves) {
    if (m.from == m.to || is_zero(m.n)) continue;
    if (side == Side::kSystem && m.n[idx(ProcType::kEnv)] != 0)
      throw InvalidArgument("system transition moves environment tokens");
    if (side == Side::kEnvironment && m.n[idx(ProcType::kSys)] != 0)
      throw InvalidArgument("environment transition moves system tokens");
    if (!reachable_by_side(m.from, m.to, alphabet, bound,
                           side == Side::kSystem))
      throw InvalidArgument("transition target " + to_string(m.to, alphabet) +
                            " is not an extension of " +
                            to_string(m.from, alphabet) + " by " +
                            std::string(side_name(side)) + " letters");
    if (!moves_.empty() && moves_.back().from == m.from &&
        moves_.back().to == m.to) {
      for (std::size_t i = 0; i < 3; ++i) moves_.back().n[i] += m.n[i];
    } else {
      moves_.push_back(std::move(m));
    }
  }
}

bool applicable(const Transition& t, const Configuration& c) {
  std::vector<std::pair<Location, Triple>> out;
  for (const Move& m : t.moves()) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const auto& e) { return e.first == m.from; });
    if (it == out.end()) {
      out.emplace_back(m.from, m.n);
    } else {
      for (std::size_t i = 0; i < 3; ++i) it->second[i] += m.n[i];
    }
  }
  for (const auto& [l, need] : out) {
    Triple have = c.at(l);
    for (std::size_t i = 0; i < 3; ++i)
      if (need[i] > have[i]) return false;
  }
  return true;
}

Configuration apply(const Transition& t, const Configuration& c) {
  if (!applicable(t, c)) throw InvalidArgument("transition is not applicable");
  Configuration r = c;
  for (const Move& m : t.moves())
    for (ProcType ty : kAllTypes) {
      std::int64_t n = m.n[idx(ty)];
      if (n == 0) continue;
      r.add(m.from, ty, -n);
      r.add(m.to, ty, n);
    }
  return r;
}

void for_each_move(const Game& g, const Configuration& c, Side side,
                   const MoveCaps& caps,
                   const std::function<bool(const Transition&,
                                            const Configuration&)>& visit) {
  g.check_shape(c);
  struct Group {
    const Location* from;
    ProcType type;
    std::uint32_t count;
    std::vector<Location> targets;  // excluding `from`
  };
  std::vector<Group> groups;
  bool sys_side = side == Side::kSystem;
  for (const auto& [l, t] : c.entries())
    for (ProcType ty : kAllTypes) {
      if (!moves_type(side, ty) || t[idx(ty)] == 0) continue;
      auto succ = successors(l, g.alphabet(), g.bound(), sys_side,
                             caps.max_letters_per_token);
      succ.erase(std::remove(succ.begin(), succ.end(), l), succ.end());
      if (succ.empty()) continue;
      groups.push_back({&l, ty, t[idx(ty)], std::move(succ)});
    }
  if (groups.empty()) return;

  std::vector<std::pair<std::size_t, std::size_t>> chosen;  // (group, target)
  std::vector<std::uint32_t> amount;
  bool stop = false;

  std::function<void(std::size_t, std::size_t, std::uint32_t, std::uint32_t)>
      go = [&](std::size_t gi, std::size_t ti, std::uint32_t left_in_group,
               std::uint32_t budget) {
        if (stop) return;
        if (gi == groups.size()) {
          if (chosen.empty()) return;
          std::vector<Move> moves;
          Configuration r = c;
          for (std::size_t k = 0; k < chosen.size(); ++k) {
            const Group& grp = groups[chosen[k].first];
            Move m{*grp.from, grp.targets[chosen[k].second], {0, 0, 0}};
            m.n[idx(grp.type)] = amount[k];
            r.add(m.from, grp.type, -static_cast<std::int64_t>(amount[k]));
            r.add(m.to, grp.type, amount[k]);
            moves.push_back(std::move(m));
          }
          Transition t(side, std::move(moves), g.alphabet(), g.bound());
          if (!visit(t, r)) stop = true;
          return;
        }
        const Group& grp = groups[gi];
        if (ti == grp.targets.size()) {
          std::size_t next = gi + 1;
          go(next, 0, next < groups.size() ? groups[next].count : 0, budget);
          return;
        }
        std::uint32_t most = std::min(left_in_group, budget);
        for (std::uint32_t n = 0; n <= most && !stop; ++n) {
          if (n > 0) {
            chosen.emplace_back(gi, ti);
            amount.push_back(n);
          }
          go(gi, ti + 1, left_in_group - n, budget - n);
          if (n > 0) {
            chosen.pop_back();
            amount.pop_back();
          }
        }
      };
  go(0, 0, groups[0].count, caps.max_tokens_per_move);
}

std::vector<LegalMove> legal_moves(const Game& g, const Configuration& c,
                                   Side side, const MoveCaps& caps,
                                   std::uint64_t limit) {
  std::vector<LegalMove> out;
  std::uint64_t seen = 0;
  bool want = side == Side::kSystem;
  for_each_move(g, c, side, caps,
                [&](const Transition& t, const Configuration& r) {
                  if (++seen > limit)
                    throw BudgetExceeded(
                        "more than " + std::to_string(limit) +
                        " candidate moves at one configuration; consider move caps");
                  if (g.accepts(r) == want) out.push_back({t, r});
                  return true;
                });
  return out;
}

std::vector<Configuration> Play::configurations() const {
  std::vector<Configuration> out{initial};
  for (const auto& [t, c] : steps) out.push_back(c);
  return out;
}

PlayCheck validate_play(const Game& g, const Play& p) {
  try {
    g.check_shape(p.initial);
    Configuration cur = p.initial;
    for (std::size_t i = 0; i < p.steps.size(); ++i) {
      const auto& [t, next] = p.steps[i];
      std::size_t n = i + 1;
      Side expect = n % 2 == 1 ? Side::kSystem : Side::kEnvironment;
      std::string at = "step " + std::to_string(n) + ": ";
      if (t.side() != expect)
        return {false, at + "expected a " + std::string(side_name(expect)) +
                           " transition"};
      for (const Move& m : t.moves())
        if (!reachable_by_side(m.from, m.to, g.alphabet(), g.bound(),
                               expect == Side::kSystem))
          return {false, at + "illegal location change"};
      if (!applicable(t, cur)) return {false, at + "transition not applicable"};
      Configuration r = apply(t, cur);
      if (!(r == next)) return {false, at + "configuration is not tau(C)"};
      bool acc = g.accepts(next);
      if (expect == Side::kSystem && !acc)
        return {false, at + "system move does not satisfy the acceptance condition"};
      if (expect == Side::kEnvironment && acc)
        return {false, at + "environment move satisfies the acceptance condition"};
      cur = next;
    }
  } catch (const Error& e) {
    return {false, e.what()};
  }
  return {};
}

std::string to_string(const Transition& t, const Alphabet& alphabet) {
  std::string out = std::string(side_name(t.side())) + "[";
  bool first = true;
  for (const Move& m : t.moves()) {
    if (!first) out += ", ";
    first = false;
    out += "<" + to_string(m.from, alphabet) + "> -> <" +
           to_string(m.to, alphabet) + "> (" + std::to_string(m.n[0]) + "," +
           std::to_string(m.n[1]) + "," + std::to_string(m.n[2]) + ")";
  }
  return out + "]";
}

}  // namespace pvg
