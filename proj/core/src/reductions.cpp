#include "pvg/reductions.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

#include "pvg/errors.hpp"

namespace pvg {

// ---------------------------------------------------------------------------
// Formulas and games

Game formula_to_game(const Formula& phi, const Alphabet& alphabet,
                     std::optional<unsigned> bound) {
  return Game::with_formula(alphabet, phi, bound);
}

Game formula_to_game_explicit(const Formula& phi, const Alphabet& alphabet,
                              std::optional<unsigned> bound,
                              std::optional<unsigned> m_cap,
                              const NormalizeOptions& options) {
  unsigned th = threshold(phi);
  unsigned b = bound.value_or(th);
  NormalForm nf = normalize(phi, alphabet, b, m_cap.value_or(th), options);
  std::vector<AcceptanceRow> rows;
  for (const Clause& cl : nf.clauses) {
    AcceptanceRow r;
    r.fallback = LocalCondition::any();
    for (const CountingConstraint& k : cl) {
      LocalCondition cond = r.condition_at(k.loc);
      cond.c[idx(k.type)] = k.count;
      r.set(k.loc, cond);
    }
    rows.push_back(std::move(r));
  }
  return Game::with_rows(alphabet, b, std::move(rows));
}

NormalForm game_normal_form(const Game& g) {
  if (!g.is_explicit())
    throw InvalidArgument(
        "game acceptance is given by a formula and cannot be inverted");
  const Alphabet& alphabet = g.alphabet();
  std::vector<Location> locs = all_locations(alphabet, g.bound());
  NormalForm nf;
  nf.bound = g.bound();
  for (const AcceptanceRow& row : g.rows())
    for (const AcceptanceRow& r : row.expand(alphabet, g.bound())) {
      Clause cl;
      for (const Location& l : locs) {
        const LocalCondition& cond = r.condition_at(l);
        for (ProcType t : kAllTypes)
          if (!cond.c[idx(t)].trivial())
            cl.push_back({cond.c[idx(t)], t, l});
      }
      nf.clauses.push_back(std::move(cl));
    }
  return canonicalize(std::move(nf), alphabet);
}

Formula game_to_formula(const Game& g) {
  return to_formula(game_normal_form(g), g.alphabet());
}

// ---------------------------------------------------------------------------
// Plays and executions

bool location_name_less(const Location& a, const Location& b,
                        const Alphabet& alphabet) {
  std::vector<LetterId> order(alphabet.size());
  std::iota(order.begin(), order.end(), LetterId{0});
  std::sort(order.begin(), order.end(), [&](LetterId x, LetterId y) {
    return alphabet.name(x) < alphabet.name(y);
  });
  for (LetterId id : order)
    if (a[id] != b[id]) return a[id] < b[id];
  return false;
}

Play execution_to_play(const Execution& w, const Game& g) {
  const Alphabet& alphabet = g.alphabet();
  if (!(w.alphabet() == alphabet))
    throw InvalidArgument("execution alphabet differs from the game alphabet");
  const ProcessUniverse& u = w.universe();
  auto sizes = u.sizes();
  Play play;
  play.initial = g.initial(static_cast<std::uint32_t>(sizes[0]),
                           static_cast<std::uint32_t>(sizes[1]),
                           static_cast<std::uint32_t>(sizes[2]));
  if (w.length() == 0) return play;

  // Maximal runs of one side; a leading environment run follows an empty
  // system block.
  std::vector<std::pair<std::size_t, std::size_t>> blocks;  // [begin, end)
  const auto& ev = w.events();
  if (!alphabet.is_sys(ev.front().action)) blocks.emplace_back(0, 0);
  for (std::size_t i = 0; i < ev.size();) {
    std::size_t j = i;
    bool sys = alphabet.is_sys(ev[i].action);
    while (j < ev.size() && alphabet.is_sys(ev[j].action) == sys) ++j;
    blocks.emplace_back(i, j);
    i = j;
  }

  std::map<ProcessId, Location> where;
  Configuration cur = play.initial;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    Side side = b % 2 == 0 ? Side::kSystem : Side::kEnvironment;
    std::map<ProcessId, Location> before;
    for (std::size_t i = blocks[b].first; i < blocks[b].second; ++i) {
      ProcessId p = ev[i].process;
      auto it = where.find(p);
      if (it == where.end())
        it = where.emplace(p, zero_location(alphabet)).first;
      before.emplace(p, it->second);
      it->second = loc_add(it->second, ev[i].action, g.bound());
    }
    std::vector<Move> moves;
    for (const auto& [p, from] : before) {
      const Location& to = where.at(p);
      if (from == to) continue;
      Move m{from, to, {0, 0, 0}};
      m.n[idx(*u.type_of(p))] = 1;
      moves.push_back(std::move(m));
    }
    Transition t(side, std::move(moves), alphabet, g.bound());
    Configuration next = apply(t, cur);
    bool acc = g.accepts(next);
    if (acc != (side == Side::kSystem))
      throw InvalidArgument("execution is not normalized for the game: block " +
                            std::to_string(b + 1) + " (" +
                            std::string(side_name(side)) + ") " +
                            (acc ? "satisfies" : "falsifies") +
                            " the acceptance condition");
    play.steps.emplace_back(std::move(t), next);
    cur = std::move(next);
  }
  return play;
}

Execution play_to_execution(const Play& p, const Game& g) {
  if (PlayCheck chk = validate_play(g, p); !chk)
    throw InvalidArgument("invalid play: " + chk.reason);
  const Alphabet& alphabet = g.alphabet();
  const Location origin = g.origin();
  for (const auto& [l, t] : p.initial.entries())
    if (l != origin)
      throw InvalidArgument("play must start with every token at the origin");
  Triple k = p.initial.totals();
  ProcessUniverse u = ProcessUniverse::with_sizes(k[0], k[1], k[2]);

  std::map<Location, std::array<std::set<ProcessId>, 3>> mem;
  for (ProcType t : kAllTypes)
    for (ProcessId id : u.of(t)) mem[origin][idx(t)].insert(id);

  std::vector<Event> events;
  for (const auto& [tr, next] : p.steps) {
    std::vector<const Move*> order;
    for (const Move& m : tr.moves()) order.push_back(&m);
    std::sort(order.begin(), order.end(), [&](const Move* a, const Move* b) {
      if (a->from != b->from) return location_name_less(a->from, b->from, alphabet);
      return location_name_less(a->to, b->to, alphabet);
    });
    std::vector<std::tuple<const Move*, ProcType, ProcessId>> moved;
    for (const Move* m : order)
      for (ProcType t : kAllTypes) {
        auto& pool = mem[m->from][idx(t)];
        for (std::uint32_t i = 0; i < m->n[idx(t)]; ++i) {
          ProcessId id = *pool.begin();
          pool.erase(pool.begin());
          moved.emplace_back(m, t, id);
        }
      }
    for (const auto& [m, t, id] : moved) {
      mem[m->to][idx(t)].insert(id);
      for (std::size_t a = 0; a < alphabet.size(); ++a)
        for (int c = m->from[a]; c < m->to[a]; ++c)
          events.push_back({static_cast<LetterId>(a), id});
    }
  }
  return Execution(alphabet, std::move(u), std::move(events));
}

// ---------------------------------------------------------------------------
// Two-counter machines

namespace {

const std::set<std::string> kReservedLetters = {"a1", "a2", "b"};

bool is_ident(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_'))
    return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  });
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

}  // namespace

void TwoCounterMachine::validate() const {
  std::set<std::string> seen;
  if (states.empty()) throw InvalidArgument("machine has no states");
  for (const auto& q : states) {
    if (!is_ident(q)) throw InvalidArgument("bad state name '" + q + "'");
    if (kReservedLetters.count(q))
      throw InvalidArgument("state name '" + q + "' is reserved");
    if (!seen.insert(q).second)
      throw InvalidArgument("duplicate name '" + q + "'");
  }
  std::set<std::string> qs(states.begin(), states.end());
  if (!qs.count(initial)) throw InvalidArgument("unknown initial state '" + initial + "'");
  if (!qs.count(halting)) throw InvalidArgument("unknown halting state '" + halting + "'");
  for (const auto& t : transitions) {
    if (!is_ident(t.name)) throw InvalidArgument("bad transition name '" + t.name + "'");
    if (kReservedLetters.count(t.name))
      throw InvalidArgument("transition name '" + t.name + "' is reserved");
    if (!seen.insert(t.name).second)
      throw InvalidArgument("duplicate name '" + t.name + "'");
    if (!qs.count(t.from) || !qs.count(t.to))
      throw InvalidArgument("transition '" + t.name + "' uses an unknown state");
    if (t.counter != 1 && t.counter != 2)
      throw InvalidArgument("transition '" + t.name + "' uses counter " +
                            std::to_string(t.counter));
  }
}

std::string op_name(const TcmTransition& t) {
  std::string c = "c" + std::to_string(t.counter);
  switch (t.op) {
    case TcmOpKind::kInc: return c + "++";
    case TcmOpKind::kDec: return c + "--";
    case TcmOpKind::kZero: return c + "==0";
  }
  return c;
}

TwoCounterMachine parse_2cm(std::string_view text) {
  TwoCounterMachine m;
  // Strip comments.
  std::string clean;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      clean += '\n';
      continue;
    }
    clean += text[i];
  }
  bool have_states = false, have_init = false, have_halt = false;
  std::size_t pos = 0;
  while (pos < clean.size()) {
    std::size_t semi = clean.find(';', pos);
    if (semi == std::string::npos) {
      if (!trim(std::string_view(clean).substr(pos)).empty())
        throw ParseError("statement not terminated by ';'", pos);
      break;
    }
    std::string stmt = trim(std::string_view(clean).substr(pos, semi - pos));
    std::size_t at = pos;
    pos = semi + 1;
    if (stmt.empty()) continue;
    std::vector<std::string> w = words(stmt);
    if (w[0] == "states") {
      if (have_states) throw ParseError("duplicate 'states'", at);
      have_states = true;
      m.states.assign(w.begin() + 1, w.end());
    } else if (w[0] == "init" || w[0] == "halt") {
      if (w.size() != 2) throw ParseError("'" + w[0] + "' takes one state", at);
      bool& flag = w[0] == "init" ? have_init : have_halt;
      if (flag) throw ParseError("duplicate '" + w[0] + "'", at);
      flag = true;
      (w[0] == "init" ? m.initial : m.halting) = w[1];
    } else {
      std::size_t colon = stmt.find(':');
      if (colon == std::string::npos)
        throw ParseError("expected 'name: from --op--> to'", at);
      TcmTransition t;
      t.name = trim(std::string_view(stmt).substr(0, colon));
      std::string rest = trim(std::string_view(stmt).substr(colon + 1));
      std::size_t open = rest.find("--");
      std::size_t close = rest.rfind("-->");
      if (open == std::string::npos || close == std::string::npos || close < open + 2)
        throw ParseError("expected 'from --op--> to'", at);
      t.from = trim(std::string_view(rest).substr(0, open));
      std::string op = trim(std::string_view(rest).substr(open + 2, close - open - 2));
      t.to = trim(std::string_view(rest).substr(close + 3));
      if (op.size() < 4 || op[0] != 'c' || (op[1] != '1' && op[1] != '2'))
        throw ParseError("bad operation '" + op + "'", at);
      t.counter = static_cast<unsigned>(op[1] - '0');
      std::string kind = op.substr(2);
      if (kind == "++") t.op = TcmOpKind::kInc;
      else if (kind == "--") t.op = TcmOpKind::kDec;
      else if (kind == "==0") t.op = TcmOpKind::kZero;
      else throw ParseError("bad operation '" + op + "'", at);
      m.transitions.push_back(std::move(t));
    }
  }
  if (!have_states || !have_init || !have_halt)
    throw ParseError("machine needs 'states', 'init' and 'halt'");
  try {
    m.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what());
  }
  return m;
}

std::string to_string(const TwoCounterMachine& m) {
  std::string out = "states";
  for (const auto& q : m.states) out += " " + q;
  out += ";\ninit " + m.initial + ";\nhalt " + m.halting + ";\n";
  for (const auto& t : m.transitions)
    out += t.name + ": " + t.from + " --" + op_name(t) + "--> " + t.to + ";\n";
  return out;
}

std::optional<TcmConfiguration> tcm_apply(const TwoCounterMachine& m,
                                          const TcmConfiguration& c,
                                          std::size_t transition) {
  const TcmTransition& t = m.transitions.at(transition);
  if (t.from != c.state) return std::nullopt;
  TcmConfiguration r = c;
  r.state = t.to;
  std::uint64_t& v = t.counter == 1 ? r.c1 : r.c2;
  switch (t.op) {
    case TcmOpKind::kInc: ++v; break;
    case TcmOpKind::kDec:
      if (v == 0) return std::nullopt;
      --v;
      break;
    case TcmOpKind::kZero:
      if (v != 0) return std::nullopt;
      break;
  }
  return r;
}

std::optional<TcmRun> tcm_run_bounded(const TwoCounterMachine& m,
                                      std::size_t step_bound) {
  m.validate();
  TcmConfiguration start{m.initial, 0, 0};
  struct Node {
    TcmConfiguration c;
    std::size_t parent;
    std::size_t via;
    std::size_t depth;
  };
  std::vector<Node> nodes{{start, 0, 0, 0}};
  std::set<TcmConfiguration> seen{start};
  for (std::size_t head = 0; head < nodes.size(); ++head) {
    if (nodes[head].c.state == m.halting) {
      TcmRun run;
      for (std::size_t i = head; i != 0; i = nodes[i].parent)
        run.push_back({nodes[i].via, nodes[i].c});
      std::reverse(run.begin(), run.end());
      return run;
    }
    if (nodes[head].depth == step_bound) continue;
    for (std::size_t t = 0; t < m.transitions.size(); ++t) {
      auto next = tcm_apply(m, nodes[head].c, t);
      if (!next || !seen.insert(*next).second) continue;
      nodes.push_back({*next, head, t, nodes[head].depth + 1});
    }
  }
  return std::nullopt;
}

namespace {

Alphabet tcm_alphabet(const TwoCounterMachine& m) {
  std::vector<std::string> sys = m.states;
  for (const auto& t : m.transitions) sys.push_back(t.name);
  sys.push_back("a1");
  sys.push_back("a2");
  return Alphabet(std::move(sys), {"b"});
}

/// Location builder from (letter, count) pairs.
class LocBuilder {
 public:
  LocBuilder(const Alphabet& alphabet, unsigned bound)
      : alphabet_(alphabet), bound_(bound) {}
  Location operator()(std::initializer_list<std::pair<std::string, unsigned>> ws) const {
    Location l = zero_location(alphabet_);
    for (const auto& [name, n] : ws) {
      if (n > bound_) throw InvalidArgument("letter count exceeds the bound");
      l[alphabet_.index(name)] = static_cast<std::uint8_t>(n);
    }
    return l;
  }

 private:
  const Alphabet& alphabet_;
  unsigned bound_;
};

LocalCondition se_eq(std::uint32_t n) {
  return LocalCondition::se_only({Cmp::kEq, n});
}
LocalCondition se_ge(std::uint32_t n) {
  return LocalCondition::se_only({Cmp::kGe, n});
}

std::string counter_letter(const TcmTransition& t) {
  return "a" + std::to_string(t.counter);
}

}  // namespace

Game encode_2cm(const TwoCounterMachine& m) {
  m.validate();
  constexpr unsigned B = 4;
  Alphabet alphabet = tcm_alphabet(m);
  LocBuilder L(alphabet, B);

  std::vector<Location> check{zero_location(alphabet)};
  for (const char* a : {"a1", "a2"}) {
    check.push_back(L({{a, 2}, {"b", 2}}));
    check.push_back(L({{a, 4}, {"b", 4}}));
  }
  for (const auto& q : m.states) check.push_back(L({{q, 2}, {"b", 2}}));
  for (const auto& t : m.transitions) check.push_back(L({{t.name, 2}, {"b", 2}}));

  using Entry = std::pair<Location, LocalCondition>;
  auto row = [&](std::vector<Entry> listed, bool with_check) {
    AcceptanceRow r;
    if (with_check)
      for (const Location& l : check) r.set(l, se_ge(0));
    for (auto& [l, c] : listed) r.set(l, c);
    return r;
  };

  std::vector<AcceptanceRow> rows;

  // (d): Environment ran ahead of System on some process.
  {
    AcceptanceRow r;
    r.fallback = se_ge(0);
    r.family = LocationFamily::kEnvExceedsSys;
    r.family_cond = se_ge(1);
    rows.push_back(std::move(r));
  }

  for (const auto& t : m.transitions) {
    const std::string& q = t.from;
    const std::string& q2 = t.to;
    const std::string ai = counter_letter(t);
    const std::string& tn = t.name;

    // (b)
    if (q == m.initial && t.op != TcmOpKind::kDec) {
      std::vector<Entry> listed{{L({{q, 1}}), se_eq(1)},
                                {L({{tn, 1}}), se_eq(1)},
                                {zero_location(alphabet), se_ge(0)}};
      if (t.op == TcmOpKind::kInc) listed.push_back({L({{ai, 1}}), se_eq(1)});
      rows.push_back(row(std::move(listed), false));
    }

    // (a)
    for (const auto& qh : m.states) {
      std::vector<Entry> listed{{L({{q, 1}}), se_eq(1)},
                                {L({{tn, 1}}), se_eq(1)},
                                {L({{qh, 2}, {"b", 2}}), se_ge(1)}};
      switch (t.op) {
        case TcmOpKind::kInc:
          listed.push_back({L({{ai, 1}}), se_eq(1)});
          break;
        case TcmOpKind::kDec:
          listed.push_back({L({{ai, 3}, {"b", 2}}), se_eq(1)});
          break;
        case TcmOpKind::kZero:
          listed.push_back({L({{ai, 2}, {"b", 2}}), se_eq(0)});
          break;
      }
      rows.push_back(row(std::move(listed), true));
    }

    // (c)
    {
      std::vector<Entry> listed{{L({{q, 2}, {"b", 1}}), se_eq(1)},
                                {L({{tn, 2}, {"b", 1}}), se_eq(1)},
                                {L({{q2, 1}}), se_eq(1)}};
      if (t.op == TcmOpKind::kInc)
        listed.push_back({L({{ai, 2}, {"b", 1}}), se_eq(1)});
      if (t.op == TcmOpKind::kDec)
        listed.push_back({L({{ai, 4}, {"b", 3}}), se_eq(1)});
      rows.push_back(row(std::move(listed), true));
    }

    // (e)
    {
      Location counter_before, counter_after;
      bool has_counter = t.op != TcmOpKind::kZero;
      if (t.op == TcmOpKind::kInc) {
        counter_before = L({{ai, 1}});
        counter_after = L({{ai, 1}, {"b", 1}});
      } else if (t.op == TcmOpKind::kDec) {
        counter_before = L({{ai, 3}, {"b", 2}});
        counter_after = L({{ai, 3}, {"b", 3}});
      }
      Location qa = L({{q, 1}}), qb = L({{q, 1}, {"b", 1}});
      Location ta = L({{tn, 1}}), tb = L({{tn, 1}, {"b", 1}});
      // Every partial acknowledgement: some but not all of the three tokens.
      for (int mask = 1; mask < (has_counter ? 7 : 3); ++mask) {
        std::vector<Entry> listed{{(mask & 1) ? qb : qa, se_eq(1)},
                                  {(mask & 2) ? tb : ta, se_eq(1)}};
        if (has_counter)
          listed.push_back({(mask & 4) ? counter_after : counter_before, se_eq(1)});
        rows.push_back(row(std::move(listed), true));
      }
    }

    // (f)
    {
      Location counter_loc;
      bool has_counter = t.op != TcmOpKind::kZero;
      if (t.op == TcmOpKind::kInc) counter_loc = L({{ai, 2}, {"b", 1}});
      if (t.op == TcmOpKind::kDec) counter_loc = L({{ai, 4}, {"b", 3}});
      Location q2b = L({{q, 2}, {"b", 1}});
      Location t2b = L({{tn, 2}, {"b", 1}});
      std::vector<Location> parts{q2b, t2b};
      if (has_counter) parts.push_back(counter_loc);
      for (std::size_t one = 0; one < parts.size(); ++one) {
        std::vector<Entry> listed{{L({{q2, 1}}), se_eq(1)}};
        for (std::size_t i = 0; i < parts.size(); ++i)
          listed.push_back({parts[i], i == one ? se_eq(1) : se_ge(0)});
        rows.push_back(row(std::move(listed), true));
      }
      std::vector<Entry> listed{{L({{q2, 1}, {"b", 1}}), se_eq(1)},
                                {q2b, se_ge(0)},
                                {t2b, se_ge(0)}};
      if (has_counter) listed.push_back({counter_loc, se_ge(0)});
      else listed.push_back({L({{ai, 4}, {"b", 3}}), se_ge(0)});
      rows.push_back(row(std::move(listed), true));
    }
  }

  // Acc_F
  for (unsigned bs = 0; bs <= 2; ++bs) {
    Location l = bs == 0 ? L({{m.halting, 2}}) : L({{m.halting, 2}, {"b", bs}});
    rows.push_back(row({{l, se_eq(1)}}, true));
  }

  return Game::with_rows(std::move(alphabet), B, std::move(rows));
}

namespace {

bool only_se(const Configuration& c) {
  Triple k = c.totals();
  return k[idx(ProcType::kSys)] == 0 && k[idx(ProcType::kEnv)] == 0;
}

struct TcmLayout {
  TcmLayout(const TwoCounterMachine& machine, const Alphabet& alphabet)
      : m(machine), L(alphabet, 4) {
    origin = zero_location(alphabet);
    for (const char* a : {"a1", "a2"}) {
      check.insert(L({{a, 2}, {"b", 2}}));
      check.insert(L({{a, 4}, {"b", 4}}));
    }
    for (const auto& q : m.states) check.insert(L({{q, 2}, {"b", 2}}));
    for (const auto& t : m.transitions) check.insert(L({{t.name, 2}, {"b", 2}}));
    counter[0] = L({{"a1", 2}, {"b", 2}});
    counter[1] = L({{"a2", 2}, {"b", 2}});
    for (const auto& q : m.states) state_loc.emplace(L({{q, 1}}), q);
  }

  /// γ with C ∈ ℂ(γ), if any.
  std::optional<TcmConfiguration> decode(const Configuration& c) const {
    if (!only_se(c)) return std::nullopt;
    std::optional<std::string> q;
    for (const auto& [l, t] : c.entries()) {
      auto it = state_loc.find(l);
      if (it != state_loc.end()) {
        if (q || t[idx(ProcType::kBoth)] != 1) return std::nullopt;
        q = it->second;
        continue;
      }
      if (!check.count(l) && l != origin) return std::nullopt;
    }
    if (!q) return std::nullopt;
    return TcmConfiguration{*q, c.at(counter[0], ProcType::kBoth),
                            c.at(counter[1], ProcType::kBoth)};
  }

  const TwoCounterMachine& m;
  LocBuilder L;
  Location origin;
  std::set<Location> check;
  Location counter[2];
  std::map<Location, std::string> state_loc;
};

Move se_move(Location from, Location to, std::uint32_t n = 1) {
  return Move{std::move(from), std::move(to), {0, 0, n}};
}

}  // namespace

bool encodes(const Game& g, const TwoCounterMachine& m, const Configuration& c,
             const TcmConfiguration& gamma) {
  TcmLayout lay(m, g.alphabet());
  auto d = lay.decode(c);
  return d && *d == gamma;
}

StrategyFn tcm_strategy(const TwoCounterMachine& m, const TcmRun& run) {
  m.validate();
  if (run.empty())
    throw InvalidArgument("the run must take at least one transition");
  std::vector<TcmConfiguration> gammas{{m.initial, 0, 0}};
  for (const TcmStep& s : run) {
    if (s.transition >= m.transitions.size())
      throw InvalidArgument("run uses an unknown transition");
    auto next = tcm_apply(m, gammas.back(), s.transition);
    if (!next || !(*next == s.after))
      throw InvalidArgument("run is not a run of the machine");
    gammas.push_back(*next);
  }
  if (gammas.back().state != m.halting)
    throw InvalidArgument("run does not reach the halting state");
  std::map<TcmConfiguration, std::size_t> index;
  for (std::size_t j = 0; j < gammas.size(); ++j)
    if (!index.emplace(gammas[j], j).second)
      throw InvalidArgument("run visits an M-configuration twice");

  auto alphabet = std::make_shared<Alphabet>(tcm_alphabet(m));
  auto lay = std::make_shared<TcmLayout>(m, *alphabet);
  auto machine = std::make_shared<TwoCounterMachine>(m);
  auto steps = std::make_shared<TcmRun>(run);

  return [alphabet, lay, machine, steps, index](
             const Configuration& c) -> std::optional<Transition> {
    const auto& L = lay->L;
    const Location& origin = lay->origin;
    const std::uint32_t free_tokens = c.at(origin, ProcType::kBoth);
    auto sys = [&](std::vector<Move> moves) {
      return Transition(Side::kSystem, std::move(moves), *alphabet, 4);
    };
    // Opening move of a transition step from an encoded configuration.
    auto open = [&](const TcmTransition& t, bool initial) {
      std::vector<Move> moves{se_move(origin, L({{t.name, 1}}))};
      if (initial) moves.push_back(se_move(origin, L({{t.from, 1}})));
      const std::string ai = counter_letter(t);
      if (t.op == TcmOpKind::kInc) moves.push_back(se_move(origin, L({{ai, 1}})));
      if (t.op == TcmOpKind::kDec)
        moves.push_back(se_move(L({{ai, 2}, {"b", 2}}), L({{ai, 3}, {"b", 2}})));
      return sys(std::move(moves));
    };

    if (!only_se(c)) return std::nullopt;
    if (c.entries().size() == 1 && c.entries().front().first == origin) {
      const TcmTransition& t1 = machine->transitions[steps->front().transition];
      if (free_tokens < (t1.op == TcmOpKind::kInc ? 3u : 2u)) return std::nullopt;
      return open(t1, true);
    }

    if (auto gamma = lay->decode(c)) {
      auto it = index.find(*gamma);
      if (it == index.end() || it->second == 0) return std::nullopt;
      std::size_t j = it->second;
      if (j == steps->size())
        return sys({se_move(L({{gamma->state, 1}}), L({{gamma->state, 2}}))});
      const TcmTransition& t = machine->transitions[(*steps)[j].transition];
      return open(t, false);
    }

    // Second step: Environment acknowledged the opening move.
    if (free_tokens == 0) return std::nullopt;
    std::optional<std::string> q;
    const TcmTransition* t = nullptr;
    std::vector<Location> specials;
    for (const auto& [l, n] : c.entries()) {
      if (l == origin || lay->check.count(l)) continue;
      if (n[idx(ProcType::kBoth)] != 1) return std::nullopt;
      specials.push_back(l);
      for (const auto& s : machine->states)
        if (l == L({{s, 1}, {"b", 1}})) q = s;
      for (const auto& tr : machine->transitions)
        if (l == L({{tr.name, 1}, {"b", 1}})) t = &tr;
    }
    if (!q || !t) return std::nullopt;
    const std::string ai = counter_letter(*t);
    std::vector<Move> moves{
        se_move(L({{*q, 1}, {"b", 1}}), L({{*q, 2}, {"b", 1}})),
        se_move(L({{t->name, 1}, {"b", 1}}), L({{t->name, 2}, {"b", 1}})),
        se_move(origin, L({{t->to, 1}}))};
    std::size_t expected = 2;
    if (t->op == TcmOpKind::kInc) {
      Location from = L({{ai, 1}, {"b", 1}});
      if (c.at(from, ProcType::kBoth) != 1) return std::nullopt;
      moves.push_back(se_move(from, L({{ai, 2}, {"b", 1}})));
      ++expected;
    } else if (t->op == TcmOpKind::kDec) {
      Location from = L({{ai, 3}, {"b", 3}});
      if (c.at(from, ProcType::kBoth) != 1) return std::nullopt;
      moves.push_back(se_move(from, L({{ai, 4}, {"b", 3}})));
      ++expected;
    }
    if (specials.size() != expected) return std::nullopt;
    return sys(std::move(moves));
  };
}

// ---------------------------------------------------------------------------
// Library games

namespace {

Alphabet ab_alphabet() { return Alphabet({"a"}, {"b"}); }

}  // namespace

Game lemma4_game() {
  Alphabet alphabet = ab_alphabet();
  LocBuilder L(alphabet, 2);
  const Location l[5] = {L({}), L({{"a", 1}}), L({{"a", 1}, {"b", 1}}),
                         L({{"a", 2}, {"b", 1}}), L({{"a", 2}, {"b", 2}})};
  auto bracket = [&](std::array<LocalCondition, 5> k) {
    AcceptanceRow r;
    for (int i = 0; i < 5; ++i) r.set(l[i], k[i]);
    return r;
  };
  std::vector<AcceptanceRow> rows{
      bracket({se_ge(0), se_eq(2), se_eq(0), se_eq(0), se_ge(0)}),
      bracket({se_ge(0), se_eq(0), se_eq(0), se_eq(2), se_ge(0)}),
      bracket({se_eq(0), se_eq(0), se_eq(0), se_eq(0), se_ge(2)}),
      bracket({se_ge(0), se_eq(1), se_eq(1), se_eq(0), se_ge(0)}),
      bracket({se_ge(0), se_eq(0), se_eq(0), se_eq(1), se_ge(1)}),
  };
  for (const Location& x : all_locations(alphabet, 2)) {
    if (x[1] <= x[0]) continue;  // ℓ(b) > ℓ(a)
    AcceptanceRow r;
    r.fallback = se_ge(0);
    r.set(x, se_ge(1));
    rows.push_back(std::move(r));
  }
  return Game::with_rows(std::move(alphabet), 2, std::move(rows));
}

Game lemma5_game() {
  Alphabet alphabet = ab_alphabet();
  LocBuilder L(alphabet, 2);
  const Location a = L({{"a", 1}}), b = L({{"b", 1}});
  const LocalCondition dflt{{Count{Cmp::kGe, 0}, Count{Cmp::kGe, 0}, Count{Cmp::kEq, 0}}};
  auto cond = [](Count s, Count e) {
    return LocalCondition{{s, e, Count{Cmp::kEq, 0}}};
  };
  const Count eq0{Cmp::kEq, 0}, eq1{Cmp::kEq, 1};
  std::vector<AcceptanceRow> rows(4);
  for (auto& r : rows) r.fallback = dflt;
  rows[0].set(a, cond(eq1, eq0));
  rows[0].set(b, cond(eq0, eq0));
  rows[1].set(a, cond(eq1, eq0));
  rows[1].set(b, cond(eq0, {Cmp::kGe, 2}));
  rows[2].set(a, cond(eq0, eq0));
  rows[2].set(b, cond(eq0, {Cmp::kGe, 1}));
  rows[3].set(L({}), LocalCondition::none());
  return Game::with_rows(std::move(alphabet), 2, std::move(rows));
}

std::vector<Location> example5_red_locations(const Alphabet& alphabet) {
  std::vector<Location> z;
  for (const Location& l : all_locations(alphabet, 3)) {
    unsigned i = l[0], j = l[1];
    if ((i == 2 && j != 2) || (j == 2 && i != 2)) z.push_back(l);
  }
  return z;
}

Game example5_game() {
  Alphabet alphabet({"a"}, {"d"});
  AcceptanceRow r;
  r.fallback = LocalCondition::any();
  for (const Location& l : example5_red_locations(alphabet))
    r.set(l, LocalCondition::none());
  return Game::with_rows(std::move(alphabet), 3, {std::move(r)});
}

StrategyFn lemma4_strategy(const Game& g) {
  LocBuilder L(g.alphabet(), g.bound());
  const std::array<Location, 5> l = {L({}), L({{"a", 1}}), L({{"a", 1}, {"b", 1}}),
                                     L({{"a", 2}, {"b", 1}}),
                                     L({{"a", 2}, {"b", 2}})};
  Alphabet alphabet = g.alphabet();
  unsigned bound = g.bound();
  return [l, alphabet, bound](const Configuration& c) -> std::optional<Transition> {
    if (!only_se(c)) return std::nullopt;
    std::array<std::uint32_t, 5> n{};
    for (const auto& [x, t] : c.entries()) {
      auto it = std::find(l.begin(), l.end(), x);
      if (it == l.end()) return std::nullopt;
      n[it - l.begin()] = t[idx(ProcType::kBoth)];
    }
    auto move2 = [&](int from, int to) {
      return Transition(Side::kSystem, {se_move(l[from], l[to], 2)}, alphabet, bound);
    };
    if (n[1] == 0 && n[2] == 0 && n[3] == 0 && n[0] >= 2) return move2(0, 1);
    if (n[1] == 0 && n[2] == 2 && n[3] == 0) return move2(2, 3);
    return std::nullopt;
  };
}

StrategyFn lemma5_strategy(const Game& g) {
  LocBuilder L(g.alphabet(), g.bound());
  const Location o = L({}), a = L({{"a", 1}}), a2 = L({{"a", 2}}),
                 b = L({{"b", 1}});
  Alphabet alphabet = g.alphabet();
  unsigned bound = g.bound();
  return [=](const Configuration& c) -> std::optional<Transition> {
    if (c.totals()[idx(ProcType::kBoth)] != 0) return std::nullopt;
    const std::uint32_t s0 = c.at(o, ProcType::kSys), e0 = c.at(o, ProcType::kEnv);
    const std::uint32_t sa = c.at(a, ProcType::kSys), eb = c.at(b, ProcType::kEnv);
    auto sys_move = [&](const Location& from, const Location& to, std::uint32_t n) {
      return Transition(Side::kSystem, {Move{from, to, {n, 0, 0}}}, alphabet, bound);
    };
    if (sa == 0 && eb == 0) {
      if (e0 == 0) return s0 == 0 ? Transition::pass() : sys_move(o, a2, s0);
      if (s0 > 0) return sys_move(o, a, 1);
      return std::nullopt;
    }
    if (sa == 1 && eb >= 1) return sys_move(a, a2, 1);
    return std::nullopt;
  };
}

StrategyFn example5_strategy(const Game& g) {
  Alphabet alphabet = g.alphabet();
  unsigned bound = g.bound();
  LetterId a = alphabet.index("a"), d = alphabet.index("d");
  return [=](const Configuration& c) -> std::optional<Transition> {
    std::vector<Move> moves;
    for (const auto& [l, t] : c.entries()) {
      if (l[d] <= l[a]) continue;
      Location up = l;
      up[a] = l[d];
      Triple n = t;
      n[idx(ProcType::kEnv)] = 0;
      if (!is_zero(n)) moves.push_back({l, std::move(up), n});
    }
    if (moves.empty()) return Transition::pass();
    return Transition(Side::kSystem, std::move(moves), alphabet, bound);
  };
}

std::vector<std::string> library_names() {
  return {"lemma4", "lemma5", "example5"};
}

Game library_game(std::string_view name) {
  if (name == "lemma4") return lemma4_game();
  if (name == "lemma5") return lemma5_game();
  if (name == "example5") return example5_game();
  throw InvalidArgument("unknown library game '" + std::string(name) + "'");
}

StrategyFn library_strategy(std::string_view name, const Game& g) {
  if (name == "lemma4") return lemma4_strategy(g);
  if (name == "lemma5") return lemma5_strategy(g);
  if (name == "example5") return example5_strategy(g);
  throw InvalidArgument("unknown library strategy '" + std::string(name) + "'");
}

}  // namespace pvg
