#include "pvg/normalform.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <tuple>

#include "pvg/errors.hpp"

namespace pvg {

std::string to_string(const Count& c) {
  return (c.cmp == Cmp::kEq ? "=" : ">=") + std::to_string(c.n);
}

Count parse_count(std::string_view text) {
  Count c;
  std::string_view rest;
  if (text.substr(0, 2) == ">=") {
    c.cmp = Cmp::kGe;
    rest = text.substr(2);
  } else if (text.substr(0, 3) == "\xE2\x89\xA5") {  // ≥
    c.cmp = Cmp::kGe;
    rest = text.substr(3);
  } else if (text.substr(0, 1) == "=") {
    c.cmp = Cmp::kEq;
    rest = text.substr(text.substr(0, 2) == "==" ? 2 : 1);
  } else {
    throw ParseError("bad count '" + std::string(text) + "'");
  }
  if (rest.empty() ||
      !std::all_of(rest.begin(), rest.end(), [](char ch) { return ch >= '0' && ch <= '9'; }) ||
      rest.size() > 9)
    throw ParseError("bad count '" + std::string(text) + "'");
  c.n = static_cast<std::uint32_t>(std::stoul(std::string(rest)));
  return c;
}

bool realizable(ProcType t, const Location& l, const Alphabet& alphabet) {
  for (std::size_t a = 0; a < l.size(); ++a) {
    if (l[a] == 0) continue;
    bool sys = alphabet.is_sys(static_cast<LetterId>(a));
    if (sys && t == ProcType::kEnv) return false;
    if (!sys && t == ProcType::kSys) return false;
  }
  return true;
}

unsigned threshold(const Formula& f) {
  if (!fragment_check(f, {Relation::kSim}))
    throw InvalidArgument("formula is not in FO[~]");
  return static_cast<unsigned>(std::max<std::size_t>(1, quantifier_rank(f)));
}

ConfigEvaluator::ConfigEvaluator(const Formula& f, const Alphabet& alphabet,
                                 bool trust_bound)
    : formula_(f),
      alphabet_(alphabet),
      threshold_(threshold(f)),
      trust_bound_(trust_bound),
      eval_(std::make_shared<Evaluator>(f, alphabet)) {
  if (!free_variables(f).empty())
    throw InvalidArgument("acceptance formula must be a sentence");
}

bool ConfigEvaluator::operator()(const Configuration& c) const {
  if (!trust_bound_ && c.bound() < threshold_)
    throw InvalidArgument("configuration bound " + std::to_string(c.bound()) +
                          " is below the formula threshold " +
                          std::to_string(threshold_));
  return (*eval_)(canonical_execution(c, alphabet_));
}

bool holds_on_config(const Formula& f, const Configuration& c,
                     const Alphabet& alphabet, bool trust_bound) {
  return ConfigEvaluator(f, alphabet, trust_bound)(c);
}

Formula location_formula(const Location& l, const Alphabet& alphabet,
                         unsigned bound, const std::string& y) {
  std::string z = y + "_z";
  std::vector<Formula> parts;
  for (std::size_t a = 0; a < l.size(); ++a) {
    Formula body = Formula::And(
        Formula::Sim(y, z),
        Formula::Action(alphabet.name(static_cast<LetterId>(a)), z));
    parts.push_back(l[a] < bound ? Formula::Exactly(l[a], z, body)
                                 : Formula::AtLeast(bound, z, body));
  }
  return Formula::AndAll(parts);
}

Formula to_formula(const NormalForm& nf, const Alphabet& alphabet) {
  std::vector<Formula> disjuncts;
  for (const Clause& cl : nf.clauses) {
    std::vector<Formula> conj;
    for (const CountingConstraint& k : cl) {
      Formula body = Formula::And(Formula::Type(k.type, "y"),
                                  location_formula(k.loc, alphabet, nf.bound, "y"));
      conj.push_back(k.count.cmp == Cmp::kEq
                         ? Formula::Exactly(k.count.n, "y", body)
                         : Formula::AtLeast(k.count.n, "y", body));
    }
    disjuncts.push_back(Formula::AndAll(conj));
  }
  return Formula::OrAll(disjuncts);
}

namespace {

std::vector<Profile> realizable_profiles(const Alphabet& alphabet,
                                         unsigned bound) {
  std::vector<Profile> out;
  for (ProcType t : kAllTypes)
    for (const Location& l : all_locations(alphabet, bound))
      if (realizable(t, l, alphabet)) out.push_back({t, l});
  return out;
}

void collect_small_subformulas(const Formula& f, std::vector<Formula>& out) {
  for (std::size_t i = 0; i < f.arity(); ++i)
    collect_small_subformulas(f.child(i), out);
  if (free_variables(f).size() <= 1 &&
      std::find(out.begin(), out.end(), f) == out.end())
    out.push_back(f);
}

// Coarse behavioural fingerprint of a profile: for every subformula with at
// most one free variable, whether some / every element of a lone class of
// that profile satisfies it.
std::vector<bool> fingerprint(const Profile& p, const Alphabet& alphabet,
                              unsigned bound,
                              const std::vector<Formula>& subs,
                              const std::vector<Evaluator>& evals) {
  Configuration c(bound);
  c.add(p.loc, p.type, 1);
  Execution x = canonical_execution(c, alphabet);
  std::vector<Element> elems;
  for (ProcType t : kAllTypes)
    for (ProcessId q : x.universe().of(t)) elems.push_back(Element::process(q));
  for (std::uint32_t i = 1; i <= x.length(); ++i)
    elems.push_back(Element::position(i));
  std::vector<bool> sig;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    auto fv = free_variables(subs[i]);
    if (fv.empty()) {
      sig.push_back(evals[i](x));
      continue;
    }
    bool some = false, all = true;
    for (const Element& e : elems) {
      bool v = evals[i](x, {{*fv.begin(), e}});
      some = some || v;
      all = all && v;
    }
    sig.push_back(some);
    sig.push_back(all);
  }
  return sig;
}

// A literal over the capped count of one block.
struct BlockLit {
  enum Kind : std::uint8_t { kNone, kEq, kGe } kind = kNone;
  std::uint32_t n = 0;
};

class Normalizer {
 public:
  Normalizer(const Formula& f, const Alphabet& alphabet, unsigned bound,
             unsigned m_cap, const NormalizeOptions& options)
      : alphabet_(alphabet),
        bound_(bound),
        top_(m_cap + 1),
        options_(options),
        eval_(f, alphabet, /*trust_bound=*/true),
        rng_(options.seed) {
    if (!fragment_check(f, {Relation::kSim}))
      throw InvalidArgument("formula is not in FO[~]");
    if (!free_variables(f).empty())
      throw InvalidArgument("normalize expects a sentence");
    profiles_ = realizable_profiles(alphabet, bound);
    initial_blocks(f);
  }

  NormalForm run() {
    while (true) {
      build_table();
      if (refine_by_substitution()) continue;
      if (refine_by_sampling()) continue;
      break;
    }
    NormalForm nf;
    nf.bound = bound_;
    std::vector<std::pair<std::size_t, BlockLit>> prefix;
    emit(0, 0, table_.size(), prefix, nf.clauses);
    return canonicalize(std::move(nf), alphabet_);
  }

 private:
  void initial_blocks(const Formula& f) {
    std::vector<Formula> subs;
    collect_small_subformulas(f, subs);
    std::vector<Evaluator> evals;
    for (const Formula& s : subs) evals.emplace_back(s, alphabet_);
    std::map<std::vector<bool>, std::size_t> seen;
    block_of_.resize(profiles_.size());
    for (std::size_t i = 0; i < profiles_.size(); ++i) {
      auto sig = fingerprint(profiles_[i], alphabet_, bound_, subs, evals);
      auto [it, fresh] = seen.emplace(sig, blocks_.size());
      if (fresh) blocks_.emplace_back();
      blocks_[it->second].push_back(i);
      block_of_[i] = it->second;
    }
  }

  std::size_t radix() const { return top_ + 1; }

  bool truth(const Configuration& c) {
    return eval_(c);
  }

  // Block 0 is the most significant digit.
  std::vector<std::uint32_t> decode(std::size_t cell) const {
    std::vector<std::uint32_t> v(blocks_.size());
    for (std::size_t j = blocks_.size(); j-- > 0;) {
      v[j] = static_cast<std::uint32_t>(cell % radix());
      cell /= radix();
    }
    return v;
  }

  std::size_t encode(const std::vector<std::uint32_t>& v) const {
    std::size_t cell = 0;
    for (std::uint32_t x : v) cell = cell * radix() + std::min<std::uint32_t>(x, top_);
    return cell;
  }

  Configuration representative(const std::vector<std::uint32_t>& v) const {
    Configuration c(bound_);
    for (std::size_t j = 0; j < blocks_.size(); ++j) {
      const Profile& p = profiles_[blocks_[j].front()];
      c.add(p.loc, p.type, v[j]);
    }
    return c;
  }

  void build_table() {
    std::uint64_t cells = 1;
    for (std::size_t j = 0; j < blocks_.size(); ++j) {
      cells *= radix();
      if (cells > options_.budget)
        throw BudgetExceeded("normal form needs more than " +
                             std::to_string(options_.budget) +
                             " table cells (" + std::to_string(blocks_.size()) +
                             " profile blocks)");
    }
    table_.assign(cells, false);
    for (std::size_t cell = 0; cell < cells; ++cell)
      table_[cell] = truth(representative(decode(cell)));
  }

  // Splits block j according to the truth of `context` plus one token on
  // each member profile.
  void split(std::size_t j, const Configuration& context) {
    std::vector<std::size_t> yes, no;
    for (std::size_t i : blocks_[j]) {
      Configuration c = context;
      c.add(profiles_[i].loc, profiles_[i].type, 1);
      (truth(c) ? yes : no).push_back(i);
    }
    if (yes.empty() || no.empty())
      throw Error("internal: block split found no separating profile");
    // Keep the group containing the current representative in place.
    bool rep_yes = yes.front() == blocks_[j].front();
    blocks_[j] = rep_yes ? yes : no;
    blocks_.push_back(rep_yes ? no : yes);
    for (std::size_t i : blocks_.back()) block_of_[i] = blocks_.size() - 1;
  }

  // Cells with at most three tokens in total, then random cells.
  std::vector<std::size_t> probe_cells() {
    std::vector<std::size_t> cells;
    for (std::size_t cell = 0; cell < table_.size(); ++cell) {
      auto v = decode(cell);
      std::uint32_t total = 0;
      for (auto x : v) total += x;
      if (total <= 3) cells.push_back(cell);
    }
    if (table_.size() <= cells.size() + options_.substitution_cells) {
      cells.resize(table_.size());
      for (std::size_t cell = 0; cell < table_.size(); ++cell) cells[cell] = cell;
      return cells;
    }
    std::uniform_int_distribution<std::size_t> pick(0, table_.size() - 1);
    for (unsigned i = 0; i < options_.substitution_cells; ++i)
      cells.push_back(pick(rng_));
    return cells;
  }

  bool refine_by_substitution() {
    for (std::size_t cell : probe_cells()) {
      auto v = decode(cell);
      Configuration rep = representative(v);
      for (std::size_t j = 0; j < blocks_.size(); ++j) {
        if (v[j] == 0 || blocks_[j].size() < 2) continue;
        const Profile& r = profiles_[blocks_[j].front()];
        Configuration context = rep;
        context.add(r.loc, r.type, -1);
        for (std::size_t m = 1; m < blocks_[j].size(); ++m) {
          const Profile& q = profiles_[blocks_[j][m]];
          Configuration c = context;
          c.add(q.loc, q.type, 1);
          if (truth(c) != table_[cell]) {
            split(j, context);
            return true;
          }
        }
      }
    }
    return false;
  }

  Configuration random_configuration() {
    Configuration c(bound_);
    std::uniform_int_distribution<std::size_t> pick(0, profiles_.size() - 1);
    std::uniform_int_distribution<unsigned> size(0, std::min(8u, 2 * top_ + 2));
    unsigned n = size(rng_);
    if (rng_() % 2 == 0) {
      std::vector<std::size_t> pool;
      unsigned k = 1 + static_cast<unsigned>(rng_() % 3);
      for (unsigned i = 0; i < k; ++i) pool.push_back(pick(rng_));
      for (unsigned i = 0; i < n; ++i) {
        const Profile& p = profiles_[pool[rng_() % pool.size()]];
        c.add(p.loc, p.type, 1);
      }
    } else {
      for (unsigned i = 0; i < n; ++i) {
        const Profile& p = profiles_[pick(rng_)];
        c.add(p.loc, p.type, 1);
      }
    }
    return c;
  }

  std::size_t profile_index(const Location& l, ProcType t) const {
    for (std::size_t i = 0; i < profiles_.size(); ++i)
      if (profiles_[i].type == t && profiles_[i].loc == l) return i;
    throw Error("internal: unknown profile");
  }

  // Walks from a counterexample to its representative one token at a time
  // and splits the block whose substitution flips the truth value.
  bool refine_by_sampling() {
    for (unsigned s = 0; s < options_.samples; ++s) {
      Configuration c = random_configuration();
      std::vector<std::uint32_t> v(blocks_.size(), 0);
      std::vector<std::size_t> tokens;
      for (const auto& [l, counts] : c.entries())
        for (ProcType t : kAllTypes)
          for (std::uint32_t k = 0; k < counts[idx(t)]; ++k) {
            std::size_t i = profile_index(l, t);
            tokens.push_back(i);
            ++v[block_of_[i]];
          }
      bool expected = table_[encode(v)];
      bool actual = truth(c);
      if (actual == expected) continue;
      Configuration cur = c;
      bool current = actual;
      for (std::size_t i : tokens) {
        std::size_t j = block_of_[i];
        std::size_t r = blocks_[j].front();
        if (r == i) continue;
        Configuration next = cur;
        next.add(profiles_[i].loc, profiles_[i].type, -1);
        Configuration context = next;
        next.add(profiles_[r].loc, profiles_[r].type, 1);
        bool t = truth(next);
        if (t != current) {
          split(j, context);
          return true;
        }
        cur = std::move(next);
      }
      throw InvalidArgument(
          "class-count cap too small: truth changes above " +
          std::to_string(top_ - 1) + " tokens per profile block");
    }
    return false;
  }

  // Shannon expansion over blocks, grouping block values with equal cofactors
  // into =k / ≥k literals.
  void emit(std::size_t j, std::size_t begin, std::size_t end,
            std::vector<std::pair<std::size_t, BlockLit>>& prefix,
            std::vector<Clause>& out) {
    if (std::none_of(table_.begin() + static_cast<std::ptrdiff_t>(begin),
                     table_.begin() + static_cast<std::ptrdiff_t>(end),
                     [](bool b) { return b; }))
      return;
    if (j == blocks_.size()) {
      expand(prefix, out);
      return;
    }
    std::size_t stride = (end - begin) / radix();
    auto slice_eq = [&](std::size_t x, std::size_t y) {
      return std::equal(table_.begin() + static_cast<std::ptrdiff_t>(begin + x * stride),
                        table_.begin() + static_cast<std::ptrdiff_t>(begin + (x + 1) * stride),
                        table_.begin() + static_cast<std::ptrdiff_t>(begin + y * stride));
    };
    std::vector<bool> done(radix(), false);
    for (std::size_t x = 0; x < radix(); ++x) {
      if (done[x]) continue;
      std::vector<bool> in(radix(), false);
      for (std::size_t y = x; y < radix(); ++y)
        if (!done[y] && slice_eq(x, y)) in[y] = done[y] = true;
      std::vector<BlockLit> lits;
      std::size_t t = radix();
      while (t > 0 && in[t - 1]) --t;
      if (t == 0) {
        lits.push_back({BlockLit::kNone, 0});
      } else {
        if (t < radix()) lits.push_back({BlockLit::kGe, static_cast<std::uint32_t>(t)});
        for (std::size_t y = 0; y < t; ++y)
          if (in[y]) lits.push_back({BlockLit::kEq, static_cast<std::uint32_t>(y)});
      }
      for (const BlockLit& lit : lits) {
        prefix.emplace_back(j, lit);
        emit(j + 1, begin + x * stride, begin + (x + 1) * stride, prefix, out);
        prefix.pop_back();
      }
    }
  }

  // Turns block literals into per-profile constraints, one clause per way of
  // distributing the block count over the block's profiles.
  void expand(const std::vector<std::pair<std::size_t, BlockLit>>& lits,
              std::vector<Clause>& out) {
    std::vector<std::vector<Clause>> options;
    for (const auto& [j, lit] : lits) {
      if (lit.kind == BlockLit::kNone) continue;
      std::vector<Clause> alts;
      const auto& members = blocks_[j];
      std::vector<std::uint32_t> parts(members.size(), 0);
      std::function<void(std::size_t, std::uint32_t)> go =
          [&](std::size_t i, std::uint32_t left) {
            if (i + 1 == members.size()) {
              parts[i] = left;
              Clause cl;
              for (std::size_t m = 0; m < members.size(); ++m) {
                const Profile& p = profiles_[members[m]];
                if (lit.kind == BlockLit::kEq)
                  cl.push_back({{Cmp::kEq, parts[m]}, p.type, p.loc});
                else if (parts[m] > 0)
                  cl.push_back({{Cmp::kGe, parts[m]}, p.type, p.loc});
              }
              alts.push_back(std::move(cl));
              return;
            }
            for (std::uint32_t x = 0; x <= left; ++x) {
              parts[i] = x;
              go(i + 1, left - x);
            }
          };
      go(0, lit.n);
      options.push_back(std::move(alts));
    }
    std::uint64_t total = 1;
    for (const auto& o : options) {
      total *= o.size();
      if (total + out.size() > kClauseLimit)
        throw BudgetExceeded("normal form exceeds " +
                             std::to_string(kClauseLimit) + " clauses");
    }
    std::vector<std::size_t> pick(options.size(), 0);
    while (true) {
      Clause cl;
      for (std::size_t i = 0; i < options.size(); ++i)
        cl.insert(cl.end(), options[i][pick[i]].begin(), options[i][pick[i]].end());
      out.push_back(std::move(cl));
      std::size_t i = options.size();
      while (i > 0 && ++pick[i - 1] == options[i - 1].size()) pick[--i] = 0;
      if (i == 0) break;
    }
  }

  static constexpr std::uint64_t kClauseLimit = 1u << 20;

  Alphabet alphabet_;
  unsigned bound_;
  std::uint32_t top_;
  NormalizeOptions options_;
  ConfigEvaluator eval_;
  std::mt19937_64 rng_;
  std::vector<Profile> profiles_;
  std::vector<std::vector<std::size_t>> blocks_;
  std::vector<std::size_t> block_of_;
  std::vector<bool> table_;
};

}  // namespace

NormalForm normalize(const Formula& f, const Alphabet& alphabet,
                     unsigned bound, unsigned m_cap,
                     const NormalizeOptions& options) {
  if (bound < 1) throw InvalidArgument("bound must be at least 1");
  return Normalizer(f, alphabet, bound, m_cap, options).run();
}

NormalForm canonicalize(NormalForm nf, const Alphabet& alphabet) {
  std::vector<Clause> kept;
  for (Clause& cl : nf.clauses) {
    Clause out;
    bool dead = false;
    for (const CountingConstraint& k : cl) {
      if (k.count.trivial()) continue;
      if (!realizable(k.type, k.loc, alphabet)) {
        if (k.count.n == 0) continue;  // =0 on a profile that never occurs
        dead = true;
        break;
      }
      out.push_back(k);
    }
    if (dead) continue;
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
      return std::tie(a.type, a.loc, a.count) < std::tie(b.type, b.loc, b.count);
    });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    // Two different constraints on one profile: keep only if compatible.
    Clause merged;
    for (const auto& k : out) {
      if (!merged.empty() && merged.back().type == k.type &&
          merged.back().loc == k.loc) {
        Count& a = merged.back().count;
        const Count& b = k.count;
        if (a.cmp == Cmp::kEq && b.cmp == Cmp::kEq) {
          dead = a.n != b.n;
        } else if (a.cmp == Cmp::kEq) {
          dead = a.n < b.n;
        } else if (b.cmp == Cmp::kEq) {
          dead = b.n < a.n;
          if (!dead) a = b;
        } else {
          a.n = std::max(a.n, b.n);
        }
        if (dead) break;
        continue;
      }
      merged.push_back(k);
    }
    if (!dead) kept.push_back(std::move(merged));
  }
  std::sort(kept.begin(), kept.end(), [](const Clause& a, const Clause& b) {
    return std::lexicographical_compare(
        a.begin(), a.end(), b.begin(), b.end(), [](const auto& x, const auto& y) {
          return std::tie(x.type, x.loc, x.count) < std::tie(y.type, y.loc, y.count);
        });
  });
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  nf.clauses = std::move(kept);
  return nf;
}

bool nf_holds(const NormalForm& nf, const Configuration& c) {
  if (c.bound() != nf.bound)
    throw InvalidArgument("configuration bound " + std::to_string(c.bound()) +
                          " differs from normal form bound " +
                          std::to_string(nf.bound));
  for (const Clause& cl : nf.clauses)
    if (std::all_of(cl.begin(), cl.end(),
                    [&](const CountingConstraint& k) { return k.holds(c); }))
      return true;
  return false;
}

std::optional<Execution> satisfiable(const Formula& f, const Alphabet& alphabet,
                                     std::optional<unsigned> count_cap) {
  unsigned bound = threshold(f);
  ConfigEvaluator eval(f, alphabet);
  if (!free_variables(f).empty())
    throw InvalidArgument("satisfiable expects a sentence");

  std::optional<NormalForm> nf;
  try {
    nf = normalize(f, alphabet, bound, bound);
  } catch (const BudgetExceeded&) {
  }
  if (nf) {
    // Smallest configuration meeting some clause with the exact constants.
    std::optional<Configuration> best;
    for (const Clause& cl : nf->clauses) {
      Configuration c(bound);
      for (const auto& k : cl) c.add(k.loc, k.type, k.count.n);
      if (!best || c.token_count() < best->token_count()) best = c;
    }
    if (!best) return std::nullopt;
    if (eval(*best)) return canonical_execution(*best, alphabet);
  }

  // Fallback: multisets of realizable profiles by increasing size.
  unsigned cap = count_cap.value_or(bound);
  std::vector<Profile> profiles = realizable_profiles(alphabet, bound);
  std::vector<std::uint32_t> counts(profiles.size(), 0);
  std::uint64_t budget = 200000;
  std::optional<Configuration> found;
  std::function<bool(std::size_t, unsigned)> go = [&](std::size_t i,
                                                      unsigned left) -> bool {
    if (left == 0 || i == profiles.size()) {
      if (left != 0) return false;
      if (budget-- == 0) throw BudgetExceeded("satisfiability search budget");
      Configuration c(bound);
      for (std::size_t k = 0; k < profiles.size(); ++k)
        c.add(profiles[k].loc, profiles[k].type, counts[k]);
      if (eval(c)) {
        found = c;
        return true;
      }
      return false;
    }
    for (unsigned x = std::min(left, cap) + 1; x-- > 0;) {
      counts[i] = x;
      if (go(i + 1, left - x)) return true;
    }
    counts[i] = 0;
    return false;
  };
  std::size_t max_total = profiles.size() * cap;
  for (std::size_t n = 0; n <= max_total; ++n)
    if (go(0, static_cast<unsigned>(n)))
      return canonical_execution(*found, alphabet);
  return std::nullopt;
}

}  // namespace pvg
