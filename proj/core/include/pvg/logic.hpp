#pragma once

// Alphabets, process universes, executions and first-order formulas over data
// words, plus a brute-force model checker.
//
// Positions are 1-based. The universe of an execution is the disjoint union of
// its processes and its positions; `~` relates every position to the process
// that executed it and positions of the same process to each other.

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace pvg {

enum class ProcType : std::uint8_t { kSys = 0, kEnv = 1, kBoth = 2 };

inline constexpr std::array<ProcType, 3> kAllTypes = {
    ProcType::kSys, ProcType::kEnv, ProcType::kBoth};

std::string_view type_name(ProcType t);
std::optional<ProcType> parse_type_name(std::string_view s);

using LetterId = std::uint16_t;
using ProcessId = std::uint32_t;

/// A ⊎ partition of action names into system and environment actions. Letter
/// ids number the system actions first, then the environment actions, each in
/// declaration order.
class Alphabet {
 public:
  Alphabet() = default;
  Alphabet(std::vector<std::string> sys, std::vector<std::string> env);

  const std::vector<std::string>& sys() const { return sys_; }
  const std::vector<std::string>& env() const { return env_; }
  std::size_t size() const { return names_.size(); }
  std::size_t sys_size() const { return sys_.size(); }
  std::size_t env_size() const { return env_.size(); }

  const std::string& name(LetterId id) const { return names_.at(id); }
  std::optional<LetterId> find(std::string_view name) const;
  /// Throws InvalidArgument for unknown names.
  LetterId index(std::string_view name) const;
  bool is_sys(LetterId id) const { return id < sys_.size(); }

  friend bool operator==(const Alphabet& a, const Alphabet& b) {
    return a.sys_ == b.sys_ && a.env_ == b.env_;
  }

 private:
  std::vector<std::string> sys_;
  std::vector<std::string> env_;
  std::vector<std::string> names_;
};

/// Parses `sys: a b; env: c d;`.
Alphabet parse_alphabet(std::string_view text);
std::string to_string(const Alphabet& alphabet);

struct ProcessUniverse {
  std::vector<ProcessId> sys;
  std::vector<ProcessId> env;
  std::vector<ProcessId> both;

  const std::vector<ProcessId>& of(ProcType t) const;
  std::vector<ProcessId>& of(ProcType t);
  std::optional<ProcType> type_of(ProcessId p) const;
  std::size_t size() const { return sys.size() + env.size() + both.size(); }
  std::array<std::size_t, 3> sizes() const {
    return {sys.size(), env.size(), both.size()};
  }
  /// Sorts the id lists and checks pairwise disjointness.
  void normalize();

  /// Universe with consecutive ids 1.. allocated to s, then e, then se.
  static ProcessUniverse with_sizes(std::size_t s, std::size_t e,
                                    std::size_t se);

  friend bool operator==(const ProcessUniverse&,
                         const ProcessUniverse&) = default;
};

struct Event {
  LetterId action = 0;
  ProcessId process = 0;
  friend bool operator==(const Event&, const Event&) = default;
  friend auto operator<=>(const Event&, const Event&) = default;
};

/// A finite ℙ-execution. Construction validates that system actions are only
/// executed by s/se processes and environment actions by e/se processes.
class Execution {
 public:
  Execution() = default;
  Execution(Alphabet alphabet, ProcessUniverse universe,
            std::vector<Event> events);

  const Alphabet& alphabet() const { return alphabet_; }
  const ProcessUniverse& universe() const { return universe_; }
  const std::vector<Event>& events() const { return events_; }
  std::size_t length() const { return events_.size(); }
  /// 1-based access, w[i].
  const Event& at(std::size_t position) const {
    return events_.at(position - 1);
  }

  friend bool operator==(const Execution&, const Execution&) = default;

 private:
  Alphabet alphabet_;
  ProcessUniverse universe_;
  std::vector<Event> events_;
};

/// Parses `procs sys=1,2,3 env=4,5 both=6,7,8; (a,1)(b,8)...`.
Execution parse_execution(std::string_view text, const Alphabet& alphabet);
std::string to_string(const Execution& x);

enum class FormulaKind : std::uint8_t {
  kTrue,
  kFalse,
  kType,     // θ(x)
  kAction,   // a(x)
  kEqual,    // x = y
  kSim,      // x ~ y
  kLess,     // x < y
  kSucc,     // +1(x, y)
  kNot,
  kOr,
  kAnd,
  kImplies,
  kIff,
  kExists,
  kForall,
  kAtLeast,  // ∃^{≥m}
  kExactly,  // ∃^{=m}
};

/// Immutable syntax tree of FO[~,<,+1] with the usual abbreviations kept as
/// first-class nodes. Children are shared, so copies are cheap.
class Formula {
 public:
  static Formula True();
  static Formula False();
  static Formula Type(ProcType t, std::string var);
  static Formula Action(std::string action, std::string var);
  static Formula Equal(std::string x, std::string y);
  static Formula Sim(std::string x, std::string y);
  static Formula Less(std::string x, std::string y);
  static Formula Succ(std::string x, std::string y);
  static Formula Not(Formula f);
  static Formula Or(Formula a, Formula b);
  static Formula And(Formula a, Formula b);
  static Formula Implies(Formula a, Formula b);
  static Formula Iff(Formula a, Formula b);
  static Formula Exists(std::string var, Formula body);
  static Formula Forall(std::string var, Formula body);
  static Formula AtLeast(std::uint32_t m, std::string var, Formula body);
  static Formula Exactly(std::uint32_t m, std::string var, Formula body);

  /// Folds with And/Or; empty lists give true/false respectively.
  static Formula AndAll(const std::vector<Formula>& fs);
  static Formula OrAll(const std::vector<Formula>& fs);

  FormulaKind kind() const { return node_->kind; }
  ProcType type() const { return node_->type; }
  const std::string& action() const { return node_->action; }
  /// Bound variable of quantifiers, first argument of atoms.
  const std::string& var() const { return node_->x; }
  const std::string& var2() const { return node_->y; }
  std::uint32_t count() const { return node_->count; }
  std::size_t arity() const { return node_->kids.size(); }
  const Formula& child(std::size_t i) const { return node_->kids.at(i); }

  bool is_quantifier() const;
  bool is_atom() const;

  friend bool operator==(const Formula& a, const Formula& b);

  struct Node {
    FormulaKind kind = FormulaKind::kTrue;
    ProcType type = ProcType::kSys;
    std::string action;
    std::string x;
    std::string y;
    std::uint32_t count = 0;
    std::vector<Formula> kids;
  };

 private:
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Formula make(Node n);

  std::shared_ptr<const Node> node_;
};

/// Parses the ASCII grammar documented in the README. Action atoms must name
/// letters of `alphabet`; every variable must be bound or listed in
/// `free_vars`.
Formula parse_formula(std::string_view text, const Alphabet& alphabet,
                      const std::vector<std::string>& free_vars = {});
/// Fully parenthesized rendering that parses back to an identical tree.
std::string to_string(const Formula& f);

std::set<std::string> free_variables(const Formula& f);
/// Action names mentioned by action atoms.
std::set<std::string> actions_used(const Formula& f);

/// Replaces counting quantifiers by plain quantifiers with pairwise
/// disequalities. Other abbreviations are kept.
Formula expand_counting(const Formula& f);

/// Quantifier nesting depth of expand_counting(f), computed without
/// materializing the expansion.
std::size_t quantifier_rank(const Formula& f);

enum class Relation : std::uint8_t { kSim = 1, kLess = 2, kSucc = 4 };

struct RelationSet {
  std::uint8_t bits = 0;
  RelationSet() = default;
  RelationSet(std::initializer_list<Relation> rs) {
    for (Relation r : rs) bits |= static_cast<std::uint8_t>(r);
  }
  bool contains(Relation r) const {
    return (bits & static_cast<std::uint8_t>(r)) != 0;
  }
};

/// True iff f uses no relation symbol outside `allowed` (equality is always
/// permitted).
bool fragment_check(const Formula& f, RelationSet allowed);

/// Element of the universe ℙ ⊎ Pos(w).
struct Element {
  enum class Kind : std::uint8_t { kProcess, kPosition };
  Kind kind = Kind::kProcess;
  std::uint32_t value = 0;  // process id, or 1-based position

  static Element process(ProcessId p) { return {Kind::kProcess, p}; }
  static Element position(std::uint32_t i) { return {Kind::kPosition, i}; }
  friend bool operator==(const Element&, const Element&) = default;
};

using Interpretation = std::map<std::string, Element>;

/// Compiled formula that can be evaluated repeatedly on executions over one
/// alphabet. Evaluation is exhaustive quantifier expansion over the universe,
/// so the cost is O(|universe|^rank); counting quantifiers are evaluated by
/// counting witnesses directly.
class Evaluator {
 public:
  Evaluator(const Formula& f, const Alphabet& alphabet);
  ~Evaluator();
  Evaluator(Evaluator&&) noexcept;
  Evaluator& operator=(Evaluator&&) noexcept;

  bool operator()(const Execution& x, const Interpretation& interp = {}) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

bool model_check(const Execution& x, const Formula& f,
                 const Interpretation& interp = {});

/// True iff a letter-preserving bijection between the position sets exists.
bool similar(const Execution& a, const Execution& b);

}  // namespace pvg
