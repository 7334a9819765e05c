#include "pvg/logic.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>
#include <unordered_map>

#include "pvg/errors.hpp"

namespace pvg {

std::string_view type_name(ProcType t) {
  switch (t) {
    case ProcType::kSys: return "s";
    case ProcType::kEnv: return "e";
    case ProcType::kBoth: return "se";
  }
  return "?";
}

std::optional<ProcType> parse_type_name(std::string_view s) {
  if (s == "s") return ProcType::kSys;
  if (s == "e") return ProcType::kEnv;
  if (s == "se") return ProcType::kBoth;
  return std::nullopt;
}

namespace {

bool is_reserved(std::string_view w) {
  return w == "s" || w == "e" || w == "se" || w == "true" || w == "false" ||
         w == "E" || w == "A";
}

bool is_identifier(std::string_view w) {
  if (w.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(w[0])) || w[0] == '_'))
    return false;
  return std::all_of(w.begin(), w.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

}  // namespace

// ---------------------------------------------------------------------------
// Alphabet

Alphabet::Alphabet(std::vector<std::string> sys, std::vector<std::string> env)
    : sys_(std::move(sys)), env_(std::move(env)) {
  names_ = sys_;
  names_.insert(names_.end(), env_.begin(), env_.end());
  if (names_.empty()) throw InvalidArgument("alphabet has no actions");
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (!is_identifier(n) || is_reserved(n))
      throw InvalidArgument("invalid action name '" + n + "'");
    if (!seen.insert(n).second)
      throw InvalidArgument("action '" + n + "' declared twice");
  }
}

std::optional<LetterId> Alphabet::find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<LetterId>(i);
  return std::nullopt;
}

LetterId Alphabet::index(std::string_view name) const {
  auto id = find(name);
  if (!id) throw InvalidArgument("unknown action '" + std::string(name) + "'");
  return *id;
}

namespace {

// Shared low-level scanner for the small text formats.
class Scanner {
 public:
  explicit Scanner(std::string_view text) : text_(text) {}

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }
  std::size_t pos() const { return pos_; }
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool accept(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }
  void expect(std::string_view tok) {
    if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
  }
  std::string ident() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < text_.size() &&
        (std::isalpha(static_cast<unsigned char>(text_[pos_])) ||
         text_[pos_] == '_')) {
      ++pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_'))
        ++pos_;
    }
    if (start == pos_) fail("expected identifier");
    return std::string(text_.substr(start, pos_ - start));
  }
  std::uint64_t number() {
    skip_ws();
    std::size_t start = pos_;
    std::uint64_t v = 0;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      v = v * 10 + static_cast<std::uint64_t>(text_[pos_] - '0');
      if (v > 0xffffffffULL) fail("number too large");
      ++pos_;
    }
    if (start == pos_) fail("expected number");
    return v;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, pos_);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Alphabet parse_alphabet(std::string_view text) {
  Scanner sc(text);
  std::vector<std::string> sys, env;
  bool have_sys = false, have_env = false;
  while (!sc.at_end()) {
    std::size_t at = sc.pos();
    std::string key = sc.ident();
    sc.expect(":");
    std::vector<std::string>* dst = nullptr;
    if (key == "sys" && !have_sys) {
      dst = &sys;
      have_sys = true;
    } else if (key == "env" && !have_env) {
      dst = &env;
      have_env = true;
    } else {
      throw ParseError("unexpected section '" + key + "'", at);
    }
    while (sc.peek() != ';') {
      if (sc.at_end()) sc.fail("expected ';'");
      dst->push_back(sc.ident());
    }
    sc.expect(";");
  }
  try {
    return Alphabet(std::move(sys), std::move(env));
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what());
  }
}

std::string to_string(const Alphabet& alphabet) {
  std::string out = "sys:";
  for (const auto& a : alphabet.sys()) out += " " + a;
  out += "; env:";
  for (const auto& a : alphabet.env()) out += " " + a;
  out += ";";
  return out;
}

// ---------------------------------------------------------------------------
// Universes and executions

const std::vector<ProcessId>& ProcessUniverse::of(ProcType t) const {
  switch (t) {
    case ProcType::kSys: return sys;
    case ProcType::kEnv: return env;
    default: return both;
  }
}

std::vector<ProcessId>& ProcessUniverse::of(ProcType t) {
  switch (t) {
    case ProcType::kSys: return sys;
    case ProcType::kEnv: return env;
    default: return both;
  }
}

std::optional<ProcType> ProcessUniverse::type_of(ProcessId p) const {
  for (ProcType t : kAllTypes) {
    const auto& v = of(t);
    if (std::binary_search(v.begin(), v.end(), p)) return t;
  }
  return std::nullopt;
}

void ProcessUniverse::normalize() {
  std::vector<ProcessId> all;
  for (ProcType t : kAllTypes) {
    auto& v = of(t);
    std::sort(v.begin(), v.end());
    all.insert(all.end(), v.begin(), v.end());
  }
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end())
    throw InvalidArgument("process sets are not pairwise disjoint");
}

ProcessUniverse ProcessUniverse::with_sizes(std::size_t s, std::size_t e,
                                            std::size_t se) {
  ProcessUniverse u;
  ProcessId next = 1;
  for (std::size_t i = 0; i < s; ++i) u.sys.push_back(next++);
  for (std::size_t i = 0; i < e; ++i) u.env.push_back(next++);
  for (std::size_t i = 0; i < se; ++i) u.both.push_back(next++);
  return u;
}

Execution::Execution(Alphabet alphabet, ProcessUniverse universe,
                     std::vector<Event> events)
    : alphabet_(std::move(alphabet)),
      universe_(std::move(universe)),
      events_(std::move(events)) {
  universe_.normalize();
  for (const Event& ev : events_) {
    if (ev.action >= alphabet_.size())
      throw InvalidArgument("event uses an unknown action");
    auto t = universe_.type_of(ev.process);
    if (!t)
      throw InvalidArgument("process " + std::to_string(ev.process) +
                            " is not in the universe");
    bool sys_action = alphabet_.is_sys(ev.action);
    if (sys_action && *t == ProcType::kEnv)
      throw InvalidArgument("environment process " +
                            std::to_string(ev.process) +
                            " executes system action '" +
                            alphabet_.name(ev.action) + "'");
    if (!sys_action && *t == ProcType::kSys)
      throw InvalidArgument("system process " + std::to_string(ev.process) +
                            " executes environment action '" +
                            alphabet_.name(ev.action) + "'");
  }
}

Execution parse_execution(std::string_view text, const Alphabet& alphabet) {
  Scanner sc(text);
  ProcessUniverse u;
  sc.expect("procs");
  std::set<std::string> seen;
  while (sc.peek() != ';') {
    if (sc.at_end()) sc.fail("expected ';'");
    std::size_t at = sc.pos();
    std::string key = sc.ident();
    std::vector<ProcessId>* dst = nullptr;
    if (key == "sys") dst = &u.sys;
    else if (key == "env") dst = &u.env;
    else if (key == "both") dst = &u.both;
    else throw ParseError("unknown process set '" + key + "'", at);
    if (!seen.insert(key).second)
      throw ParseError("process set '" + key + "' given twice", at);
    sc.expect("=");
    char c = sc.peek();
    if (std::isdigit(static_cast<unsigned char>(c))) {
      dst->push_back(static_cast<ProcessId>(sc.number()));
      while (sc.accept(",")) dst->push_back(static_cast<ProcessId>(sc.number()));
    }
  }
  sc.expect(";");
  std::vector<Event> events;
  while (!sc.at_end()) {
    sc.expect("(");
    std::size_t at = sc.pos();
    std::string a = sc.ident();
    auto id = alphabet.find(a);
    if (!id) throw ParseError("unknown action '" + a + "'", at);
    sc.expect(",");
    auto p = static_cast<ProcessId>(sc.number());
    sc.expect(")");
    events.push_back({*id, p});
  }
  try {
    return Execution(alphabet, std::move(u), std::move(events));
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what());
  }
}

std::string to_string(const Execution& x) {
  std::ostringstream os;
  os << "procs";
  const char* names[] = {"sys", "env", "both"};
  for (ProcType t : kAllTypes) {
    os << ' ' << names[static_cast<int>(t)] << '=';
    const auto& v = x.universe().of(t);
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  }
  os << ';';
  for (const Event& ev : x.events())
    os << " (" << x.alphabet().name(ev.action) << ',' << ev.process << ')';
  return os.str();
}

// ---------------------------------------------------------------------------
// Formula construction

Formula Formula::make(Node n) {
  return Formula(std::make_shared<const Node>(std::move(n)));
}

Formula Formula::True() { return make(Node{}); }
Formula Formula::False() {
  Node n;
  n.kind = FormulaKind::kFalse;
  return make(std::move(n));
}

Formula Formula::Type(ProcType t, std::string var) {
  Node n;
  n.kind = FormulaKind::kType;
  n.type = t;
  n.x = std::move(var);
  return make(std::move(n));
}

Formula Formula::Action(std::string action, std::string var) {
  Node n;
  n.kind = FormulaKind::kAction;
  n.action = std::move(action);
  n.x = std::move(var);
  return make(std::move(n));
}

namespace {
Formula::Node binary_atom(FormulaKind k, std::string x, std::string y) {
  Formula::Node n;
  n.kind = k;
  n.x = std::move(x);
  n.y = std::move(y);
  return n;
}
}  // namespace

Formula Formula::Equal(std::string x, std::string y) {
  return make(binary_atom(FormulaKind::kEqual, std::move(x), std::move(y)));
}
Formula Formula::Sim(std::string x, std::string y) {
  return make(binary_atom(FormulaKind::kSim, std::move(x), std::move(y)));
}
Formula Formula::Less(std::string x, std::string y) {
  return make(binary_atom(FormulaKind::kLess, std::move(x), std::move(y)));
}
Formula Formula::Succ(std::string x, std::string y) {
  return make(binary_atom(FormulaKind::kSucc, std::move(x), std::move(y)));
}

Formula Formula::Not(Formula f) {
  Node n;
  n.kind = FormulaKind::kNot;
  n.kids = {std::move(f)};
  return make(std::move(n));
}

namespace {
Formula::Node connective(FormulaKind k, Formula a, Formula b) {
  Formula::Node n;
  n.kind = k;
  n.kids = {std::move(a), std::move(b)};
  return n;
}
Formula::Node quantifier(FormulaKind k, std::uint32_t m, std::string var,
                         Formula body) {
  Formula::Node n;
  n.kind = k;
  n.count = m;
  n.x = std::move(var);
  n.kids = {std::move(body)};
  return n;
}
}  // namespace

Formula Formula::Or(Formula a, Formula b) {
  return make(connective(FormulaKind::kOr, std::move(a), std::move(b)));
}
Formula Formula::And(Formula a, Formula b) {
  return make(connective(FormulaKind::kAnd, std::move(a), std::move(b)));
}
Formula Formula::Implies(Formula a, Formula b) {
  return make(connective(FormulaKind::kImplies, std::move(a), std::move(b)));
}
Formula Formula::Iff(Formula a, Formula b) {
  return make(connective(FormulaKind::kIff, std::move(a), std::move(b)));
}
Formula Formula::Exists(std::string var, Formula body) {
  return make(
      quantifier(FormulaKind::kExists, 0, std::move(var), std::move(body)));
}
Formula Formula::Forall(std::string var, Formula body) {
  return make(
      quantifier(FormulaKind::kForall, 0, std::move(var), std::move(body)));
}
Formula Formula::AtLeast(std::uint32_t m, std::string var, Formula body) {
  return make(
      quantifier(FormulaKind::kAtLeast, m, std::move(var), std::move(body)));
}
Formula Formula::Exactly(std::uint32_t m, std::string var, Formula body) {
  return make(
      quantifier(FormulaKind::kExactly, m, std::move(var), std::move(body)));
}

Formula Formula::AndAll(const std::vector<Formula>& fs) {
  if (fs.empty()) return True();
  Formula acc = fs.back();
  for (std::size_t i = fs.size() - 1; i-- > 0;) acc = And(fs[i], acc);
  return acc;
}

Formula Formula::OrAll(const std::vector<Formula>& fs) {
  if (fs.empty()) return False();
  Formula acc = fs.back();
  for (std::size_t i = fs.size() - 1; i-- > 0;) acc = Or(fs[i], acc);
  return acc;
}

bool Formula::is_quantifier() const {
  switch (kind()) {
    case FormulaKind::kExists:
    case FormulaKind::kForall:
    case FormulaKind::kAtLeast:
    case FormulaKind::kExactly:
      return true;
    default:
      return false;
  }
}

bool Formula::is_atom() const {
  switch (kind()) {
    case FormulaKind::kType:
    case FormulaKind::kAction:
    case FormulaKind::kEqual:
    case FormulaKind::kSim:
    case FormulaKind::kLess:
    case FormulaKind::kSucc:
    case FormulaKind::kTrue:
    case FormulaKind::kFalse:
      return true;
    default:
      return false;
  }
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  return x.kind == y.kind && x.type == y.type && x.action == y.action &&
         x.x == y.x && x.y == y.y && x.count == y.count && x.kids == y.kids;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class FormulaParser {
 public:
  FormulaParser(std::string_view text, const Alphabet& alphabet,
                const std::vector<std::string>& free_vars)
      : sc_(text), alphabet_(alphabet) {
    for (const auto& v : free_vars) scope_.push_back(v);
  }

  Formula parse() {
    Formula f = iff();
    if (!sc_.at_end()) sc_.fail("unexpected trailing input");
    return f;
  }

 private:
  Formula iff() {
    Formula lhs = implies();
    while (sc_.accept("<->")) lhs = Formula::Iff(lhs, implies());
    return lhs;
  }

  Formula implies() {
    Formula lhs = disj();
    if (sc_.accept("->")) return Formula::Implies(lhs, implies());
    return lhs;
  }

  Formula disj() {
    Formula lhs = conj();
    while (sc_.accept("|")) lhs = Formula::Or(lhs, conj());
    return lhs;
  }

  Formula conj() {
    Formula lhs = unary();
    while (sc_.accept("&")) lhs = Formula::And(lhs, unary());
    return lhs;
  }

  Formula unary() {
    if (sc_.accept("!")) return Formula::Not(unary());
    return primary();
  }

  std::string variable_use() {
    std::size_t at = sc_.pos();
    std::string v = sc_.ident();
    if (is_reserved(v)) throw ParseError("'" + v + "' is not a variable", at);
    if (std::find(scope_.begin(), scope_.end(), v) == scope_.end())
      throw ParseError("unbound variable '" + v + "'", at);
    return v;
  }

  std::string variable_binding() {
    std::size_t at = sc_.pos();
    std::string v = sc_.ident();
    if (is_reserved(v)) throw ParseError("'" + v + "' is not a variable", at);
    return v;
  }

  Formula quantified(FormulaKind kind, std::uint32_t m) {
    std::string v = variable_binding();
    sc_.expect(".");
    scope_.push_back(v);
    Formula body = iff();
    scope_.pop_back();
    switch (kind) {
      case FormulaKind::kExists: return Formula::Exists(v, body);
      case FormulaKind::kForall: return Formula::Forall(v, body);
      case FormulaKind::kAtLeast: return Formula::AtLeast(m, v, body);
      default: return Formula::Exactly(m, v, body);
    }
  }

  Formula primary() {
    if (sc_.accept("(")) {
      Formula f = iff();
      sc_.expect(")");
      return f;
    }
    if (sc_.accept("+1")) {
      sc_.expect("(");
      std::string x = variable_use();
      sc_.expect(",");
      std::string y = variable_use();
      sc_.expect(")");
      return Formula::Succ(x, y);
    }
    std::size_t at = sc_.pos();
    std::string w = sc_.ident();
    if (w == "true") return Formula::True();
    if (w == "false") return Formula::False();
    if (w == "E" || w == "A") {
      if (w == "E" && sc_.accept(">=")) {
        auto m = static_cast<std::uint32_t>(sc_.number());
        return quantified(FormulaKind::kAtLeast, m);
      }
      if (w == "E" && sc_.accept("==")) {
        auto m = static_cast<std::uint32_t>(sc_.number());
        return quantified(FormulaKind::kExactly, m);
      }
      return quantified(w == "E" ? FormulaKind::kExists : FormulaKind::kForall,
                        0);
    }
    if (sc_.peek() == '(') {
      sc_.expect("(");
      std::string v = variable_use();
      sc_.expect(")");
      if (auto t = parse_type_name(w)) return Formula::Type(*t, v);
      if (!alphabet_.find(w)) throw ParseError("unknown action '" + w + "'", at);
      return Formula::Action(w, v);
    }
    // Binary relation with `w` as left operand.
    if (is_reserved(w)) throw ParseError("'" + w + "' is not a variable", at);
    if (std::find(scope_.begin(), scope_.end(), w) == scope_.end())
      throw ParseError("unbound variable '" + w + "'", at);
    if (sc_.accept("=")) return Formula::Equal(w, variable_use());
    if (sc_.accept("~")) return Formula::Sim(w, variable_use());
    if (sc_.accept("<")) return Formula::Less(w, variable_use());
    sc_.fail("expected '=', '~' or '<'");
  }

  Scanner sc_;
  const Alphabet& alphabet_;
  std::vector<std::string> scope_;
};

}  // namespace

Formula parse_formula(std::string_view text, const Alphabet& alphabet,
                      const std::vector<std::string>& free_vars) {
  return FormulaParser(text, alphabet, free_vars).parse();
}

std::string to_string(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::kTrue: return "true";
    case FormulaKind::kFalse: return "false";
    case FormulaKind::kType:
      return std::string(type_name(f.type())) + "(" + f.var() + ")";
    case FormulaKind::kAction: return f.action() + "(" + f.var() + ")";
    case FormulaKind::kEqual: return f.var() + " = " + f.var2();
    case FormulaKind::kSim: return f.var() + " ~ " + f.var2();
    case FormulaKind::kLess: return f.var() + " < " + f.var2();
    case FormulaKind::kSucc: return "+1(" + f.var() + ", " + f.var2() + ")";
    case FormulaKind::kNot: {
      const Formula& c = f.child(0);
      std::string inner = to_string(c);
      bool bare = c.kind() != FormulaKind::kEqual && c.kind() != FormulaKind::kSim &&
                  c.kind() != FormulaKind::kLess;
      return bare ? "!" + inner : "!(" + inner + ")";
    }
    case FormulaKind::kOr:
      return "(" + to_string(f.child(0)) + " | " + to_string(f.child(1)) + ")";
    case FormulaKind::kAnd:
      return "(" + to_string(f.child(0)) + " & " + to_string(f.child(1)) + ")";
    case FormulaKind::kImplies:
      return "(" + to_string(f.child(0)) + " -> " + to_string(f.child(1)) + ")";
    case FormulaKind::kIff:
      return "(" + to_string(f.child(0)) + " <-> " + to_string(f.child(1)) +
             ")";
    case FormulaKind::kExists:
      return "(E " + f.var() + ". " + to_string(f.child(0)) + ")";
    case FormulaKind::kForall:
      return "(A " + f.var() + ". " + to_string(f.child(0)) + ")";
    case FormulaKind::kAtLeast:
      return "(E>=" + std::to_string(f.count()) + " " + f.var() + ". " +
             to_string(f.child(0)) + ")";
    case FormulaKind::kExactly:
      return "(E==" + std::to_string(f.count()) + " " + f.var() + ". " +
             to_string(f.child(0)) + ")";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Syntactic utilities

namespace {

void collect_free(const Formula& f, std::vector<std::string>& bound,
                  std::set<std::string>& out) {
  auto use = [&](const std::string& v) {
    if (std::find(bound.begin(), bound.end(), v) == bound.end()) out.insert(v);
  };
  switch (f.kind()) {
    case FormulaKind::kTrue:
    case FormulaKind::kFalse:
      return;
    case FormulaKind::kType:
    case FormulaKind::kAction:
      use(f.var());
      return;
    case FormulaKind::kEqual:
    case FormulaKind::kSim:
    case FormulaKind::kLess:
    case FormulaKind::kSucc:
      use(f.var());
      use(f.var2());
      return;
    default:
      break;
  }
  if (f.is_quantifier()) {
    bound.push_back(f.var());
    collect_free(f.child(0), bound, out);
    bound.pop_back();
    return;
  }
  for (std::size_t i = 0; i < f.arity(); ++i) collect_free(f.child(i), bound, out);
}

void collect_vars(const Formula& f, std::set<std::string>& out) {
  if (!f.var().empty()) out.insert(f.var());
  if (!f.var2().empty()) out.insert(f.var2());
  for (std::size_t i = 0; i < f.arity(); ++i) collect_vars(f.child(i), out);
}

}  // namespace

std::set<std::string> free_variables(const Formula& f) {
  std::vector<std::string> bound;
  std::set<std::string> out;
  collect_free(f, bound, out);
  return out;
}

std::set<std::string> actions_used(const Formula& f) {
  std::set<std::string> out;
  std::function<void(const Formula&)> go = [&](const Formula& g) {
    if (g.kind() == FormulaKind::kAction) out.insert(g.action());
    for (std::size_t i = 0; i < g.arity(); ++i) go(g.child(i));
  };
  go(f);
  return out;
}

namespace {

// Renames free occurrences of `from` to `to`; `to` is assumed fresh.
Formula rename_free(const Formula& f, const std::string& from,
                    const std::string& to) {
  auto r = [&](const std::string& v) { return v == from ? to : v; };
  switch (f.kind()) {
    case FormulaKind::kTrue:
    case FormulaKind::kFalse:
      return f;
    case FormulaKind::kType: return Formula::Type(f.type(), r(f.var()));
    case FormulaKind::kAction: return Formula::Action(f.action(), r(f.var()));
    case FormulaKind::kEqual: return Formula::Equal(r(f.var()), r(f.var2()));
    case FormulaKind::kSim: return Formula::Sim(r(f.var()), r(f.var2()));
    case FormulaKind::kLess: return Formula::Less(r(f.var()), r(f.var2()));
    case FormulaKind::kSucc: return Formula::Succ(r(f.var()), r(f.var2()));
    case FormulaKind::kNot: return Formula::Not(rename_free(f.child(0), from, to));
    case FormulaKind::kOr:
      return Formula::Or(rename_free(f.child(0), from, to),
                         rename_free(f.child(1), from, to));
    case FormulaKind::kAnd:
      return Formula::And(rename_free(f.child(0), from, to),
                          rename_free(f.child(1), from, to));
    case FormulaKind::kImplies:
      return Formula::Implies(rename_free(f.child(0), from, to),
                              rename_free(f.child(1), from, to));
    case FormulaKind::kIff:
      return Formula::Iff(rename_free(f.child(0), from, to),
                          rename_free(f.child(1), from, to));
    default:
      break;
  }
  if (f.var() == from) return f;  // shadowed
  Formula body = rename_free(f.child(0), from, to);
  switch (f.kind()) {
    case FormulaKind::kExists: return Formula::Exists(f.var(), body);
    case FormulaKind::kForall: return Formula::Forall(f.var(), body);
    case FormulaKind::kAtLeast: return Formula::AtLeast(f.count(), f.var(), body);
    default: return Formula::Exactly(f.count(), f.var(), body);
  }
}

class CountingExpander {
 public:
  explicit CountingExpander(const Formula& root) { collect_vars(root, used_); }

  Formula run(const Formula& f) {
    switch (f.kind()) {
      case FormulaKind::kNot: return Formula::Not(run(f.child(0)));
      case FormulaKind::kOr: return Formula::Or(run(f.child(0)), run(f.child(1)));
      case FormulaKind::kAnd:
        return Formula::And(run(f.child(0)), run(f.child(1)));
      case FormulaKind::kImplies:
        return Formula::Implies(run(f.child(0)), run(f.child(1)));
      case FormulaKind::kIff:
        return Formula::Iff(run(f.child(0)), run(f.child(1)));
      case FormulaKind::kExists: return Formula::Exists(f.var(), run(f.child(0)));
      case FormulaKind::kForall: return Formula::Forall(f.var(), run(f.child(0)));
      case FormulaKind::kAtLeast:
        return at_least(f.count(), f.var(), run(f.child(0)));
      case FormulaKind::kExactly: {
        Formula body = run(f.child(0));
        return Formula::And(at_least(f.count(), f.var(), body),
                            Formula::Not(at_least(f.count() + 1, f.var(), body)));
      }
      default:
        return f;
    }
  }

 private:
  Formula at_least(std::uint32_t m, const std::string& y, const Formula& body) {
    if (m == 0) return Formula::True();
    if (m == 1) return Formula::Exists(y, body);
    std::vector<std::string> ys;
    for (std::uint32_t i = 1; i <= m; ++i) ys.push_back(fresh(y));
    std::vector<Formula> parts;
    for (std::uint32_t i = 0; i < m; ++i)
      for (std::uint32_t j = i + 1; j < m; ++j)
        parts.push_back(Formula::Not(Formula::Equal(ys[i], ys[j])));
    for (std::uint32_t i = 0; i < m; ++i)
      parts.push_back(rename_free(body, y, ys[i]));
    Formula acc = Formula::AndAll(parts);
    for (std::uint32_t i = m; i-- > 0;) acc = Formula::Exists(ys[i], acc);
    return acc;
  }

  std::string fresh(const std::string& base) {
    for (std::size_t k = 1;; ++k) {
      std::string c = base + "_" + std::to_string(k);
      if (used_.insert(c).second) return c;
    }
  }

  std::set<std::string> used_;
};

}  // namespace

Formula expand_counting(const Formula& f) { return CountingExpander(f).run(f); }

std::size_t quantifier_rank(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::kExists:
    case FormulaKind::kForall:
      return 1 + quantifier_rank(f.child(0));
    case FormulaKind::kAtLeast:
      return f.count() == 0 ? 0 : f.count() + quantifier_rank(f.child(0));
    case FormulaKind::kExactly:
      return f.count() + 1 + quantifier_rank(f.child(0));
    default:
      break;
  }
  std::size_t r = 0;
  for (std::size_t i = 0; i < f.arity(); ++i)
    r = std::max(r, quantifier_rank(f.child(i)));
  return r;
}

bool fragment_check(const Formula& f, RelationSet allowed) {
  switch (f.kind()) {
    case FormulaKind::kSim: return allowed.contains(Relation::kSim);
    case FormulaKind::kLess: return allowed.contains(Relation::kLess);
    case FormulaKind::kSucc: return allowed.contains(Relation::kSucc);
    default:
      break;
  }
  for (std::size_t i = 0; i < f.arity(); ++i)
    if (!fragment_check(f.child(i), allowed)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

struct CNode {
  FormulaKind kind;
  ProcType type = ProcType::kSys;
  int letter = -1;  // -1: action not in alphabet (always false)
  int x = -1;
  int y = -1;
  std::uint32_t count = 0;
  int a = -1;
  int b = -1;
};

// Flattened view of S_(ℙ,w). Elements 0..np-1 are processes, np.. are
// positions 1..n.
struct Structure {
  std::size_t np = 0;
  std::vector<int> cls;       // class index (process index) per element
  std::vector<int> type;      // ProcType per element, -1 for positions
  std::vector<int> letter;    // letter per element, -1 for processes
  std::vector<std::uint32_t> pos;  // 1-based position, 0 for processes

  explicit Structure(const Execution& x) {
    const auto& u = x.universe();
    std::unordered_map<ProcessId, int> index;
    for (ProcType t : kAllTypes)
      for (ProcessId p : u.of(t)) {
        index[p] = static_cast<int>(cls.size());
        cls.push_back(static_cast<int>(cls.size()));
        type.push_back(static_cast<int>(t));
        letter.push_back(-1);
        pos.push_back(0);
      }
    np = cls.size();
    std::uint32_t i = 0;
    for (const Event& ev : x.events()) {
      cls.push_back(index.at(ev.process));
      type.push_back(-1);
      letter.push_back(ev.action);
      pos.push_back(++i);
    }
  }
  std::size_t size() const { return cls.size(); }
};

}  // namespace

struct Evaluator::Impl {
  Alphabet alphabet;
  std::vector<CNode> nodes;
  std::vector<std::string> free_slots;
  int slots = 0;
  int root = -1;

  int compile(const Formula& f, std::vector<std::pair<std::string, int>>& env,
              int depth) {
    auto slot_of = [&](const std::string& v) {
      for (auto it = env.rbegin(); it != env.rend(); ++it)
        if (it->first == v) return it->second;
      throw InvalidArgument("free variable '" + v + "' not interpreted");
    };
    CNode n{f.kind()};
    switch (f.kind()) {
      case FormulaKind::kTrue:
      case FormulaKind::kFalse:
        break;
      case FormulaKind::kType:
        n.type = f.type();
        n.x = slot_of(f.var());
        break;
      case FormulaKind::kAction: {
        auto id = alphabet.find(f.action());
        n.letter = id ? static_cast<int>(*id) : -1;
        n.x = slot_of(f.var());
        break;
      }
      case FormulaKind::kEqual:
      case FormulaKind::kSim:
      case FormulaKind::kLess:
      case FormulaKind::kSucc:
        n.x = slot_of(f.var());
        n.y = slot_of(f.var2());
        break;
      default:
        if (f.is_quantifier()) {
          n.x = depth;
          n.count = f.count();
          slots = std::max(slots, depth + 1);
          env.emplace_back(f.var(), depth);
          n.a = compile(f.child(0), env, depth + 1);
          env.pop_back();
        } else {
          n.a = compile(f.child(0), env, depth);
          if (f.arity() > 1) n.b = compile(f.child(1), env, depth);
        }
    }
    nodes.push_back(n);
    return static_cast<int>(nodes.size()) - 1;
  }

  bool eval(int id, const Structure& s, std::vector<int>& val) const {
    const CNode& n = nodes[static_cast<std::size_t>(id)];
    switch (n.kind) {
      case FormulaKind::kTrue: return true;
      case FormulaKind::kFalse: return false;
      case FormulaKind::kType: {
        int e = val[n.x];
        return s.type[e] == static_cast<int>(n.type);
      }
      case FormulaKind::kAction: {
        int e = val[n.x];
        return n.letter >= 0 && s.letter[e] == n.letter;
      }
      case FormulaKind::kEqual: return val[n.x] == val[n.y];
      case FormulaKind::kSim: return s.cls[val[n.x]] == s.cls[val[n.y]];
      case FormulaKind::kLess: {
        auto px = s.pos[val[n.x]], py = s.pos[val[n.y]];
        return px != 0 && py != 0 && px < py;
      }
      case FormulaKind::kSucc: {
        auto px = s.pos[val[n.x]], py = s.pos[val[n.y]];
        return px != 0 && py != 0 && py == px + 1;
      }
      case FormulaKind::kNot: return !eval(n.a, s, val);
      case FormulaKind::kOr: return eval(n.a, s, val) || eval(n.b, s, val);
      case FormulaKind::kAnd: return eval(n.a, s, val) && eval(n.b, s, val);
      case FormulaKind::kImplies: return !eval(n.a, s, val) || eval(n.b, s, val);
      case FormulaKind::kIff: return eval(n.a, s, val) == eval(n.b, s, val);
      case FormulaKind::kExists:
        for (std::size_t e = 0; e < s.size(); ++e) {
          val[n.x] = static_cast<int>(e);
          if (eval(n.a, s, val)) return true;
        }
        return false;
      case FormulaKind::kForall:
        for (std::size_t e = 0; e < s.size(); ++e) {
          val[n.x] = static_cast<int>(e);
          if (!eval(n.a, s, val)) return false;
        }
        return true;
      case FormulaKind::kAtLeast:
      case FormulaKind::kExactly: {
        if (n.kind == FormulaKind::kAtLeast && n.count == 0) return true;
        std::uint32_t limit =
            n.kind == FormulaKind::kAtLeast ? n.count : n.count + 1;
        std::uint32_t seen = 0;
        for (std::size_t e = 0; e < s.size() && seen < limit; ++e) {
          val[n.x] = static_cast<int>(e);
          if (eval(n.a, s, val)) ++seen;
        }
        return n.kind == FormulaKind::kAtLeast ? seen >= n.count
                                               : seen == n.count;
      }
    }
    return false;
  }
};

Evaluator::Evaluator(const Formula& f, const Alphabet& alphabet)
    : impl_(std::make_unique<Impl>()) {
  impl_->alphabet = alphabet;
  std::vector<std::pair<std::string, int>> env;
  int next = 0;
  for (const auto& v : free_variables(f)) {
    impl_->free_slots.push_back(v);
    env.emplace_back(v, next++);
  }
  impl_->slots = next;
  impl_->root = impl_->compile(f, env, next);
}

Evaluator::~Evaluator() = default;
Evaluator::Evaluator(Evaluator&&) noexcept = default;
Evaluator& Evaluator::operator=(Evaluator&&) noexcept = default;

bool Evaluator::operator()(const Execution& x,
                           const Interpretation& interp) const {
  if (!(x.alphabet() == impl_->alphabet))
    throw InvalidArgument("execution is over a different alphabet");
  Structure s(x);
  std::vector<int> val(static_cast<std::size_t>(impl_->slots), -1);
  for (std::size_t i = 0; i < impl_->free_slots.size(); ++i) {
    const auto& name = impl_->free_slots[i];
    auto it = interp.find(name);
    if (it == interp.end())
      throw InvalidArgument("free variable '" + name + "' not interpreted");
    const Element& el = it->second;
    int e = -1;
    if (el.kind == Element::Kind::kPosition) {
      if (el.value < 1 || el.value > x.length())
        throw InvalidArgument("position " + std::to_string(el.value) +
                              " outside the execution");
      e = static_cast<int>(s.np + el.value - 1);
    } else {
      std::size_t k = 0;
      for (ProcType t : kAllTypes)
        for (ProcessId p : x.universe().of(t)) {
          if (p == el.value) e = static_cast<int>(k);
          ++k;
        }
      if (e < 0)
        throw InvalidArgument("process " + std::to_string(el.value) +
                              " outside the universe");
    }
    val[i] = e;
  }
  return impl_->eval(impl_->root, s, val);
}

bool model_check(const Execution& x, const Formula& f,
                 const Interpretation& interp) {
  return Evaluator(f, x.alphabet())(x, interp);
}

bool similar(const Execution& a, const Execution& b) {
  if (!(a.universe() == b.universe()))
    throw InvalidArgument("executions have different universes");
  if (a.length() != b.length()) return false;
  auto ea = a.events();
  auto eb = b.events();
  std::sort(ea.begin(), ea.end());
  std::sort(eb.begin(), eb.end());
  return ea == eb;
}

}  // namespace pvg
