// pvg: command-line front end.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "pvg/cutoff.hpp"
#include "pvg/errors.hpp"
#include "pvg/io.hpp"
#include "pvg/reductions.hpp"
#include "pvg/solver.hpp"
#include "pvg/version.hpp"

using nlohmann::json;
using namespace pvg;

namespace {

enum Exit : int { kOk = 0, kOther = 1, kParse = 2, kBudget = 3, kInconclusive = 4 };

struct Global {
  bool quiet = false;
  std::uint64_t seed = 0x5eed;
  unsigned jobs = 1;
  bool timings = false;
  std::string output;
};

// Inputs folded into the report digest (FNV-1a).
struct Digest {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  void add(std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
  }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }
};

class Runner {
 public:
  explicit Runner(Global& g) : g_(g), start_(std::chrono::steady_clock::now()) {}

  std::string input(const std::string& path) {
    std::string text = read_file(path);
    digest_.add(text);
    return text;
  }
  void arg(std::string_view name, const std::string& value) {
    digest_.add(name);
    digest_.add(value);
  }

  // Raw artifact (game, normal form, play, execution, formula).
  void artifact(const std::string& text) { emit(text); }

  // Report wrapped with command, digest and version.
  void report(const std::string& command, const json& result,
              const std::string& token) {
    if (g_.quiet) {
      emit(token + "\n");
      return;
    }
    json r = {{"command", command},
              {"inputs_digest", digest_.hex()},
              {"result", result},
              {"version", kVersion}};
    emit(r.dump(2, ' ', true) + "\n");
  }

  ~Runner() {
    if (g_.timings) {
      double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
      std::cerr << json{{"timings", {{"seconds", s}}}}.dump() << "\n";
    }
  }

 private:
  void emit(const std::string& text) {
    if (g_.output.empty())
      std::cout << text << std::flush;
    else
      write_file_atomic(g_.output, text);
  }

  Global& g_;
  Digest digest_;
  std::chrono::steady_clock::time_point start_;
};

bool looks_like_json(const std::string& text) {
  auto p = text.find_first_not_of(" \t\r\n");
  return p != std::string::npos && text[p] == '{';
}

// `lib:NAME` or a game JSON file.
Game load_game(Runner& r, const std::string& spec) {
  if (spec.rfind("lib:", 0) == 0) {
    r.arg("game", spec);
    return library_game(spec.substr(4));
  }
  return game_from_json(r.input(spec));
}

struct FormulaArgs {
  std::string file;
  std::string text;
  std::string alphabet;
  void add(CLI::App* app) {
    app->add_option("file", file, "formula file (alphabet line, then the formula)");
    app->add_option("--formula", text, "formula text instead of a file");
    app->add_option("--alphabet", alphabet, "alphabet for --formula, e.g. 'sys: a; env: b;'");
  }
  FormulaFile load(Runner& r) const {
    if (!text.empty()) {
      r.arg("formula", text);
      r.arg("alphabet", alphabet);
      if (alphabet.empty()) throw InvalidArgument("--formula needs --alphabet");
      Alphabet a = parse_alphabet(alphabet);
      return {a, parse_formula(text, a)};
    }
    if (file.empty()) throw InvalidArgument("a formula file or --formula is required");
    return parse_formula_file(r.input(file));
  }
};

struct InstanceArgs {
  std::uint32_t ks = 0, ke = 0, kse = 0;
  std::string config;
  std::uint32_t caps_tokens = kUnlimited, caps_letters = kUnlimited;
  std::uint64_t budget = default_budget();
  void add(CLI::App* app) {
    app->add_option("--ks", ks, "system processes");
    app->add_option("--ke", ke, "environment processes");
    app->add_option("--kse", kse, "shared processes");
    app->add_option("--config", config, "initial configuration JSON file");
    add_caps(app);
  }
  void add_caps(CLI::App* app) {
    app->add_option("--caps-tokens", caps_tokens, "max tokens moved per transition");
    app->add_option("--caps-letters", caps_letters, "max letters per token per transition");
    app->add_option("--budget", budget, "memo-entry budget");
  }
  MoveCaps caps() const { return {caps_tokens, caps_letters}; }
  Configuration initial(Runner& r, const Game& g) const {
    if (!config.empty()) {
      Configuration c = config_from_json(r.input(config), g.alphabet());
      g.check_shape(c);
      return c;
    }
    r.arg("triple", std::to_string(ks) + "," + std::to_string(ke) + "," + std::to_string(kse));
    return g.initial(ks, ke, kse);
  }
  void digest(Runner& r) const {
    r.arg("caps", std::to_string(caps_tokens) + "," + std::to_string(caps_letters));
  }
};

json parse_json(const std::string& s) { return json::parse(s); }

std::string winner_token(Winner w) { return std::string(winner_name(w)); }

StrategyFn load_strategy(Runner& r, const std::string& spec, const Game& g,
                         const std::string& machine, std::size_t steps) {
  if (spec == "tcm") {
    if (machine.empty()) throw InvalidArgument("--strategy tcm needs --machine");
    TwoCounterMachine m = parse_2cm(r.input(machine));
    auto run = tcm_run_bounded(m, steps);
    if (!run) throw InvalidArgument("machine does not halt within " + std::to_string(steps) + " steps");
    return tcm_strategy(m, *run);
  }
  for (const auto& n : library_names())
    if (spec == n) {
      r.arg("strategy", spec);
      return library_strategy(spec, g);
    }
  return as_function(strategy_from_json(r.input(spec), g));
}

int run_check(Global& gl, const FormulaArgs& fa, const std::string& exec_file) {
  Runner r(gl);
  ExecutionFile ex = parse_execution_file(r.input(exec_file));
  FormulaFile ff = fa.load(r);
  if (!(ff.alphabet == ex.alphabet))
    throw ParseError("formula and execution use different alphabets");
  bool v = model_check(ex.execution, ff.formula);
  r.report("check", {{"value", v}}, v ? "true" : "false");
  return kOk;
}

int run_normalize(Global& gl, const FormulaArgs& fa, std::optional<unsigned> B,
                  std::optional<unsigned> mcap, std::uint64_t budget) {
  Runner r(gl);
  FormulaFile ff = fa.load(r);
  unsigned th = threshold(ff.formula);
  NormalizeOptions o;
  o.budget = budget;
  o.seed = gl.seed;
  NormalForm nf = normalize(ff.formula, ff.alphabet, B.value_or(th), mcap.value_or(th), o);
  r.artifact(nf_to_json(nf, ff.alphabet));
  return kOk;
}

int run_sat(Global& gl, const FormulaArgs& fa, std::optional<unsigned> cap) {
  Runner r(gl);
  FormulaFile ff = fa.load(r);
  auto w = satisfiable(ff.formula, ff.alphabet, cap);
  if (!w) {
    r.report("sat", {{"satisfiable", false}}, "unsat");
    return kOk;
  }
  r.report("sat", {{"satisfiable", true}, {"witness", to_string(*w)}}, "sat");
  return kOk;
}

int run_compile(Global& gl, const FormulaArgs& fa, bool expl, std::optional<unsigned> B,
                std::optional<unsigned> mcap, std::uint64_t budget) {
  Runner r(gl);
  FormulaFile ff = fa.load(r);
  if (!expl) {
    r.artifact(game_to_json(formula_to_game(ff.formula, ff.alphabet, B)));
    return kOk;
  }
  NormalizeOptions o;
  o.budget = budget;
  o.seed = gl.seed;
  r.artifact(game_to_json(formula_to_game_explicit(ff.formula, ff.alphabet, B, mcap, o)));
  return kOk;
}

int run_invert(Global& gl, const std::string& game) {
  Runner r(gl);
  Game g = load_game(r, game);
  Formula f = g.is_explicit() ? game_to_formula(g) : *g.formula();
  r.artifact(to_string(g.alphabet()) + "\n" + to_string(f) + "\n");
  return kOk;
}

int run_solve(Global& gl, const std::string& game, const InstanceArgs& ia,
              const std::string& emit_strategy) {
  Runner r(gl);
  Game g = load_game(r, game);
  Configuration c0 = ia.initial(r, g);
  ia.digest(r);
  SolveOptions o;
  o.caps = ia.caps();
  o.budget = ia.budget;
  o.extract_strategy = !emit_strategy.empty();
  json inst = parse_json(config_to_json(c0, g.alphabet()));
  try {
    SolveResult res = solve(g, c0, o);
    if (res.strategy && !emit_strategy.empty())
      write_file_atomic(emit_strategy, strategy_to_json(*res.strategy, g.alphabet()));
    json out = {{"winner", winner_name(res.verdict.winner)},
                {"explored", res.verdict.explored},
                {"initial", inst},
                {"capped", !ia.caps().unlimited()}};
    r.report("solve", out, winner_token(res.verdict.winner));
    return kOk;
  } catch (const BudgetExceeded& e) {
    r.report("solve", {{"winner", "inconclusive"}, {"reason", e.what()}, {"initial", inst}},
             "inconclusive");
    return kInconclusive;
  }
}

int run_decide(Global& gl, const std::string& input, std::uint32_t ke, std::uint32_t kse,
               const InstanceArgs& ia, std::optional<std::uint64_t> n_max,
               std::optional<std::uint64_t> K) {
  Runner r(gl);
  std::optional<Game> g;
  DecideOptions o;
  o.K = K;
  if (input.rfind("lib:", 0) == 0) {
    g = load_game(r, input);
  } else {
    std::string text = r.input(input);
    if (looks_like_json(text)) {
      g = game_from_json(text);
    } else {
      FormulaFile ff = parse_formula_file(text);
      g = formula_to_game(ff.formula, ff.alphabet);
      if (!o.K) o.K = formula_constant_bound(ff.formula);
    }
  }
  if (!g->is_explicit() && !o.K) o.K = formula_constant_bound(*g->formula());
  r.arg("k", std::to_string(ke) + "," + std::to_string(kse));
  ia.digest(r);
  o.caps = ia.caps();
  o.budget = ia.budget;
  o.n_max = n_max;
  o.jobs = gl.jobs;
  Decision d = decide(*g, ke, kse, o);
  json out = {{"K", d.bound.K},
              {"Max", d.bound.Max},
              {"hatN", d.bound.hatN},
              {"hatN_saturated", d.bound.saturated},
              {"instances_solved", d.instances_solved},
              {"decision", decision_name(d.kind)}};
  if (d.witness) out["witness"] = *d.witness;
  if (d.kind == DecisionKind::kEmptyUpTo) out["n_max"] = d.searched_up_to;
  r.report("decide", out, std::string(decision_name(d.kind)));
  return d.kind == DecisionKind::kInconclusive ? kInconclusive : kOk;
}

int run_scan(Global& gl, const std::string& game, const std::string& axis,
             const std::vector<std::uint32_t>& fixed, std::uint32_t from, std::uint32_t to,
             const InstanceArgs& ia) {
  Runner r(gl);
  Game g = load_game(r, game);
  Axis ax = parse_axis(axis);
  Triple f{0, 0, 0};
  if (!fixed.empty()) {
    if (fixed.size() != 3) throw InvalidArgument("--fixed takes three numbers s,e,se");
    f = {fixed[0], fixed[1], fixed[2]};
  }
  r.arg("scan", axis + ":" + std::to_string(from) + ".." + std::to_string(to));
  r.arg("fixed", std::to_string(f[0]) + "," + std::to_string(f[1]) + "," + std::to_string(f[2]));
  ia.digest(r);
  ScanOptions o;
  o.caps = ia.caps();
  o.budget = ia.budget;
  o.jobs = gl.jobs;
  ScanResult s = scan_winning(g, ax, f, from, to, o);
  json winners = json::array();
  std::string token;
  for (const auto& w : s.winners) {
    winners.push_back(w ? std::string(winner_name(*w)) : "inconclusive");
    token += w ? (*w == Winner::kSystem ? 'W' : 'L') : '?';
  }
  json out = {{"axis", axis_name(ax)},
              {"fixed", {f[0], f[1], f[2]}},
              {"from", from},
              {"winners", winners},
              {"eventually_constant", s.eventually_constant}};
  if (s.stable_from) out["stable_from"] = *s.stable_from;
  r.report("scan", out, token);
  return std::any_of(s.winners.begin(), s.winners.end(), [](auto& w) { return !w; })
             ? kInconclusive
             : kOk;
}

int run_simulate(Global& gl, const std::string& game, const std::string& play_file,
                 const std::string& exec_file, const std::string& strategy,
                 const InstanceArgs& ia) {
  Runner r(gl);
  Game g = load_game(r, game);
  int given = !play_file.empty() + !exec_file.empty() + !strategy.empty();
  if (given != 1) throw InvalidArgument("give exactly one of --play, --execution, --strategy");
  if (!play_file.empty()) {
    Play p = play_from_json(r.input(play_file), g);
    Execution w = play_to_execution(p, g);
    r.artifact(to_string(g.alphabet()) + "\n" + to_string(w) + "\n");
  } else if (!exec_file.empty()) {
    ExecutionFile ex = parse_execution_file(r.input(exec_file));
    if (!(ex.alphabet == g.alphabet())) throw ParseError("execution alphabet differs from the game");
    r.artifact(play_to_json(execution_to_play(ex.execution, g), g.alphabet()));
  } else {
    StrategyFn f = load_strategy(r, strategy, g, "", 0);
    Configuration c0 = ia.initial(r, g);
    std::mt19937_64 rng(gl.seed);
    Play p = induced_play(g, c0, f, ia.caps(), [&](std::size_t, std::size_t n) {
      return static_cast<std::size_t>(rng() % n);
    });
    r.artifact(play_to_json(p, g.alphabet()));
  }
  return kOk;
}

int run_encode(Global& gl, const std::string& machine_file, std::optional<std::size_t> run_steps) {
  Runner r(gl);
  TwoCounterMachine m = parse_2cm(r.input(machine_file));
  if (run_steps) {
    auto run = tcm_run_bounded(m, *run_steps);
    json out = {{"halts", run.has_value()}};
    if (run) {
      json steps = json::array();
      for (const TcmStep& s : *run)
        steps.push_back({{"transition", m.transitions[s.transition].name},
                         {"state", s.after.state},
                         {"c1", s.after.c1},
                         {"c2", s.after.c2}});
      out["run"] = steps;
    }
    r.report("encode-2cm", out, run ? "halts" : "no-run");
    return kOk;
  }
  r.artifact(game_to_json(encode_2cm(m)));
  return kOk;
}

int run_verify(Global& gl, const std::string& game, const std::string& strategy,
               const std::string& machine, std::size_t steps, const InstanceArgs& ia) {
  Runner r(gl);
  Game g = load_game(r, game);
  StrategyFn f = load_strategy(r, strategy, g, machine, steps);
  Configuration c0 = ia.initial(r, g);
  ia.digest(r);
  VerifyResult v = verify_strategy(g, c0, f, ia.caps(), ia.budget);
  json out = {{"ok", v.ok}, {"explored", v.explored}, {"capped", !ia.caps().unlimited()}};
  if (!v.ok) out["reason"] = v.reason;
  if (v.counterexample) out["counterexample"] = parse_json(play_to_json(*v.counterexample, g.alphabet()));
  r.report("verify", out, v.ok ? "true" : "false");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parameterized synthesis for FO[~] over data words"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();
  Global gl;
  app.add_flag("-q,--quiet", gl.quiet, "print only the verdict token");
  app.add_option("--seed", gl.seed, "seed for randomized procedures");
  app.add_option("-j,--jobs", gl.jobs, "worker threads for decide/scan")->check(CLI::PositiveNumber);
  app.add_flag("--timings", gl.timings, "print wall-clock time to stderr");
  app.add_option("-o,--output", gl.output, "write the result to a file");

  std::function<int()> action;
  NormalizeOptions nopt;

  auto* check = app.add_subcommand("check", "model-check a formula on an execution");
  FormulaArgs check_f;
  std::string check_exec;
  check_f.add(check);
  check->add_option("execution", check_exec, "execution file")->required();
  check->callback([&] { action = [&] { return run_check(gl, check_f, check_exec); }; });

  std::optional<unsigned> B, mcap;
  std::uint64_t nf_budget = nopt.budget;

  auto* norm = app.add_subcommand("normalize", "semantic normal form of a sentence");
  FormulaArgs norm_f;
  norm_f.add(norm);
  norm->add_option("--B", B, "bound (default: threshold)");
  norm->add_option("--mcap", mcap, "class-count cap (default: threshold)");
  norm->add_option("--budget", nf_budget, "maximal table size");
  norm->callback([&] { action = [&] { return run_normalize(gl, norm_f, B, mcap, nf_budget); }; });

  auto* sat = app.add_subcommand("sat", "find a finite model");
  FormulaArgs sat_f;
  std::optional<unsigned> sat_cap;
  sat_f.add(sat);
  sat->add_option("--cap", sat_cap, "tokens per profile searched");
  sat->callback([&] { action = [&] { return run_sat(gl, sat_f, sat_cap); }; });

  auto* comp = app.add_subcommand("compile", "formula to game");
  FormulaArgs comp_f;
  bool comp_explicit = false;
  comp_f.add(comp);
  comp->add_flag("--explicit", comp_explicit, "emit explicit rows from the normal form");
  comp->add_option("--B", B, "bound");
  comp->add_option("--mcap", mcap, "class-count cap for --explicit");
  comp->add_option("--budget", nf_budget, "maximal table size for --explicit");
  comp->callback([&] {
    action = [&] { return run_compile(gl, comp_f, comp_explicit, B, mcap, nf_budget); };
  });

  auto* inv = app.add_subcommand("invert", "game to formula");
  std::string inv_game;
  inv->add_option("game", inv_game, "game file or lib:NAME")->required();
  inv->callback([&] { action = [&] { return run_invert(gl, inv_game); }; });

  auto* solv = app.add_subcommand("solve", "solve one initial configuration");
  std::string solve_game, emit_strategy;
  InstanceArgs solve_i;
  solv->add_option("game", solve_game, "game file or lib:NAME")->required();
  solve_i.add(solv);
  solv->add_option("--emit-strategy", emit_strategy, "write the winning strategy to a file");
  solv->callback([&] { action = [&] { return run_solve(gl, solve_game, solve_i, emit_strategy); }; });

  auto* dec = app.add_subcommand("decide", "Game(N, {ke}, {kse}) via the cutoff bound");
  std::string dec_in;
  std::uint32_t dec_ke = 0, dec_kse = 0;
  std::optional<std::uint64_t> n_max, dec_K;
  InstanceArgs dec_i;
  dec->add_option("input", dec_in, "game file, formula file or lib:NAME")->required();
  dec->add_option("--ke", dec_ke, "environment processes");
  dec->add_option("--kse", dec_kse, "shared processes");
  dec->add_option("--n-max", n_max, "stop after this many system processes");
  dec->add_option("--K", dec_K, "largest acceptance constant");
  dec_i.add_caps(dec);
  dec->callback([&] {
    action = [&] { return run_decide(gl, dec_in, dec_ke, dec_kse, dec_i, n_max, dec_K); };
  });

  auto* scan = app.add_subcommand("scan", "winners along one component");
  std::string scan_game, scan_axis = "se";
  std::vector<std::uint32_t> scan_fixed;
  std::uint32_t scan_from = 0, scan_to = 0;
  InstanceArgs scan_i;
  scan->add_option("game", scan_game, "game file or lib:NAME")->required();
  scan->add_option("--axis", scan_axis, "s, e or se");
  scan->add_option("--fixed", scan_fixed, "s,e,se values of the other components")->delimiter(',');
  scan->add_option("--from", scan_from, "first value");
  scan->add_option("--to", scan_to, "last value");
  scan_i.add_caps(scan);
  scan->callback([&] {
    action = [&] { return run_scan(gl, scan_game, scan_axis, scan_fixed, scan_from, scan_to, scan_i); };
  });

  auto* sim = app.add_subcommand("simulate", "translate plays and executions");
  std::string sim_game, sim_play, sim_exec, sim_strategy;
  InstanceArgs sim_i;
  sim->add_option("game", sim_game, "game file or lib:NAME")->required();
  sim->add_option("--play", sim_play, "play JSON file to turn into an execution");
  sim->add_option("--execution", sim_exec, "execution file to turn into a play");
  sim->add_option("--strategy", sim_strategy, "library strategy to play against a seeded environment");
  sim_i.add(sim);
  sim->callback([&] {
    action = [&] { return run_simulate(gl, sim_game, sim_play, sim_exec, sim_strategy, sim_i); };
  });

  auto* enc = app.add_subcommand("encode-2cm", "two-counter machine to game");
  std::string enc_machine;
  std::optional<std::size_t> enc_run;
  enc->add_option("machine", enc_machine, "machine file")->required();
  enc->add_option("--run", enc_run, "print the shortest halting run up to this many steps");
  enc->callback([&] { action = [&] { return run_encode(gl, enc_machine, enc_run); }; });

  auto* ver = app.add_subcommand("verify", "check a strategy on one initial configuration");
  std::string ver_game, ver_strategy, ver_machine;
  std::size_t ver_steps = 64;
  InstanceArgs ver_i;
  ver->add_option("game", ver_game, "game file or lib:NAME")->required();
  ver->add_option("--strategy", ver_strategy, "library name, tcm, or strategy JSON file")->required();
  ver->add_option("--machine", ver_machine, "machine file for --strategy tcm");
  ver->add_option("--steps", ver_steps, "run length bound for --strategy tcm");
  ver_i.add(ver);
  ver->callback([&] {
    action = [&] { return run_verify(gl, ver_game, ver_strategy, ver_machine, ver_steps, ver_i); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kParse;
  }
  try {
    return action();
  } catch (const ParseError& e) {
    std::cerr << "pvg: parse error: " << e.what() << "\n";
    return kParse;
  } catch (const InvalidArgument& e) {
    std::cerr << "pvg: invalid input: " << e.what() << "\n";
    return kParse;
  } catch (const BudgetExceeded& e) {
    std::cerr << "pvg: budget exceeded: " << e.what() << "\n";
    return kBudget;
  } catch (const std::exception& e) {
    std::cerr << "pvg: " << e.what() << "\n";
    return kOther;
  }
}
