#include "pvg/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pvg/errors.hpp"

namespace pvg {

using nlohmann::json;

namespace {

constexpr int kIndent = 2;

std::string dump(const json& j) {
  return j.dump(kIndent, ' ', /*ensure_ascii=*/true) + "\n";
}

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), e.byte);
  }
}

template <class F>
auto guarded(std::string_view what, F f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

json loc_json(const Location& l, const Alphabet& a) {
  json j = json::object();
  for (std::size_t i = 0; i < l.size(); ++i)
    if (l[i] != 0) j[a.name(static_cast<LetterId>(i))] = l[i];
  return j;
}

Location loc_from(const json& j, const Alphabet& a, unsigned bound) {
  if (!j.is_object()) throw ParseError("location must be an object");
  Location l = zero_location(a);
  for (const auto& [name, v] : j.items()) {
    auto id = a.find(name);
    if (!id) throw ParseError("unknown letter '" + name + "' in location");
    auto n = v.get<std::int64_t>();
    if (n < 0 || n > static_cast<std::int64_t>(bound))
      throw ParseError("letter count out of range in location");
    l[*id] = static_cast<std::uint8_t>(n);
  }
  return l;
}

std::string count_text(const Count& c) {
  return (c.cmp == Cmp::kEq ? "=" : "≥") + std::to_string(c.n);
}

json cond_json(const LocalCondition& c) {
  return json::array({count_text(c.c[0]), count_text(c.c[1]), count_text(c.c[2])});
}

LocalCondition cond_from(const json& j) {
  if (!j.is_array() || j.size() != 3)
    throw ParseError("local condition must be a list of three counts");
  LocalCondition c;
  for (std::size_t i = 0; i < 3; ++i) c.c[i] = parse_count(j[i].get<std::string>());
  return c;
}

ProcType type_from(const json& j) {
  auto t = parse_type_name(j.get<std::string>());
  if (!t) throw ParseError("unknown process type '" + j.get<std::string>() + "'");
  return *t;
}

json config_json(const Configuration& c, const Alphabet& a) {
  json tokens = json::array();
  for (const auto& [l, n] : c.entries())
    tokens.push_back({{"loc", loc_json(l, a)}, {"s", n[0]}, {"e", n[1]}, {"se", n[2]}});
  return {{"B", c.bound()}, {"tokens", tokens}};
}

Configuration config_from(const json& j, const Alphabet& a) {
  unsigned bound = j.at("B").get<unsigned>();
  if (bound > kMaxBound) throw ParseError("bound too large");
  Configuration c(bound);
  for (const json& t : j.at("tokens")) {
    Location l = loc_from(t.at("loc"), a, bound);
    for (ProcType p : kAllTypes) {
      auto key = std::string(type_name(p));
      if (t.contains(key)) c.add(l, p, t[key].get<std::uint32_t>());
    }
  }
  return c;
}

json moves_json(const Transition& t, const Alphabet& a) {
  json moves = json::array();
  for (const Move& m : t.moves())
    for (ProcType p : kAllTypes)
      if (m.n[idx(p)] != 0)
        moves.push_back({{"from", loc_json(m.from, a)},
                         {"to", loc_json(m.to, a)},
                         {"count", m.n[idx(p)]},
                         {"type", type_name(p)}});
  return moves;
}

Transition transition_from(const json& moves, Side side, const Game& g) {
  std::vector<Move> ms;
  for (const json& m : moves) {
    Move mv;
    mv.from = loc_from(m.at("from"), g.alphabet(), g.bound());
    mv.to = loc_from(m.at("to"), g.alphabet(), g.bound());
    mv.n[idx(type_from(m.at("type")))] = m.at("count").get<std::uint32_t>();
    ms.push_back(std::move(mv));
  }
  if (ms.empty()) return Transition::pass(side);
  return Transition(side, std::move(ms), g.alphabet(), g.bound());
}

json names_json(const std::vector<std::string>& v) {
  json j = json::array();
  for (const auto& s : v) j.push_back(s);
  return j;
}

std::string strip_comments(std::string_view text) {
  std::string out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    out += line;
    out += '\n';
  }
  return out;
}

// Splits off the first non-blank line.
std::pair<std::string, std::string> header_and_body(std::string_view text) {
  std::string s = strip_comments(text);
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t eol = s.find('\n', pos);
    if (eol == std::string::npos) eol = s.size();
    std::string line = s.substr(pos, eol - pos);
    if (line.find_first_not_of(" \t\r") != std::string::npos)
      return {line, eol < s.size() ? s.substr(eol + 1) : std::string()};
    pos = eol + 1;
  }
  throw ParseError("empty file");
}

}  // namespace

std::string config_to_json(const Configuration& c, const Alphabet& alphabet) {
  return dump(config_json(c, alphabet));
}

Configuration config_from_json(std::string_view text, const Alphabet& alphabet) {
  json j = parse(text);
  return guarded("configuration", [&] { return config_from(j, alphabet); });
}

std::string game_to_json(const Game& g) {
  const Alphabet& a = g.alphabet();
  json acc;
  if (g.is_explicit()) {
    json rows = json::array();
    for (const AcceptanceRow& r : g.rows()) {
      json locs = json::array();
      for (const auto& [l, c] : r.locs)
        locs.push_back({{"loc", loc_json(l, a)}, {"cond", cond_json(c)}});
      json row = {{"default", cond_json(r.fallback)}, {"locs", locs}};
      if (r.family != LocationFamily::kNone) {
        row["family"] = family_name(r.family);
        row["family_cond"] = cond_json(r.family_cond);
      }
      rows.push_back(row);
    }
    acc = {{"kind", "explicit"}, {"rows", rows}};
  } else {
    acc = {{"kind", "formula"}, {"text", to_string(*g.formula())}};
  }
  return dump({{"sys", names_json(a.sys())},
               {"env", names_json(a.env())},
               {"B", g.bound()},
               {"acceptance", acc}});
}

Game game_from_json(std::string_view text) {
  json j = parse(text);
  return guarded("game", [&] {
    Alphabet a(j.at("sys").get<std::vector<std::string>>(),
               j.at("env").get<std::vector<std::string>>());
    const json& acc = j.at("acceptance");
    std::string kind = acc.at("kind").get<std::string>();
    if (kind == "formula") {
      Formula f = parse_formula(acc.at("text").get<std::string>(), a);
      std::optional<unsigned> bound;
      if (j.contains("B")) bound = j["B"].get<unsigned>();
      return Game::with_formula(a, f, bound);
    }
    if (kind != "explicit") throw ParseError("unknown acceptance kind '" + kind + "'");
    unsigned bound = j.at("B").get<unsigned>();
    if (bound > kMaxBound) throw ParseError("bound too large");
    std::vector<AcceptanceRow> rows;
    for (const json& r : acc.at("rows")) {
      AcceptanceRow row;
      row.fallback = r.contains("default") ? cond_from(r["default"])
                                           : LocalCondition::none();
      if (r.contains("locs"))
        for (const json& e : r["locs"])
          row.set(loc_from(e.at("loc"), a, bound), cond_from(e.at("cond")));
      if (r.contains("family")) {
        std::string fam = r["family"].get<std::string>();
        if (fam == family_name(LocationFamily::kEnvExceedsSys))
          row.family = LocationFamily::kEnvExceedsSys;
        else if (fam != family_name(LocationFamily::kNone))
          throw ParseError("unknown location family '" + fam + "'");
        row.family_cond = cond_from(r.at("family_cond"));
      }
      rows.push_back(std::move(row));
    }
    return Game::with_rows(a, bound, std::move(rows));
  });
}

std::string nf_to_json(const NormalForm& nf, const Alphabet& alphabet) {
  json clauses = json::array();
  for (const Clause& cl : nf.clauses) {
    json jc = json::array();
    for (const CountingConstraint& k : cl)
      jc.push_back({{"cmp", k.count.cmp == Cmp::kEq ? "=" : "≥"},
                    {"m", k.count.n},
                    {"type", type_name(k.type)},
                    {"loc", loc_json(k.loc, alphabet)}});
    clauses.push_back(jc);
  }
  return dump({{"B", nf.bound}, {"clauses", clauses}});
}

NormalForm nf_from_json(std::string_view text, const Alphabet& alphabet) {
  json j = parse(text);
  return guarded("normal form", [&] {
    NormalForm nf;
    nf.bound = j.at("B").get<unsigned>();
    for (const json& jc : j.at("clauses")) {
      Clause cl;
      for (const json& k : jc) {
        CountingConstraint c;
        c.count = parse_count(k.at("cmp").get<std::string>() +
                              std::to_string(k.at("m").get<std::uint32_t>()));
        c.type = type_from(k.at("type"));
        c.loc = loc_from(k.at("loc"), alphabet, nf.bound);
        cl.push_back(std::move(c));
      }
      nf.clauses.push_back(std::move(cl));
    }
    return nf;
  });
}

std::string play_to_json(const Play& p, const Alphabet& alphabet) {
  json steps = json::array();
  for (const auto& [t, c] : p.steps)
    steps.push_back({{"side", side_name(t.side())}, {"moves", moves_json(t, alphabet)}});
  return dump({{"initial", config_json(p.initial, alphabet)}, {"steps", steps}});
}

Play play_from_json(std::string_view text, const Game& g) {
  json j = parse(text);
  return guarded("play", [&] {
    Play p;
    p.initial = config_from(j.at("initial"), g.alphabet());
    g.check_shape(p.initial);
    Configuration cur = p.initial;
    for (const json& s : j.at("steps")) {
      std::string side = s.at("side").get<std::string>();
      Side sd;
      if (side == side_name(Side::kSystem))
        sd = Side::kSystem;
      else if (side == side_name(Side::kEnvironment))
        sd = Side::kEnvironment;
      else
        throw ParseError("unknown side '" + side + "'");
      Transition t = transition_from(s.at("moves"), sd, g);
      cur = apply(t, cur);
      p.steps.emplace_back(std::move(t), cur);
    }
    return p;
  });
}

std::string strategy_to_json(const PositionalStrategy& s,
                             const Alphabet& alphabet) {
  json entries = json::array();
  for (const auto& [c, t] : s)
    entries.push_back({{"at", config_json(c, alphabet)}, {"moves", moves_json(t, alphabet)}});
  return dump({{"entries", entries}});
}

PositionalStrategy strategy_from_json(std::string_view text, const Game& g) {
  json j = parse(text);
  return guarded("strategy", [&] {
    PositionalStrategy s;
    for (const json& e : j.at("entries")) {
      Configuration c = config_from(e.at("at"), g.alphabet());
      s[c] = transition_from(e.at("moves"), Side::kSystem, g);
    }
    return s;
  });
}

std::string pretty_json(std::string_view text) { return dump(parse(text)); }

FormulaFile parse_formula_file(std::string_view text) {
  auto [head, body] = header_and_body(text);
  Alphabet a = parse_alphabet(head);
  return {a, parse_formula(body, a)};
}

ExecutionFile parse_execution_file(std::string_view text) {
  auto [head, body] = header_and_body(text);
  Alphabet a = parse_alphabet(head);
  return {a, parse_execution(body, a)};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, std::string_view content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw Error("cannot write '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot rename onto '" + path + "': " + ec.message());
  }
}

}  // namespace pvg
