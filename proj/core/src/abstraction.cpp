#include "pvg/abstraction.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>

#include "pvg/errors.hpp"

namespace pvg {

namespace {

void check_bound(unsigned bound) {
  if (bound > kMaxBound)
    throw InvalidArgument("bound " + std::to_string(bound) + " exceeds " +
                          std::to_string(kMaxBound));
}

}  // namespace

Location zero_location(const Alphabet& alphabet) {
  return Location(alphabet.size(), 0);
}

Location loc_add(const Location& l, LetterId a, unsigned bound) {
  Location r = l;
  if (a >= r.size()) throw InvalidArgument("letter outside location");
  if (r[a] < bound) ++r[a];
  return r;
}

Location loc_add(const Location& l, const std::vector<LetterId>& word,
                 unsigned bound) {
  Location r = l;
  for (LetterId a : word) {
    if (a >= r.size()) throw InvalidArgument("letter outside location");
    if (r[a] < bound) ++r[a];
  }
  return r;
}

Location loc_add(const Alphabet& alphabet, const Location& l,
                 const std::vector<std::string>& word, unsigned bound) {
  std::vector<LetterId> ids;
  ids.reserve(word.size());
  for (const auto& a : word) ids.push_back(alphabet.index(a));
  return loc_add(l, ids, bound);
}

std::string to_string(const Location& l, const Alphabet& alphabet) {
  std::string out;
  for (std::size_t i = 0; i < l.size(); ++i) {
    if (l[i] == 0) continue;
    if (!out.empty()) out += ' ';
    out += alphabet.name(static_cast<LetterId>(i));
    if (l[i] > 1) out += "^" + std::to_string(l[i]);
  }
  return out.empty() ? "0" : out;
}

Location parse_location(std::string_view text, const Alphabet& alphabet,
                        unsigned bound) {
  Location l = zero_location(alphabet);
  std::string s(text);
  std::istringstream in(s);
  std::string word;
  bool zero_seen = false;
  while (in >> word) {
    if (word == "0") {
      zero_seen = true;
      continue;
    }
    std::string name = word;
    unsigned n = 1;
    if (auto caret = word.find('^'); caret != std::string::npos) {
      name = word.substr(0, caret);
      try {
        n = static_cast<unsigned>(std::stoul(word.substr(caret + 1)));
      } catch (const std::exception&) {
        throw ParseError("bad exponent in location '" + s + "'");
      }
    }
    auto id = alphabet.find(name);
    if (!id) throw ParseError("unknown action '" + name + "' in location");
    if (l[*id] + n > bound)
      throw ParseError("count of '" + name + "' exceeds the bound");
    l[*id] = static_cast<std::uint8_t>(l[*id] + n);
  }
  if (zero_seen && letter_sum(l) != 0)
    throw ParseError("location '" + s + "' mixes 0 with letters");
  return l;
}

std::uint64_t location_count(const Alphabet& alphabet, unsigned bound) {
  std::uint64_t n = 1;
  for (std::size_t i = 0; i < alphabet.size(); ++i) {
    if (n > std::numeric_limits<std::uint64_t>::max() / (bound + 1))
      return std::numeric_limits<std::uint64_t>::max();
    n *= bound + 1;
  }
  return n;
}

std::vector<Location> all_locations(const Alphabet& alphabet, unsigned bound,
                                    std::uint64_t limit) {
  check_bound(bound);
  std::uint64_t n = location_count(alphabet, bound);
  if (n > limit)
    throw BudgetExceeded("location set of size " + std::to_string(n) +
                         " exceeds limit " + std::to_string(limit));
  std::vector<Location> out;
  out.reserve(n);
  Location l = zero_location(alphabet);
  while (true) {
    out.push_back(l);
    std::size_t i = l.size();
    while (i > 0 && l[i - 1] == bound) l[--i] = 0;
    if (i == 0) return out;
    ++l[i - 1];
  }
}

unsigned letter_sum(const Location& l) {
  unsigned s = 0;
  for (auto c : l) s += c;
  return s;
}

Configuration::Configuration(unsigned bound) : bound_(bound) {
  check_bound(bound);
}

std::vector<Configuration::Entry>::iterator Configuration::find_slot(
    const Location& l) {
  return std::lower_bound(
      entries_.begin(), entries_.end(), l,
      [](const Entry& e, const Location& key) { return e.first < key; });
}

Triple Configuration::at(const Location& l) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), l,
      [](const Entry& e, const Location& key) { return e.first < key; });
  if (it != entries_.end() && it->first == l) return it->second;
  return {0, 0, 0};
}

void Configuration::add(const Location& l, ProcType t, std::int64_t delta) {
  if (delta == 0) return;
  for (auto c : l)
    if (c > bound_) throw InvalidArgument("location exceeds the bound");
  auto it = find_slot(l);
  if (it == entries_.end() || it->first != l) {
    if (delta < 0) throw InvalidArgument("token count would become negative");
    Triple tr{0, 0, 0};
    tr[idx(t)] = static_cast<std::uint32_t>(delta);
    entries_.insert(it, {l, tr});
    return;
  }
  std::int64_t v = static_cast<std::int64_t>(it->second[idx(t)]) + delta;
  if (v < 0) throw InvalidArgument("token count would become negative");
  it->second[idx(t)] = static_cast<std::uint32_t>(v);
  if (is_zero(it->second)) entries_.erase(it);
}

void Configuration::set(const Location& l, const Triple& counts) {
  for (auto c : l)
    if (c > bound_) throw InvalidArgument("location exceeds the bound");
  auto it = find_slot(l);
  bool present = it != entries_.end() && it->first == l;
  if (is_zero(counts)) {
    if (present) entries_.erase(it);
    return;
  }
  if (present) it->second = counts;
  else entries_.insert(it, {l, counts});
}

Triple Configuration::totals() const {
  Triple t{0, 0, 0};
  for (const auto& [l, c] : entries_)
    for (std::size_t i = 0; i < 3; ++i) t[i] += c[i];
  return t;
}

std::uint64_t Configuration::token_count() const {
  Triple t = totals();
  return std::uint64_t{t[0]} + t[1] + t[2];
}

std::size_t Configuration::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ULL;
  };
  mix(bound_);
  for (const auto& [l, c] : entries_) {
    for (auto x : l) mix(x);
    mix(0xff);
    for (auto x : c) mix(x);
  }
  return static_cast<std::size_t>(h);
}

Configuration initial_configuration(const Alphabet& alphabet, unsigned bound,
                                    std::uint32_t ks, std::uint32_t ke,
                                    std::uint32_t kse) {
  Configuration c(bound);
  c.set(zero_location(alphabet), {ks, ke, kse});
  return c;
}

Configuration abstract_execution(const Execution& x, unsigned bound) {
  if (bound < 1) throw InvalidArgument("bound must be at least 1");
  const Alphabet& alph = x.alphabet();
  std::map<ProcessId, Location> loc;
  for (ProcType t : kAllTypes)
    for (ProcessId p : x.universe().of(t)) loc[p] = zero_location(alph);
  for (const Event& ev : x.events()) {
    auto& l = loc.at(ev.process);
    if (l[ev.action] < bound) ++l[ev.action];
  }
  Configuration c(bound);
  for (ProcType t : kAllTypes)
    for (ProcessId p : x.universe().of(t)) c.add(loc.at(p), t, 1);
  return c;
}

Execution canonical_execution(const Configuration& c, const Alphabet& alphabet) {
  ProcessUniverse u;
  std::vector<Event> events;
  ProcessId next = 1;
  for (ProcType t : kAllTypes)
    for (const auto& [l, counts] : c.entries()) {
      if (l.size() != alphabet.size())
        throw InvalidArgument("configuration does not match the alphabet");
      for (std::uint32_t k = 0; k < counts[idx(t)]; ++k) {
        ProcessId p = next++;
        u.of(t).push_back(p);
        for (std::size_t a = 0; a < l.size(); ++a)
          for (unsigned r = 0; r < l[a]; ++r)
            events.push_back({static_cast<LetterId>(a), p});
      }
    }
  return Execution(alphabet, std::move(u), std::move(events));
}

std::uint64_t potential(const Configuration& c) {
  std::uint64_t p = 0;
  for (const auto& [l, counts] : c.entries())
    p += std::uint64_t{letter_sum(l)} *
         (std::uint64_t{counts[0]} + counts[1] + counts[2]);
  return p;
}

std::string to_string(const Configuration& c, const Alphabet& alphabet) {
  std::string out = "{";
  bool first = true;
  for (const auto& [l, counts] : c.entries()) {
    if (!first) out += ", ";
    first = false;
    out += "<" + to_string(l, alphabet) + ">:(" + std::to_string(counts[0]) +
           "," + std::to_string(counts[1]) + "," + std::to_string(counts[2]) +
           ")";
  }
  return out + "}";
}

std::vector<Location> successors(const Location& l, const Alphabet& alphabet,
                                 unsigned bound, bool system_side,
                                 std::uint32_t max_letters) {
  std::vector<std::size_t> letters;
  for (std::size_t a = 0; a < l.size(); ++a)
    if (alphabet.is_sys(static_cast<LetterId>(a)) == system_side &&
        l[a] < bound)
      letters.push_back(a);
  std::vector<Location> out;
  Location cur = l;
  // Odometer over the free letters, pruned by the letter budget.
  std::function<void(std::size_t, std::uint32_t)> go = [&](std::size_t i,
                                                           std::uint32_t used) {
    if (i == letters.size()) {
      out.push_back(cur);
      return;
    }
    std::size_t a = letters[i];
    for (unsigned v = l[a]; v <= bound; ++v) {
      std::uint32_t extra = v - l[a];
      if (used + extra > max_letters) break;
      cur[a] = static_cast<std::uint8_t>(v);
      go(i + 1, used + extra);
    }
    cur[a] = l[a];
  };
  go(0, 0);
  std::sort(out.begin(), out.end());
  return out;
}

bool reachable_by_side(const Location& from, const Location& to,
                       const Alphabet& alphabet, unsigned bound,
                       bool system_side) {
  if (from.size() != to.size() || from.size() != alphabet.size()) return false;
  for (std::size_t a = 0; a < from.size(); ++a) {
    if (to[a] > bound) return false;
    bool own = alphabet.is_sys(static_cast<LetterId>(a)) == system_side;
    if (own ? to[a] < from[a] : to[a] != from[a]) return false;
  }
  return true;
}

}  // namespace pvg
