#pragma once

// JSON and text file formats. Keys are emitted in sorted order, so equal
// values always serialize to identical bytes.

#include <string>
#include <string_view>

#include "pvg/game.hpp"
#include "pvg/logic.hpp"
#include "pvg/normalform.hpp"
#include "pvg/solver.hpp"

namespace pvg {

/// `{"B":3,"tokens":[{"loc":{"a":2},"s":0,"e":0,"se":1}, ...]}`
std::string config_to_json(const Configuration& c, const Alphabet& alphabet);
Configuration config_from_json(std::string_view text, const Alphabet& alphabet);

/// `{"sys":[..],"env":[..],"B":3,"acceptance":{"kind":"explicit","rows":[..]}}`
/// or `"acceptance":{"kind":"formula","text":"..."}`.
std::string game_to_json(const Game& g);
Game game_from_json(std::string_view text);

/// `{"B":3,"clauses":[[{"cmp":"=","m":0,"type":"se","loc":{..}}, ..], ..]}`
std::string nf_to_json(const NormalForm& nf, const Alphabet& alphabet);
NormalForm nf_from_json(std::string_view text, const Alphabet& alphabet);

/// `{"initial":C,"steps":[{"side":"system","moves":[{"from":..,"to":..,
/// "count":n,"type":"s"}, ..]}, ..]}`. Reading replays the steps.
std::string play_to_json(const Play& p, const Alphabet& alphabet);
Play play_from_json(std::string_view text, const Game& g);

/// `{"entries":[{"at":C,"moves":[..]}, ..]}`
std::string strategy_to_json(const PositionalStrategy& s,
                             const Alphabet& alphabet);
PositionalStrategy strategy_from_json(std::string_view text, const Game& g);

/// Canonical JSON re-rendering (sorted keys, two-space indent).
std::string pretty_json(std::string_view text);

struct FormulaFile {
  Alphabet alphabet;
  Formula formula;
};

/// The first non-comment line declares the alphabet (`sys: a b; env: c;`),
/// the rest is the formula. `#` starts a comment.
FormulaFile parse_formula_file(std::string_view text);

struct ExecutionFile {
  Alphabet alphabet;
  Execution execution;
};

/// Alphabet line followed by an execution in the text format.
ExecutionFile parse_execution_file(std::string_view text);

/// Reads a whole file; throws Error when it cannot be opened.
std::string read_file(const std::string& path);
/// Writes through a temporary file in the same directory and renames it.
void write_file_atomic(const std::string& path, std::string_view content);

}  // namespace pvg
