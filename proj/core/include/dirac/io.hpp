#pragma once

// JSON and text encodings shared by the library and the command-line tool.

#include <string>

#include <nlohmann/json.hpp>

#include "dirac/diracrel.hpp"
#include "dirac/operad.hpp"

namespace dirac::io {

using nlohmann::json;

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double x);

/// The exact rational with the same shortest decimal expansion as x.
lin::Rat rat_from_double(double x);

json to_json(const lin::Rat& r);
json to_json(const lin::Mat& m);
json to_json(const lin::Subspace& s);
json to_json(const BondSpace& b);
json to_json(const DiracRelation& r);
json to_json(const operad::FinCospan& c);
json to_json(const operad::UwdOperation& op);
json to_json(const operad::OpenGraph& g);

/// Accepts "p/q" strings, decimal strings and JSON numbers. Throws ParseError.
lin::Rat rat_from_json(const json& j);
lin::Mat mat_from_json(const json& j);
BondSpace bond_from_json(const json& j);
DiracRelation relation_from_json(const json& j);
operad::FinCospan cospan_from_json(const json& j);
operad::UwdOperation uwd_from_json(const json& j);
operad::OpenGraph open_graph_from_json(const json& j);

/// Two-space indented dump with sorted keys and a trailing newline.
std::string dump(const json& j);

} // namespace dirac::io
