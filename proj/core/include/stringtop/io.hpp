#pragma once

// JSON formats for coefficients, matrices, loops, cycles, fields,
// connections, chord diagrams and realizations. Rationals are "p/q" strings.
// Malformed input raises ConfigError.

#include "stringtop/chords.hpp"
#include "stringtop/geometry.hpp"
#include "stringtop/strings.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

namespace stringtop {

using Json = nlohmann::json;

std::string rational_to_string(const Rational &r);
/// Accepts "p/q", "p", or a JSON integer.
Rational rational_from_json(const Json &j);

/// [{indices: [1-based], re, im}, ...]
Json to_json(const GradedCoefficient &a);
GradedCoefficient graded_from_json(const Json &j, int generators = 6);

/// Rows of graded coefficients.
Json to_json(const SuperMatrix &m);
SuperMatrix super_matrix_from_json(const Json &j, int generators = 6);

/// {type: "chart"|"torus", d}
Json to_json(const Space &s);
Space space_from_json(const Json &j);

/// {space, vertices: [["p/q", ...], ...], closure: [ints]}
Json to_json(const PLLoop &loop);
PLLoop loop_from_json(const Json &j);

/// [{coeff, loop}, ...]
Json to_json(const StringCycle &c);
StringCycle cycle_from_json(const Json &j);

/// {space, n, generators, parity, terms: [{dims, lie: [i,j], eps: [1-based],
///  field: {kind, terms: [{key, twopi, re, im}]}}]}
Json to_json(const FieldConfig &c);
FieldConfig field_from_json(const Json &j);

/// {type: "zero"|"constant", n, d, components: [[[re, im], ...] rows]}
Json to_json(const FlatConnection &a);
FlatConnection connection_from_json(const Json &j);

/// {circles: [{rep: "std:n", endpoints}], arcs: [[l1, l2]]}
Json to_json(const ChordDiagram &d);
ChordDiagram diagram_from_json(const Json &j);

/// {loops: [loop | "path/to/loop.json"], circles: [[{transport: {loop,
///  from, to}} | {insert: label}]]}; string entries are read relative to
/// `base`.
Json to_json(const DiagramRealization &r);
DiagramRealization realization_from_json(const Json &j,
                                         const std::filesystem::path &base = {});

Json read_json_file(const std::filesystem::path &path);
void write_json_file(const std::filesystem::path &path, const Json &j);

} // namespace stringtop
