#pragma once

#include <string>

#include "carnot/group.hpp"
#include "emit.hpp"

namespace carnot::cli {

/// Group from a JSON description:
///
///   {"name": "...", "kind": "abelian" | "heisenberg", "n": 3}
///   {"name": "...", "kind": "htype", "J_matrices": [[[...], ...], ...]}
///   {"name": "...", "kind": "custom", "layer_dims": [2, 1],
///    "frame": [[{"row": 2, "terms": [{"coeff": 2.0, "powers": [0, 1, 0]}]}], ...],
///    "law": [{"terms": [...]}, ...], "weights": [1, 1, 2]}
///
/// "m" and "k" are optional cross-checks for H-type groups; "law" and
/// "weights" are optional for custom groups.
GroupSpec parse_group_spec(const Json& spec);

/// A built-in name (h1, h2, h3, quaternionic-h1, abelian-N) or a path to a
/// JSON description.
GroupSpec resolve_group(const std::string& name_or_path);

/// Summary used by the `groups` command.
Json describe_group(const GroupSpec& g);

}  // namespace carnot::cli
