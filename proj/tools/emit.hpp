#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace carnot::cli {

using Json = nlohmann::ordered_json;

/// Compact JSON with every floating-point number printed to 17 significant
/// digits (non-finite values become null). Parsing the text back recovers
/// each double bit for bit.
std::string to_json_text(const Json& value);

/// Header plus one line per row. Each row is an object whose keys match the
/// header, in order.
std::string to_csv_text(const std::vector<std::string>& header, const Json& rows);

std::string format_number(double x);

}  // namespace carnot::cli
