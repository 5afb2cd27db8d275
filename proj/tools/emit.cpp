#include "emit.hpp"

#include <cmath>
#include <cstdio>

namespace carnot::cli {

std::string format_number(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  // Keep floats recognisable as floats after a round trip.
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

namespace {

void write(const Json& v, std::string& out) {
  switch (v.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) out += ',';
        first = false;
        out += Json(key).dump();
        out += ':';
        write(item, out);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        write(v[i], out);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float:
      out += format_number(v.get<double>());
      break;
    default:
      out += v.dump();
      break;
  }
}

std::string csv_cell(const Json& v) {
  switch (v.type()) {
    case Json::value_t::null:
      return "";
    case Json::value_t::number_float:
      return format_number(v.get<double>());
    case Json::value_t::string: {
      const auto s = v.get<std::string>();
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string q = "\"";
      for (char c : s) {
        if (c == '"') q += '"';
        q += c;
      }
      return q + '"';
    }
    default:
      return csv_cell(Json(v.dump()));
  }
}

}  // namespace

std::string to_json_text(const Json& value) {
  std::string out;
  write(value, out);
  out += '\n';
  return out;
}

std::string to_csv_text(const std::vector<std::string>& header, const Json& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) out += ',';
      out += csv_cell(row.contains(header[i]) ? row[header[i]] : Json());
    }
    out += '\n';
  }
  return out;
}

}  // namespace carnot::cli
