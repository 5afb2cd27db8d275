#include "group_file.hpp"

#include <filesystem>
#include <fstream>

namespace carnot::cli {

namespace {

template <typename T>
T field(const Json& spec, const char* key) {
  if (!spec.contains(key)) throw InvalidArgument(std::string("group spec is missing \"") + key + "\"");
  try {
    return spec.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidArgument(std::string("group spec field \"") + key + "\" has the wrong type");
  }
}

Polynomial parse_polynomial(const Json& p, int num_vars) {
  Polynomial poly(num_vars);
  if (!p.is_object() || !p.contains("terms") || !p["terms"].is_array()) {
    throw InvalidArgument("polynomial needs a \"terms\" array");
  }
  for (const auto& t : p["terms"]) {
    auto powers = field<std::vector<int>>(t, "powers");
    if (static_cast<int>(powers.size()) != num_vars) {
      throw InvalidArgument("polynomial term has " + std::to_string(powers.size()) + " powers, expected " +
                            std::to_string(num_vars));
    }
    poly.add_term(field<double>(t, "coeff"), std::move(powers));
  }
  return poly;
}

GroupSpec parse_custom(const Json& spec) {
  const auto layers = field<std::vector<int>>(spec, "layer_dims");
  int n = 0;
  for (int d : layers) n += d;
  if (n <= 0 || n > kMaxDim) throw InvalidArgument("custom group dimension out of range");
  std::vector<HorizontalField> frame;
  for (const auto& f : field<Json>(spec, "frame")) {
    HorizontalField h;
    for (const auto& c : f) h.coefficients.push_back({field<int>(c, "row"), parse_polynomial(c, n)});
    frame.push_back(std::move(h));
  }
  std::vector<Polynomial> law;
  if (spec.contains("law")) {
    for (const auto& p : spec["law"]) law.push_back(parse_polynomial(p, 2 * n));
  }
  std::optional<DilationWeights> weights;
  if (spec.contains("weights")) weights = DilationWeights{field<std::vector<int>>(spec, "weights")};
  return GroupSpec::custom(spec.value("name", std::string("custom")), layers, std::move(frame), std::move(law),
                           std::move(weights));
}

GroupSpec parse_htype(const Json& spec) {
  HTypeStructure s;
  for (const auto& mat : field<Json>(spec, "J_matrices")) {
    const auto rows = mat.get<std::vector<std::vector<double>>>();
    Eigen::MatrixXd J(rows.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.size()) throw InvalidArgument("J matrices must be square");
      for (std::size_t j = 0; j < rows.size(); ++j) J(i, j) = rows[i][j];
    }
    s.J.push_back(std::move(J));
  }
  const int m = spec.value("m", s.m());
  const int k = spec.value("k", s.k());
  const auto check = validate_htype(s, m, k);
  if (!check.valid) {
    std::string msg = "J matrices do not define an H-type group:";
    for (const auto& v : check.violations) msg += "\n  " + v;
    throw InvalidArgument(msg);
  }
  return GroupSpec::htype(spec.value("name", std::string("htype")), std::move(s));
}

}  // namespace

GroupSpec parse_group_spec(const Json& spec) {
  if (!spec.is_object()) throw InvalidArgument("group spec must be a JSON object");
  const auto kind = field<std::string>(spec, "kind");
  GroupSpec g = [&] {
    if (kind == "abelian") return GroupSpec::abelian(field<int>(spec, "n"));
    if (kind == "heisenberg") return GroupSpec::heisenberg(field<int>(spec, "n"));
    if (kind == "htype") return parse_htype(spec);
    if (kind == "custom") return parse_custom(spec);
    throw InvalidArgument("unknown group kind '" + kind + "'");
  }();
  if (spec.contains("name") && kind != "custom" && kind != "htype") g = g.renamed(field<std::string>(spec, "name"));
  return g;
}

GroupSpec resolve_group(const std::string& name_or_path) {
  try {
    return builtin_group(name_or_path);
  } catch (const InvalidArgument&) {
    if (!std::filesystem::is_regular_file(name_or_path)) throw;
  }
  std::ifstream in(name_or_path);
  Json spec;
  try {
    spec = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("malformed group spec file '" + name_or_path + "': " + e.what());
  }
  return parse_group_spec(spec);
}

Json describe_group(const GroupSpec& g) {
  Json j;
  j["name"] = g.name();
  j["kind"] = std::string(to_string(g.kind()));
  j["dim"] = g.dim();
  j["horizontal_dim"] = g.horizontal_dim();
  j["step"] = g.step();
  j["layer_dims"] = g.layer_dims();
  j["weights"] = g.weights().exponents;
  j["homogeneous_dimension"] = g.homogeneous_dimension();
  j["norm"] = std::string(to_string(g.norm_kind()));
  return j;
}

}  // namespace carnot::cli
