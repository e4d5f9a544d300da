#include "renorm/scene.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "renorm/error.hpp"

namespace renorm {

namespace {

using nlohmann::json;

[[noreturn]] void violation(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::SchemaViolation, path + ": " + what);
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) violation(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) violation(path, "must be finite");
  return v;
}

int integer(const json& j, const std::string& path, int lo, int hi) {
  if (!j.is_number_integer()) violation(path, "expected an integer");
  const auto v = j.get<std::int64_t>();
  if (v < lo || v > hi) violation(path, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(v);
}

Complex complex_pair(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) violation(path, "expected [re, im]");
  return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
}

std::vector<Complex> coefficient_list(const json& j, const std::string& path) {
  if (!j.is_array()) violation(path, "expected an array of [re, im] pairs");
  if (j.size() < 3) violation(path, "degree must be at least 2");
  std::vector<Complex> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(complex_pair(j[k], path + "[" + std::to_string(k) + "]"));
  if (out.back() != Complex(1.0, 0.0)) violation(path + "[" + std::to_string(j.size() - 1) + "]", "polynomial must be monic");
  return out;
}

Angle angle(const json& j, const std::string& path) {
  if (!j.is_string()) violation(path, "expected a fraction string such as \"1/3\"");
  try {
    return Angle::parse(j.get<std::string>());
  } catch (const Error& e) {
    violation(path, e.what());
  }
}

void reject_unknown(const json& obj, const std::string& path, const std::set<std::string>& known) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.count(it.key())) violation(path.empty() ? it.key() : path + "." + it.key(), "unknown field");
}

json complex_list(const std::vector<Complex>& v) {
  json out = json::array();
  for (const auto& c : v) out.push_back({c.real(), c.imag()});
  return out;
}

}  // namespace

double Scene::carrot_rho() const { return rho > 0.0 ? rho : std::exp(-truncation); }

Scene parse_scene(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("(document): ") + e.what());
  }
  if (!root.is_object()) violation("(document)", "expected an object");
  reject_unknown(root, "", {"coeffs", "cuts", "truncation", "grid", "max_iter", "rho", "Q", "max_period", "rays",
                            "outputs", "palette", "seed"});

  Scene s;
  if (!root.contains("coeffs")) violation("coeffs", "required field missing");
  s.coeffs = coefficient_list(root["coeffs"], "coeffs");

  if (root.contains("cuts")) {
    const auto& cuts = root["cuts"];
    if (!cuts.is_array()) violation("cuts", "expected an array");
    for (std::size_t k = 0; k < cuts.size(); ++k) {
      const std::string path = "cuts[" + std::to_string(k) + "]";
      const auto& c = cuts[k];
      if (!c.is_object()) violation(path, "expected {\"theta_r\": ..., \"theta_l\": ...}");
      reject_unknown(c, path, {"theta_r", "theta_l"});
      if (!c.contains("theta_r")) violation(path + ".theta_r", "required field missing");
      if (!c.contains("theta_l")) violation(path + ".theta_l", "required field missing");
      s.cuts.push_back({angle(c["theta_r"], path + ".theta_r"), angle(c["theta_l"], path + ".theta_l")});
    }
  }
  if (root.contains("truncation")) {
    s.truncation = number(root["truncation"], "truncation");
    if (!(s.truncation > 0.0)) violation("truncation", "must be positive");
  }
  if (root.contains("grid")) {
    const auto& g = root["grid"];
    if (!g.is_object()) violation("grid", "expected an object");
    reject_unknown(g, "grid", {"center", "width", "resolution"});
    if (g.contains("center")) s.grid.center = complex_pair(g["center"], "grid.center");
    if (g.contains("width")) {
      s.grid.width = number(g["width"], "grid.width");
      if (!(s.grid.width > 0.0)) violation("grid.width", "must be positive");
    }
    if (g.contains("resolution")) s.grid.resolution = integer(g["resolution"], "grid.resolution", 1, 16384);
  }
  if (root.contains("max_iter")) s.max_iter = integer(root["max_iter"], "max_iter", 1, 1 << 24);
  if (root.contains("rho")) {
    s.rho = number(root["rho"], "rho");
    if (!(s.rho > 0.0 && s.rho < 1.0)) violation("rho", "must lie in (0, 1)");
  }
  if (root.contains("Q")) s.q_coeffs = coefficient_list(root["Q"], "Q");
  if (root.contains("max_period")) s.max_period = integer(root["max_period"], "max_period", 1, 12);
  if (root.contains("rays")) {
    const auto& r = root["rays"];
    if (!r.is_array()) violation("rays", "expected an array of fraction strings");
    for (std::size_t k = 0; k < r.size(); ++k) s.rays.push_back(angle(r[k], "rays[" + std::to_string(k) + "]"));
  }
  if (root.contains("outputs")) {
    const auto& o = root["outputs"];
    if (!o.is_object()) violation("outputs", "expected an object");
    reject_unknown(o, "outputs", {"prefix"});
    if (o.contains("prefix")) {
      if (!o["prefix"].is_string() || o["prefix"].get<std::string>().empty())
        violation("outputs.prefix", "expected a non-empty string");
      s.output_prefix = o["prefix"].get<std::string>();
      if (s.output_prefix.find('/') != std::string::npos) violation("outputs.prefix", "must not contain '/'");
    }
  }
  if (root.contains("palette")) {
    const auto& p = root["palette"];
    if (!p.is_string()) violation("palette", "expected \"standard\" or \"grey\"");
    const auto name = p.get<std::string>();
    if (name == "standard")
      s.palette = Palette::Standard;
    else if (name == "grey")
      s.palette = Palette::Grey;
    else
      violation("palette", "unknown palette '" + name + "'");
  }
  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned()) violation("seed", "expected a non-negative integer");
    s.seed = root["seed"].get<std::uint64_t>();
  }
  try {
    s.grid.validate();
  } catch (const Error& e) {
    violation("grid", e.what());
  }
  return s;
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open scene file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scene(buf.str());
}

std::string scene_to_json(const Scene& s) {
  json root;
  root["coeffs"] = complex_list(s.coeffs);
  root["cuts"] = json::array();
  for (const auto& c : s.cuts) root["cuts"].push_back({{"theta_r", c.theta_r.str()}, {"theta_l", c.theta_l.str()}});
  root["truncation"] = s.truncation;
  root["grid"] = {{"center", {s.grid.center.real(), s.grid.center.imag()}},
                  {"width", s.grid.width},
                  {"resolution", s.grid.resolution}};
  root["max_iter"] = s.max_iter;
  if (s.rho > 0.0) root["rho"] = s.rho;
  if (s.q_coeffs) root["Q"] = complex_list(*s.q_coeffs);
  root["max_period"] = s.max_period;
  root["rays"] = json::array();
  for (const auto& a : s.rays) root["rays"].push_back(a.str());
  root["outputs"] = {{"prefix", s.output_prefix}};
  root["palette"] = s.palette == Palette::Grey ? "grey" : "standard";
  root["seed"] = s.seed;
  return root.dump(2);
}

Scene figure1_scene() {
  Scene s;
  s.coeffs = {0.0, 4.0, 4.0, 1.0};
  s.cuts = {{Angle(1, 3), Angle(2, 3)}, {Angle(0, 1), Angle(0, 1)}};
  s.truncation = 0.5;
  s.grid = GridSpec{{-1.5, 0.0}, 3.8, 512};
  s.max_iter = 512;
  s.q_coeffs = std::vector<Complex>{0.0, -1.0, 1.0};
  s.max_period = 3;
  s.rays = {Angle(1, 3), Angle(2, 3), Angle(0, 1)};
  s.output_prefix = "figure1";
  return s;
}

}  // namespace renorm
