#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vortex/errors.hpp"
#include "vortex/scan.hpp"

namespace vortex {
namespace {

using json = nlohmann::json;

constexpr const char* kEchoPrefix = "# config = ";

struct OutputName {
  OutputKind kind;
  std::string_view name;
};
constexpr OutputName kOutputNames[] = {{OutputKind::flux, "flux"},
                                       {OutputKind::p_z, "p_z"},
                                       {OutputKind::p_zz, "p_zz"},
                                       {OutputKind::all_params, "all-params"},
                                       {OutputKind::components, "components"}};

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1;
  int column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw ConfigError(where.empty() ? key : where + "." + key, "unknown key");
    }
  }
}

const json& require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where, "expected an object");
  return j;
}

int get_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ConfigError(where, "expected an integer");
  const auto v = j.get<long long>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ConfigError(where, "integer out of range");
  }
  return int(v);
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where, "expected a number");
  return j.get<double>();
}

bool get_bool(const json& j, const std::string& where) {
  if (!j.is_boolean()) throw ConfigError(where, "expected true or false");
  return j.get<bool>();
}

// A length is a number in meters or a string "<value><unit>" with unit one of
// m, mm, um, nm, lambda, zR (the last only where z_R is meaningful).
double get_length(const json& j, const std::string& where, double wavelength, double z_r) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) throw ConfigError(where, "expected a length (number in m or string with unit)");
  const std::string s = j.get<std::string>();
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError(where, "cannot parse length '" + s + "'");
  }
  std::string unit = s.substr(used);
  while (!unit.empty() && unit.front() == ' ') unit.erase(unit.begin());
  if (unit == "m" || unit.empty()) return value;
  if (unit == "mm") return value * 1e-3;
  if (unit == "um") return value * 1e-6;
  if (unit == "nm") return value * 1e-9;
  if (unit == "lambda") return value * wavelength;
  if (unit == "zR" || unit == "z_R") {
    if (z_r <= 0.0) throw ConfigError(where, "z_R unit not allowed here");
    return value * z_r;
  }
  throw ConfigError(where, "unknown length unit '" + unit + "'");
}

struct ArrayKeys {
  std::optional<json> n, l, m_z, radius, wavelength, amplitude_scale, helicity_normalization;
};

void take_array_key(ArrayKeys& keys, const std::string& key, const json& value, const std::string& where) {
  auto set = [&](std::optional<json>& slot) {
    if (slot) throw ConfigError(where, "given more than once");
    slot = value;
  };
  if (key == "N") set(keys.n);
  else if (key == "l") set(keys.l);
  else if (key == "m_z") set(keys.m_z);
  else if (key == "R") set(keys.radius);
  else if (key == "lambda") set(keys.wavelength);
  else if (key == "amplitude_scale") set(keys.amplitude_scale);
  else if (key == "helicity_normalization") set(keys.helicity_normalization);
}

const std::set<std::string> kArrayKeys{"N", "l", "m_z", "R", "lambda", "amplitude_scale",
                                       "helicity_normalization"};

ArrayConfig build_array(const ArrayKeys& keys) {
  ArrayConfig a;
  // lambda first: R may be given in wavelengths.
  if (keys.wavelength) a.wavelength = get_length(*keys.wavelength, "array.lambda", 0.0, 0.0);
  if (keys.n) a.n_emitters = get_int(*keys.n, "array.N");
  if (keys.l) a.phase_param = get_int(*keys.l, "array.l");
  if (keys.m_z) a.m_z = get_int(*keys.m_z, "array.m_z");
  if (keys.radius) a.radius = get_length(*keys.radius, "array.R", a.wavelength, 0.0);
  if (keys.amplitude_scale) a.amplitude_scale = get_number(*keys.amplitude_scale, "array.amplitude_scale");
  if (keys.helicity_normalization) {
    a.helicity_normalization = get_bool(*keys.helicity_normalization, "array.helicity_normalization");
  }
  return a;
}

ScanConfig from_json(const json& root) {
  require_object(root, "");
  std::set<std::string> top{"array", "scan", "outputs"};
  top.insert(kArrayKeys.begin(), kArrayKeys.end());
  reject_unknown(root, top, "");

  ArrayKeys keys;
  for (const auto& [key, value] : root.items()) {
    if (kArrayKeys.count(key)) take_array_key(keys, key, value, key);
  }
  if (root.contains("array")) {
    const json& arr = require_object(root.at("array"), "array");
    reject_unknown(arr, kArrayKeys, "array");
    for (const auto& [key, value] : arr.items()) take_array_key(keys, key, value, "array." + key);
  }

  ScanConfig c;
  c.array = build_array(keys);
  try {
    c.array.validate();
  } catch (const DomainError& e) {
    throw ConfigError("array", e.what());
  }
  const double z_r = c.rayleigh_range();
  const double lambda = c.array.wavelength;

  if (root.contains("scan")) {
    const json& scan = require_object(root.at("scan"), "scan");
    reject_unknown(scan, {"z", "half_width", "resolution", "evaluator", "truncation"}, "scan");
    if (scan.contains("z")) {
      const json& z = scan.at("z");
      if (z.is_array()) {
        if (z.empty()) throw ConfigError("scan.z", "needs at least one plane");
        for (std::size_t i = 0; i < z.size(); ++i) {
          c.z_list.push_back(get_length(z[i], "scan.z[" + std::to_string(i) + "]", lambda, z_r));
        }
      } else {
        c.z_list.push_back(get_length(z, "scan.z", lambda, z_r));
      }
    }
    if (scan.contains("half_width")) c.half_width = get_length(scan.at("half_width"), "scan.half_width", lambda, z_r);
    if (scan.contains("resolution")) c.resolution = get_int(scan.at("resolution"), "scan.resolution");
    if (scan.contains("evaluator")) {
      const json& e = scan.at("evaluator");
      if (!e.is_string()) throw ConfigError("scan.evaluator", "expected a string");
      try {
        c.evaluator = evaluator_from_string(e.get<std::string>());
      } catch (const DomainError& err) {
        throw ConfigError("scan.evaluator", err.what());
      }
    }
    if (scan.contains("truncation")) {
      const json& t = scan.at("truncation");
      if (!t.is_null()) {
        require_object(t, "scan.truncation");
        reject_unknown(t, {"max_lattice_index", "term_floor"}, "scan.truncation");
        TruncationPolicy p;
        if (t.contains("max_lattice_index")) {
          p.max_lattice_index = get_int(t.at("max_lattice_index"), "scan.truncation.max_lattice_index");
        }
        if (t.contains("term_floor")) p.term_floor = get_number(t.at("term_floor"), "scan.truncation.term_floor");
        c.truncation = p;
      }
    }
  }
  if (c.z_list.empty()) c.z_list = {z_r, 1.5 * z_r, 2.0 * z_r};

  if (root.contains("outputs")) {
    const json& outs = root.at("outputs");
    if (!outs.is_array()) throw ConfigError("outputs", "expected a list");
    c.outputs.clear();
    for (std::size_t i = 0; i < outs.size(); ++i) {
      const std::string where = "outputs[" + std::to_string(i) + "]";
      if (!outs[i].is_string()) throw ConfigError(where, "expected a string");
      const std::string name = outs[i].get<std::string>();
      bool found = false;
      for (const auto& o : kOutputNames) {
        if (o.name == name) {
          c.outputs.push_back(o.kind);
          found = true;
        }
      }
      if (!found) throw ConfigError(where, "unknown output '" + name + "'");
    }
  }
  c.validate();
  return c;
}

}  // namespace

std::string_view to_string(OutputKind k) {
  for (const auto& o : kOutputNames) {
    if (o.kind == k) return o.name;
  }
  return "?";
}

std::vector<double> ScanConfig::planes() const {
  if (!z_list.empty()) return z_list;
  const double z_r = rayleigh_range();
  return {z_r, 1.5 * z_r, 2.0 * z_r};
}

void ScanConfig::validate() const {
  try {
    array.validate();
  } catch (const DomainError& e) {
    throw ConfigError("array", e.what());
  }
  for (std::size_t i = 0; i < z_list.size(); ++i) {
    if (!(z_list[i] > 0.0) || !std::isfinite(z_list[i])) {
      throw ConfigError("scan.z[" + std::to_string(i) + "]", "z must be > 0");
    }
  }
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw ConfigError("scan.half_width", "grid extent must be > 0");
  }
  if (resolution < 2) throw ConfigError("scan.resolution", "grid resolution must be >= 2");
  if (truncation) {
    try {
      truncation->validate();
    } catch (const DomainError& e) {
      throw ConfigError("scan.truncation", e.what());
    }
  }
}

ScanConfig parse_config(const std::string& text, const std::string& origin) {
  std::string body = text;
  // CSV exports carry the configuration on their echo line.
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '#') {
    std::istringstream in(text);
    std::string line;
    bool found = false;
    while (std::getline(in, line)) {
      if (line.rfind(kEchoPrefix, 0) == 0) {
        body = line.substr(std::string(kEchoPrefix).size());
        found = true;
        break;
      }
    }
    if (!found) throw ConfigError(origin, "no '" + std::string(kEchoPrefix) + "' line in header");
  }
  json root;
  try {
    root = json::parse(body);
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_column(body, e.byte == 0 ? 0 : e.byte - 1);
    throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(column),
                      std::string("parse error: ") + e.what());
  }
  try {
    return from_json(root);
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.where(),
                      std::string(e.what()).substr(e.where().empty() ? 0 : e.where().size() + 2));
  } catch (const json::exception& e) {
    throw ConfigError(origin, e.what());
  }
}

ScanConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string config_to_json(const ScanConfig& c) {
  json arr = json::object();
  arr["N"] = c.array.n_emitters;
  arr["l"] = c.array.phase_param;
  arr["m_z"] = c.array.m_z;
  arr["R"] = c.array.radius;
  arr["lambda"] = c.array.wavelength;
  arr["amplitude_scale"] = c.array.amplitude_scale;
  arr["helicity_normalization"] = c.array.helicity_normalization;

  json scan = json::object();
  scan["z"] = c.planes();
  scan["half_width"] = c.half_width;
  scan["resolution"] = c.resolution;
  scan["evaluator"] = std::string(to_string(c.evaluator));
  if (c.truncation) {
    scan["truncation"] = {{"max_lattice_index", c.truncation->max_lattice_index},
                          {"term_floor", c.truncation->term_floor}};
  } else {
    scan["truncation"] = nullptr;
  }

  json outs = json::array();
  for (OutputKind k : c.outputs) outs.push_back(std::string(to_string(k)));

  json root = json::object();
  root["array"] = arr;
  root["scan"] = scan;
  root["outputs"] = outs;
  return root.dump();
}

}  // namespace vortex
