#pragma once

#include <algorithm>
#include <array>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "hfv/emulation.hpp"
#include "hfv/partition.hpp"
#include "hfv/residual.hpp"
#include "hfv/state.hpp"

namespace hfv::harness {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CaseKind { cartesian_mms, ramp_inlet, sod_tube, couette };

inline const char* case_kind_name(CaseKind k) {
  switch (k) {
    case CaseKind::cartesian_mms: return "cartesian_mms";
    case CaseKind::ramp_inlet: return "ramp_inlet";
    case CaseKind::sod_tube: return "sod_tube";
    case CaseKind::couette: return "couette";
  }
  return "?";
}

struct CaseConfig {
  CaseKind kind = CaseKind::ramp_inlet;
  std::string name;

  int ni = 0;
  int nj = 0;
  double x_extent = 1.0;
  double y_extent = 1.0;
  double ramp_angle = 10.0;
  double inlet_length = 1.0;
  double ramp_length = 2.0;
  double height = 1.5;

  FlowMode mode = FlowMode::euler;
  std::string scheme = "rk4";
  double cfl = 0.5;
  int steps = 0;
  double dt = 0.0;
  double epsilon = 1.0;
  double kappa = -1.0;

  GasModel gas;
  double mach = 4.0;
  double pressure = 12270.0;
  double temperature = 217.0;
  double flow_angle = 0.0;  // degrees

  std::array<std::string, 4> boundary;  // west, east, south, north
  double south_wall_speed = 0.0;
  double north_wall_speed = 0.0;

  WorkerSpec workers;
  std::vector<double> W_list;
  std::string emulation = "auto";
  double pace_factor = 4.0;
  double boundary_factor = 0.3;
  int timeout_ms = 10000;

  std::string out_dir = "out";
};

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError("invalid number for " + key + ": '" + v + "'");
  }
  if (trim(v.substr(pos)).size() != 0) throw ConfigError("invalid number for " + key + ": '" + v + "'");
  return out;
}

inline int parse_int(const std::string& key, const std::string& v) {
  const double d = parse_double(key, v);
  if (d != static_cast<double>(static_cast<long>(d))) throw ConfigError("expected an integer for " + key + ": '" + v + "'");
  return static_cast<int>(d);
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  return out;
}

inline void apply_kind_defaults(CaseConfig& c) {
  switch (c.kind) {
    case CaseKind::ramp_inlet:
      c.boundary = {"supersonic_inflow", "supersonic_outflow", "slip_wall", "supersonic_outflow"};
      break;
    case CaseKind::cartesian_mms:
      c.boundary = {"manufactured", "manufactured", "manufactured", "manufactured"};
      c.cfl = 0.8;
      break;
    case CaseKind::sod_tube:
      c.boundary = {"supersonic_outflow", "supersonic_outflow", "slip_wall", "slip_wall"};
      c.scheme = "rk2";
      break;
    case CaseKind::couette:
      c.boundary = {"supersonic_outflow", "supersonic_outflow", "no_slip_adiabatic_wall", "no_slip_adiabatic_wall"};
      c.mode = FlowMode::navier_stokes;
      c.gas.mu = 0.05;
      c.x_extent = 0.25;
      c.north_wall_speed = 0.1;
      c.cfl = 0.8;
      break;
  }
}

}  // namespace detail

inline CaseKind case_kind_from_name(const std::string& s) {
  if (s == "cartesian_mms") return CaseKind::cartesian_mms;
  if (s == "ramp_inlet") return CaseKind::ramp_inlet;
  if (s == "sod_tube") return CaseKind::sod_tube;
  if (s == "couette") return CaseKind::couette;
  throw ConfigError("invalid value for [case] kind: '" + s + "' (expected cartesian_mms, ramp_inlet, sod_tube or couette)");
}

inline const std::vector<std::string>& boundary_kind_names() {
  static const std::vector<std::string> names{"supersonic_inflow", "supersonic_outflow", "slip_wall",
                                              "no_slip_adiabatic_wall", "manufactured"};
  return names;
}

inline void validate_config(const CaseConfig& c) {
  if (c.ni < 1 || c.nj < 1) throw ConfigError("[grid] ni and nj must be >= 1");
  if (c.steps < 1) throw ConfigError("[solver] steps must be >= 1");
  if (c.scheme != "rk2" && c.scheme != "rk4")
    throw ConfigError("invalid value for [solver] scheme: '" + c.scheme + "' (expected rk2 or rk4)");
  if (!(c.cfl > 0.0)) throw ConfigError("[solver] cfl must be positive");
  if (c.dt < 0.0) throw ConfigError("[solver] dt must be non-negative");
  if (c.epsilon != 0.0 && c.epsilon != 1.0) throw ConfigError("[solver] epsilon must be 0 or 1");
  if (c.kappa < -1.0 || c.kappa > 1.0) throw ConfigError("[solver] kappa must lie in [-1, 1]");
  try {
    c.gas.validate();
    c.workers.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (c.mode == FlowMode::navier_stokes && !(c.gas.mu > 0.0)) throw ConfigError("[gas] mu must be positive for ns");
  for (double w : c.W_list)
    if (!(w > 0.0)) throw ConfigError("[workers] W_list entries must be positive");
  for (const auto& b : c.boundary) {
    const auto& names = boundary_kind_names();
    if (std::find(names.begin(), names.end(), b) == names.end())
      throw ConfigError("invalid boundary kind '" + b + "'");
  }
  if (c.kind == CaseKind::ramp_inlet && !(c.ramp_angle > 0.0 && c.ramp_angle < 45.0))
    throw ConfigError("[grid] ramp_angle must lie in (0, 45)");
  if (!(c.pace_factor >= 1.0)) throw ConfigError("[workers] pace_factor must be >= 1");
  if (!(c.boundary_factor >= 0.0)) throw ConfigError("[workers] boundary_factor must be non-negative");
  if (c.timeout_ms < 1) throw ConfigError("[workers] timeout_ms must be >= 1");
  if (c.emulation != "auto") {
    try {
      (void)emulation_mode_from_name(c.emulation);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("[workers] emulation: ") + e.what());
    }
  }
}

// Parse `[section]` / `key = value` text. Unknown sections or keys, malformed
// values and missing required keys are all ConfigError.
inline CaseConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }

  CaseConfig c;
  const auto kind = tree.get_optional<std::string>("case.kind");
  if (!kind) throw ConfigError("missing required key [case] kind");
  c.kind = case_kind_from_name(detail::trim(*kind));
  detail::apply_kind_defaults(c);

  using Setter = std::function<void(const std::string& key, const std::string& value)>;
  auto num = [](double& field) -> Setter { return [&field](auto& k, auto& v) { field = detail::parse_double(k, v); }; };
  auto integer = [](int& field) -> Setter { return [&field](auto& k, auto& v) { field = detail::parse_int(k, v); }; };
  auto text = [](std::string& field) -> Setter { return [&field](auto&, auto& v) { field = v; }; };

  const std::map<std::string, std::map<std::string, Setter>> table{
      {"case", {{"kind", [](auto&, auto&) {}}, {"name", text(c.name)}}},
      {"grid",
       {{"ni", integer(c.ni)},
        {"nj", integer(c.nj)},
        {"x_extent", num(c.x_extent)},
        {"y_extent", num(c.y_extent)},
        {"ramp_angle", num(c.ramp_angle)},
        {"inlet_length", num(c.inlet_length)},
        {"ramp_length", num(c.ramp_length)},
        {"height", num(c.height)}}},
      {"solver",
       {{"mode",
         [&c](auto& k, auto& v) {
           if (v == "euler") c.mode = FlowMode::euler;
           else if (v == "ns") c.mode = FlowMode::navier_stokes;
           else throw ConfigError("invalid value for " + k + ": '" + v + "' (expected euler or ns)");
         }},
        {"scheme", text(c.scheme)},
        {"cfl", num(c.cfl)},
        {"steps", integer(c.steps)},
        {"dt", num(c.dt)},
        {"epsilon", num(c.epsilon)},
        {"kappa", num(c.kappa)}}},
      {"gas", {{"gamma", num(c.gas.gamma)}, {"R", num(c.gas.R)}, {"mu", num(c.gas.mu)}, {"Pr", num(c.gas.Pr)}}},
      {"inflow",
       {{"mach", num(c.mach)},
        {"pressure", num(c.pressure)},
        {"temperature", num(c.temperature)},
        {"angle", num(c.flow_angle)}}},
      {"boundary",
       {{"west", text(c.boundary[0])},
        {"east", text(c.boundary[1])},
        {"south", text(c.boundary[2])},
        {"north", text(c.boundary[3])},
        {"south_wall_speed", num(c.south_wall_speed)},
        {"north_wall_speed", num(c.north_wall_speed)}}},
      {"workers",
       {{"G", integer(c.workers.G)},
        {"C", integer(c.workers.C)},
        {"r_gc", num(c.workers.r_gc)},
        {"W", num(c.workers.W)},
        {"W_list", [&c](auto& k, auto& v) { c.W_list = detail::parse_list(k, v); }},
        {"emulation", text(c.emulation)},
        {"pace_factor", num(c.pace_factor)},
        {"boundary_factor", num(c.boundary_factor)},
        {"timeout_ms", integer(c.timeout_ms)}}},
      {"output", {{"dir", text(c.out_dir)}}},
  };

  for (const auto& [section, body] : tree) {
    const auto sec = table.find(section);
    if (sec == table.end()) throw ConfigError("unknown section [" + section + "]");
    if (!body.data().empty()) throw ConfigError("key '" + section + "' outside any section");
    for (const auto& [key, node] : body) {
      const auto setter = sec->second.find(key);
      const std::string full = "[" + section + "] " + key;
      if (setter == sec->second.end()) throw ConfigError("unknown key " + full);
      setter->second(full, detail::trim(node.data()));
    }
  }

  for (const char* req : {"grid.ni", "grid.nj", "solver.steps"})
    if (!tree.get_optional<std::string>(req)) {
      std::string r = req;
      const auto dot = r.find('.');
      throw ConfigError("missing required key [" + r.substr(0, dot) + "] " + r.substr(dot + 1));
    }
  if (c.name.empty()) c.name = case_kind_name(c.kind);
  if (c.kind == CaseKind::sod_tube && !tree.get_optional<std::string>("grid.y_extent"))
    c.y_extent = c.x_extent / c.ni;
  validate_config(c);
  return c;
}

inline CaseConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

inline CaseConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

// Output directory, overridden by HFV_OUT_DIR when set.
inline std::string output_dir(const CaseConfig& c) {
  if (const char* env = std::getenv("HFV_OUT_DIR"); env && *env) return env;
  return c.out_dir;
}

}  // namespace hfv::harness
