#include "clg/config.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace clg {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("config: " + msg); }

void check_keys(const json& obj, const std::string& prefix, const std::set<std::string>& allowed) {
  for (const auto& item : obj.items())
    if (!allowed.count(item.key()))
      fail("unknown key '" + (prefix.empty() ? item.key() : prefix + "." + item.key()) + "'");
}

const json& require(const json& obj, const std::string& prefix, const std::string& key) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail("missing key '" + (prefix.empty() ? key : prefix + "." + key) + "'");
  return *it;
}

Real as_number(const json& v, const std::string& key) {
  if (!v.is_number()) fail("'" + key + "' must be a number");
  return v.get<Real>();
}

long as_integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) fail("'" + key + "' must be an integer");
  return v.get<long>();
}

std::string as_string(const json& v, const std::string& key) {
  if (!v.is_string()) fail("'" + key + "' must be a string");
  return v.get<std::string>();
}

bool power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

void parse_geometry(const json& j, SimulationConfig& cfg) {
  check_keys(j, "geometry", {"type", "dims", "lengths"});
  const std::string type = as_string(require(j, "geometry", "type"), "geometry.type");
  if (type == "periodic3d")
    cfg.geometry = Geometry::Periodic3D;
  else if (type == "channel")
    cfg.geometry = Geometry::Channel;
  else
    fail("'geometry.type' must be \"periodic3d\" or \"channel\", got \"" + type + "\"");

  const json& dims = require(j, "geometry", "dims");
  if (!dims.is_array() || dims.size() != 3) fail("'geometry.dims' must be [nx, ny, nz]");
  for (int a = 0; a < 3; ++a)
    cfg.dims[static_cast<size_t>(a)] =
        static_cast<Index>(as_integer(dims[static_cast<size_t>(a)], "geometry.dims"));
  if (!power_of_two(cfg.dims[0]) || !power_of_two(cfg.dims[1]))
    fail("'geometry.dims': nx and ny must be powers of two");
  if (cfg.geometry == Geometry::Periodic3D && !power_of_two(cfg.dims[2]))
    fail("'geometry.dims': nz must be a power of two for periodic3d");
  if (cfg.geometry == Geometry::Channel && cfg.dims[2] < 6)
    fail("'geometry.dims': channel needs nz >= 6");

  const json& len = require(j, "geometry", "lengths");
  if (!len.is_array() || len.size() != 3) fail("'geometry.lengths' must be [Lx, Ly, Lz]");
  for (int a = 0; a < 3; ++a) {
    cfg.lengths[static_cast<size_t>(a)] =
        as_number(len[static_cast<size_t>(a)], "geometry.lengths");
    if (!(cfg.lengths[static_cast<size_t>(a)] > 0)) fail("'geometry.lengths' must be positive");
  }
}

void parse_preset(const json& j, SimulationConfig& cfg) {
  check_keys(j, "preset", {"name", "params"});
  cfg.preset = as_string(require(j, "preset", "name"), "preset.name");
  static const std::set<std::string> known = {"abc", "shear", "channel-vortex", "zero"};
  if (!known.count(cfg.preset)) fail("'preset.name': unknown preset \"" + cfg.preset + "\"");
  if (j.contains("params")) {
    const json& p = j["params"];
    if (!p.is_object()) fail("'preset.params' must be an object");
    for (const auto& item : p.items())
      cfg.preset_params[item.key()] = as_number(item.value(), "preset.params." + item.key());
  }

  const bool channel = cfg.geometry == Geometry::Channel;
  const char* geom_name = channel ? "channel" : "periodic3d";
  if (cfg.preset == "abc" && channel)
    fail("preset \"abc\" requires geometry \"periodic3d\" but geometry is \"channel\"");
  if ((cfg.preset == "shear" || cfg.preset == "channel-vortex") && !channel)
    fail("preset \"" + cfg.preset + "\" requires geometry \"channel\" but geometry is \"" +
         geom_name + "\"");
}

void parse_time(const json& j, SimulationConfig& cfg) {
  check_keys(j, "time", {"t_end", "cfl_fraction", "dt_max"});
  cfg.t_end = as_number(require(j, "time", "t_end"), "time.t_end");
  if (!(cfg.t_end >= 0)) fail("'time.t_end' must be nonnegative");
  if (j.contains("cfl_fraction")) {
    cfg.cfl_fraction = as_number(j["cfl_fraction"], "time.cfl_fraction");
    if (!(cfg.cfl_fraction > 0 && cfg.cfl_fraction <= 0.5))
      fail("'time.cfl_fraction' must lie in (0, 0.5]");
  }
  if (j.contains("dt_max")) {
    cfg.dt_max = as_number(j["dt_max"], "time.dt_max");
    if (!(*cfg.dt_max > 0)) fail("'time.dt_max' must be positive");
  }
}

void parse_weights(const json& j, SimulationConfig& cfg) {
  check_keys(j, "weights", {"kind", "r"});
  const std::string kind = as_string(require(j, "weights", "kind"), "weights.kind");
  if (kind == "analytic") {
    cfg.weights_kind = WeightKind::Analytic;
    if (j.contains("r")) fail("'weights.r' is only valid for kind \"gevrey\"");
  } else if (kind == "gevrey") {
    cfg.weights_kind = WeightKind::Gevrey;
    cfg.gevrey_r = as_number(require(j, "weights", "r"), "weights.r");
    if (!(cfg.gevrey_r > 0)) fail("'weights.r' must be positive");
  } else {
    fail("'weights.kind' must be \"analytic\" or \"gevrey\", got \"" + kind + "\"");
  }
}

void parse_estimator(const json& j, SimulationConfig& cfg) {
  check_keys(j, "estimator", {"constants"});
  const json& c = require(j, "estimator", "constants");
  if (!c.is_object()) fail("'estimator.constants' must be an object");
  check_keys(c, "estimator.constants",
             {"C_a", "M_0", "M_1", "C_DN", "C_daS", "C_Sad", "omega0_norm"});
  EstimateConstants ec;
  auto grab = [&](const char* key, Real& slot) {
    if (c.contains(key)) {
      slot = as_number(c[key], std::string("estimator.constants.") + key);
      if (!(slot > 0)) fail(std::string("'estimator.constants.") + key + "' must be positive");
    }
  };
  grab("C_a", ec.C_a);
  grab("M_0", ec.M_0);
  grab("M_1", ec.M_1);
  grab("C_DN", ec.C_DN);
  grab("C_daS", ec.C_daS);
  grab("C_Sad", ec.C_Sad);
  grab("omega0_norm", ec.omega0_norm);
  cfg.estimator = ec;
}

void parse_output(const json& j, SimulationConfig& cfg) {
  check_keys(j, "output", {"dir", "snapshot_every", "diagnostics_file"});
  if (j.contains("dir")) {
    cfg.output_dir = as_string(j["dir"], "output.dir");
    if (cfg.output_dir.empty()) fail("'output.dir' must be nonempty");
  }
  if (j.contains("snapshot_every")) {
    cfg.snapshot_every = as_integer(j["snapshot_every"], "output.snapshot_every");
    if (cfg.snapshot_every < 0) fail("'output.snapshot_every' must be >= 0");
  }
  if (j.contains("diagnostics_file")) {
    cfg.diagnostics_file = as_string(j["diagnostics_file"], "output.diagnostics_file");
    if (cfg.diagnostics_file.empty()) fail("'output.diagnostics_file' must be nonempty");
  }
}

void parse_limits(const json& j, SimulationConfig& cfg) {
  check_keys(j, "limits", {"residual_ceiling"});
  if (j.contains("residual_ceiling")) {
    cfg.residual_ceiling = as_number(j["residual_ceiling"], "limits.residual_ceiling");
    if (!(cfg.residual_ceiling > 0)) fail("'limits.residual_ceiling' must be positive");
  }
}

} // namespace

SimulationConfig parse_config(const std::string& json_text) {
  const json root = json::parse(json_text, nullptr, false);
  if (root.is_discarded()) fail("invalid JSON");
  if (!root.is_object()) fail("top level must be an object");
  check_keys(root, "",
             {"geometry", "preset", "taylor_order", "time", "weights", "estimator", "output",
              "limits"});

  SimulationConfig cfg;
  parse_geometry(require(root, "", "geometry"), cfg);
  parse_preset(require(root, "", "preset"), cfg);

  if (root.contains("taylor_order")) {
    const long S = as_integer(root["taylor_order"], "taylor_order");
    if (S < 2 || S > 16) fail("taylor_order out of range [2,16]");
    cfg.taylor_order = static_cast<int>(S);
  }

  parse_time(require(root, "", "time"), cfg);
  if (root.contains("weights")) parse_weights(root["weights"], cfg);
  if (root.contains("estimator")) parse_estimator(root["estimator"], cfg);
  if (root.contains("output")) parse_output(root["output"], cfg);
  if (root.contains("limits")) parse_limits(root["limits"], cfg);
  return cfg;
}

SimulationConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

LabelGrid SimulationConfig::make_grid() const {
  if (geometry == Geometry::Periodic3D)
    return make_periodic_grid(dims[0], dims[1], dims[2], lengths[0], lengths[1], lengths[2]);
  return make_channel_grid(dims[0], dims[1], dims[2], lengths[0], lengths[1], lengths[2]);
}

WeightSequence SimulationConfig::make_weight_sequence(int kmax) const {
  if (weights_kind == WeightKind::Gevrey) return make_weights_gevrey(gevrey_r, kmax);
  return make_weights_analytic(kmax);
}

} // namespace clg
