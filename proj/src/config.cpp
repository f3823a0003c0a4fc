// SPDX-License-Identifier: Apache-2.0
#include "visim/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "visim/units.hpp"

namespace visim::config {

using nlohmann::json;

namespace {

void check_keys(const json& j, const char* where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw std::runtime_error(std::string(where) + ": expected an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        known = true;
        break;
      }
    if (!known) throw std::runtime_error(std::string(where) + ": unknown key '" + item.key() + "'");
  }
}

void merge(const json& j, LayoutConfig& c) {
  check_keys(j, "layout", {"isd_m", "rings", "azimuth_offset_deg", "bs_height_m", "ue_height_m"});
  c.isd_m = j.value("isd_m", c.isd_m);
  c.rings = j.value("rings", c.rings);
  c.azimuth_offset_deg = j.value("azimuth_offset_deg", c.azimuth_offset_deg);
  c.bs_height_m = j.value("bs_height_m", c.bs_height_m);
  c.ue_height_m = j.value("ue_height_m", c.ue_height_m);
}

void merge(const json& j, MacroConfig& c) {
  check_keys(j, "macro",
             {"power_dbm", "max_gain_dbi", "hpbw_azimuth_deg", "hpbw_elevation_deg",
              "front_to_back_db", "sla_db", "downtilt_deg"});
  c.power_dbm = j.value("power_dbm", c.power_dbm);
  c.max_gain_dbi = j.value("max_gain_dbi", c.max_gain_dbi);
  c.hpbw_azimuth_deg = j.value("hpbw_azimuth_deg", c.hpbw_azimuth_deg);
  c.hpbw_elevation_deg = j.value("hpbw_elevation_deg", c.hpbw_elevation_deg);
  c.front_to_back_db = j.value("front_to_back_db", c.front_to_back_db);
  c.sla_db = j.value("sla_db", c.sla_db);
  c.downtilt_deg = j.value("downtilt_deg", c.downtilt_deg);
}

void merge(const json& j, ArrayConfig& c) {
  check_keys(j, "array", {"nx", "nz", "dx_wavelengths", "dz_wavelengths", "taper_x", "taper_z"});
  c.nx = j.value("nx", c.nx);
  c.nz = j.value("nz", c.nz);
  c.dx_wavelengths = j.value("dx_wavelengths", c.dx_wavelengths);
  c.dz_wavelengths = j.value("dz_wavelengths", c.dz_wavelengths);
  c.taper_x = j.value("taper_x", c.taper_x);
  c.taper_z = j.value("taper_z", c.taper_z);
}

void merge(const json& j, VisConfig& c) {
  check_keys(j, "vis[]", {"parent_sector", "vertical_tilt_deg", "horizontal_tilt_deg"});
  c.parent_sector = j.value("parent_sector", c.parent_sector);
  c.vertical_tilt_deg = j.value("vertical_tilt_deg", c.vertical_tilt_deg);
  c.horizontal_tilt_deg = j.value("horizontal_tilt_deg", c.horizontal_tilt_deg);
}

void merge(const json& j, SystemConfig& c) {
  check_keys(j, "system", {"bandwidth_hz", "noise_dbm_per_hz", "max_spectral_efficiency"});
  c.bandwidth_hz = j.value("bandwidth_hz", c.bandwidth_hz);
  c.noise_dbm_per_hz = j.value("noise_dbm_per_hz", c.noise_dbm_per_hz);
  c.max_spectral_efficiency = j.value("max_spectral_efficiency", c.max_spectral_efficiency);
}

void merge(const json& j, MapConfig& c) {
  check_keys(j, "map", {"resolution_m", "half_extent_m"});
  c.resolution_m = j.value("resolution_m", c.resolution_m);
  c.half_extent_m = j.value("half_extent_m", c.half_extent_m);
}

void merge(const json& j, TrafficConfig& c) {
  check_keys(j, "traffic", {"mean_file_mbit", "steps"});
  c.mean_file_mbit = j.value("mean_file_mbit", c.mean_file_mbit);
  if (j.contains("steps")) {
    if (!j["steps"].is_array()) throw std::runtime_error("traffic.steps: expected an array");
    c.steps.clear();
    for (const auto& js : j["steps"]) {
      check_keys(js, "traffic.steps[]", {"start_s", "uniform_per_s", "hotspot_per_s"});
      TrafficStepConfig s;
      s.start_s = js.value("start_s", 0.0);
      s.uniform_per_s = js.value("uniform_per_s", 0.0);
      s.hotspot_per_s = js.value("hotspot_per_s", 0.0);
      c.steps.push_back(s);
    }
  }
}

void merge(const json& j, SimConfig& c) {
  check_keys(j, "sim", {"duration_s", "kpi_window_s", "seed", "modes", "out_dir"});
  c.duration_s = j.value("duration_s", c.duration_s);
  c.kpi_window_s = j.value("kpi_window_s", c.kpi_window_s);
  c.seed = j.value("seed", c.seed);
  if (j.contains("modes")) {
    if (!j["modes"].is_array()) throw std::runtime_error("sim.modes: expected an array");
    c.modes.clear();
    for (const auto& m : j["modes"]) c.modes.push_back(m.get<std::string>());
  }
  c.out_dir = j.value("out_dir", c.out_dir);
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("scenario parse error: ") + e.what());
  }
  check_keys(j, "scenario",
             {"layout", "macro", "array", "vis", "system", "map", "pattern_step_deg", "traffic",
              "sim"});
  ScenarioConfig cfg;
  try {
    if (j.contains("layout")) merge(j["layout"], cfg.layout);
    if (j.contains("macro")) merge(j["macro"], cfg.macro);
    if (j.contains("array")) merge(j["array"], cfg.array);
    if (j.contains("vis")) {
      if (!j["vis"].is_array()) throw std::runtime_error("vis: expected an array");
      cfg.vis.clear();
      for (const auto& jv : j["vis"]) {
        VisConfig v;
        merge(jv, v);
        cfg.vis.push_back(v);
      }
    }
    if (j.contains("system")) merge(j["system"], cfg.system);
    if (j.contains("map")) merge(j["map"], cfg.map);
    cfg.pattern_step_deg = j.value("pattern_step_deg", cfg.pattern_step_deg);
    if (j.contains("traffic")) merge(j["traffic"], cfg.traffic);
    if (j.contains("sim")) merge(j["sim"], cfg.sim);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("scenario field error: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string serialize_scenario(const ScenarioConfig& cfg) {
  json j;
  j["layout"] = {{"isd_m", cfg.layout.isd_m},
                 {"rings", cfg.layout.rings},
                 {"azimuth_offset_deg", cfg.layout.azimuth_offset_deg},
                 {"bs_height_m", cfg.layout.bs_height_m},
                 {"ue_height_m", cfg.layout.ue_height_m}};
  j["macro"] = {{"power_dbm", cfg.macro.power_dbm},
                {"max_gain_dbi", cfg.macro.max_gain_dbi},
                {"hpbw_azimuth_deg", cfg.macro.hpbw_azimuth_deg},
                {"hpbw_elevation_deg", cfg.macro.hpbw_elevation_deg},
                {"front_to_back_db", cfg.macro.front_to_back_db},
                {"sla_db", cfg.macro.sla_db},
                {"downtilt_deg", cfg.macro.downtilt_deg}};
  j["array"] = {{"nx", cfg.array.nx},
                {"nz", cfg.array.nz},
                {"dx_wavelengths", cfg.array.dx_wavelengths},
                {"dz_wavelengths", cfg.array.dz_wavelengths},
                {"taper_x", cfg.array.taper_x},
                {"taper_z", cfg.array.taper_z}};
  j["vis"] = json::array();
  for (const auto& v : cfg.vis)
    j["vis"].push_back({{"parent_sector", v.parent_sector},
                        {"vertical_tilt_deg", v.vertical_tilt_deg},
                        {"horizontal_tilt_deg", v.horizontal_tilt_deg}});
  j["system"] = {{"bandwidth_hz", cfg.system.bandwidth_hz},
                 {"noise_dbm_per_hz", cfg.system.noise_dbm_per_hz},
                 {"max_spectral_efficiency", cfg.system.max_spectral_efficiency}};
  j["map"] = {{"resolution_m", cfg.map.resolution_m}, {"half_extent_m", cfg.map.half_extent_m}};
  j["pattern_step_deg"] = cfg.pattern_step_deg;
  j["traffic"]["mean_file_mbit"] = cfg.traffic.mean_file_mbit;
  j["traffic"]["steps"] = json::array();
  for (const auto& s : cfg.traffic.steps)
    j["traffic"]["steps"].push_back({{"start_s", s.start_s},
                                     {"uniform_per_s", s.uniform_per_s},
                                     {"hotspot_per_s", s.hotspot_per_s}});
  j["sim"] = {{"duration_s", cfg.sim.duration_s},
              {"kpi_window_s", cfg.sim.kpi_window_s},
              {"seed", cfg.sim.seed},
              {"modes", cfg.sim.modes},
              {"out_dir", cfg.sim.out_dir}};
  return j.dump(2) + "\n";
}

void validate(const ScenarioConfig& cfg) {
  auto fail = [](const std::string& msg) { throw std::runtime_error("scenario: " + msg); };
  if (cfg.layout.isd_m <= 0.0) fail("layout.isd_m must be positive");
  if (cfg.layout.rings < 0) fail("layout.rings must be non-negative");
  if (cfg.layout.ue_height_m <= 0.0 || cfg.layout.bs_height_m <= cfg.layout.ue_height_m)
    fail("heights must satisfy 0 < ue_height_m < bs_height_m");
  if (cfg.array.nx < 1 || cfg.array.nz < 1) fail("array dimensions must be at least 1");
  if (!(cfg.array.dx_wavelengths > 0.0 && cfg.array.dx_wavelengths <= 1.0) ||
      !(cfg.array.dz_wavelengths > 0.0 && cfg.array.dz_wavelengths <= 1.0))
    fail("element spacings must lie in (0, 1] wavelengths");
  if (!(cfg.array.taper_x > 0.0 && cfg.array.taper_x <= 1.0) ||
      !(cfg.array.taper_z > 0.0 && cfg.array.taper_z <= 1.0))
    fail("taper ratios must lie in (0, 1]");
  std::set<int> parents;
  for (const auto& v : cfg.vis) {
    if (v.parent_sector < 0 || v.parent_sector > 2) fail("vis parent_sector must be 0..2");
    if (!parents.insert(v.parent_sector).second) fail("one beam per sector");
    if (!(v.vertical_tilt_deg > -90.0 && v.vertical_tilt_deg < 90.0))
      fail("vertical tilt must lie in (-90, 90) degrees");
    if (!(v.horizontal_tilt_deg > -90.0 && v.horizontal_tilt_deg < 90.0))
      fail("horizontal tilt must lie in (-90, 90) degrees");
  }
  if (cfg.system.bandwidth_hz <= 0.0) fail("system.bandwidth_hz must be positive");
  if (cfg.system.max_spectral_efficiency <= 0.0)
    fail("system.max_spectral_efficiency must be positive");
  if (cfg.map.resolution_m <= 0.0) fail("map.resolution_m must be positive");
  if (cfg.map.half_extent_m < cfg.map.resolution_m) fail("map.half_extent_m too small");
  if (!(cfg.pattern_step_deg > 0.0 && cfg.pattern_step_deg <= 0.25))
    fail("pattern_step_deg must lie in (0, 0.25]");
  if (cfg.traffic.mean_file_mbit <= 0.0) fail("traffic.mean_file_mbit must be positive");
  double prev = -1e300;
  for (const auto& s : cfg.traffic.steps) {
    if (!(s.start_s > prev)) fail("traffic.steps must have strictly increasing start_s");
    if (s.uniform_per_s < 0.0 || s.hotspot_per_s < 0.0) fail("arrival rates must be non-negative");
    prev = s.start_s;
  }
  if (cfg.sim.duration_s < 0.0) fail("sim.duration_s must be non-negative");
  if (cfg.sim.kpi_window_s <= 0.0) fail("sim.kpi_window_s must be positive");
  if (cfg.sim.modes.empty()) fail("sim.modes must not be empty");
  for (const auto& m : cfg.sim.modes)
    if (m != "all") (void)parse_mode(m);
  if (cfg.sim.out_dir.empty()) fail("sim.out_dir must not be empty");
  bool any_hotspot = false;
  for (const auto& s : cfg.traffic.steps) any_hotspot = any_hotspot || s.hotspot_per_s > 0.0;
  if (any_hotspot && cfg.vis.empty()) fail("hotspot traffic requires at least one beam");
}

net::NetworkParams make_network_params(const ScenarioConfig& cfg) {
  net::NetworkParams p;
  p.layout.isd_m = cfg.layout.isd_m;
  p.layout.rings = cfg.layout.rings;
  p.layout.azimuth_offset_rad = deg2rad(cfg.layout.azimuth_offset_deg);
  p.layout.bs_height_m = cfg.layout.bs_height_m;
  p.layout.ue_height_m = cfg.layout.ue_height_m;
  p.macro_power_dbm = cfg.macro.power_dbm;
  p.macro_antenna.gain_dbi = cfg.macro.max_gain_dbi;
  p.macro_antenna.phi_3db_rad = deg2rad(cfg.macro.hpbw_azimuth_deg);
  p.macro_antenna.theta_3db_rad = deg2rad(cfg.macro.hpbw_elevation_deg);
  p.macro_antenna.front_to_back_db = cfg.macro.front_to_back_db;
  p.macro_antenna.sla_db = cfg.macro.sla_db;
  p.macro_antenna.downtilt_rad = deg2rad(cfg.macro.downtilt_deg);
  p.vis_design = antenna::ArrayDesign{cfg.array.nx,
                                      cfg.array.nz,
                                      cfg.array.dx_wavelengths,
                                      cfg.array.dz_wavelengths,
                                      cfg.array.taper_x,
                                      cfg.array.taper_z};
  for (const auto& v : cfg.vis)
    p.vis.push_back(net::VisPlacement{v.parent_sector, deg2rad(v.vertical_tilt_deg),
                                      deg2rad(v.horizontal_tilt_deg)});
  p.pattern_step_rad = deg2rad(cfg.pattern_step_deg);
  return p;
}

radio::SystemParams make_system(const ScenarioConfig& cfg) {
  return radio::SystemParams{cfg.system.bandwidth_hz, cfg.system.noise_dbm_per_hz,
                             cfg.system.max_spectral_efficiency};
}

traffic::TrafficProfile make_profile(const ScenarioConfig& cfg) {
  std::vector<traffic::TrafficStep> steps;
  steps.reserve(cfg.traffic.steps.size());
  for (const auto& s : cfg.traffic.steps)
    steps.push_back(traffic::TrafficStep{s.start_s, s.uniform_per_s, s.hotspot_per_s});
  return traffic::TrafficProfile(std::move(steps));
}

traffic::SimOptions make_sim_options(const ScenarioConfig& cfg) {
  traffic::SimOptions opt;
  opt.seed = cfg.sim.seed;
  opt.duration_s = cfg.sim.duration_s;
  opt.kpi_window_s = cfg.sim.kpi_window_s;
  opt.mean_file_bits = cfg.traffic.mean_file_mbit * 1e6;
  return opt;
}

radio::RadioMode parse_mode(const std::string& name) {
  if (name == "baseline") return radio::RadioMode::Baseline;
  if (name == "reuse1") return radio::RadioMode::ReuseOne;
  if (name == "sharing") return radio::RadioMode::Sharing;
  throw std::runtime_error("unknown mode '" + name + "' (expected baseline|reuse1|sharing)");
}

std::string mode_name(radio::RadioMode mode) {
  switch (mode) {
    case radio::RadioMode::Baseline: return "baseline";
    case radio::RadioMode::ReuseOne: return "reuse1";
    case radio::RadioMode::Sharing: return "sharing";
  }
  return "unknown";
}

}  // namespace visim::config
