// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "visim/network.hpp"
#include "visim/radio.hpp"
#include "visim/traffic.hpp"

namespace visim::config {

/// Scenario file schema. Angles are degrees here (the file is meant to be
/// edited by hand); builders convert to radians.
struct LayoutConfig {
  double isd_m = 500.0;
  int rings = 2;
  double azimuth_offset_deg = 0.0;
  double bs_height_m = 32.0;
  double ue_height_m = 1.5;
};

struct MacroConfig {
  double power_dbm = 46.0;
  double max_gain_dbi = 14.0;
  double hpbw_azimuth_deg = 70.0;
  double hpbw_elevation_deg = 10.0;
  double front_to_back_db = 25.0;
  double sla_db = 20.0;
  double downtilt_deg = 8.0;
};

struct ArrayConfig {
  int nx = 10;
  int nz = 40;
  double dx_wavelengths = 0.5;
  double dz_wavelengths = 0.7;
  double taper_x = 1.0;
  double taper_z = 1.0;
};

struct VisConfig {
  int parent_sector = 0;  // central site sector index, 0..2
  double vertical_tilt_deg = 0.0;
  double horizontal_tilt_deg = 0.0;
};

struct SystemConfig {
  double bandwidth_hz = 10e6;
  double noise_dbm_per_hz = -174.0;
  double max_spectral_efficiency = 4.4;
};

struct MapConfig {
  double resolution_m = 10.0;
  double half_extent_m = 500.0;  // raster covers [-h, h] in both axes
};

struct TrafficStepConfig {
  double start_s = 0.0;
  double uniform_per_s = 0.0;
  double hotspot_per_s = 0.0;
};

struct TrafficConfig {
  double mean_file_mbit = 3.0;
  std::vector<TrafficStepConfig> steps;
};

struct SimConfig {
  double duration_s = 0.0;
  double kpi_window_s = 10.0;
  std::uint64_t seed = 1;
  std::vector<std::string> modes = {"baseline", "reuse1", "sharing"};
  std::string out_dir = "out";
};

struct ScenarioConfig {
  LayoutConfig layout;
  MacroConfig macro;
  ArrayConfig array;
  std::vector<VisConfig> vis;
  SystemConfig system;
  MapConfig map;
  double pattern_step_deg = 0.25;
  TrafficConfig traffic;
  SimConfig sim;
};

/// Parses a scenario file (JSON with // and /* */ comments allowed). Fields
/// not present keep their defaults; unknown keys are rejected. The result is
/// validated. Throws std::runtime_error with a location-bearing message.
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario(const std::string& text);

/// Serializes every field; parse(serialize(cfg)) reproduces cfg.
std::string serialize_scenario(const ScenarioConfig& cfg);

/// Range and consistency checks; throws std::runtime_error on violation.
void validate(const ScenarioConfig& cfg);

net::NetworkParams make_network_params(const ScenarioConfig& cfg);
radio::SystemParams make_system(const ScenarioConfig& cfg);
traffic::TrafficProfile make_profile(const ScenarioConfig& cfg);
traffic::SimOptions make_sim_options(const ScenarioConfig& cfg);

/// "baseline" | "reuse1" | "sharing"; throws std::runtime_error otherwise.
radio::RadioMode parse_mode(const std::string& name);
std::string mode_name(radio::RadioMode mode);

}  // namespace visim::config
