// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "visim/config.hpp"
#include "visim/network.hpp"
#include "visim/radio.hpp"
#include "visim/traffic.hpp"

namespace visim::run {

/// Simulation inputs resolved from a scenario config, built once and reused
/// across modes and seeds. The network is shared so the position samplers can
/// hold onto it safely.
struct Scenario {
  config::ScenarioConfig cfg;
  std::shared_ptr<const net::Network> network;
  radio::SystemParams system;
  traffic::TrafficProfile profile;
  traffic::PositionSampler uniform_positions;  // over the central site's area
  traffic::PositionSampler hotspot_positions;  // over the beams' serving islands
  net::ServingMap baseline_map;                // beams off
  net::ServingMap active_map;                  // beams on, full per-Hz power
};

Scenario build_scenario(const config::ScenarioConfig& cfg);

/// Expands "all" and removes duplicates, keeping first-occurrence order.
std::vector<radio::RadioMode> resolve_modes(const std::vector<std::string>& names);

/// Whole-run aggregates for the comparison summary.
struct ModeSummary {
  radio::RadioMode mode = radio::RadioMode::Baseline;
  long long completions = 0;
  double mean_mut_bps = 0.0;  // mean per-flow throughput over the run
  double cet_bps = 0.0;       // 5th percentile per-flow throughput
  double mean_ftt_s = 0.0;
  double peak_load = 0.0;     // max windowed load
};

ModeSummary summarize(const traffic::SimResult& result);

/// Runs every requested mode with the configured seed and writes
/// kpis_<mode>.csv, flows_<mode>.csv, summary.csv and manifest.txt into
/// cfg.sim.out_dir. Returns the paths of all files written.
std::vector<std::string> run_campaign(const config::ScenarioConfig& cfg);

/// Writes serving_map.csv and serving_map.pgm (beams active) to out_dir.
std::vector<std::string> write_maps(const Scenario& scenario, const std::string& out_dir);

}  // namespace visim::run
