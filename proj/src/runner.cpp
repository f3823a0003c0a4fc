// SPDX-License-Identifier: Apache-2.0
#include "visim/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace visim::run {

namespace {

std::string g9(double v) {
  if (std::isnan(v)) return {};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

}  // namespace

Scenario build_scenario(const config::ScenarioConfig& cfg) {
  config::validate(cfg);
  Scenario sc;
  sc.cfg = cfg;
  sc.network = std::make_shared<net::Network>(config::make_network_params(cfg));
  sc.system = config::make_system(cfg);
  sc.profile = config::make_profile(cfg);

  const auto& network = sc.network;
  const Vec2 lo{-cfg.map.half_extent_m, -cfg.map.half_extent_m};
  const Vec2 hi{cfg.map.half_extent_m, cfg.map.half_extent_m};
  const auto powers_off = radio::per_hz_power_mw(*network, sc.system, radio::RadioMode::Baseline);
  const auto powers_on = radio::per_hz_power_mw(*network, sc.system, radio::RadioMode::Sharing);
  sc.baseline_map = net::compute_serving_map(*network, powers_off, lo, hi, cfg.map.resolution_m);
  sc.active_map = net::compute_serving_map(*network, powers_on, lo, hi, cfg.map.resolution_m);

  const auto central = network->sites().front().sector_cells;
  auto is_central_macro = [central](int id) {
    return id == central[0] || id == central[1] || id == central[2];
  };
  traffic::RegionSampler uniform_region(
      sc.baseline_map, is_central_macro,
      [network, powers_off, is_central_macro](Vec2 p) {
        return is_central_macro(network->serving_cell(p, powers_off));
      });
  if (uniform_region.empty())
    throw std::runtime_error("the central site serves no raster pixel; widen map.half_extent_m");
  sc.uniform_positions = [region = std::move(uniform_region)](Rng& rng) { return region(rng); };

  if (!cfg.vis.empty()) {
    const std::size_t macro_count = network->macro_count();
    auto is_beam = [macro_count](int id) { return id >= static_cast<int>(macro_count); };
    traffic::RegionSampler hotspot_region(
        sc.active_map, is_beam,
        [network, powers_on, is_beam](Vec2 p) {
          return is_beam(network->serving_cell(p, powers_on));
        });
    if (hotspot_region.empty())
      throw std::runtime_error("no beam serves any raster pixel; check tilts and map extent");
    sc.hotspot_positions = [region = std::move(hotspot_region)](Rng& rng) { return region(rng); };
  }
  return sc;
}

std::vector<radio::RadioMode> resolve_modes(const std::vector<std::string>& names) {
  std::vector<radio::RadioMode> modes;
  auto add = [&modes](radio::RadioMode m) {
    if (std::find(modes.begin(), modes.end(), m) == modes.end()) modes.push_back(m);
  };
  for (const auto& name : names) {
    if (name == "all") {
      add(radio::RadioMode::Baseline);
      add(radio::RadioMode::ReuseOne);
      add(radio::RadioMode::Sharing);
    } else {
      add(config::parse_mode(name));
    }
  }
  return modes;
}

ModeSummary summarize(const traffic::SimResult& result) {
  ModeSummary s;
  s.mode = result.mode;
  s.completions = static_cast<long long>(result.completed.size());
  for (const auto& k : result.kpis) s.peak_load = std::max(s.peak_load, k.max_load);
  if (result.completed.empty()) {
    s.mean_mut_bps = s.cet_bps = s.mean_ftt_s = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  std::vector<double> throughputs;
  throughputs.reserve(result.completed.size());
  double sum_tp = 0.0;
  double sum_ftt = 0.0;
  for (const auto& f : result.completed) {
    const double tp = f.volume_bits / f.ftt_s;
    throughputs.push_back(tp);
    sum_tp += tp;
    sum_ftt += f.ftt_s;
  }
  const auto n = static_cast<double>(result.completed.size());
  s.mean_mut_bps = sum_tp / n;
  s.mean_ftt_s = sum_ftt / n;
  s.cet_bps = traffic::percentile_nearest_rank(std::move(throughputs), 0.05);
  return s;
}

std::vector<std::string> run_campaign(const config::ScenarioConfig& cfg) {
  const Scenario sc = build_scenario(cfg);
  const auto modes = resolve_modes(cfg.sim.modes);
  const auto options = config::make_sim_options(cfg);

  std::filesystem::create_directories(cfg.sim.out_dir);
  const std::filesystem::path out(cfg.sim.out_dir);
  std::vector<std::string> names;
  std::vector<std::string> written;

  std::string summary = "mode,completions,mean_mut_bps,cet_bps,mean_ftt_s,peak_load\n";
  for (radio::RadioMode mode : modes) {
    const traffic::SimResult result = traffic::run_scenario(
        *sc.network, sc.system, mode, sc.profile, sc.uniform_positions, sc.hotspot_positions,
        options);
    const std::string tag = config::mode_name(mode);

    std::ostringstream kpis;
    traffic::write_kpis_csv(kpis, result);
    names.push_back("kpis_" + tag + ".csv");
    written.push_back((out / names.back()).string());
    write_file(written.back(), kpis.str());

    std::ostringstream flows;
    traffic::write_flows_csv(flows, result);
    names.push_back("flows_" + tag + ".csv");
    written.push_back((out / names.back()).string());
    write_file(written.back(), flows.str());

    const ModeSummary ms = summarize(result);
    summary += tag + ',' + std::to_string(ms.completions) + ',' + g9(ms.mean_mut_bps) + ',' +
               g9(ms.cet_bps) + ',' + g9(ms.mean_ftt_s) + ',' + g9(ms.peak_load) + "\n";
  }
  names.emplace_back("summary.csv");
  written.push_back((out / "summary.csv").string());
  write_file(written.back(), summary);

  std::string manifest;
  for (const auto& n : names) manifest += n + "\n";
  written.push_back((out / "manifest.txt").string());
  write_file(written.back(), manifest);
  return written;
}

std::vector<std::string> write_maps(const Scenario& scenario, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path out(out_dir);
  std::vector<std::string> written;
  written.push_back((out / "serving_map.csv").string());
  write_file(written.back(), net::serving_map_csv(scenario.active_map));
  const int max_id = static_cast<int>(scenario.network->cells().size()) - 1;
  written.push_back((out / "serving_map.pgm").string());
  write_file(written.back(), net::serving_map_pgm(scenario.active_map, max_id));
  return written;
}

}  // namespace visim::run
