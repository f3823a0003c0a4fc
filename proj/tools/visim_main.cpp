// SPDX-License-Identifier: Apache-2.0
//
// visim: flow-level downlink simulator for virtually sectorized macro cells.
// Subcommands: antenna (pattern synthesis and side-lobe report), map
// (serving-cell raster), run (traffic simulation campaign).

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "visim/antenna.hpp"
#include "visim/config.hpp"
#include "visim/runner.hpp"
#include "visim/units.hpp"

namespace {

using namespace visim;

std::string g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

double to_dbi(double linear) {
  // Pattern nulls are exact zeros; keep the CSVs plottable with a deep floor.
  return linear > 0.0 ? std::max(linear_to_db(linear), -400.0) : -400.0;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::size_t nearest_index(const std::vector<double>& samples, double value) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (std::abs(samples[i] - value) < std::abs(samples[best] - value)) best = i;
  return best;
}

struct AntennaArgs {
  int nx = 10;
  int nz = 40;
  double dx = 0.5;
  double dz = 0.7;
  double taper_x = 1.0;
  double taper_z = 1.0;
  double theta_e_deg = 90.0;
  double phi_e_deg = 0.0;
  double step_deg = 0.25;
  double sll_limit_db = -30.0;
  std::string out_dir = "antenna_out";
};

int cmd_antenna(const AntennaArgs& a) {
  const antenna::ArrayDesign design{a.nx, a.nz, a.dx, a.dz, a.taper_x, a.taper_z};
  const antenna::Steering steering{deg2rad(a.theta_e_deg), deg2rad(a.phi_e_deg)};
  design.validate();
  steering.validate();
  if (!(a.step_deg > 0.0 && a.step_deg <= 0.25))
    throw std::invalid_argument("step must lie in (0, 0.25] degrees");

  const double step = deg2rad(a.step_deg);
  const antenna::GainPattern pattern = antenna::compute_pattern(design, steering, step);
  const double g0 = antenna::max_gain(design, steering, step);
  const double sll = antenna::side_lobe_level_db(pattern, steering);

  std::filesystem::create_directories(a.out_dir);
  const std::filesystem::path out(a.out_dir);

  const std::size_t ip = nearest_index(pattern.phi_samples, steering.phi_e);
  std::string eplane = "theta_deg,gain_dbi\n";
  for (std::size_t it = 0; it < pattern.theta_samples.size(); ++it)
    eplane += g9(rad2deg(pattern.theta_samples[it])) + ',' + g9(to_dbi(pattern.at(it, ip))) + "\n";
  write_file((out / "eplane.csv").string(), eplane);

  const std::size_t it0 = nearest_index(pattern.theta_samples, steering.theta_e);
  std::string hplane = "phi_deg,gain_dbi\n";
  for (std::size_t jp = 0; jp < pattern.phi_samples.size(); ++jp)
    hplane += g9(rad2deg(pattern.phi_samples[jp])) + ',' + g9(to_dbi(pattern.at(it0, jp))) + "\n";
  write_file((out / "hplane.csv").string(), hplane);

  std::string grid = "theta_deg,phi_deg,gain_dbi\n";
  for (std::size_t it = 0; it < pattern.theta_samples.size(); ++it)
    for (std::size_t jp = 0; jp < pattern.phi_samples.size(); ++jp)
      grid += g9(rad2deg(pattern.theta_samples[it])) + ',' + g9(rad2deg(pattern.phi_samples[jp])) +
              ',' + g9(to_dbi(pattern.at(it, jp))) + "\n";
  write_file((out / "grid.csv").string(), grid);

  const bool pass = sll <= a.sll_limit_db;
  std::string report;
  report += "design: nx=" + std::to_string(a.nx) + " nz=" + std::to_string(a.nz) +
            " dx=" + g9(a.dx) + " dz=" + g9(a.dz) + " taper_x=" + g9(a.taper_x) +
            " taper_z=" + g9(a.taper_z) + "\n";
  report += "steering: theta_e_deg=" + g9(a.theta_e_deg) + " phi_e_deg=" + g9(a.phi_e_deg) + "\n";
  report += "gain_scale_dbi=" + g9(linear_to_db(g0)) + "\n";
  report += "peak_gain_dbi=" + g9(to_dbi(pattern.g0)) + "\n";
  report += "sll_db=" + g9(sll) + "\n";
  report += "sll_limit_db=" + g9(a.sll_limit_db) + "\n";
  report += std::string("verdict=") + (pass ? "pass" : "fail") + "\n";
  write_file((out / "report.txt").string(), report);

  std::cout << report;
  std::cout << "wrote " << (out / "eplane.csv").string() << ", " << (out / "hplane.csv").string()
            << ", " << (out / "grid.csv").string() << ", " << (out / "report.txt").string()
            << "\n";
  return pass ? 0 : 2;
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir;      // override
  double resolution_m = 0;  // override when > 0
  double duration_s = -1;   // override when >= 0
  std::uint64_t seed = 0;   // override when seed_set
  bool seed_set = false;
  std::vector<std::string> modes;  // override when nonempty
};

config::ScenarioConfig load_with_overrides(const CommonArgs& args) {
  config::ScenarioConfig cfg = config::load_scenario(args.config_path);
  if (!args.out_dir.empty()) cfg.sim.out_dir = args.out_dir;
  if (args.resolution_m > 0) cfg.map.resolution_m = args.resolution_m;
  if (args.duration_s >= 0) cfg.sim.duration_s = args.duration_s;
  if (args.seed_set) cfg.sim.seed = args.seed;
  if (!args.modes.empty()) cfg.sim.modes = args.modes;
  config::validate(cfg);
  return cfg;
}

int cmd_map(const CommonArgs& args) {
  const config::ScenarioConfig cfg = load_with_overrides(args);
  const run::Scenario scenario = run::build_scenario(cfg);
  for (const auto& path : run::write_maps(scenario, cfg.sim.out_dir))
    std::cout << "wrote " << path << "\n";
  return 0;
}

int cmd_run(const CommonArgs& args) {
  const config::ScenarioConfig cfg = load_with_overrides(args);
  for (const auto& path : run::run_campaign(cfg)) std::cout << "wrote " << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flow-level downlink simulator with virtual sectorization"};
  app.require_subcommand(1);

  AntennaArgs aa;
  CLI::App* antenna = app.add_subcommand("antenna", "pattern cuts, gain and side-lobe report");
  antenna->add_option("--nx", aa.nx, "elements along x");
  antenna->add_option("--nz", aa.nz, "elements along z");
  antenna->add_option("--dx", aa.dx, "x spacing in wavelengths");
  antenna->add_option("--dz", aa.dz, "z spacing in wavelengths");
  antenna->add_option("--taper-x", aa.taper_x, "edge amplitude ratio along x");
  antenna->add_option("--taper-z", aa.taper_z, "edge amplitude ratio along z");
  antenna->add_option("--theta-e", aa.theta_e_deg, "polar steering angle, degrees");
  antenna->add_option("--phi-e", aa.phi_e_deg, "azimuth steering angle, degrees");
  antenna->add_option("--step", aa.step_deg, "pattern grid step, degrees");
  antenna->add_option("--sll-limit", aa.sll_limit_db, "side-lobe limit, dB");
  antenna->add_option("--out", aa.out_dir, "output directory");

  CommonArgs ma;
  CLI::App* map = app.add_subcommand("map", "serving-cell raster (CSV and PGM)");
  map->add_option("--config", ma.config_path, "scenario file")->required();
  map->add_option("--resolution", ma.resolution_m, "raster resolution, meters");
  map->add_option("--out", ma.out_dir, "output directory");

  CommonArgs ra;
  CLI::App* runc = app.add_subcommand("run", "simulate the configured modes and write KPIs");
  runc->add_option("--config", ra.config_path, "scenario file")->required();
  runc->add_option("--seed", ra.seed, "RNG seed")->each([&ra](const std::string&) {
    ra.seed_set = true;
  });
  runc->add_option("--mode", ra.modes, "baseline|reuse1|sharing|all (repeatable)");
  runc->add_option("--out", ra.out_dir, "output directory");
  runc->add_option("--duration", ra.duration_s, "simulated seconds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (antenna->parsed()) return cmd_antenna(aa);
    if (map->parsed()) return cmd_map(ma);
    if (runc->parsed()) return cmd_run(ra);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
