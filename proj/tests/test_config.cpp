// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "visim/config.hpp"
#include "visim/runner.hpp"
#include "visim/units.hpp"

using namespace visim;
using namespace visim::config;

namespace {

ScenarioConfig busy_config() {
  ScenarioConfig cfg;
  cfg.layout.isd_m = 400.0;
  cfg.layout.rings = 1;
  cfg.layout.azimuth_offset_deg = 15.0;
  cfg.macro.downtilt_deg = 6.0;
  cfg.array.taper_x = 0.18;
  cfg.array.taper_z = 0.15;
  cfg.vis = {{0, 10.0, 0.0}, {2, 12.0, -15.0}};
  cfg.system.bandwidth_hz = 20e6;
  cfg.map.resolution_m = 25.0;
  cfg.map.half_extent_m = 600.0;
  cfg.pattern_step_deg = 0.2;
  cfg.traffic.mean_file_mbit = 2.5;
  cfg.traffic.steps = {{0.0, 1.0, 0.0}, {60.0, 3.5, 0.8}, {120.0, 0.5, 0.0}};
  cfg.sim.duration_s = 300.0;
  cfg.sim.kpi_window_s = 30.0;
  cfg.sim.seed = 99;
  cfg.sim.modes = {"sharing", "baseline"};
  cfg.sim.out_dir = "results";
  return cfg;
}

}  // namespace

TEST_CASE("an empty document yields the default scenario") {
  const ScenarioConfig cfg = parse_scenario("{}");
  CHECK(cfg.layout.isd_m == doctest::Approx(500.0));
  CHECK(cfg.layout.rings == 2);
  CHECK(cfg.layout.bs_height_m == doctest::Approx(32.0));
  CHECK(cfg.layout.ue_height_m == doctest::Approx(1.5));
  CHECK(cfg.macro.power_dbm == doctest::Approx(46.0));
  CHECK(cfg.macro.downtilt_deg == doctest::Approx(8.0));
  CHECK(cfg.macro.hpbw_azimuth_deg == doctest::Approx(70.0));
  CHECK(cfg.array.nx == 10);
  CHECK(cfg.array.nz == 40);
  CHECK(cfg.array.taper_x == doctest::Approx(1.0));
  CHECK(cfg.vis.empty());
  CHECK(cfg.system.bandwidth_hz == doctest::Approx(10e6));
  CHECK(cfg.system.noise_dbm_per_hz == doctest::Approx(-174.0));
  CHECK(cfg.system.max_spectral_efficiency == doctest::Approx(4.4));
  CHECK(cfg.map.resolution_m == doctest::Approx(10.0));
  CHECK(cfg.map.half_extent_m == doctest::Approx(500.0));
  CHECK(cfg.pattern_step_deg == doctest::Approx(0.25));
  CHECK(cfg.traffic.mean_file_mbit == doctest::Approx(3.0));
  CHECK(cfg.traffic.steps.empty());
  CHECK(cfg.sim.duration_s == doctest::Approx(0.0).scale(1.0));
  CHECK(cfg.sim.kpi_window_s == doctest::Approx(10.0));
  CHECK(cfg.sim.seed == 1);
  CHECK(cfg.sim.modes == std::vector<std::string>{"baseline", "reuse1", "sharing"});
  CHECK(cfg.sim.out_dir == "out");
}

TEST_CASE("serialization round-trips every field byte for byte") {
  const ScenarioConfig cfg = busy_config();
  const std::string text = serialize_scenario(cfg);
  const ScenarioConfig back = parse_scenario(text);
  CHECK(serialize_scenario(back) == text);

  CHECK(back.layout.isd_m == doctest::Approx(400.0));
  CHECK(back.layout.azimuth_offset_deg == doctest::Approx(15.0));
  CHECK(back.macro.downtilt_deg == doctest::Approx(6.0));
  CHECK(back.array.taper_z == doctest::Approx(0.15));
  REQUIRE(back.vis.size() == 2);
  CHECK(back.vis[1].parent_sector == 2);
  CHECK(back.vis[1].horizontal_tilt_deg == doctest::Approx(-15.0));
  REQUIRE(back.traffic.steps.size() == 3);
  CHECK(back.traffic.steps[1].start_s == doctest::Approx(60.0));
  CHECK(back.traffic.steps[1].hotspot_per_s == doctest::Approx(0.8));
  CHECK(back.sim.modes == std::vector<std::string>{"sharing", "baseline"});
  CHECK(back.sim.seed == 99);
  CHECK(back.sim.out_dir == "results");

  // Defaults survive the same loop.
  const std::string defaults = serialize_scenario(ScenarioConfig{});
  CHECK(serialize_scenario(parse_scenario(defaults)) == defaults);
}

TEST_CASE("scenario files may carry comments") {
  const ScenarioConfig cfg = parse_scenario(R"({
    // sparse deployment for a quick look
    "layout": {"rings": 1},
    /* hotspot rates stay zero, so no beams are needed */
    "traffic": {"steps": [{"start_s": 0, "uniform_per_s": 2.0}]}
  })");
  CHECK(cfg.layout.rings == 1);
  REQUIRE(cfg.traffic.steps.size() == 1);
  CHECK(cfg.traffic.steps[0].uniform_per_s == doctest::Approx(2.0));
}

TEST_CASE("unknown keys and malformed documents are rejected") {
  CHECK_THROWS_AS((void)parse_scenario("{\"layout\": {\"isd\": 1}}"),
                  std::runtime_error);
  CHECK_THROWS_AS((void)parse_scenario("{\"mystery\": 1}"), std::runtime_error);
  CHECK_THROWS_AS((void)parse_scenario("not json"), std::runtime_error);
  CHECK_THROWS_AS((void)parse_scenario("{\"vis\": 3}"), std::runtime_error);
  CHECK_THROWS_AS((void)parse_scenario("{\"sim\": {\"modes\": \"all\"}}"),
                  std::runtime_error);

  // Error messages carry enough context to find the offending key.
  try {
    (void)parse_scenario("{\"layout\": {\"isd\": 1}}");
    FAIL("expected a parse rejection");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("layout") != std::string::npos);
    CHECK(msg.find("isd") != std::string::npos);
  }
}

TEST_CASE("validation rejects out-of-range scenarios") {
  auto expect_invalid = [](void (*tweak)(ScenarioConfig&)) {
    ScenarioConfig cfg = busy_config();
    tweak(cfg);
    CHECK_THROWS_AS(validate(cfg), std::runtime_error);
  };

  expect_invalid([](ScenarioConfig& c) { c.layout.isd_m = 0.0; });
  expect_invalid([](ScenarioConfig& c) { c.layout.rings = -1; });
  expect_invalid([](ScenarioConfig& c) { c.layout.bs_height_m = 1.0; });
  expect_invalid([](ScenarioConfig& c) { c.array.nx = 0; });
  expect_invalid([](ScenarioConfig& c) { c.array.dx_wavelengths = 1.5; });
  expect_invalid([](ScenarioConfig& c) { c.array.taper_x = 0.0; });
  expect_invalid([](ScenarioConfig& c) { c.array.taper_z = 1.0001; });
  expect_invalid([](ScenarioConfig& c) { c.vis.push_back({0, 5.0, 0.0}); });
  expect_invalid([](ScenarioConfig& c) { c.vis[0].parent_sector = 3; });
  expect_invalid([](ScenarioConfig& c) { c.vis[0].vertical_tilt_deg = 90.0; });
  expect_invalid([](ScenarioConfig& c) { c.system.bandwidth_hz = 0.0; });
  expect_invalid([](ScenarioConfig& c) { c.map.resolution_m = 0.0; });
  expect_invalid([](ScenarioConfig& c) { c.map.half_extent_m = 1.0; });
  expect_invalid([](ScenarioConfig& c) { c.pattern_step_deg = 0.3; });
  expect_invalid([](ScenarioConfig& c) { c.traffic.mean_file_mbit = 0.0; });
  expect_invalid([](ScenarioConfig& c) { c.traffic.steps[2].start_s = 60.0; });
  expect_invalid([](ScenarioConfig& c) { c.traffic.steps[0].uniform_per_s = -1.0; });
  expect_invalid([](ScenarioConfig& c) { c.sim.duration_s = -1.0; });
  expect_invalid([](ScenarioConfig& c) { c.sim.kpi_window_s = 0.0; });
  expect_invalid([](ScenarioConfig& c) { c.sim.modes.clear(); });
  expect_invalid([](ScenarioConfig& c) { c.sim.modes = {"fast"}; });
  expect_invalid([](ScenarioConfig& c) { c.sim.out_dir.clear(); });
  // Hotspot arrivals make no sense without a beam to aim them at.
  expect_invalid([](ScenarioConfig& c) { c.vis.clear(); });

  CHECK_NOTHROW(validate(busy_config()));
  CHECK_NOTHROW(validate(ScenarioConfig{}));
}

TEST_CASE("mode names parse both ways") {
  CHECK(parse_mode("baseline") == radio::RadioMode::Baseline);
  CHECK(parse_mode("reuse1") == radio::RadioMode::ReuseOne);
  CHECK(parse_mode("sharing") == radio::RadioMode::Sharing);
  CHECK_THROWS_AS((void)parse_mode("all"), std::runtime_error);
  CHECK_THROWS_AS((void)parse_mode("Baseline"), std::runtime_error);

  CHECK(mode_name(radio::RadioMode::Baseline) == "baseline");
  CHECK(mode_name(radio::RadioMode::ReuseOne) == "reuse1");
  CHECK(mode_name(radio::RadioMode::Sharing) == "sharing");

  using run::resolve_modes;
  const auto all = resolve_modes({"all"});
  REQUIRE(all.size() == 3);
  CHECK(all[0] == radio::RadioMode::Baseline);
  CHECK(all[1] == radio::RadioMode::ReuseOne);
  CHECK(all[2] == radio::RadioMode::Sharing);
  // Duplicates collapse, explicit order wins.
  const auto mixed = resolve_modes({"sharing", "all", "sharing"});
  REQUIRE(mixed.size() == 3);
  CHECK(mixed[0] == radio::RadioMode::Sharing);
  CHECK(mixed[1] == radio::RadioMode::Baseline);
  CHECK(mixed[2] == radio::RadioMode::ReuseOne);
}

TEST_CASE("builders convert the schema into engine parameters") {
  const ScenarioConfig cfg = busy_config();

  const net::NetworkParams np = make_network_params(cfg);
  CHECK(np.layout.isd_m == doctest::Approx(400.0));
  CHECK(np.layout.rings == 1);
  CHECK(np.layout.azimuth_offset_rad == doctest::Approx(deg2rad(15.0)).epsilon(1e-15));
  CHECK(np.macro_antenna.downtilt_rad == doctest::Approx(deg2rad(6.0)).epsilon(1e-15));
  CHECK(np.macro_antenna.phi_3db_rad == doctest::Approx(deg2rad(70.0)).epsilon(1e-15));
  CHECK(np.vis_design.n_x == 10);
  CHECK(np.vis_design.taper_ratio_x == doctest::Approx(0.18));
  REQUIRE(np.vis.size() == 2);
  CHECK(np.vis[0].parent_sector == 0);
  CHECK(np.vis[0].vertical_tilt_rad == doctest::Approx(deg2rad(10.0)).epsilon(1e-15));
  CHECK(np.vis[1].horizontal_tilt_rad == doctest::Approx(deg2rad(-15.0)).epsilon(1e-15));
  CHECK(np.pattern_step_rad == doctest::Approx(deg2rad(0.2)).epsilon(1e-15));

  const radio::SystemParams sys = make_system(cfg);
  CHECK(sys.bandwidth_hz == doctest::Approx(20e6));
  CHECK(sys.noise_dbm_per_hz == doctest::Approx(-174.0));
  CHECK(sys.max_spectral_efficiency == doctest::Approx(4.4));

  const traffic::TrafficProfile profile = make_profile(cfg);
  REQUIRE(profile.steps().size() == 3);
  CHECK(profile.rate_at(70.0, traffic::Layer::Uniform) == doctest::Approx(3.5));
  CHECK(profile.rate_at(70.0, traffic::Layer::Hotspot) == doctest::Approx(0.8));

  const traffic::SimOptions opt = make_sim_options(cfg);
  CHECK(opt.seed == 99);
  CHECK(opt.duration_s == doctest::Approx(300.0));
  CHECK(opt.kpi_window_s == doctest::Approx(30.0));
  CHECK(opt.mean_file_bits == doctest::Approx(2.5e6));
}

TEST_CASE("scenario files load from disk with located errors") {
  namespace fs = std::filesystem;
  const fs::path path = fs::temp_directory_path() / "visim_config_roundtrip.scenario";
  {
    std::ofstream out(path);
    out << serialize_scenario(busy_config());
  }
  const ScenarioConfig cfg = load_scenario(path.string());
  CHECK(cfg.sim.seed == 99);
  fs::remove(path);

  try {
    (void)load_scenario((fs::temp_directory_path() / "visim_no_such_file.scenario").string());
    FAIL("expected a load failure");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("visim_no_such_file") != std::string::npos);
  }
}

TEST_CASE("summaries aggregate a result's completions") {
  traffic::SimResult r;
  r.mode = radio::RadioMode::Sharing;
  traffic::KpiPoint k;
  k.max_load = 0.7;
  r.kpis = {k};
  traffic::CompletedFlow f1;
  f1.volume_bits = 1e6;
  f1.ftt_s = 1.0;
  traffic::CompletedFlow f2;
  f2.volume_bits = 9e6;
  f2.ftt_s = 3.0;
  r.completed = {f1, f2};

  const run::ModeSummary s = run::summarize(r);
  CHECK(s.mode == radio::RadioMode::Sharing);
  CHECK(s.completions == 2);
  CHECK(s.peak_load == doctest::Approx(0.7));
  CHECK(s.mean_mut_bps == doctest::Approx((1e6 + 3e6) / 2.0).epsilon(1e-12));
  CHECK(s.cet_bps == doctest::Approx(1e6).epsilon(1e-12));
  CHECK(s.mean_ftt_s == doctest::Approx(2.0).epsilon(1e-12));

  const run::ModeSummary empty = run::summarize(traffic::SimResult{});
  CHECK(empty.completions == 0);
  CHECK(std::isnan(empty.mean_mut_bps));
}
