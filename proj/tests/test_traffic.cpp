// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "test_fixtures.hpp"
#include "visim/radio.hpp"
#include "visim/rng.hpp"
#include "visim/traffic.hpp"
#include "visim/units.hpp"

using namespace visim;
using namespace visim::net;
using namespace visim::radio;
using namespace visim::traffic;

namespace {

TrafficProfile constant_profile(double uniform_per_s, double hotspot_per_s) {
  return TrafficProfile{{{0.0, uniform_per_s, hotspot_per_s}}};
}

PositionSampler fixed_at(Vec2 pos) {
  return [pos](Rng&) { return pos; };
}

}  // namespace

TEST_CASE("profile steps apply from their start to the next boundary") {
  const TrafficProfile p{{{0.0, 1.0, 0.0}, {10.0, 2.0, 0.5}, {30.0, 0.0, 0.0}}};
  CHECK(p.rate_at(-1.0, Layer::Uniform) == 0.0);
  CHECK(p.rate_at(0.0, Layer::Uniform) == 1.0);
  CHECK(p.rate_at(9.999, Layer::Uniform) == 1.0);
  CHECK(p.rate_at(10.0, Layer::Uniform) == 2.0);
  CHECK(p.rate_at(10.0, Layer::Hotspot) == 0.5);
  CHECK(p.rate_at(29.99, Layer::Hotspot) == 0.5);
  CHECK(p.rate_at(30.0, Layer::Uniform) == 0.0);
  CHECK(p.rate_at(1e9, Layer::Hotspot) == 0.0);

  CHECK(p.next_boundary_after(-5.0) == 0.0);
  CHECK(p.next_boundary_after(0.0) == 10.0);
  CHECK(p.next_boundary_after(5.0) == 10.0);
  CHECK(p.next_boundary_after(10.0) == 30.0);
  CHECK(std::isinf(p.next_boundary_after(30.0)));

  CHECK_THROWS_AS(TrafficProfile({{5.0, 1.0, 0.0}, {5.0, 2.0, 0.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(TrafficProfile({{0.0, -1.0, 0.0}}), std::invalid_argument);
}

TEST_CASE("nearest-rank percentile") {
  std::vector<double> ordered;
  for (int i = 1; i <= 100; ++i) ordered.push_back(static_cast<double>(i));
  CHECK(percentile_nearest_rank(ordered, 0.05) == doctest::Approx(5.0));
  CHECK(percentile_nearest_rank(ordered, 1.0) == doctest::Approx(100.0));

  std::vector<double> nineteen;
  for (int i = 19; i >= 1; --i) nineteen.push_back(static_cast<double>(i));
  // ceil(0.05 * 19) = 1: the sample minimum, input order irrelevant.
  CHECK(percentile_nearest_rank(nineteen, 0.05) == doctest::Approx(1.0));

  CHECK(percentile_nearest_rank({7.0}, 0.05) == doctest::Approx(7.0));
  CHECK(std::isnan(percentile_nearest_rank({}, 0.05)));
  CHECK_THROWS_AS((void)percentile_nearest_rank({1.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)percentile_nearest_rank({1.0}, 1.1), std::invalid_argument);
}

TEST_CASE("KPI measurement over a window of completions") {
  CompletedFlow a;
  a.volume_bits = 3e6;
  a.ftt_s = 0.3;
  const std::vector<double> busy{0.2, 0.9, 0.4};

  const KpiPoint single = measure_kpis(60.0, 60.0, std::vector<CompletedFlow>{a},
                                       busy, {0.25, 0.5});
  CHECK(single.time_s == doctest::Approx(60.0));
  CHECK(single.window_s == doctest::Approx(60.0));
  CHECK(single.completions == 1);
  CHECK(single.mut_bps == doctest::Approx(1e7).epsilon(1e-12));
  CHECK(single.cet_bps == doctest::Approx(1e7).epsilon(1e-12));
  CHECK(single.mean_ftt_s == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(single.max_load == doctest::Approx(0.9).epsilon(1e-12));
  REQUIRE(single.deltas.size() == 2);
  CHECK(single.deltas[0] == doctest::Approx(0.25));

  CompletedFlow b;
  b.volume_bits = 4e6;
  b.ftt_s = 2.0;
  CompletedFlow c;
  c.volume_bits = 4e6;
  c.ftt_s = 1.0;
  a.volume_bits = 1e6;
  a.ftt_s = 1.0;
  const KpiPoint three =
      measure_kpis(120.0, 60.0, std::vector<CompletedFlow>{a, b, c}, busy, {});
  CHECK(three.mut_bps == doctest::Approx(7e6 / 3.0).epsilon(1e-12));
  CHECK(three.cet_bps == doctest::Approx(1e6).epsilon(1e-12));
  CHECK(three.mean_ftt_s == doctest::Approx(4.0 / 3.0).epsilon(1e-12));

  const KpiPoint empty = measure_kpis(180.0, 60.0, {}, busy, {});
  CHECK(empty.completions == 0);
  CHECK(std::isnan(empty.mut_bps));
  CHECK(std::isnan(empty.cet_bps));
  CHECK(std::isnan(empty.mean_ftt_s));
  CHECK(empty.max_load == doctest::Approx(0.9));
}

TEST_CASE("region sampler draws inside the selected pixels only") {
  const Network n = fixtures::single_site_network();
  const std::vector<double> powers{1.0, 1.0, 1.0};
  const ServingMap map =
      compute_serving_map(n, powers, {-30.0, -30.0}, {30.0, 30.0}, 20.0);

  auto exact = [&](Vec2 p) { return n.serving_cell(p, powers) == 0; };
  const RegionSampler sampler(map, [](int id) { return id == 0; }, exact);
  CHECK_FALSE(sampler.empty());
  CHECK(sampler.pixel_count() == 4);
  CHECK(sampler.area_m2() == doctest::Approx(4 * 400.0).epsilon(1e-12));

  Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    const Vec2 p = sampler(rng);
    CHECK(exact(p));
    CHECK(std::abs(p.x) <= 30.0 + 1e-9);
    CHECK(std::abs(p.y) <= 30.0 + 1e-9);
  }

  const RegionSampler none(map, [](int id) { return id > 90; }, nullptr);
  CHECK(none.empty());
  CHECK(none.pixel_count() == 0);
  Rng rng2(1);
  CHECK_THROWS_AS((void)none(rng2), std::logic_error);
}

TEST_CASE("engine conserves flows and work on a lone site") {
  const Network n = fixtures::single_site_network();
  const SystemParams sys;
  SimOptions opt;
  opt.seed = 3;
  opt.duration_s = 400.0;
  opt.kpi_window_s = 10.0;

  const SimResult r =
      run_scenario(n, sys, RadioMode::Baseline, constant_profile(3.0, 0.0),
                   fixed_at({150.0, 0.0}), fixed_at({150.0, 0.0}), opt);

  CHECK(r.mode == RadioMode::Baseline);
  CHECK(r.duration_s == doctest::Approx(400.0));
  CHECK(r.pair_count == 0);
  CHECK(r.arrivals_hotspot == 0);
  CHECK(r.arrivals_uniform > 0);
  CHECK(r.arrivals_uniform ==
        r.departures + static_cast<long long>(r.active_at_end));
  CHECK(static_cast<long long>(r.completed.size()) == r.departures);

  // Served work equals offered volume for every completed transfer.
  for (const auto& f : r.completed) {
    CHECK(f.served_bits == doctest::Approx(f.volume_bits).epsilon(1e-6));
    CHECK(f.ftt_s > 0.0);
    CHECK(f.cell == 0);  // the fixed position faces sector 0
    CHECK(f.arrival_s >= 0.0);
    CHECK(f.arrival_s + f.ftt_s <= r.duration_s + 1e-9);
  }

  REQUIRE(r.kpis.size() == 40);
  CHECK(r.kpis.front().time_s == doctest::Approx(10.0));
  CHECK(r.kpis.back().time_s == doctest::Approx(400.0));
  for (const auto& k : r.kpis) {
    CHECK(k.max_load >= 0.0);
    CHECK(k.max_load <= 1.0 + 1e-12);
    if (k.completions > 0) CHECK(k.cet_bps <= k.mut_bps + 1e-9);
  }
}

TEST_CASE("arrival process matches the profile's rates") {
  const Network n = fixtures::single_site_network();
  const SystemParams sys;
  SimOptions opt;
  opt.seed = 12;
  opt.duration_s = 300.0;
  opt.kpi_window_s = 50.0;

  // Uniform arrivals stop entirely at t = 100.
  const TrafficProfile profile{{{0.0, 5.0, 0.8}, {100.0, 0.0, 0.8}}};
  const SimResult r = run_scenario(n, sys, RadioMode::Baseline, profile,
                                   fixed_at({150.0, 0.0}), fixed_at({-80.0, 60.0}), opt);

  long long uniform_late = 0;
  for (const auto& f : r.completed)
    if (f.layer == Layer::Uniform && f.arrival_s >= 100.0) ++uniform_late;
  CHECK(uniform_late == 0);

  // Poisson counts: 500 expected uniform, 240 expected hotspot; allow 4 sigma.
  CHECK(std::abs(static_cast<double>(r.arrivals_uniform) - 500.0) < 90.0);
  CHECK(std::abs(static_cast<double>(r.arrivals_hotspot) - 240.0) < 62.0);
}

TEST_CASE("lightly loaded flows finish at the full link rate") {
  const Network n = fixtures::single_site_network();
  const SystemParams sys;
  const Vec2 pos{150.0, 0.0};
  const double rate = rate_bps(sinr_baseline(n, sys, pos, 0), sys.bandwidth_hz);

  SimOptions opt;
  opt.seed = 9;
  opt.duration_s = 2000.0;
  opt.kpi_window_s = 500.0;
  const SimResult r =
      run_scenario(n, sys, RadioMode::Baseline, constant_profile(0.02, 0.0),
                   fixed_at(pos), fixed_at(pos), opt);
  REQUIRE(r.completed.size() > 10);

  int solo = 0;
  for (const auto& f : r.completed) {
    const double lone_ftt = f.volume_bits / rate;
    // Processor sharing can only stretch a transfer.
    CHECK(f.ftt_s >= lone_ftt * (1.0 - 1e-9));
    if (f.ftt_s <= lone_ftt * (1.0 + 1e-9)) ++solo;
  }
  // At this arrival rate nearly every transfer has the cell to itself.
  CHECK(solo >= static_cast<int>(0.8 * static_cast<double>(r.completed.size())));
}

TEST_CASE("simulation output is deterministic for a fixed seed") {
  const Network n = fixtures::single_site_network();
  const SystemParams sys;
  SimOptions opt;
  opt.seed = 77;
  opt.duration_s = 200.0;
  opt.kpi_window_s = 20.0;

  auto run_once = [&] {
    const SimResult r =
        run_scenario(n, sys, RadioMode::Baseline, constant_profile(2.0, 0.5),
                     fixed_at({150.0, 0.0}), fixed_at({-80.0, 60.0}), opt);
    std::ostringstream kpis, flows;
    write_kpis_csv(kpis, r);
    write_flows_csv(flows, r);
    return std::pair{kpis.str(), flows.str()};
  };
  const auto first = run_once();
  const auto second = run_once();
  CHECK(first.first == second.first);
  CHECK(first.second == second.second);

  SimOptions other = opt;
  other.seed = 78;
  const SimResult r2 =
      run_scenario(n, sys, RadioMode::Baseline, constant_profile(2.0, 0.5),
                   fixed_at({150.0, 0.0}), fixed_at({-80.0, 60.0}), other);
  std::ostringstream flows2;
  write_flows_csv(flows2, r2);
  CHECK(flows2.str() != first.second);
}

TEST_CASE("hotspot traffic rides the beam under sharing but not baseline") {
  const Network& n = fixtures::full_network();
  const SystemParams sys;
  const Vec2 island{173.0, 0.0};  // footprint of the 10 degree beam

  SimOptions opt;
  opt.seed = 21;
  opt.duration_s = 60.0;
  opt.kpi_window_s = 10.0;

  const SimResult sharing =
      run_scenario(n, sys, RadioMode::Sharing, constant_profile(0.0, 1.0),
                   fixed_at(island), fixed_at(island), opt);
  CHECK(sharing.pair_count == 3);
  CHECK(sharing.completed.size() > 10);
  for (const auto& f : sharing.completed) {
    CHECK(f.layer == Layer::Hotspot);
    CHECK(f.cell == 57);
  }
  for (const auto& k : sharing.kpis) REQUIRE(k.deltas.size() == 3);

  const SimResult baseline =
      run_scenario(n, sys, RadioMode::Baseline, constant_profile(0.0, 1.0),
                   fixed_at(island), fixed_at(island), opt);
  for (const auto& f : baseline.completed) CHECK(f.cell == 0);
}

TEST_CASE("sharing splits the band by the live user-count ratio") {
  // Saturate only the beam: with no macro users the pair's delta must sit at
  // 1 whenever beam flows are active, and the macro keeps the band otherwise.
  const Network& n = fixtures::full_network();
  const SystemParams sys;
  SimOptions opt;
  opt.seed = 4;
  opt.duration_s = 120.0;
  opt.kpi_window_s = 30.0;
  // 20 beam-only users/s oversubscribe even the capped beam rate, so the
  // pair holds at least one beam user nearly all the time.
  const SimResult r =
      run_scenario(n, sys, RadioMode::Sharing, constant_profile(0.0, 20.0),
                   fixed_at({173.0, 0.0}), fixed_at({173.0, 0.0}), opt);
  for (const auto& k : r.kpis) {
    REQUIRE(k.deltas.size() == 3);
    CHECK(k.deltas[0] >= 0.0);
    CHECK(k.deltas[0] <= 1.0 + 1e-12);
    // Pairs 1 and 2 never see a user on either side.
    CHECK(k.deltas[1] == doctest::Approx(0.0).scale(1.0));
    CHECK(k.deltas[2] == doctest::Approx(0.0).scale(1.0));
  }
  // With no macro users the split is 1 while any beam flow is active, so the
  // time average approaches the busy fraction.
  double max_delta0 = 0.0;
  for (const auto& k : r.kpis) max_delta0 = std::max(max_delta0, k.deltas[0]);
  CHECK(max_delta0 > 0.9);
}

TEST_CASE("processor sharing matches the M/M/1-PS sojourn time") {
  const Network n = fixtures::single_site_network();
  const SystemParams sys;
  const Vec2 pos{150.0, 0.0};
  const double rate = rate_bps(sinr_baseline(n, sys, pos, 0), sys.bandwidth_hz);
  const double mean_bits = 3e6;
  const double rho = 0.6;
  const double lambda = rho * rate / mean_bits;

  SimOptions opt;
  opt.seed = 101;
  opt.kpi_window_s = 1e9;  // KPI cadence is irrelevant here
  opt.duration_s = 4000.0 / lambda;
  const SimResult r =
      run_scenario(n, sys, RadioMode::Baseline, constant_profile(lambda, 0.0),
                   fixed_at(pos), fixed_at(pos), opt);
  REQUIRE(r.completed.size() > 3000);

  double sum_ftt = 0.0;
  for (const auto& f : r.completed) sum_ftt += f.ftt_s;
  const double mean_ftt = sum_ftt / static_cast<double>(r.completed.size());
  const double expected = mean_bits / (rate * (1.0 - rho));
  CHECK(mean_ftt == doctest::Approx(expected).epsilon(0.08));

  // Little's law: time-averaged occupancy equals throughput times sojourn.
  const double mean_active = r.active_flow_time_integral / r.duration_s;
  const double throughput =
      static_cast<double>(r.departures) / r.duration_s;
  CHECK(mean_active == doctest::Approx(throughput * mean_ftt).epsilon(0.08));
}

TEST_CASE("CSV writers produce stable rows and leave KPI gaps empty") {
  SimResult r;
  r.mode = RadioMode::Baseline;
  r.pair_count = 1;
  KpiPoint k1;
  k1.time_s = 60.0;
  k1.window_s = 60.0;
  k1.completions = 1;
  k1.mut_bps = 1e7;
  k1.cet_bps = 1e7;
  k1.mean_ftt_s = 0.3;
  k1.max_load = 0.25;
  k1.deltas = {0.5};
  KpiPoint k2;
  k2.time_s = 120.0;
  k2.window_s = 60.0;
  k2.completions = 0;
  k2.mut_bps = k2.cet_bps = k2.mean_ftt_s =
      std::numeric_limits<double>::quiet_NaN();
  k2.max_load = 0.0;
  k2.deltas = {0.0};
  r.kpis = {k1, k2};

  CompletedFlow f;
  f.id = 5;
  f.layer = Layer::Hotspot;
  f.cell = 57;
  f.arrival_s = 12.25;
  f.ftt_s = 0.5;
  f.volume_bits = 1.5e6;
  f.served_bits = 1.5e6;
  r.completed = {f};

  std::ostringstream kpis;
  write_kpis_csv(kpis, r);
  CHECK(kpis.str() ==
        "time_s,mut_bps,cet_bps,max_load,mean_ftt_s,delta_0\n"
        "60,10000000,10000000,0.25,0.3,0.5\n"
        "120,,,0,,0\n");

  std::ostringstream flows;
  write_flows_csv(flows, r);
  CHECK(flows.str() ==
        "id,layer,cell,arrival_s,ftt_s,volume_bits\n"
        "5,hotspot,57,12.25,0.5,1500000\n");
}
