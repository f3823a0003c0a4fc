// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "visim/network.hpp"
#include "visim/radio.hpp"
#include "visim/rng.hpp"

namespace visim::traffic {

enum class Layer { Uniform, Hotspot };

/// One segment of the piecewise-constant arrival-rate schedule. Rates are
/// network-wide (users/s), spread uniformly over each layer's region.
struct TrafficStep {
  double start_s = 0.0;
  double uniform_per_s = 0.0;
  double hotspot_per_s = 0.0;
};

class TrafficProfile {
 public:
  TrafficProfile() = default;
  explicit TrafficProfile(std::vector<TrafficStep> steps);

  const std::vector<TrafficStep>& steps() const { return steps_; }
  /// Rate in force at time t; a step applies from its start (inclusive) to
  /// the next start. Zero before the first step.
  double rate_at(double t, Layer layer) const;
  /// Smallest step start strictly after t; +inf when none remains.
  double next_boundary_after(double t) const;

 private:
  std::vector<TrafficStep> steps_;
};

using PositionSampler = std::function<Vec2(Rng&)>;

/// Uniform sampler over the raster pixels of a serving map that satisfy a
/// membership test. A drawn point is re-checked with the exact predicate so
/// boundary pixels cannot leak positions outside the true region.
class RegionSampler {
 public:
  RegionSampler(const net::ServingMap& map, const std::function<bool(int)>& member,
                std::function<bool(Vec2)> recheck);

  Vec2 operator()(Rng& rng) const;
  bool empty() const { return pixels_.empty(); }
  std::size_t pixel_count() const { return pixels_.size(); }
  double area_m2() const;

 private:
  std::vector<Vec2> pixels_;  // centers of member pixels
  double resolution_m_ = 0.0;
  std::function<bool(Vec2)> recheck_;
};

struct CompletedFlow {
  long long id = 0;
  Layer layer = Layer::Uniform;
  int cell = -1;
  double arrival_s = 0.0;
  double ftt_s = 0.0;
  double volume_bits = 0.0;
  double served_bits = 0.0;  // integral of the granted rate over the lifetime
};

/// One KPI window. Throughput and FTT fields are NaN when the window closed
/// without completions; the CSV writer emits them as gaps.
struct KpiPoint {
  double time_s = 0.0;    // window end
  double window_s = 0.0;  // window length
  int completions = 0;
  double mut_bps = 0.0;
  double cet_bps = 0.0;
  double mean_ftt_s = 0.0;
  double max_load = 0.0;           // max busy-time fraction over measured cells
  std::vector<double> deltas;      // per (macro, beam) pair, time-averaged
};

/// Nearest-rank percentile: k = ceil(fraction*n) clamped to [1,n], value is
/// the k-th smallest. NaN on an empty sample.
double percentile_nearest_rank(std::vector<double> samples, double fraction);

KpiPoint measure_kpis(double window_end, double window_s,
                      std::span<const CompletedFlow> completed,
                      std::span<const double> busy_fractions, std::vector<double> deltas);

struct SimOptions {
  std::uint64_t seed = 1;
  double duration_s = 0.0;
  double kpi_window_s = 10.0;
  double mean_file_bits = 3e6;
};

struct SimResult {
  radio::RadioMode mode = radio::RadioMode::Baseline;
  double duration_s = 0.0;
  int pair_count = 0;
  std::vector<KpiPoint> kpis;
  std::vector<CompletedFlow> completed;
  long long arrivals_uniform = 0;
  long long arrivals_hotspot = 0;
  long long departures = 0;
  int active_at_end = 0;
  double active_flow_time_integral = 0.0;  // for Little's-law checks
};

/// Runs the event-driven flow simulation for one mode. Deterministic for a
/// fixed (network, profile, options, mode) tuple. Position samplers receive
/// dedicated RNG substreams derived from the seed.
SimResult run_scenario(const net::Network& network, const radio::SystemParams& sys,
                       radio::RadioMode mode, const TrafficProfile& profile,
                       const PositionSampler& uniform_positions,
                       const PositionSampler& hotspot_positions, const SimOptions& options);

void write_kpis_csv(std::ostream& os, const SimResult& result);
void write_flows_csv(std::ostream& os, const SimResult& result);

}  // namespace visim::traffic
