// SPDX-License-Identifier: Apache-2.0
#include "visim/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <unordered_map>

#include "visim/son.hpp"
#include "visim/units.hpp"

namespace visim::traffic {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
}  // namespace

TrafficProfile::TrafficProfile(std::vector<TrafficStep> steps) : steps_(std::move(steps)) {
  double prev = -kInf;
  for (const auto& s : steps_) {
    if (!(s.start_s > prev)) throw std::invalid_argument("profile steps must be strictly increasing");
    if (s.uniform_per_s < 0.0 || s.hotspot_per_s < 0.0)
      throw std::invalid_argument("arrival rates must be non-negative");
    prev = s.start_s;
  }
}

double TrafficProfile::rate_at(double t, Layer layer) const {
  double rate = 0.0;
  for (const auto& s : steps_) {
    if (s.start_s > t) break;
    rate = layer == Layer::Uniform ? s.uniform_per_s : s.hotspot_per_s;
  }
  return rate;
}

double TrafficProfile::next_boundary_after(double t) const {
  for (const auto& s : steps_)
    if (s.start_s > t) return s.start_s;
  return kInf;
}

RegionSampler::RegionSampler(const net::ServingMap& map, const std::function<bool(int)>& member,
                             std::function<bool(Vec2)> recheck)
    : resolution_m_(map.resolution_m), recheck_(std::move(recheck)) {
  for (int iy = 0; iy < map.ny; ++iy)
    for (int ix = 0; ix < map.nx; ++ix)
      if (member(map.at(ix, iy)))
        pixels_.push_back(Vec2{map.origin.x + (ix + 0.5) * map.resolution_m,
                               map.origin.y + (iy + 0.5) * map.resolution_m});
}

Vec2 RegionSampler::operator()(Rng& rng) const {
  if (pixels_.empty()) throw std::logic_error("sampling from an empty region");
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const Vec2 center = pixels_[rng.uniform_index(pixels_.size())];
    const Vec2 p{center.x + resolution_m_ * (rng.uniform01() - 0.5),
                 center.y + resolution_m_ * (rng.uniform01() - 0.5)};
    if (!recheck_ || recheck_(p)) return p;
  }
  // A member pixel center always satisfies the predicate that selected it.
  return pixels_[rng.uniform_index(pixels_.size())];
}

double RegionSampler::area_m2() const {
  return static_cast<double>(pixels_.size()) * resolution_m_ * resolution_m_;
}

double percentile_nearest_rank(std::vector<double> samples, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw std::invalid_argument("fraction outside (0,1]");
  if (samples.empty()) return kNan;
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  auto k = static_cast<std::size_t>(std::ceil(fraction * n));
  k = std::min(std::max<std::size_t>(k, 1), samples.size());
  return samples[k - 1];
}

KpiPoint measure_kpis(double window_end, double window_s,
                      std::span<const CompletedFlow> completed,
                      std::span<const double> busy_fractions, std::vector<double> deltas) {
  KpiPoint point;
  point.time_s = window_end;
  point.window_s = window_s;
  point.completions = static_cast<int>(completed.size());
  point.deltas = std::move(deltas);
  point.max_load = 0.0;
  for (double b : busy_fractions) point.max_load = std::max(point.max_load, b);
  if (completed.empty()) {
    point.mut_bps = point.cet_bps = point.mean_ftt_s = kNan;
    return point;
  }
  std::vector<double> throughputs;
  throughputs.reserve(completed.size());
  double sum_tp = 0.0;
  double sum_ftt = 0.0;
  for (const auto& f : completed) {
    const double tp = f.volume_bits / f.ftt_s;
    throughputs.push_back(tp);
    sum_tp += tp;
    sum_ftt += f.ftt_s;
  }
  point.mut_bps = sum_tp / static_cast<double>(completed.size());
  point.cet_bps = percentile_nearest_rank(std::move(throughputs), 0.05);
  point.mean_ftt_s = sum_ftt / static_cast<double>(completed.size());
  return point;
}

namespace {

enum EventKind : int { kArrival = 0, kDeparture = 1, kProfile = 2, kSample = 3 };

struct Event {
  double t = 0.0;
  int kind = 0;
  long long seq = 0;
  int a = 0;          // arrival: layer; departure: group; sample/profile: unused
  long long b = 0;    // departure: flow id
  long long epoch = 0;
};

struct EventAfter {
  bool operator()(const Event& l, const Event& r) const {
    if (l.t != r.t) return l.t > r.t;
    if (l.kind != r.kind) return l.kind > r.kind;
    return l.seq > r.seq;
  }
};

struct ActiveFlow {
  long long id = 0;
  Layer layer = Layer::Uniform;
  int cell = -1;
  double arrival_s = 0.0;
  double initial_bits = 0.0;
  double remaining_bits = 0.0;
  double served_bits = 0.0;
  double se = 0.0;    // effective spectral efficiency, bit/s/Hz
  double rate = 0.0;  // current granted rate, bit/s
};

/// One processor-sharing server: a single cell, or a (macro, beam) pair whose
/// band split couples their schedules in sharing mode.
struct Group {
  std::vector<int> cells;
  std::vector<long long> members;  // active flow ids, insertion order
  long long epoch = 0;
  double last_t = 0.0;
  int pair = -1;  // index into the SON pair list, -1 for plain cells
};

class Engine {
 public:
  Engine(const net::Network& network, const radio::SystemParams& sys, radio::RadioMode mode,
         const TrafficProfile& profile, const PositionSampler& uniform_positions,
         const PositionSampler& hotspot_positions, const SimOptions& options)
      : network_(network),
        sys_(sys),
        profile_(profile),
        options_(options),
        budget_(radio::LinkBudget::make(network, sys, mode)),
        samplers_{&uniform_positions, &hotspot_positions},
        time_rng_{Rng::substream(options.seed, 1), Rng::substream(options.seed, 3)},
        draw_rng_{Rng::substream(options.seed, 2), Rng::substream(options.seed, 4)} {
    if (options.duration_s < 0.0) throw std::invalid_argument("duration must be non-negative");
    if (options.kpi_window_s <= 0.0) throw std::invalid_argument("KPI window must be positive");
    if (options.mean_file_bits <= 0.0) throw std::invalid_argument("mean file size must be positive");
    result_.mode = mode;
    result_.duration_s = options.duration_s;
    build_groups(mode);
    const int n_cells = static_cast<int>(network.cells().size());
    cell_flow_count_.assign(n_cells, 0);
    busy_accum_.assign(n_cells, 0.0);
    busy_since_.assign(n_cells, 0.0);
    busy_window_start_.assign(n_cells, 0.0);
  }

  SimResult run() {
    validate_samplers();
    schedule_fixed_events();
    schedule_arrival(Layer::Uniform, 0.0);
    schedule_arrival(Layer::Hotspot, 0.0);

    while (!queue_.empty()) {
      const Event ev = queue_.top();
      if (ev.t > options_.duration_s) break;
      queue_.pop();
      result_.active_flow_time_integral += active_total_ * (ev.t - integral_t_);
      integral_t_ = ev.t;
      try {
        switch (ev.kind) {
          case kArrival: on_arrival(ev.t, static_cast<Layer>(ev.a)); break;
          case kDeparture: on_departure(ev.t, ev.a, ev.b, ev.epoch); break;
          case kProfile: on_profile(ev.t); break;
          case kSample: on_sample(ev.t); break;
        }
      } catch (const std::exception& e) {
        char at[48];
        std::snprintf(at, sizeof at, "simulation error at t=%.9g s: ", ev.t);
        throw std::logic_error(at + std::string(e.what()));
      }
    }
    result_.active_at_end = active_total_;
    return std::move(result_);
  }

 private:
  void build_groups(radio::RadioMode mode) {
    const auto& cells = network_.cells();
    cell_group_.assign(cells.size(), -1);
    std::vector<int> pair_of_cell(cells.size(), -1);
    int n_pairs = 0;
    for (const auto& cell : cells) {
      if (cell.kind != net::CellKind::Vis) continue;
      pair_of_cell[cell.parent] = n_pairs;
      pair_of_cell[cell.id] = n_pairs;
      ++n_pairs;
    }
    result_.pair_count = n_pairs;
    const double fixed_delta = mode == radio::RadioMode::ReuseOne ? 1.0 : 0.0;
    pair_states_.assign(n_pairs, son::SplitState{0, 0, fixed_delta});
    delta_accum_.assign(n_pairs, 0.0);
    delta_since_.assign(n_pairs, 0.0);
    delta_window_start_.assign(n_pairs, 0.0);
    son_active_ = mode == radio::RadioMode::Sharing;

    if (son_active_) {
      // A hosting macro and its beam form one coupled server.
      for (const auto& cell : cells) {
        if (cell.kind == net::CellKind::Vis) continue;
        const int vis = network_.vis_of(cell.id);
        Group g;
        g.cells.push_back(cell.id);
        if (vis >= 0) {
          g.cells.push_back(vis);
          g.pair = pair_of_cell[cell.id];
        }
        for (int c : g.cells) cell_group_[c] = static_cast<int>(groups_.size());
        groups_.push_back(std::move(g));
      }
    } else {
      for (const auto& cell : cells) {
        Group g;
        g.cells.push_back(cell.id);
        g.pair = pair_of_cell[cell.id];
        cell_group_[cell.id] = static_cast<int>(groups_.size());
        groups_.push_back(std::move(g));
      }
    }
  }

  void validate_samplers() {
    for (const auto& s : profile_.steps()) {
      if (s.uniform_per_s > 0.0 && !*samplers_[0])
        throw std::invalid_argument("uniform traffic requested without a position sampler");
      if (s.hotspot_per_s > 0.0 && !*samplers_[1])
        throw std::invalid_argument("hotspot traffic requested without a position sampler");
    }
  }

  void schedule_fixed_events() {
    for (const auto& s : profile_.steps())
      if (s.start_s > 0.0 && s.start_s <= options_.duration_s) push(s.start_s, kProfile, 0, 0, 0);
    const double w = options_.kpi_window_s;
    for (int k = 1; k * w < options_.duration_s - 1e-9; ++k) push(k * w, kSample, 0, 0, 0);
    if (options_.duration_s > 0.0) push(options_.duration_s, kSample, 0, 0, 0);
  }

  void push(double t, int kind, int a, long long b, long long epoch) {
    queue_.push(Event{t, kind, seq_++, a, b, epoch});
  }

  /// Draws the next arrival of a layer from `from`, discarding candidates that
  /// cross the next profile boundary; the boundary event re-arms the layer.
  /// Exact for piecewise-Poisson processes by memorylessness.
  void schedule_arrival(Layer layer, double from) {
    const int li = static_cast<int>(layer);
    armed_[li] = false;
    const double rate = profile_.rate_at(from, layer);
    const double boundary = profile_.next_boundary_after(from);
    if (rate <= 0.0) return;
    const double candidate = from + time_rng_[li].exponential(rate);
    if (candidate >= boundary || candidate > options_.duration_s) return;
    push(candidate, kArrival, li, 0, 0);
    armed_[li] = true;
  }

  void advance_group(Group& g, double t) {
    const double dt = t - g.last_t;
    if (dt > 0.0) {
      for (long long id : g.members) {
        ActiveFlow& f = flows_.at(id);
        const double work = f.rate * dt;
        f.served_bits += work;
        f.remaining_bits = std::max(0.0, f.remaining_bits - work);
      }
    }
    g.last_t = t;
  }

  void recompute_rates(Group& g) {
    if (g.members.empty()) return;
    if (son_active_ && g.pair >= 0 && g.cells.size() == 2) {
      const int macro_cell = g.cells[0];
      int nv = 0;
      for (long long id : g.members)
        if (flows_.at(id).cell != macro_cell) ++nv;
      const int nm = static_cast<int>(g.members.size()) - nv;
      const double delta = pair_states_[g.pair].delta;
      const double vis_share = nv > 0 ? delta * sys_.bandwidth_hz / nv : 0.0;
      const double macro_share = nm > 0 ? (1.0 - delta) * sys_.bandwidth_hz / nm : 0.0;
      for (long long id : g.members) {
        ActiveFlow& f = flows_.at(id);
        f.rate = f.se * (f.cell == macro_cell ? macro_share : vis_share);
      }
    } else {
      const double share = sys_.bandwidth_hz / static_cast<double>(g.members.size());
      for (long long id : g.members) {
        ActiveFlow& f = flows_.at(id);
        f.rate = f.se * share;
      }
    }
  }

  void reschedule_departure(int gi, double t) {
    Group& g = groups_[gi];
    ++g.epoch;
    if (g.members.empty()) return;
    double best_dt = kInf;
    long long best_id = -1;
    for (long long id : g.members) {
      const ActiveFlow& f = flows_.at(id);
      if (!(f.rate > 0.0)) throw std::logic_error("active flow with zero service rate");
      const double dt = f.remaining_bits / f.rate;
      if (dt < best_dt || (dt == best_dt && id < best_id)) {
        best_dt = dt;
        best_id = id;
      }
    }
    push(t + best_dt, kDeparture, gi, best_id, g.epoch);
  }

  void integrate_delta(int pair, double t) {
    if (pair < 0) return;
    delta_accum_[pair] += pair_states_[pair].delta * (t - delta_since_[pair]);
    delta_since_[pair] = t;
  }

  void note_cell_gain(int cell, double t) {
    if (cell_flow_count_[cell]++ == 0) busy_since_[cell] = t;
  }

  void note_cell_loss(int cell, double t) {
    if (--cell_flow_count_[cell] == 0) busy_accum_[cell] += t - busy_since_[cell];
  }

  double busy_total(int cell, double t) const {
    return busy_accum_[cell] + (cell_flow_count_[cell] > 0 ? t - busy_since_[cell] : 0.0);
  }

  double delta_total(int pair, double t) const {
    return delta_accum_[pair] + pair_states_[pair].delta * (t - delta_since_[pair]);
  }

  void on_arrival(double t, Layer layer) {
    const int li = static_cast<int>(layer);
    (layer == Layer::Uniform ? result_.arrivals_uniform : result_.arrivals_hotspot)++;

    const Vec2 pos = (*samplers_[li])(draw_rng_[li]);
    double size = 0.0;
    do {
      size = draw_rng_[li].exponential(1.0 / options_.mean_file_bits);
    } while (!(size > 0.0));

    // The interferer rings transmit but never carry traffic: flows attach to
    // the strongest measured cell even when a ring macro is nominally louder.
    const int serving =
        network_.serving_cell(pos, budget_.per_hz_power_mw, network_.central_cells());
    const std::vector<double> h = network_.attenuation_vector(pos);
    const double sinr = radio::sinr_linear(network_, budget_, serving, h);
    const double se = std::min(sys_.max_spectral_efficiency, std::log2(1.0 + sinr));
    if (!(se > 0.0)) throw std::logic_error("arrival with zero spectral efficiency");

    const int gi = cell_group_[serving];
    Group& g = groups_[gi];
    advance_group(g, t);

    const long long id = next_flow_id_++;
    flows_.emplace(id, ActiveFlow{id, layer, serving, t, size, size, 0.0, se, 0.0});
    g.members.push_back(id);
    ++active_total_;
    note_cell_gain(serving, t);

    if (son_active_ && g.pair >= 0) {
      integrate_delta(g.pair, t);
      son::on_event(pair_states_[g.pair], network_.cells()[serving].kind == net::CellKind::Vis, 1);
    }
    recompute_rates(g);
    reschedule_departure(gi, t);
    schedule_arrival(layer, t);
  }

  void on_departure(double t, int gi, long long flow_id, long long epoch) {
    Group& g = groups_[gi];
    if (epoch != g.epoch) return;  // superseded by a later group change
    advance_group(g, t);

    const auto it = flows_.find(flow_id);
    if (it == flows_.end()) throw std::logic_error("departure for unknown flow");
    const ActiveFlow& f = it->second;
    window_completed_.push_back(CompletedFlow{f.id, f.layer, f.cell, f.arrival_s, t - f.arrival_s,
                                              f.initial_bits, f.served_bits});
    result_.completed.push_back(window_completed_.back());
    ++result_.departures;

    g.members.erase(std::find(g.members.begin(), g.members.end(), flow_id));
    --active_total_;
    note_cell_loss(f.cell, t);
    if (son_active_ && g.pair >= 0) {
      integrate_delta(g.pair, t);
      son::on_event(pair_states_[g.pair], network_.cells()[f.cell].kind == net::CellKind::Vis, -1);
    }
    flows_.erase(it);
    recompute_rates(g);
    reschedule_departure(gi, t);
  }

  void on_profile(double t) {
    if (!armed_[0]) schedule_arrival(Layer::Uniform, t);
    if (!armed_[1]) schedule_arrival(Layer::Hotspot, t);
  }

  void on_sample(double t) {
    const double wlen = t - window_start_;
    if (wlen <= 0.0) return;
    std::vector<double> busy;
    busy.reserve(network_.central_cells().size());
    for (int c : network_.central_cells())
      busy.push_back((busy_total(c, t) - busy_window_start_[c]) / wlen);
    std::vector<double> deltas(pair_states_.size());
    for (std::size_t p = 0; p < pair_states_.size(); ++p)
      deltas[p] = (delta_total(static_cast<int>(p), t) - delta_window_start_[p]) / wlen;

    result_.kpis.push_back(measure_kpis(t, wlen, window_completed_, busy, std::move(deltas)));

    window_completed_.clear();
    window_start_ = t;
    for (int c : network_.central_cells()) busy_window_start_[c] = busy_total(c, t);
    for (std::size_t p = 0; p < pair_states_.size(); ++p)
      delta_window_start_[p] = delta_total(static_cast<int>(p), t);
  }

  const net::Network& network_;
  const radio::SystemParams& sys_;
  const TrafficProfile& profile_;
  const SimOptions& options_;
  radio::LinkBudget budget_;
  const PositionSampler* samplers_[2];
  Rng time_rng_[2];
  Rng draw_rng_[2];

  std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
  long long seq_ = 0;
  bool armed_[2] = {false, false};

  std::unordered_map<long long, ActiveFlow> flows_;
  long long next_flow_id_ = 0;
  int active_total_ = 0;
  std::vector<Group> groups_;
  std::vector<int> cell_group_;

  bool son_active_ = false;
  std::vector<son::SplitState> pair_states_;
  std::vector<double> delta_accum_;
  std::vector<double> delta_since_;
  std::vector<double> delta_window_start_;

  std::vector<int> cell_flow_count_;
  std::vector<double> busy_accum_;
  std::vector<double> busy_since_;
  std::vector<double> busy_window_start_;

  std::vector<CompletedFlow> window_completed_;
  double window_start_ = 0.0;
  double integral_t_ = 0.0;
  SimResult result_;
};

std::string g9(double v) {
  if (std::isnan(v)) return {};  // KPI gap: no completions in the window
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

SimResult run_scenario(const net::Network& network, const radio::SystemParams& sys,
                       radio::RadioMode mode, const TrafficProfile& profile,
                       const PositionSampler& uniform_positions,
                       const PositionSampler& hotspot_positions, const SimOptions& options) {
  Engine engine(network, sys, mode, profile, uniform_positions, hotspot_positions, options);
  return engine.run();
}

void write_kpis_csv(std::ostream& os, const SimResult& result) {
  os << "time_s,mut_bps,cet_bps,max_load,mean_ftt_s";
  for (int p = 0; p < result.pair_count; ++p) os << ",delta_" << p;
  os << "\n";
  for (const auto& k : result.kpis) {
    os << g9(k.time_s) << ',' << g9(k.mut_bps) << ',' << g9(k.cet_bps) << ',' << g9(k.max_load)
       << ',' << g9(k.mean_ftt_s);
    for (double d : k.deltas) os << ',' << g9(d);
    os << "\n";
  }
}

void write_flows_csv(std::ostream& os, const SimResult& result) {
  os << "id,layer,cell,arrival_s,ftt_s,volume_bits\n";
  for (const auto& f : result.completed) {
    os << f.id << ',' << (f.layer == Layer::Uniform ? "uniform" : "hotspot") << ',' << f.cell
       << ',' << g9(f.arrival_s) << ',' << g9(f.ftt_s) << ',' << g9(f.volume_bits) << "\n";
  }
}

}  // namespace visim::traffic
