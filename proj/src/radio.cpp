// SPDX-License-Identifier: Apache-2.0
#include "visim/radio.hpp"

#include <cmath>
#include <stdexcept>

#include "visim/units.hpp"

namespace visim::radio {

double noise_mw_per_hz(const SystemParams& sys) { return dbm_to_mw(sys.noise_dbm_per_hz); }

std::vector<double> per_hz_power_mw(const net::Network& network, const SystemParams& sys,
                                    RadioMode mode) {
  if (sys.bandwidth_hz <= 0.0) throw std::invalid_argument("bandwidth must be positive");
  const auto& cells = network.cells();
  std::vector<double> p(cells.size(), 0.0);
  for (const auto& cell : cells) {
    const double full = dbm_to_mw(cell.power_dbm) / sys.bandwidth_hz;
    switch (mode) {
      case RadioMode::Baseline:
        p[cell.id] = cell.kind == net::CellKind::Macro ? full : 0.0;
        break;
      case RadioMode::ReuseOne:
        if (cell.kind == net::CellKind::Vis || network.vis_of(cell.id) >= 0)
          p[cell.id] = 0.5 * full;
        else
          p[cell.id] = full;
        break;
      case RadioMode::Sharing:
        p[cell.id] = full;  // disjoint sub-bands keep the per-Hz density
        break;
    }
  }
  return p;
}

LinkBudget LinkBudget::make(const net::Network& network, const SystemParams& sys, RadioMode mode) {
  return LinkBudget{mode, visim::radio::per_hz_power_mw(network, sys, mode),
                    visim::radio::noise_mw_per_hz(sys)};
}

double sinr_linear(const net::Network& network, const LinkBudget& budget, int serving,
                   std::span<const double> h) {
  const auto& cells = network.cells();
  const auto& p = budget.per_hz_power_mw;
  if (serving < 0 || serving >= static_cast<int>(cells.size()))
    throw std::out_of_range("serving cell id out of range");
  if (h.size() != cells.size() || p.size() != cells.size())
    throw std::invalid_argument("attenuation/power vector size mismatch");

  const double signal = p[serving] * h[serving];
  double interference = 0.0;
  if (budget.mode == RadioMode::Sharing) {
    // The serving pair shares its band disjointly, so the partner macro never
    // interferes. Beams occupy sub-bands and are excluded as well; macro users
    // therefore see the baseline interference field.
    const net::Cell& sc = cells[serving];
    const int partner = sc.kind == net::CellKind::Vis ? sc.parent : serving;
    for (const auto& cell : cells) {
      if (cell.kind != net::CellKind::Macro || cell.id == partner) continue;
      interference += p[cell.id] * h[cell.id];
    }
  } else {
    for (const auto& cell : cells) {
      if (cell.id == serving) continue;
      interference += p[cell.id] * h[cell.id];
    }
  }
  return signal / (budget.noise_mw_per_hz + interference);
}

namespace {

double sinr_at(const net::Network& network, const SystemParams& sys, RadioMode mode, Vec2 pos,
               int serving) {
  const LinkBudget budget = LinkBudget::make(network, sys, mode);
  const std::vector<double> h = network.attenuation_vector(pos);
  return sinr_linear(network, budget, serving, h);
}

}  // namespace

double sinr_baseline(const net::Network& n, const SystemParams& s, Vec2 pos, int serving) {
  return sinr_at(n, s, RadioMode::Baseline, pos, serving);
}
double sinr_reuse_one(const net::Network& n, const SystemParams& s, Vec2 pos, int serving) {
  return sinr_at(n, s, RadioMode::ReuseOne, pos, serving);
}
double sinr_sharing(const net::Network& n, const SystemParams& s, Vec2 pos, int serving) {
  return sinr_at(n, s, RadioMode::Sharing, pos, serving);
}

double rate_bps(double sinr, double bandwidth_hz, double max_spectral_efficiency) {
  if (!(sinr >= 0.0)) throw std::invalid_argument("sinr must be non-negative");
  const double se = std::log2(1.0 + sinr);
  return bandwidth_hz * std::min(max_spectral_efficiency, se);
}

}  // namespace visim::radio
