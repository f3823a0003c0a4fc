// SPDX-License-Identifier: Apache-2.0
#include "visim/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace visim::net {

std::vector<Vec2> hex_site_positions(double isd_m, int rings) {
  if (!(isd_m > 0.0)) throw std::invalid_argument("isd_m must be > 0");
  if (rings < 0) throw std::invalid_argument("rings must be >= 0");
  const Vec2 a1{isd_m, 0.0};
  const Vec2 a2{isd_m / 2.0, isd_m * std::sqrt(3.0) / 2.0};
  auto axial = [&](int q, int r) { return Vec2{q * a1.x + r * a2.x, q * a1.y + r * a2.y}; };

  std::vector<Vec2> out;
  out.push_back({0.0, 0.0});
  static constexpr int dirs[6][2] = {{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}};
  for (int r = 1; r <= rings; ++r) {
    int q = dirs[4][0] * r;
    int s = dirs[4][1] * r;
    for (const auto& d : dirs) {
      for (int step = 0; step < r; ++step) {
        out.push_back(axial(q, s));
        q += d[0];
        s += d[1];
      }
    }
  }
  return out;
}

double pathloss_db(double d_km) {
  if (!(d_km > 0.0)) throw std::invalid_argument("distance must be > 0");
  return 128.1 + 37.6 * std::log10(std::max(d_km, 0.01));
}

double macro_antenna_gain_db(double horizontal_offset_rad, double vertical_offset_rad,
                             const MacroAntennaParams& p) {
  const double h = wrap_angle(horizontal_offset_rad) / p.phi_3db_rad;
  const double v = wrap_angle(vertical_offset_rad) / p.theta_3db_rad;
  const double ah = std::min(12.0 * h * h, p.front_to_back_db);
  const double av = std::min(12.0 * v * v, p.sla_db);
  return p.gain_dbi - ah - av;
}

Network::Network(const NetworkParams& params) : params_(params) {
  params_.vis_design.validate();
  if (!(params_.macro_power_dbm > 0.0))
    throw std::invalid_argument("macro power must be positive dBm");
  const auto positions = hex_site_positions(params_.layout.isd_m, params_.layout.rings);

  for (std::size_t s = 0; s < positions.size(); ++s) {
    Site site;
    site.pos = positions[s];
    for (int k = 0; k < 3; ++k) {
      Cell c;
      c.id = static_cast<int>(cells_.size());
      c.kind = CellKind::Macro;
      c.pos = site.pos;
      c.azimuth_rad = wrap_angle(params_.layout.azimuth_offset_rad + k * two_pi / 3.0);
      c.power_dbm = params_.macro_power_dbm;
      c.site = static_cast<int>(s);
      c.sector = k;
      site.sector_cells[static_cast<std::size_t>(k)] = c.id;
      cells_.push_back(c);
    }
    sites_.push_back(site);
  }
  macro_count_ = cells_.size();
  vis_of_.assign(macro_count_, -1);

  for (const VisPlacement& vp : params_.vis) {
    if (vp.parent_sector < 0 || vp.parent_sector >= 3)
      throw std::invalid_argument("vis parent_sector must be one of the central sectors");
    const int parent = sites_[0].sector_cells[static_cast<std::size_t>(vp.parent_sector)];
    if (vis_of_[static_cast<std::size_t>(parent)] != -1)
      throw std::invalid_argument("a sector can host at most one virtual sector");
    Cell c;
    c.id = static_cast<int>(cells_.size());
    c.kind = CellKind::Vis;
    c.pos = sites_[0].pos;
    c.azimuth_rad = cells_[static_cast<std::size_t>(parent)].azimuth_rad;
    c.power_dbm = params_.macro_power_dbm;
    c.site = 0;
    c.sector = vp.parent_sector;
    c.parent = parent;
    c.steering = antenna::Steering{pi / 2.0 + vp.vertical_tilt_rad, vp.horizontal_tilt_rad};
    c.steering.validate();
    c.vis_max_gain = antenna::max_gain(params_.vis_design, c.steering, params_.pattern_step_rad);
    vis_of_[static_cast<std::size_t>(parent)] = c.id;
    vis_eval_.emplace_back(params_.vis_design, c.steering);
    cells_.push_back(c);
  }

  for (int k = 0; k < 3; ++k) central_cells_.push_back(sites_[0].sector_cells[static_cast<std::size_t>(k)]);
  for (std::size_t c = macro_count_; c < cells_.size(); ++c)
    central_cells_.push_back(static_cast<int>(c));
}

double Network::attenuation(int cell_id, Vec2 pos) const {
  const Cell& cell = cells_.at(static_cast<std::size_t>(cell_id));
  const double dx = pos.x - cell.pos.x;
  const double dy = pos.y - cell.pos.y;
  const double dh = std::hypot(dx, dy);
  const double dz = params_.layout.bs_height_m - params_.layout.ue_height_m;
  const double d3d = std::hypot(dh, dz);
  if (!(d3d > 0.0)) throw std::invalid_argument("position coincides with the antenna");
  const double pl = pathloss_db(std::max(d3d, 10.0) / 1000.0);

  if (cell.kind == CellKind::Macro) {
    const double bearing = dh > 0.0 ? std::atan2(dy, dx) : cell.azimuth_rad;
    const double depression = std::atan2(dz, dh);  // positive below the horizon
    const double g = macro_antenna_gain_db(bearing - cell.azimuth_rad,
                                           depression - params_.macro_antenna.downtilt_rad,
                                           params_.macro_antenna);
    return db_to_linear(g - pl);
  }

  // Beam gain in the array frame: y along the boresight, z up, x to the left
  // of the boresight (positive phi steers counterclockwise in the ground
  // plane).
  const double ca = std::cos(cell.azimuth_rad);
  const double sa = std::sin(cell.azimuth_rad);
  const double uy_h = (dx * ca + dy * sa) / d3d;
  const double ux_h = (-dx * sa + dy * ca) / d3d;
  const double uz = -dz / d3d;
  if (uy_h <= 0.0) return 0.0;  // behind the reflector
  const double sin_theta = std::sqrt(std::max(0.0, 1.0 - uz * uz));
  const double inv = 1.0 / std::max(sin_theta, 1e-300);
  const antenna::PatternEvaluator& ev = vis_eval_[static_cast<std::size_t>(cell_id) - macro_count_];
  const double f = ev.value_from_cosines(sin_theta, uz, ux_h * inv, uy_h * inv);
  return cell.vis_max_gain * f * db_to_linear(-pl);
}

std::vector<double> Network::attenuation_vector(Vec2 pos) const {
  std::vector<double> h(cells_.size());
  for (std::size_t c = 0; c < cells_.size(); ++c)
    h[c] = attenuation(static_cast<int>(c), pos);
  return h;
}

int Network::serving_cell(Vec2 pos, std::span<const double> per_hz_power_mw) const {
  if (per_hz_power_mw.size() != cells_.size())
    throw std::invalid_argument("power vector must match the cell count");
  int best = -1;
  double best_rx = 0.0;
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    if (!(per_hz_power_mw[c] > 0.0)) continue;
    const double rx = per_hz_power_mw[c] * attenuation(static_cast<int>(c), pos);
    if (best < 0 || rx > best_rx) {
      best = static_cast<int>(c);
      best_rx = rx;
    }
  }
  if (best < 0) throw std::logic_error("no cell transmits power");
  return best;
}

int Network::serving_cell(Vec2 pos, std::span<const double> per_hz_power_mw,
                          std::span<const int> candidates) const {
  if (per_hz_power_mw.size() != cells_.size())
    throw std::invalid_argument("power vector must match the cell count");
  int best = -1;
  double best_rx = 0.0;
  for (int c : candidates) {
    if (c < 0 || static_cast<std::size_t>(c) >= cells_.size())
      throw std::invalid_argument("candidate cell id out of range");
    if (!(per_hz_power_mw[static_cast<std::size_t>(c)] > 0.0)) continue;
    const double rx = per_hz_power_mw[static_cast<std::size_t>(c)] * attenuation(c, pos);
    if (best < 0 || rx > best_rx || (rx == best_rx && c < best)) {
      best = c;
      best_rx = rx;
    }
  }
  if (best < 0) throw std::logic_error("no candidate cell transmits power");
  return best;
}

ServingMap compute_serving_map(const Network& network, std::span<const double> per_hz_power_mw,
                               Vec2 lo, Vec2 hi, double resolution_m) {
  if (!(resolution_m > 0.0)) throw std::invalid_argument("resolution must be > 0");
  if (!(hi.x > lo.x) || !(hi.y > lo.y)) throw std::invalid_argument("empty map extent");
  ServingMap map;
  map.origin = lo;
  map.resolution_m = resolution_m;
  map.nx = static_cast<int>(std::ceil((hi.x - lo.x) / resolution_m - 1e-9));
  map.ny = static_cast<int>(std::ceil((hi.y - lo.y) / resolution_m - 1e-9));
  map.cell_ids.resize(static_cast<std::size_t>(map.nx) * static_cast<std::size_t>(map.ny));
  for (int iy = 0; iy < map.ny; ++iy)
    for (int ix = 0; ix < map.nx; ++ix) {
      const Vec2 p{lo.x + (ix + 0.5) * resolution_m, lo.y + (iy + 0.5) * resolution_m};
      map.cell_ids[static_cast<std::size_t>(iy) * map.nx + ix] =
          network.serving_cell(p, per_hz_power_mw);
    }
  return map;
}

std::string serving_map_csv(const ServingMap& map) {
  std::string out = "x_m,y_m,cell_id\n";
  char line[96];
  for (int iy = 0; iy < map.ny; ++iy)
    for (int ix = 0; ix < map.nx; ++ix) {
      const double x = map.origin.x + (ix + 0.5) * map.resolution_m;
      const double y = map.origin.y + (iy + 0.5) * map.resolution_m;
      std::snprintf(line, sizeof line, "%.9g,%.9g,%d\n", x, y, map.at(ix, iy));
      out += line;
    }
  return out;
}

std::string serving_map_pgm(const ServingMap& map, int max_cell_id) {
  std::string out = "P2\n" + std::to_string(map.nx) + " " + std::to_string(map.ny) + "\n" +
                    std::to_string(max_cell_id + 1) + "\n";
  for (int iy = map.ny - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < map.nx; ++ix) {
      out += std::to_string(map.at(ix, iy) + 1);
      out += ix + 1 == map.nx ? '\n' : ' ';
    }
  }
  return out;
}

}  // namespace visim::net
