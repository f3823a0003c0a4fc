// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "visim/antenna.hpp"
#include "visim/units.hpp"

namespace visim::net {

/// Parabolic macro-sector antenna: gains in dBi, widths in radians, with a
/// front-to-back floor on the horizontal cut and a side-lobe floor on the
/// vertical cut.
struct MacroAntennaParams {
  double gain_dbi = 14.0;
  double phi_3db_rad = deg2rad(70.0);
  double theta_3db_rad = deg2rad(10.0);
  double front_to_back_db = 25.0;
  double sla_db = 20.0;
  double downtilt_rad = deg2rad(8.0);
};

struct LayoutParams {
  double isd_m = 500.0;
  int rings = 2;
  double azimuth_offset_rad = 0.0;
  double bs_height_m = 32.0;
  double ue_height_m = 1.5;
};

/// A virtually sectorized beam hosted by one of the central site's sectors.
/// Tilts are relative to the horizon (vertical) and to the parent sector's
/// azimuth (horizontal).
struct VisPlacement {
  int parent_sector = 0;  // 0..2, central site
  double vertical_tilt_rad = 0.0;
  double horizontal_tilt_rad = 0.0;
};

struct NetworkParams {
  LayoutParams layout;
  double macro_power_dbm = 46.0;
  MacroAntennaParams macro_antenna;
  antenna::ArrayDesign vis_design;
  std::vector<VisPlacement> vis;
  double pattern_step_rad = deg2rad(0.25);  // used once per beam for its gain scale
};

enum class CellKind { Macro, Vis };

struct Cell {
  int id = 0;
  CellKind kind = CellKind::Macro;
  Vec2 pos;                 // site ground position
  double azimuth_rad = 0.0; // sector boresight (macro) or array boresight (vis)
  double power_dbm = 46.0;  // the hosting station's power budget
  int site = 0;
  int sector = 0;
  int parent = -1;          // macro cell sharing the band with this vis cell
  antenna::Steering steering;     // vis only
  double vis_max_gain = 0.0;      // vis only, linear power-conservation scale
};

struct Site {
  Vec2 pos;
  std::array<int, 3> sector_cells{};
};

/// Hexagonal site positions: the center plus `rings` full rings with
/// nearest-neighbor distance isd_m. Deterministic order (center, then rings
/// outward, each traversed the same way).
std::vector<Vec2> hex_site_positions(double isd_m, int rings);

/// Path loss 128.1 + 37.6 log10(d_km) with the distance floored at 10 m.
double pathloss_db(double d_km);

/// Parabolic sector antenna gain for the given angular offsets from the
/// (tilted) boresight, both wrapped to (-pi, pi].
double macro_antenna_gain_db(double horizontal_offset_rad, double vertical_offset_rad,
                             const MacroAntennaParams& p);

/// The deployed network: macro cells for every site (central site first,
/// sectors in azimuth order) followed by the central site's virtual sectors.
class Network {
 public:
  explicit Network(const NetworkParams& params);

  const NetworkParams& params() const { return params_; }
  const std::vector<Site>& sites() const { return sites_; }
  const std::vector<Cell>& cells() const { return cells_; }
  std::size_t macro_count() const { return macro_count_; }

  /// Cells whose KPIs are measured: the central site's sectors and beams.
  const std::vector<int>& central_cells() const { return central_cells_; }

  /// Virtual sector hosted by a central macro cell, or -1.
  int vis_of(int macro_cell) const { return vis_of_[static_cast<std::size_t>(macro_cell)]; }

  /// Linear channel attenuation (transmit antenna gain and path loss) from a
  /// cell's antenna to a ground position; >= 0, and 0 only behind a beam's
  /// reflector or in a pattern null.
  double attenuation(int cell_id, Vec2 pos) const;

  std::vector<double> attenuation_vector(Vec2 pos) const;

  /// Strongest cell by received per-Hz power, ties to the lowest id.
  /// Cells with zero power are never selected.
  int serving_cell(Vec2 pos, std::span<const double> per_hz_power_mw) const;

  /// Same selection restricted to a candidate subset. Used when only some
  /// cells accept traffic (the interferer rings transmit but never serve).
  int serving_cell(Vec2 pos, std::span<const double> per_hz_power_mw,
                   std::span<const int> candidates) const;

 private:
  NetworkParams params_;
  std::vector<Site> sites_;
  std::vector<Cell> cells_;
  std::vector<int> central_cells_;
  std::vector<int> vis_of_;
  std::vector<antenna::PatternEvaluator> vis_eval_;  // aligned with vis cells
  std::size_t macro_count_ = 0;
};

/// Serving-cell raster over a rectangle; pixel centers start half a
/// resolution step inside the origin corner.
struct ServingMap {
  Vec2 origin;
  double resolution_m = 10.0;
  int nx = 0, ny = 0;
  std::vector<int> cell_ids;  // row-major, y-major rows from origin upward

  int at(int ix, int iy) const { return cell_ids[static_cast<std::size_t>(iy) * nx + ix]; }
};

ServingMap compute_serving_map(const Network& network, std::span<const double> per_hz_power_mw,
                               Vec2 lo, Vec2 hi, double resolution_m);

std::string serving_map_csv(const ServingMap& map);
std::string serving_map_pgm(const ServingMap& map, int max_cell_id);

}  // namespace visim::net
