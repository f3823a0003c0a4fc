// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "visim/units.hpp"

namespace visim::antenna {

/// Geometry and excitation of a rectangular dipole array backed by a planar
/// reflector. Element columns run along x, rows along z; spacings are
/// fractions of the carrier wavelength; taper ratios are the edge-to-center
/// amplitude ratios of the Gaussian taper on each axis.
struct ArrayDesign {
  int n_x = 1;
  int n_z = 1;
  double dx_over_lambda = 0.5;
  double dz_over_lambda = 0.5;
  double taper_ratio_x = 1.0;
  double taper_ratio_z = 1.0;

  void validate() const;  ///< throws std::invalid_argument on bad fields
};

/// Electrical beam pointing. theta_e is the polar angle from zenith (+z),
/// phi_e the azimuth from the reflector boresight (+y); the beam must point
/// into the front half-space: theta_e in (0, pi), phi_e in (-pi/2, pi/2).
struct Steering {
  double theta_e = pi / 2.0;
  double phi_e = 0.0;

  void validate() const;
};

enum class Axis { X, Z };

/// Gaussian taper weights for an n-element line. Elements sit at normalized
/// coordinates x_k in [-1, 1], symmetric about the array center, and
/// w_k = exp(-a x_k^2) with a = -ln(edge_ratio), so the end elements get
/// exactly edge_ratio (n >= 2) and an odd array's center element gets 1.
std::vector<double> taper_weights(int n, double edge_ratio);

/// Complex array factor of one axis, normalized to magnitude 1 at the
/// steering direction and phase-referenced to the array center. The relevant
/// direction cosines are u = cos(theta) on z and u = sin(theta)sin(phi) on x.
std::complex<double> array_factor(Axis axis, const ArrayDesign& design,
                                  const Steering& steering, double theta, double phi);

/// Field factor of the ideal planar reflector, sin((pi/2) sin(theta) cos(phi)).
/// Defined only over the front half-space |phi| <= pi/2 (throws domain_error).
double reflector_factor(double theta, double phi);

/// Power pattern of the elementary vertical dipole element, sin^2(theta).
double element_gain(double theta);

/// Normalized power pattern f(theta, phi): the product of both squared array
/// factor magnitudes, the squared reflector factor, and the element pattern.
/// Front half-space only (throws domain_error behind the reflector).
double normalized_gain(const ArrayDesign& design, const Steering& steering,
                       double theta, double phi);

/// Per-design precomputed state for fast pattern evaluation: taper weights,
/// steering direction cosines, and phase constants are derived once.
class PatternEvaluator {
 public:
  PatternEvaluator(const ArrayDesign& design, const Steering& steering);

  /// Normalized pattern value; throws domain_error behind the reflector.
  double value(double theta, double phi) const;

  /// Same, but an ideal reflector radiates nothing backwards: returns 0 for
  /// |phi| > pi/2. Used by link budgets where positions may fall behind.
  double value_or_zero(double theta, double phi) const;

  /// Pattern value from precomputed trigonometry (sin/cos of theta, sin/cos
  /// of phi); the caller guarantees the direction is in the front half-space.
  double value_from_cosines(double sin_theta, double cos_theta,
                            double sin_phi, double cos_phi) const;

  std::complex<double> axis_factor(Axis axis, double u) const;

 private:
  std::vector<double> wx_, wz_;
  double wx_sum_ = 1.0, wz_sum_ = 1.0;
  double cx_ = 0.0, cz_ = 0.0;          // 2*pi*spacing per axis
  double ux_steer_ = 0.0, uz_steer_ = 0.0;
};

/// Sampled gain pattern over the front half-space. `gain` holds linear gain
/// values in theta-major order; g0 is the maximum over the grid.
struct GainPattern {
  std::vector<double> theta_samples;  // radians, ascending, within [0, pi]
  std::vector<double> phi_samples;    // radians, ascending, within [-pi/2, pi/2]
  std::vector<double> gain;           // theta-major, size = |theta| * |phi|
  double g0 = 0.0;

  double at(std::size_t it, std::size_t ip) const {
    return gain[it * phi_samples.size() + ip];
  }
};

/// Gain scale factor fixed by power conservation: 4*pi divided by the
/// integral of f(theta, phi) sin(theta) over the front half-space, computed
/// with the midpoint rule. The grid step must be at most 0.25 degrees.
double max_gain(const ArrayDesign& design, const Steering& steering,
                double grid_step_rad = deg2rad(0.25));

/// Sample the full pattern on an inclusive node grid and scale it by
/// max_gain() so the grid holds absolute linear gains.
GainPattern compute_pattern(const ArrayDesign& design, const Steering& steering,
                            double grid_step_rad = deg2rad(0.25));

/// Ratio (dB) between the strongest lobe outside the main lobe and the main
/// beam. The main-lobe region is the index rectangle bounded by the first
/// local minimum on each side of the pattern maximum along the two principal
/// cuts; a side without a local minimum extends to the grid edge. Returns
/// -infinity when the pattern has a single lobe. The steering direction
/// breaks ties between equal grid maxima.
double side_lobe_level_db(const GainPattern& pattern, const Steering& steering);

struct SteeringEnvelope {
  double theta_e_max = pi / 2.0;  // worst-case downward steering
  double phi_e_abs_max = 0.0;     // worst-case sideways steering
};

/// Candidate values swept by design_search. Empty vectors fall back to the
/// base design's value for that knob.
struct DesignLattice {
  std::vector<double> dx_over_lambda;
  std::vector<double> dz_over_lambda;
  std::vector<double> taper_ratio_x;
  std::vector<double> taper_ratio_z;
  double grid_step_rad = deg2rad(0.25);
};

struct DesignSearchResult {
  bool feasible = false;
  ArrayDesign design;
  double max_gain_linear = 0.0;  // max_gain() of the chosen design at the corner
  double sll_db = 0.0;
};

/// Sweep spacings and taper ratios over the lattice, checking the side-lobe
/// constraint at the worst-case steering corner (theta_e_max, +phi_e_abs_max).
/// Among feasible candidates returns the one with the largest max_gain();
/// ties prefer larger spacings, then weaker taper.
DesignSearchResult design_search(const ArrayDesign& base, const SteeringEnvelope& env,
                                 double sll_constraint_db, const DesignLattice& lattice);

namespace detail {

/// Midpoint-rule integral of f(theta, phi) * sin(theta) over
/// theta in [0, pi], phi in [-pi/2, pi/2].
template <class F>
double pattern_integral(F&& f, double step_rad) {
  const int nt = static_cast<int>(std::ceil(pi / step_rad - 1e-9));
  const int np = static_cast<int>(std::ceil(pi / step_rad - 1e-9));
  const double ht = pi / nt;
  const double hp = pi / np;
  double sum = 0.0;
  for (int i = 0; i < nt; ++i) {
    const double theta = (i + 0.5) * ht;
    const double st = std::sin(theta);
    double row = 0.0;
    for (int j = 0; j < np; ++j) {
      const double phi = -pi / 2.0 + (j + 0.5) * hp;
      row += f(theta, phi);
    }
    sum += row * st;
  }
  return sum * ht * hp;
}

}  // namespace detail

}  // namespace visim::antenna
