// SPDX-License-Identifier: Apache-2.0
#include "visim/antenna.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace visim::antenna {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_axis_count(int n, const char* name) {
  if (n < 1) throw std::invalid_argument(std::string(name) + " must be >= 1");
}

void check_spacing(double d, const char* name) {
  if (!(d > 0.0) || d > 1.0)
    throw std::invalid_argument(std::string(name) + " must be in (0, 1] wavelengths");
}

void check_taper(double r, const char* name) {
  if (!(r > 0.0) || r > 1.0)
    throw std::invalid_argument(std::string(name) + " must be in (0, 1]");
}

/// Normalized magnitude of a weighted, steered line sum: the phase increment
/// per element is c * (u - u_steer); magnitude 1 at u = u_steer.
double line_factor_sq(const std::vector<double>& w, double w_sum, double c,
                      double u, double u_steer) {
  const std::size_t n = w.size();
  if (n == 1) return 1.0;
  const double psi = c * (u - u_steer);
  const std::complex<double> z(std::cos(psi), std::sin(psi));
  std::complex<double> acc(w[n - 1], 0.0);
  for (std::size_t k = n - 1; k-- > 0;) acc = acc * z + w[k];
  const double m = std::norm(acc) / (w_sum * w_sum);
  return m;
}

}  // namespace

void ArrayDesign::validate() const {
  check_axis_count(n_x, "n_x");
  check_axis_count(n_z, "n_z");
  check_spacing(dx_over_lambda, "dx_over_lambda");
  check_spacing(dz_over_lambda, "dz_over_lambda");
  check_taper(taper_ratio_x, "taper_ratio_x");
  check_taper(taper_ratio_z, "taper_ratio_z");
}

void Steering::validate() const {
  if (!(theta_e > 0.0) || !(theta_e < pi))
    throw std::invalid_argument("theta_e must be in (0, pi)");
  if (!(phi_e > -pi / 2.0) || !(phi_e < pi / 2.0))
    throw std::invalid_argument("phi_e must be in (-pi/2, pi/2)");
}

std::vector<double> taper_weights(int n, double edge_ratio) {
  check_axis_count(n, "element count");
  check_taper(edge_ratio, "edge_ratio");
  std::vector<double> w(static_cast<std::size_t>(n));
  if (n == 1) {
    w[0] = 1.0;
    return w;
  }
  const double a = -std::log(edge_ratio);
  for (int k = 0; k < n; ++k) {
    const double x = -1.0 + 2.0 * k / (n - 1);
    w[static_cast<std::size_t>(k)] = std::exp(-a * x * x);
  }
  return w;
}

PatternEvaluator::PatternEvaluator(const ArrayDesign& design, const Steering& steering) {
  design.validate();
  steering.validate();
  wx_ = taper_weights(design.n_x, design.taper_ratio_x);
  wz_ = taper_weights(design.n_z, design.taper_ratio_z);
  wx_sum_ = 0.0;
  for (double w : wx_) wx_sum_ += w;
  wz_sum_ = 0.0;
  for (double w : wz_) wz_sum_ += w;
  cx_ = two_pi * design.dx_over_lambda;
  cz_ = two_pi * design.dz_over_lambda;
  ux_steer_ = std::sin(steering.theta_e) * std::sin(steering.phi_e);
  uz_steer_ = std::cos(steering.theta_e);
}

double PatternEvaluator::value_from_cosines(double sin_theta, double cos_theta,
                                            double sin_phi, double cos_phi) const {
  const double uy = sin_theta * cos_phi;
  const double refl = std::sin(pi / 2.0 * uy);
  const double gd = sin_theta * sin_theta;
  const double afx = line_factor_sq(wx_, wx_sum_, cx_, sin_theta * sin_phi, ux_steer_);
  const double afz = line_factor_sq(wz_, wz_sum_, cz_, cos_theta, uz_steer_);
  return afx * afz * refl * refl * gd;
}

double PatternEvaluator::value(double theta, double phi) const {
  if (theta < 0.0 || theta > pi) throw std::domain_error("theta must be in [0, pi]");
  if (std::abs(phi) > pi / 2.0 + 1e-12)
    throw std::domain_error("phi must be in [-pi/2, pi/2] (front half-space)");
  return value_from_cosines(std::sin(theta), std::cos(theta), std::sin(phi), std::cos(phi));
}

double PatternEvaluator::value_or_zero(double theta, double phi) const {
  if (theta < 0.0 || theta > pi) throw std::domain_error("theta must be in [0, pi]");
  phi = wrap_angle(phi);
  if (std::abs(phi) > pi / 2.0) return 0.0;
  return value_from_cosines(std::sin(theta), std::cos(theta), std::sin(phi), std::cos(phi));
}

std::complex<double> PatternEvaluator::axis_factor(Axis axis, double u) const {
  const std::vector<double>& w = axis == Axis::X ? wx_ : wz_;
  const double w_sum = axis == Axis::X ? wx_sum_ : wz_sum_;
  const double c = axis == Axis::X ? cx_ : cz_;
  const double u_steer = axis == Axis::X ? ux_steer_ : uz_steer_;
  const std::size_t n = w.size();
  if (n == 1) return {1.0, 0.0};
  const double psi = c * (u - u_steer);
  const std::complex<double> z(std::cos(psi), std::sin(psi));
  std::complex<double> acc(w[n - 1], 0.0);
  for (std::size_t k = n - 1; k-- > 0;) acc = acc * z + w[k];
  // Shift the phase reference from element 0 to the array center.
  const double center_phase = -0.5 * static_cast<double>(n - 1) * psi;
  return acc * std::polar(1.0, center_phase) / w_sum;
}

std::complex<double> array_factor(Axis axis, const ArrayDesign& design,
                                  const Steering& steering, double theta, double phi) {
  const PatternEvaluator ev(design, steering);
  const double u = axis == Axis::Z ? std::cos(theta) : std::sin(theta) * std::sin(phi);
  return ev.axis_factor(axis, u);
}

double reflector_factor(double theta, double phi) {
  if (std::abs(phi) > pi / 2.0 + 1e-12)
    throw std::domain_error("reflector factor is defined on the front half-space only");
  return std::sin(pi / 2.0 * std::sin(theta) * std::cos(phi));
}

double element_gain(double theta) {
  const double s = std::sin(theta);
  return s * s;
}

double normalized_gain(const ArrayDesign& design, const Steering& steering,
                       double theta, double phi) {
  const PatternEvaluator ev(design, steering);
  return ev.value(theta, phi);
}

double max_gain(const ArrayDesign& design, const Steering& steering, double grid_step_rad) {
  if (!(grid_step_rad > 0.0) || grid_step_rad > deg2rad(0.25) + 1e-12)
    throw std::invalid_argument("integration grid step must be in (0, 0.25 deg]");
  const PatternEvaluator ev(design, steering);
  const double integral = detail::pattern_integral(
      [&ev](double theta, double phi) { return ev.value(theta, phi); }, grid_step_rad);
  if (!(integral > 0.0) || !std::isfinite(integral))
    throw std::runtime_error("pattern integral is not positive and finite");
  return 4.0 * pi / integral;
}

namespace {

GainPattern sample_pattern(const PatternEvaluator& ev, double step, double scale) {
  GainPattern p;
  const int nt = static_cast<int>(std::ceil(pi / step - 1e-9)) + 1;
  const int np = static_cast<int>(std::ceil(pi / step - 1e-9)) + 1;
  p.theta_samples.resize(static_cast<std::size_t>(nt));
  p.phi_samples.resize(static_cast<std::size_t>(np));
  for (int i = 0; i < nt; ++i) p.theta_samples[static_cast<std::size_t>(i)] = pi * i / (nt - 1);
  for (int j = 0; j < np; ++j)
    p.phi_samples[static_cast<std::size_t>(j)] = -pi / 2.0 + pi * j / (np - 1);
  p.gain.resize(static_cast<std::size_t>(nt) * static_cast<std::size_t>(np));
  std::vector<double> sin_phi(p.phi_samples.size()), cos_phi(p.phi_samples.size());
  for (std::size_t j = 0; j < p.phi_samples.size(); ++j) {
    sin_phi[j] = std::sin(p.phi_samples[j]);
    cos_phi[j] = std::cos(p.phi_samples[j]);
  }
  double gmax = 0.0;
  for (std::size_t i = 0; i < p.theta_samples.size(); ++i) {
    const double st = std::sin(p.theta_samples[i]);
    const double ct = std::cos(p.theta_samples[i]);
    for (std::size_t j = 0; j < p.phi_samples.size(); ++j) {
      const double v = scale * ev.value_from_cosines(st, ct, sin_phi[j], cos_phi[j]);
      p.gain[i * p.phi_samples.size() + j] = v;
      gmax = std::max(gmax, v);
    }
  }
  p.g0 = gmax;
  return p;
}

}  // namespace

GainPattern compute_pattern(const ArrayDesign& design, const Steering& steering,
                            double grid_step_rad) {
  if (!(grid_step_rad > 0.0) || grid_step_rad > deg2rad(0.25) + 1e-12)
    throw std::invalid_argument("pattern grid step must be in (0, 0.25 deg]");
  const PatternEvaluator ev(design, steering);
  const double scale = max_gain(design, steering, grid_step_rad);
  return sample_pattern(ev, grid_step_rad, scale);
}

double side_lobe_level_db(const GainPattern& pattern, const Steering& steering) {
  const std::size_t nt = pattern.theta_samples.size();
  const std::size_t np = pattern.phi_samples.size();
  if (nt == 0 || np == 0 || pattern.gain.size() != nt * np)
    throw std::invalid_argument("malformed gain pattern");
  auto check_step = [](const std::vector<double>& s) {
    for (std::size_t i = 1; i < s.size(); ++i) {
      const double d = s[i] - s[i - 1];
      if (!(d > 0.0)) throw std::invalid_argument("pattern samples must be ascending");
      if (d > deg2rad(0.25) + 1e-9)
        throw std::invalid_argument("pattern grid is too coarse to resolve lobes");
    }
  };
  check_step(pattern.theta_samples);
  check_step(pattern.phi_samples);

  // Global maximum; ties resolved toward the steering direction.
  double gmax = kNegInf;
  std::size_t i0 = 0, j0 = 0;
  for (std::size_t i = 0; i < nt; ++i)
    for (std::size_t j = 0; j < np; ++j) {
      const double v = pattern.at(i, j);
      if (v > gmax) {
        gmax = v;
        i0 = i;
        j0 = j;
      } else if (v == gmax) {
        const double cur = std::abs(pattern.theta_samples[i0] - steering.theta_e) +
                           std::abs(pattern.phi_samples[j0] - steering.phi_e);
        const double cand = std::abs(pattern.theta_samples[i] - steering.theta_e) +
                            std::abs(pattern.phi_samples[j] - steering.phi_e);
        if (cand < cur) {
          i0 = i;
          j0 = j;
        }
      }
    }
  if (!(gmax > 0.0)) throw std::invalid_argument("pattern has no positive maximum");

  // Walk down a principal cut until the value stops decreasing; that sample
  // is the first local minimum. Reaching the edge means no minimum was found.
  auto walk = [](auto&& value, std::size_t n, std::size_t start, int dir)
      -> std::pair<std::size_t, bool> {
    std::size_t cur = start;
    while (true) {
      if (dir < 0 && cur == 0) return {cur, false};
      if (dir > 0 && cur + 1 == n) return {cur, false};
      const std::size_t next = dir < 0 ? cur - 1 : cur + 1;
      if (value(next) >= value(cur)) return {cur, true};
      cur = next;
    }
  };
  auto theta_cut = [&](std::size_t i) { return pattern.at(i, j0); };
  auto phi_cut = [&](std::size_t j) { return pattern.at(i0, j); };
  const auto [ilo, ilo_min] = walk(theta_cut, nt, i0, -1);
  const auto [ihi, ihi_min] = walk(theta_cut, nt, i0, +1);
  const auto [jlo, jlo_min] = walk(phi_cut, np, j0, -1);
  const auto [jhi, jhi_min] = walk(phi_cut, np, j0, +1);
  if (!ilo_min && !ihi_min && !jlo_min && !jhi_min) return kNegInf;

  double side_max = 0.0;
  for (std::size_t i = 0; i < nt; ++i)
    for (std::size_t j = 0; j < np; ++j) {
      if (i >= ilo && i <= ihi && j >= jlo && j <= jhi) continue;
      side_max = std::max(side_max, pattern.at(i, j));
    }
  if (!(side_max > 0.0)) return kNegInf;
  return 10.0 * std::log10(side_max / gmax);
}

DesignSearchResult design_search(const ArrayDesign& base, const SteeringEnvelope& env,
                                 double sll_constraint_db, const DesignLattice& lattice) {
  base.validate();
  if (sll_constraint_db > 0.0)
    throw std::invalid_argument("side-lobe constraint must be <= 0 dB");
  const Steering corner{env.theta_e_max, env.phi_e_abs_max};
  corner.validate();

  auto values_or = [](const std::vector<double>& v, double fallback) {
    return v.empty() ? std::vector<double>{fallback} : v;
  };
  const auto dxs = values_or(lattice.dx_over_lambda, base.dx_over_lambda);
  const auto dzs = values_or(lattice.dz_over_lambda, base.dz_over_lambda);
  const auto txs = values_or(lattice.taper_ratio_x, base.taper_ratio_x);
  const auto tzs = values_or(lattice.taper_ratio_z, base.taper_ratio_z);

  DesignSearchResult best;
  for (double dx : dxs)
    for (double dz : dzs)
      for (double tx : txs)
        for (double tz : tzs) {
          ArrayDesign cand = base;
          cand.dx_over_lambda = dx;
          cand.dz_over_lambda = dz;
          cand.taper_ratio_x = tx;
          cand.taper_ratio_z = tz;
          cand.validate();
          const PatternEvaluator ev(cand, corner);
          // Side-lobe level only needs pattern ratios, so the expensive
          // power-conservation scale is deferred to feasible candidates.
          GainPattern raw = sample_pattern(ev, lattice.grid_step_rad, 1.0);
          const double sll = side_lobe_level_db(raw, corner);
          if (sll > sll_constraint_db) continue;
          const double g0 = max_gain(cand, corner, lattice.grid_step_rad);
          const auto key = std::make_tuple(g0, dx, dz, tx, tz);
          const auto best_key =
              std::make_tuple(best.max_gain_linear, best.design.dx_over_lambda,
                              best.design.dz_over_lambda, best.design.taper_ratio_x,
                              best.design.taper_ratio_z);
          if (!best.feasible || key > best_key) {
            best.feasible = true;
            best.design = cand;
            best.max_gain_linear = g0;
            best.sll_db = sll;
          }
        }
  return best;
}

}  // namespace visim::antenna
