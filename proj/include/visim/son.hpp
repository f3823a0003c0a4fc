// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

namespace visim::son {

/// Bandwidth split between a hosting macro sector and its beam under the
/// sharing policy. `delta` is the beam's band fraction.
struct SplitState {
  int vis_users = 0;
  int macro_users = 0;
  double delta = 0.0;
};

/// Closed-form proportional-fair optimum of the band fraction: the users of
/// each class weigh equally in the log-utility, so the split settles on the
/// user-count ratio. Empty pair keeps the band with the macro.
inline double optimal_delta(int vis_users, int macro_users) {
  if (vis_users < 0 || macro_users < 0) throw std::invalid_argument("negative user count");
  const int total = vis_users + macro_users;
  if (total == 0) return 0.0;
  return static_cast<double>(vis_users) / static_cast<double>(total);
}

/// Proportional-fair utility of a candidate split, given each user's
/// full-band rate. Used by tests to confirm the closed form; the simulator
/// itself never scans.
inline double pf_utility(double delta, std::span<const double> vis_full_band_rates,
                         std::span<const double> macro_full_band_rates) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("delta outside [0,1]");
  double u = 0.0;
  for (double r : vis_full_band_rates) {
    if (!(r > 0.0)) throw std::invalid_argument("rates must be positive");
    const double x = delta * r;
    if (x <= 0.0) return -std::numeric_limits<double>::infinity();
    u += std::log(x);
  }
  for (double r : macro_full_band_rates) {
    if (!(r > 0.0)) throw std::invalid_argument("rates must be positive");
    const double x = (1.0 - delta) * r;
    if (x <= 0.0) return -std::numeric_limits<double>::infinity();
    u += std::log(x);
  }
  return u;
}

/// Re-optimizes the split after a user joins (+1) or leaves (-1) one side of
/// the pair. Called on every arrival and departure touching the pair.
inline void on_event(SplitState& state, bool vis_side, int change) {
  if (change != 1 && change != -1) throw std::invalid_argument("change must be +1 or -1");
  int& count = vis_side ? state.vis_users : state.macro_users;
  count += change;
  if (count < 0) throw std::logic_error("user count went negative");
  state.delta = optimal_delta(state.vis_users, state.macro_users);
}

}  // namespace visim::son
