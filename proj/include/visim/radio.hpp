// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "visim/network.hpp"

namespace visim::radio {

/// Resource-allocation policy for the central site's virtual sectors.
///   Baseline: beams off, macros on the full band at full power.
///   ReuseOne: each hosting sector splits its power budget evenly between
///             macro and beam, both transmitting on the full band.
///   Sharing:  macro and beam split the band disjointly, each at the
///             unchanged per-Hz power.
enum class RadioMode { Baseline, ReuseOne, Sharing };

struct SystemParams {
  double bandwidth_hz = 10e6;
  double noise_dbm_per_hz = -174.0;
  double max_spectral_efficiency = 4.4;  // bit/s/Hz ceiling
};

double noise_mw_per_hz(const SystemParams& sys);

/// Per-Hz transmit power of every cell under a mode. Interferer sites always
/// transmit their full budget over the full band.
std::vector<double> per_hz_power_mw(const net::Network& network, const SystemParams& sys,
                                    RadioMode mode);

/// Mode, per-Hz powers and noise density bundled for repeated evaluations.
struct LinkBudget {
  RadioMode mode = RadioMode::Baseline;
  std::vector<double> per_hz_power_mw;
  double noise_mw_per_hz = 0.0;

  static LinkBudget make(const net::Network& network, const SystemParams& sys, RadioMode mode);
};

/// Per-Hz SINR for a user with attenuation vector h served by `serving`.
/// Interference membership: baseline and reuse-one sum every other active
/// cell; sharing sums macro cells only, excluding the serving pair's macro
/// (band-disjointness inside the pair).
double sinr_linear(const net::Network& network, const LinkBudget& budget, int serving,
                   std::span<const double> h);

double sinr_baseline(const net::Network&, const SystemParams&, Vec2 pos, int serving);
double sinr_reuse_one(const net::Network&, const SystemParams&, Vec2 pos, int serving);
double sinr_sharing(const net::Network&, const SystemParams&, Vec2 pos, int serving);

/// Shannon rate with a spectral-efficiency ceiling.
double rate_bps(double sinr_linear, double bandwidth_hz, double max_spectral_efficiency = 4.4);

}  // namespace visim::radio
