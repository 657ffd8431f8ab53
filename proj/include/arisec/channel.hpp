// Copyright 2026 The arisec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "arisec/config.hpp"
#include "arisec/geometry.hpp"
#include "arisec/types.hpp"

namespace arisec {

/// First-kind Bessel function J_n(x) for the orders the feed pattern needs (1 and 3).
double bessel_j(int order, double x);

/// Normalized feed pattern (J1(u)/2u + 36 J3(u)/u^3)^2; equals 1 at u = 0.
double beam_pattern(double u);

/// Per-feed linear gain b_l toward `node`. Feed l points at group (l mod K).
RVector beam_gain_vector(const ScenarioConfig& cfg, const Topology& topo, const Point3& node);

/// One log-normal draw: ln(xi_dB) ~ Normal(mu, sigma^2). Returns the power attenuation xi^2.
double sample_rain_power(double mu, double sigma, std::mt19937_64& rng);
/// r = xi^2 * 1_L, as used by every satellite link.
RVector sample_rain_attenuation(double mu, double sigma, int antennas, std::uint64_t seed);

/// h = lambda/(4 pi d) e^{-i 2 pi d / lambda} * r^{-1/2} (.) b^{1/2}.
CVector sat_ground_channel(double wavelength, double distance, const RVector& rain, const RVector& gain);

/// N x L satellite-to-ARIS channel of a uniform linear array along x.
CMatrix sat_aris_channel(double wavelength, double distance, double spacing_ratio, double aoa_cosine,
                         int subsurfaces, const RVector& rain, const RVector& gain);

/// CN(0, I_N) draw for the non-line-of-sight part of one ARIS-user link.
CVector sample_nlos(int subsurfaces, std::mt19937_64& rng);

/// Rician small-scale term at unit path loss, scaled by sqrt(L0) (no distance factor).
CVector aris_ground_fading(const ScenarioConfig& cfg, const Point2& aris, const Point2& user,
                           const CVector& nlos);

/// Per-element ARIS-to-user channel sqrt(L0 d^-beta) (sqrt(rho/(rho+1)) LoS + sqrt(1/(rho+1)) NLoS).
CVector aris_ground_channel(const ScenarioConfig& cfg, const Point2& aris, const Point2& user,
                            const CVector& nlos);

/// Random draws that, together with geometry, fix one channel realization.
struct FadingDraws {
  std::vector<double> user_rain;              // power attenuation per user
  std::vector<double> aris_rain;              // power attenuation per ARIS
  std::vector<std::vector<CVector>> nlos;     // [aris][user] N-vector
};

FadingDraws sample_fading(const ScenarioConfig& cfg, const Topology& topo, std::uint64_t seed);

/// All channels of one realization at given ARIS positions. `g` already carries
/// the coherent subsurface gain (elements_per_subsurface).
struct ChannelSet {
  double wavelength = 0.0;
  std::vector<CVector> h;                  // [user] L
  std::vector<CMatrix> G;                  // [aris] N x L
  std::vector<std::vector<CVector>> g;     // [aris][user] N
  std::vector<std::vector<CVector>> g_hat; // [aris][user] N, g with the d^{-beta/2} factor removed
};

ChannelSet compose_channels(const ScenarioConfig& cfg, const Topology& topo, const FadingDraws& draws,
                            std::span<const Point2> aris_positions);

/// Refreshes the links of one ARIS after it moved.
void recompose_aris(const ScenarioConfig& cfg, const Topology& topo, const FadingDraws& draws,
                    int aris, const Point2& position, ChannelSet& channels);

/// Row h^H + sum_j chi_j g_j^H diag(e^{i theta_j}) G_j for one user.
CRowVector effective_channel(const CVector& h, std::span<const CMatrix> G, std::span<const CVector> g,
                             std::span<const RVector> theta, std::span<const double> chi_column);

/// Stable 64-bit digest of a realization (topology plus random draws).
std::uint64_t realization_hash(const Topology& topo, const FadingDraws& draws);

}  // namespace arisec
