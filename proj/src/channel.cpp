// Copyright 2026 The arisec Authors
// SPDX-License-Identifier: Apache-2.0

#include "arisec/channel.hpp"

#include <cmath>
#include <cstring>

namespace arisec {

namespace {

Complex free_space(double wavelength, double distance) {
  const double amplitude = wavelength / (4.0 * kPi * distance);
  // Reduce the phase modulo one wavelength before scaling by 2 pi.
  const double cycles = std::fmod(distance / wavelength, 1.0);
  return std::polar(amplitude, -2.0 * kPi * cycles);
}

RVector link_scale(const RVector& rain, const RVector& gain) {
  return (gain.array().sqrt() / rain.array().sqrt()).matrix();
}

}  // namespace

double bessel_j(int order, double x) {
  if (order != 1 && order != 3) {
    throw Error(ErrorCode::argument, "bessel_j: unsupported order " + std::to_string(order));
  }
  if (x < 0) throw Error(ErrorCode::argument, "bessel_j: negative argument");
  return std::cyl_bessel_j(static_cast<double>(order), x);
}

double beam_pattern(double u) {
  if (u < 1e-4) {
    // J1(u)/2u + 36 J3(u)/u^3 = 1 - 5u^2/64 + O(u^4)
    const double s = 1.0 - 5.0 * u * u / 64.0;
    return s * s;
  }
  const double s = bessel_j(1, u) / (2.0 * u) + 36.0 * bessel_j(3, u) / (u * u * u);
  return s * s;
}

RVector beam_gain_vector(const ScenarioConfig& cfg, const Topology& topo, const Point3& node) {
  RVector b(cfg.antennas);
  const double sin3db = std::sin(cfg.phi3db_rad);
  for (int l = 0; l < cfg.antennas; ++l) {
    const Point2& center = topo.group_centers[l % cfg.groups];
    const double phi = off_axis_angle(topo.satellite, node, ground(center));
    const double u = 2.07123 * std::sin(phi) / sin3db;
    b(l) = cfg.gmax_linear * beam_pattern(u);
  }
  return b;
}

double sample_rain_power(double mu, double sigma, std::mt19937_64& rng) {
  double ln_db = mu;
  if (sigma > 0) {
    std::normal_distribution<double> normal(0.0, 1.0);
    ln_db += sigma * normal(rng);
  }
  const double xi_db = std::exp(ln_db);
  return std::pow(10.0, xi_db / 10.0);
}

RVector sample_rain_attenuation(double mu, double sigma, int antennas, std::uint64_t seed) {
  auto rng = rng_stream(seed, "rain");
  return RVector::Constant(antennas, sample_rain_power(mu, sigma, rng));
}

CVector sat_ground_channel(double wavelength, double distance, const RVector& rain, const RVector& gain) {
  return free_space(wavelength, distance) * link_scale(rain, gain).cast<Complex>();
}

CMatrix sat_aris_channel(double wavelength, double distance, double spacing_ratio, double aoa_cosine,
                         int subsurfaces, const RVector& rain, const RVector& gain) {
  const Complex base = free_space(wavelength, distance);
  const CRowVector scale = link_scale(rain, gain).transpose().cast<Complex>();
  CMatrix G(subsurfaces, rain.size());
  for (int n = 0; n < subsurfaces; ++n) {
    const Complex steer = std::polar(1.0, -2.0 * kPi * spacing_ratio * n * aoa_cosine);
    G.row(n) = base * steer * scale;
  }
  return G;
}

CVector sample_nlos(int subsurfaces, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  CVector z(subsurfaces);
  for (int n = 0; n < subsurfaces; ++n) {
    const double re = normal(rng);
    const double im = normal(rng);
    z(n) = Complex(re, im);
  }
  return z;
}

CVector aris_ground_fading(const ScenarioConfig& cfg, const Point2& aris, const Point2& user,
                           const CVector& nlos) {
  const double lambda = cfg.wavelength();
  const double d = aris_user_distance(aris, user, cfg.aris_altitude_m);
  const double aod_cosine = (aris.x - user.x) / d;
  const double rho = cfg.rician_linear;
  const double los_weight = std::sqrt(rho / (rho + 1.0));
  const double nlos_weight = std::sqrt(1.0 / (rho + 1.0));
  const Complex common = std::polar(1.0, -2.0 * kPi * std::fmod(d / lambda, 1.0));
  const int n_sub = static_cast<int>(nlos.size());
  CVector g(n_sub);
  for (int n = 0; n < n_sub; ++n) {
    const Complex los = common * std::polar(1.0, -2.0 * kPi * cfg.element_spacing_ratio * n * aod_cosine);
    g(n) = los_weight * los + nlos_weight * nlos(n);
  }
  return std::sqrt(cfg.ref_loss_linear) * g;
}

CVector aris_ground_channel(const ScenarioConfig& cfg, const Point2& aris, const Point2& user,
                            const CVector& nlos) {
  const double d = aris_user_distance(aris, user, cfg.aris_altitude_m);
  return std::pow(d, -cfg.pathloss_exponent / 2.0) * aris_ground_fading(cfg, aris, user, nlos);
}

FadingDraws sample_fading(const ScenarioConfig& cfg, const Topology& topo, std::uint64_t seed) {
  FadingDraws draws;
  const int users = static_cast<int>(topo.users.size());
  for (int i = 0; i < users; ++i) {
    auto rng = rng_stream(seed, "rain-user", {static_cast<std::uint64_t>(i)});
    draws.user_rain.push_back(sample_rain_power(cfg.rain_mu, cfg.rain_sigma, rng));
  }
  for (int j = 0; j < cfg.arises; ++j) {
    auto rng = rng_stream(seed, "rain-aris", {static_cast<std::uint64_t>(j)});
    draws.aris_rain.push_back(sample_rain_power(cfg.rain_mu, cfg.rain_sigma, rng));
    std::vector<CVector> per_user;
    for (int i = 0; i < users; ++i) {
      auto nrng = rng_stream(seed, "nlos", {static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(i)});
      per_user.push_back(sample_nlos(cfg.subsurfaces, nrng));
    }
    draws.nlos.push_back(std::move(per_user));
  }
  return draws;
}

void recompose_aris(const ScenarioConfig& cfg, const Topology& topo, const FadingDraws& draws, int j,
                    const Point2& q, ChannelSet& ch) {
  const double lambda = cfg.wavelength();
  const Point3 aris3 = lifted(q, cfg.aris_altitude_m);
  const double d_sat = distance3(topo.satellite, aris3);
  const double aoa_cosine = (q.x - topo.satellite.x) / d_sat;
  const RVector rain = RVector::Constant(cfg.antennas, draws.aris_rain.at(j));
  const RVector gain = beam_gain_vector(cfg, topo, aris3);
  ch.G[j] = sat_aris_channel(lambda, d_sat, cfg.element_spacing_ratio, aoa_cosine, cfg.subsurfaces, rain, gain);

  const double e_sub = cfg.elements_per_subsurface;
  const int users = static_cast<int>(topo.users.size());
  ch.g[j].resize(users);
  ch.g_hat[j].resize(users);
  for (int i = 0; i < users; ++i) {
    const Point2& w = topo.users[i].position;
    const CVector fading = e_sub * aris_ground_fading(cfg, q, w, draws.nlos[j][i]);
    const double d = aris_user_distance(q, w, cfg.aris_altitude_m);
    ch.g_hat[j][i] = fading;
    ch.g[j][i] = std::pow(d, -cfg.pathloss_exponent / 2.0) * fading;
  }
}

ChannelSet compose_channels(const ScenarioConfig& cfg, const Topology& topo, const FadingDraws& draws,
                            std::span<const Point2> aris_positions) {
  if (static_cast<int>(aris_positions.size()) != cfg.arises) {
    throw Error(ErrorCode::dimension, "compose_channels: expected one position per ARIS");
  }
  ChannelSet ch;
  ch.wavelength = cfg.wavelength();
  for (size_t i = 0; i < topo.users.size(); ++i) {
    const Point3 node = ground(topo.users[i].position);
    const double d = distance3(topo.satellite, node);
    const RVector rain = RVector::Constant(cfg.antennas, draws.user_rain.at(i));
    ch.h.push_back(sat_ground_channel(ch.wavelength, d, rain, beam_gain_vector(cfg, topo, node)));
  }
  ch.G.resize(cfg.arises);
  ch.g.resize(cfg.arises);
  ch.g_hat.resize(cfg.arises);
  for (int j = 0; j < cfg.arises; ++j) recompose_aris(cfg, topo, draws, j, aris_positions[j], ch);
  return ch;
}

CRowVector effective_channel(const CVector& h, std::span<const CMatrix> G, std::span<const CVector> g,
                             std::span<const RVector> theta, std::span<const double> chi_column) {
  const size_t aris_count = chi_column.size();
  if (G.size() != aris_count || g.size() != aris_count || theta.size() != aris_count) {
    throw Error(ErrorCode::dimension, "effective_channel: per-ARIS inputs disagree in count");
  }
  CRowVector row = h.adjoint();
  for (size_t j = 0; j < aris_count; ++j) {
    if (chi_column[j] == 0.0) continue;
    const auto n_sub = G[j].rows();
    if (g[j].size() != n_sub || theta[j].size() != n_sub || G[j].cols() != h.size()) {
      throw Error(ErrorCode::dimension, "effective_channel: ARIS " + std::to_string(j) + " dimension mismatch");
    }
    CRowVector reflect(n_sub);
    for (Eigen::Index n = 0; n < n_sub; ++n) reflect(n) = std::conj(g[j](n)) * std::polar(1.0, theta[j](n));
    row += chi_column[j] * (reflect * G[j]);
  }
  return row;
}

std::uint64_t realization_hash(const Topology& topo, const FadingDraws& draws) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& u : topo.users) {
    mix(u.position.x);
    mix(u.position.y);
  }
  for (double r : draws.user_rain) mix(r);
  for (double r : draws.aris_rain) mix(r);
  for (const auto& per_aris : draws.nlos) {
    for (const auto& z : per_aris) {
      for (Eigen::Index n = 0; n < z.size(); ++n) {
        mix(z(n).real());
        mix(z(n).imag());
      }
    }
  }
  return h;
}

}  // namespace arisec
