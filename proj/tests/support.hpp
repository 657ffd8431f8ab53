// Copyright 2026 The arisec Authors
// SPDX-License-Identifier: Apache-2.0

// Shared fixtures for the unit and acceptance tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "arisec/association.hpp"
#include "arisec/channel.hpp"
#include "arisec/deployment.hpp"
#include "arisec/geometry.hpp"
#include "arisec/rates.hpp"
#include "arisec/ris_reflection.hpp"
#include "arisec/tx_beamforming.hpp"

namespace arisec::testing {

struct Instance {
  ScenarioConfig cfg;
  Topology topo;
  FadingDraws draws;
  ChannelSet channels;
  DecisionState state;
};

/// One realization with random beams (full power), random phases, and ARIS j serving
/// group j. Deterministic in `seed`.
inline Instance random_instance(std::uint64_t seed, ScenarioConfig cfg = ScenarioConfig::desk_defaults()) {
  Instance in;
  in.cfg = cfg;
  in.topo = sample_topology(cfg, seed);
  in.draws = sample_fading(cfg, in.topo, seed);
  in.channels = compose_channels(cfg, in.topo, in.draws, in.topo.aris_initial);
  in.state = DecisionState::initial(cfg, in.topo.aris_initial);
  auto rng = rng_stream(seed, "test-instance");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  double total = 0.0;
  for (auto& w : in.state.w) {
    for (Eigen::Index l = 0; l < w.size(); ++l) w(l) = Complex(normal(rng), normal(rng));
    total += w.squaredNorm();
  }
  for (auto& w : in.state.w) w *= std::sqrt(cfg.power_w / total);
  for (auto& t : in.state.theta) {
    for (Eigen::Index n = 0; n < t.size(); ++n) t(n) = angle(rng);
  }
  return in;
}

/// ARIS serving group k under a binary chi, or -1.
inline int serving_aris(const RMatrix& chi, int k) {
  for (Eigen::Index j = 0; j < chi.rows(); ++j) {
    if (chi(j, k) > 0.5) return static_cast<int>(j);
  }
  return -1;
}

inline double relative_gap(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

/// Per-user rates of one state computed five independent ways. Forms that need an
/// ARIS are NaN for users of unserved groups.
struct RateForms {
  std::vector<double> vector_form;
  std::vector<double> trace_form;
  std::vector<double> reflection_form;
  std::vector<double> association_form;
  std::vector<double> distance_form;
};

inline RateForms rate_forms(const Instance& in) {
  const auto& cfg = in.cfg;
  const auto& topo = in.topo;
  const auto& ch = in.channels;
  const auto& st = in.state;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const int users = static_cast<int>(topo.users.size());
  RateForms f;
  f.vector_form = evaluate_rates(cfg, topo, ch, st).rate;

  const auto rows = effective_channels(topo, ch, st);
  const auto Xi = build_xi(rows);
  std::vector<CMatrix> W;
  for (const auto& w : st.w) W.push_back(w * w.adjoint());
  for (int i = 0; i < users; ++i) {
    f.trace_form.push_back(user_rate(sinr_trace(Xi[i], W, topo.users[i].group, topo.users[i].noise_power)));
  }

  f.association_form = association_rates(cfg, topo, build_c_matrices(ch, st.theta, st.w), st.chi).rate;

  f.reflection_form.assign(users, nan);
  f.distance_form.assign(users, nan);
  for (int i = 0; i < users; ++i) {
    const auto& u = topo.users[i];
    const int j = serving_aris(st.chi, u.group);
    if (j < 0) continue;
    const CMatrix H = stacked_channel(ch.h[i], ch.G[j], ch.g[j][i]);
    f.reflection_form[i] = quadratic_form_rate(build_lambda(H, st.w), reflection_row(st.theta[j]), u.group,
                                               u.noise_power);
  }
  for (int j = 0; j < cfg.arises; ++j) {
    const auto F = build_f_matrices(topo, ch, st, j);
    if (F.empty()) continue;
    int k = -1;
    for (int g = 0; g < cfg.groups; ++g) {
      if (st.chi(j, g) > 0.5) k = g;
    }
    const auto members = topo.members(k);
    for (size_t m = 0; m < members.size(); ++m) {
      const int i = members[m];
      const double d = aris_user_distance(st.q[j], topo.users[i].position, cfg.aris_altitude_m);
      const double u = std::pow(d, -cfg.pathloss_exponent / 2.0);
      double signal = 0.0, interference = 0.0;
      for (int l = 0; l < static_cast<int>(F[m].size()); ++l) {
        const double p = f_power(F[m][l], u);
        (l == k ? signal : interference) += p;
      }
      f.distance_form[i] = user_rate(signal / (interference + topo.users[i].noise_power));
    }
  }
  return f;
}

}  // namespace arisec::testing
