// Copyright 2026 The arisec Authors
// SPDX-License-Identifier: Apache-2.0

#include "arisec/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace arisec {

DecisionState DecisionState::initial(const ScenarioConfig& cfg, std::span<const Point2> positions) {
  DecisionState s;
  s.w.assign(cfg.groups, CVector::Zero(cfg.antennas));
  s.theta.assign(cfg.arises, RVector::Zero(cfg.subsurfaces));
  s.chi = RMatrix::Zero(cfg.arises, cfg.groups);
  for (int j = 0; j < cfg.arises; ++j) s.chi(j, j) = 1.0;
  s.q.assign(positions.begin(), positions.end());
  s.omega = RVector::Zero(cfg.groups);
  return s;
}

bool FeasibilityReport::feasible(double rate_tol, double exact_tol) const {
  return max_wiretap() <= rate_tol && power <= exact_tol && modulus <= exact_tol && binary <= exact_tol &&
         row_sum <= exact_tol && column_sum <= exact_tol && region <= exact_tol;
}

double FeasibilityReport::max_wiretap() const {
  double m = -std::numeric_limits<double>::infinity();
  for (double r : wiretap) m = std::max(m, r);
  return wiretap.empty() ? 0.0 : m;
}

double user_rate(double sinr) { return std::log2(1.0 + sinr); }

double sinr(const CRowVector& e, std::span<const CVector> w, int k, double noise) {
  double interference = 0.0;
  double signal = 0.0;
  for (int l = 0; l < static_cast<int>(w.size()); ++l) {
    const double p = std::norm((e * w[l]).value());
    if (l == k) {
      signal = p;
    } else {
      interference += p;
    }
  }
  return signal / (interference + noise);
}

double sinr_trace(const CMatrix& xi, std::span<const CMatrix> W, int k, double noise) {
  double interference = 0.0;
  double signal = 0.0;
  for (int l = 0; l < static_cast<int>(W.size()); ++l) {
    const double p = (xi * W[l]).trace().real();
    if (l == k) {
      signal = p;
    } else {
      interference += p;
    }
  }
  return signal / (interference + noise);
}

double quadratic_form_rate(std::span<const CMatrix> A, const CRowVector& x, int k, double noise) {
  double total = noise;
  double other = noise;
  for (int l = 0; l < static_cast<int>(A.size()); ++l) {
    if (A[l].rows() != x.size() || A[l].cols() != x.size()) {
      throw Error(ErrorCode::dimension, "quadratic_form_rate: matrix and vector sizes differ");
    }
    const double p = (x * A[l] * x.adjoint())(0, 0).real();
    total += p;
    if (l != k) other += p;
  }
  return std::log2(total / other);
}

std::vector<CRowVector> effective_channels(const Topology& topo, const ChannelSet& channels,
                                           const DecisionState& state) {
  const int aris_count = static_cast<int>(channels.G.size());
  std::vector<CRowVector> rows;
  rows.reserve(topo.users.size());
  std::vector<CVector> g(aris_count);
  std::vector<double> chi_column(aris_count);
  for (size_t i = 0; i < topo.users.size(); ++i) {
    const int k = topo.users[i].group;
    for (int j = 0; j < aris_count; ++j) {
      g[j] = channels.g[j][i];
      chi_column[j] = state.chi(j, k);
    }
    rows.push_back(effective_channel(channels.h[i], channels.G, g, state.theta, chi_column));
  }
  return rows;
}

RateReport evaluate_rates(const ScenarioConfig& cfg, const Topology& topo, std::span<const CRowVector> rows,
                          std::span<const CVector> w) {
  RateReport r;
  const int users = static_cast<int>(topo.users.size());
  r.group_min_intended.assign(cfg.groups, std::numeric_limits<double>::infinity());
  r.group_max_eaves.assign(cfg.groups, 0.0);
  for (int i = 0; i < users; ++i) {
    const UserNode& u = topo.users[i];
    const double s = sinr(rows[i], w, u.group, u.noise_power);
    const double rate = user_rate(s);
    r.sinr.push_back(s);
    r.rate.push_back(rate);
    if (u.role == Role::intended) {
      r.group_min_intended[u.group] = std::min(r.group_min_intended[u.group], rate);
      r.sum_rate += rate;
    } else {
      r.group_max_eaves[u.group] = std::max(r.group_max_eaves[u.group], rate);
    }
  }
  r.objective = objective(r);
  return r;
}

RateReport evaluate_rates(const ScenarioConfig& cfg, const Topology& topo, const ChannelSet& channels,
                          const DecisionState& state) {
  const auto rows = effective_channels(topo, channels, state);
  return evaluate_rates(cfg, topo, rows, state.w);
}

double objective(const RateReport& report) {
  double sum = 0.0;
  for (double m : report.group_min_intended) sum += m;
  return sum;
}

FeasibilityReport check_feasibility(const ScenarioConfig& cfg, const Topology& topo, const RateReport& report,
                                    const DecisionState& state) {
  FeasibilityReport f;
  double power = 0.0;
  for (const auto& w : state.w) power += w.squaredNorm();
  f.power = (power - cfg.power_w) / cfg.power_w;
  for (int k = 0; k < cfg.groups; ++k) {
    if (topo.members(k, Role::eavesdropper).empty()) continue;
    f.wiretap.push_back(report.group_max_eaves[k] - cfg.wiretap(k));
  }
  for (const auto& t : state.theta) {
    for (Eigen::Index n = 0; n < t.size(); ++n) f.modulus = std::max(f.modulus, std::abs(std::abs(std::polar(1.0, t(n))) - 1.0));
  }
  for (Eigen::Index j = 0; j < state.chi.rows(); ++j) {
    for (Eigen::Index k = 0; k < state.chi.cols(); ++k) {
      f.binary = std::max(f.binary, std::abs(state.chi(j, k) - std::round(state.chi(j, k))));
    }
    f.row_sum = std::max(f.row_sum, std::abs(state.chi.row(j).sum() - 1.0));
  }
  for (Eigen::Index k = 0; k < state.chi.cols(); ++k) f.column_sum = std::max(f.column_sum, state.chi.col(k).sum() - 1.0);
  for (const auto& q : state.q) {
    const Point2 c = cfg.region.clamp(q);
    f.region = std::max(f.region, planar_distance(c, q));
  }
  return f;
}

FeasibilityReport check_feasibility(const ScenarioConfig& cfg, const Topology& topo, const ChannelSet& channels,
                                    const DecisionState& state) {
  return check_feasibility(cfg, topo, evaluate_rates(cfg, topo, channels, state), state);
}

}  // namespace arisec
