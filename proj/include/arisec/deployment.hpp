// Copyright 2026 The arisec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "arisec/conic.hpp"
#include "arisec/rates.hpp"

namespace arisec {

/// E_i (2 x L): row 0 is h_i^H, row 1 is g_hat_{j,i}^H diag(e^{i theta_j}) G_j with the
/// distance factor removed. Received power of beam l is D F_{i,l} D^T, D = [1, d^{-beta/2}].
CMatrix distance_free_rows(const ChannelSet& channels, std::span<const RVector> theta, int aris, int user);

/// F_{i,l} = E_i w_l w_l^H E_i^H for the members of the group ARIS j serves ([member][beam]).
/// Empty when ARIS j serves no group.
std::vector<std::vector<CMatrix>> build_f_matrices(const Topology& topo, const ChannelSet& channels,
                                                   const DecisionState& state, int aris);

/// D F D^T with D = [1, u].
double f_power(const CMatrix& F, double u);

/// Residuals of the distance-power slack constraints at one point:
/// lower = d^2 - u_bar^{-4/beta} (<= 0 iff u_bar <= d^{-beta/2}),
/// upper = u_hat^{-4/beta} - d^2 (<= 0 iff u_hat >= d^{-beta/2}).
struct DistanceResiduals {
  double lower = 0.0;
  double upper = 0.0;
};
DistanceResiduals expand_distance_constraints(const Point2& q, const Point2& user, double altitude, double beta,
                                              double u_bar, double u_hat);

struct DeploymentStep {
  SolveStatus status = SolveStatus::numerical_failure;
  Point2 q;
  double omega = 0.0;
};

/// One convex SCA step for ARIS j expanded at q0 (positions scaled by the altitude inside).
DeploymentStep deployment_sca_step(const ScenarioConfig& cfg, const Topology& topo,
                                   const std::vector<int>& members, const std::vector<std::vector<CMatrix>>& F,
                                   int group, const Point2& q0);

/// Minimum intended rate and maximum eavesdropper rate of a group for ARIS j at q,
/// with the distance-free rows held fixed.
struct GroupRates {
  double min_intended = 0.0;
  double max_eaves = 0.0;
};
GroupRates deployment_group_rates(const ScenarioConfig& cfg, const Topology& topo, const std::vector<int>& members,
                                  const std::vector<std::vector<CMatrix>>& F, int group, const Point2& q);

struct DeploymentSca {
  Point2 q;
  std::vector<double> trajectory;  // exact minimum intended rate after each accepted step
  int iterations = 0;
  int solver_failures = 0;
  bool cap_hit = false;
};

/// SCA steps from q0 with the distance-free rows held fixed, each step backtracked toward
/// the current point until the exact group rates do not drop and the wiretap limit holds.
/// Stops when ||q - q_prev|| <= eps_D, on a failed step, or at the cap.
DeploymentSca deployment_sca(const ScenarioConfig& cfg, const Topology& topo, const std::vector<int>& members,
                             const std::vector<std::vector<CMatrix>>& F, int group, const Point2& q0);

struct DeploymentStats {
  int iterations = 0;
  int solver_failures = 0;
  int accepted_moves = 0;
  int reverted_moves = 0;
  bool cap_hit = false;
};

/// SCA for ARIS j until ||q - q_prev|| <= eps_D or the cap. The channel is then
/// recomposed at the new position (same NLoS draw), the ARIS phases re-optimized and the
/// move kept only if the objective does not drop and the state stays feasible.
DeploymentStats deployment_loop_aris(const ScenarioConfig& cfg, const Topology& topo, const FadingDraws& draws,
                                     ChannelSet& channels, DecisionState& state, int aris, std::uint64_t seed);

/// deployment_loop_aris for every ARIS in index order.
DeploymentStats deployment_loop(const ScenarioConfig& cfg, const Topology& topo, const FadingDraws& draws,
                                ChannelSet& channels, DecisionState& state, std::uint64_t seed);

}  // namespace arisec
