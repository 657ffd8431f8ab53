// Copyright 2026 The arisec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <random>
#include <span>
#include <vector>

#include "arisec/conic.hpp"
#include "arisec/rates.hpp"

namespace arisec {

/// H_i = [h_i^H; diag(g_i^H) G] ((N+1) x L) for a user served by one ARIS.
CMatrix stacked_channel(const CVector& h, const CMatrix& G, const CVector& g);

/// Lambda_{i,l} = H_i w_l w_l^H H_i^H for every beam l.
std::vector<CMatrix> build_lambda(const CMatrix& H, std::span<const CVector> w);

/// Row v = [1, e^{i theta_1}, ..., e^{i theta_N}].
CRowVector reflection_row(const RVector& theta);

/// Closed-form MM weights for the users of one group (units 1/W), given V = v^H v.
RVector update_mu_aux(const std::vector<std::vector<CMatrix>>& lambda, const std::vector<Role>& roles, int k,
                      const std::vector<double>& noise, const CMatrix& V);

struct VSubproblemResult {
  SolveStatus status = SolveStatus::numerical_failure;
  CMatrix V;
  double omega = 0.0;
  int newton_steps = 0;
};

/// SDR over the unit-diagonal (N+1) x (N+1) matrix V for group k's users.
VSubproblemResult solve_v_subproblem(const std::vector<std::vector<CMatrix>>& lambda, const std::vector<Role>& roles,
                                     int k, const std::vector<double>& noise, double wiretap_bps_hz, const RVector& mu,
                                     const CMatrix& V_start);

/// theta_n = arg(v_{n+1} / v_1), wrapped into [0, 2 pi).
RVector extract_phases(const CRowVector& v);
/// Principal-eigenvector phases of V (V = v^H v convention).
RVector principal_phases(const CMatrix& V);

struct ReflectionLoopStats {
  int iterations = 0;
  int solver_failures = 0;
  bool cap_hit = false;
};

/// MM + SDR for ARIS j's phases, group k only. Updates state.theta[j] when a feasible
/// candidate does not lower the group's minimum intended rate.
ReflectionLoopStats reflection_loop_aris(const ScenarioConfig& cfg, const Topology& topo, const ChannelSet& channels,
                                         DecisionState& state, int j, std::uint64_t seed);

/// Runs reflection_loop_aris for every associated ARIS in index order.
ReflectionLoopStats reflection_loop(const ScenarioConfig& cfg, const Topology& topo, const ChannelSet& channels,
                                    DecisionState& state, std::uint64_t seed);

/// Smallest absolute difference of two angles.
double wrapped_angle_difference(double a, double b);

}  // namespace arisec
