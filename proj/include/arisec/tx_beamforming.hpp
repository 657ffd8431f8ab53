// Copyright 2026 The arisec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <random>
#include <span>
#include <vector>

#include "arisec/conic.hpp"
#include "arisec/rates.hpp"

namespace arisec {

/// Xi_i = e_i^H e_i for every user's effective row.
std::vector<CMatrix> build_xi(std::span<const CRowVector> rows);

/// Closed-form MM weights per user (units 1/W): intended users get
/// 1/(sum_{l != k} Tr(Xi W_l) + noise), eavesdroppers 1/(sum_l Tr(Xi W_l) + noise).
RVector update_xi_aux(const Topology& topo, std::span<const CMatrix> Xi, std::span<const CMatrix> W);

struct WSubproblemResult {
  SolveStatus status = SolveStatus::numerical_failure;
  std::vector<CMatrix> W;  // watts
  RVector omega;           // bits/s/Hz, surrogate values
  int newton_steps = 0;
};

/// SDR of the beamforming problem at fixed MM weights. `W_start` seeds the interior point.
WSubproblemResult solve_w_subproblem(const ScenarioConfig& cfg, const Topology& topo, std::span<const CMatrix> Xi,
                                     const RVector& xi, std::span<const CMatrix> W_start);

struct ExtractResult {
  std::vector<CVector> w;
  bool feasible = false;
  bool rank_one = false;
  double objective = 0.0;
};

/// Rank-1 beams from SDR matrices: principal eigenvectors when every W_k is rank-1,
/// otherwise the best of `n_rand` Gaussian candidates. Candidates that break a wiretap
/// limit are scaled down until they meet it.
ExtractResult extract_beamformers(const ScenarioConfig& cfg, const Topology& topo, std::span<const CRowVector> rows,
                                  std::span<const CMatrix> W, int n_rand, std::mt19937_64& rng);

/// Largest common scale c in [0, 1] with every wiretap rate of c*w within its limit.
std::vector<CVector> back_off_to_wiretap(const ScenarioConfig& cfg, const Topology& topo,
                                         std::span<const CRowVector> rows, std::span<const CVector> w);

/// sqrt(P_T/K) times the normalized channel of each group's strongest intended user,
/// backed off until the wiretap limits hold.
std::vector<CVector> initial_beamformers(const ScenarioConfig& cfg, const Topology& topo,
                                         std::span<const CRowVector> rows);

struct TxLoopResult {
  std::vector<CVector> w;
  std::vector<double> trajectory;  // exact objective after each iteration
  int iterations = 0;
  int solver_failures = 0;
  bool cap_hit = false;
};

/// MM + SDR iterations until ||w - w_prev|| <= eps_T. Only feasible candidates that do
/// not lower the exact objective replace the current beams.
TxLoopResult tx_beamforming_loop(const ScenarioConfig& cfg, const Topology& topo, std::span<const CRowVector> rows,
                                 std::span<const CVector> w_start, std::uint64_t seed);

/// Rotates each beam so that w_prev^H w is real and non-negative.
void align_phases(std::span<const CVector> reference, std::vector<CVector>& w);

}  // namespace arisec
