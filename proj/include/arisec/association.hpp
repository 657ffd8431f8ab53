// Copyright 2026 The arisec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "arisec/conic.hpp"
#include "arisec/rates.hpp"

namespace arisec {

/// Gamma_i ((J+1) x L): row 0 is h_i^H, row j+1 is g_{j,i}^H diag(e^{i theta_j}) G_j.
CMatrix gamma_matrix(const ChannelSet& channels, std::span<const RVector> theta, int user);

/// C_{i,l} = Gamma_i w_l w_l^H Gamma_i^H for every user i and beam l ([user][beam]).
std::vector<std::vector<CMatrix>> build_c_matrices(const ChannelSet& channels, std::span<const RVector> theta,
                                                   std::span<const CVector> w);

/// [1, chi(0,k), ..., chi(J-1,k)]: the column of chi a group-k user sees.
RVector augmented_column(const RMatrix& chi, int k);

/// Exact rates for a (possibly relaxed) chi computed from C matrices.
RateReport association_rates(const ScenarioConfig& cfg, const Topology& topo,
                             const std::vector<std::vector<CMatrix>>& C, const RMatrix& chi);

/// sum_k min-rate - tau * sum_{j,k} chi (1 - chi).
double penalized_objective(const ScenarioConfig& cfg, const Topology& topo,
                           const std::vector<std::vector<CMatrix>>& C, const RMatrix& chi, double tau);

struct AssociationStep {
  SolveStatus status = SolveStatus::numerical_failure;
  RMatrix chi;
  RVector omega;
};

/// One convex SCA step expanded at chi0 (box, row-sum and column-sum constraints kept exact).
AssociationStep association_sca_step(const ScenarioConfig& cfg, const Topology& topo,
                                     const std::vector<std::vector<CMatrix>>& C, const RMatrix& chi0, double tau);

struct AssociationResult {
  RMatrix chi_relaxed;
  RMatrix chi;                      // binary, after round_and_repair
  std::vector<double> penalized;    // penalized objective after each accepted step
  int iterations = 0;
  int solver_failures = 0;
  bool cap_hit = false;
};

/// SCA from chi_start until max |chi - chi_prev| <= eps_A or the cap, then rounding.
AssociationResult association_loop(const ScenarioConfig& cfg, const Topology& topo,
                                   const std::vector<std::vector<CMatrix>>& C, const RMatrix& chi_start, double tau);

/// Binary chi from a relaxed one: each ARIS in index order takes its largest entry among
/// the groups still free (ties go to the lower group index).
RMatrix round_and_repair(const RMatrix& chi_relaxed);

}  // namespace arisec
