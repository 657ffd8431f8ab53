// Copyright 2026 The arisec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "arisec/channel.hpp"
#include "arisec/config.hpp"
#include "arisec/geometry.hpp"
#include "arisec/types.hpp"

namespace arisec {

/// One BCD iterate. Beams are stored as vectors; W_k = w_k w_k^H when a matrix is needed.
struct DecisionState {
  std::vector<CVector> w;       // [group] L
  std::vector<RVector> theta;   // [aris] N, radians
  RMatrix chi;                  // J x K, chi(j, k) = 1 when ARIS j serves group k
  std::vector<Point2> q;        // [aris] horizontal position
  RVector omega;                // [group] bits/s/Hz

  /// theta = 0, chi = identity on the first J groups, q = given positions, w = 0.
  static DecisionState initial(const ScenarioConfig& cfg, std::span<const Point2> positions);
};

struct RateReport {
  std::vector<double> sinr;               // [user] toward its own group's beam
  std::vector<double> rate;               // [user] bits/s/Hz
  std::vector<double> group_min_intended; // [group]
  std::vector<double> group_max_eaves;    // [group], 0 when the group has no eavesdropper
  double objective = 0.0;                 // sum over groups of the minimum intended rate
  double sum_rate = 0.0;                  // sum of every intended user's rate
};

struct FeasibilityReport {
  double power = 0.0;                  // (sum ||w_k||^2 - P_T) / P_T
  std::vector<double> wiretap;         // [group] max eavesdropper rate - threshold
  double modulus = 0.0;                // max ||e^{i theta}| - 1|
  double binary = 0.0;                 // max |chi - round(chi)|
  double row_sum = 0.0;                // max |sum_k chi(j,k) - 1|
  double column_sum = 0.0;             // max(sum_j chi(j,k) - 1, 0)
  double region = 0.0;                 // max distance of any ARIS outside the region
  bool feasible(double rate_tol = 1e-4, double exact_tol = 1e-8) const;
  double max_wiretap() const;
};

double user_rate(double sinr);

/// SINR of a user with effective row `e` for beam k (vector form).
double sinr(const CRowVector& e, std::span<const CVector> w, int k, double noise);
/// Same quantity from Xi = e^H e and W_l (trace form).
double sinr_trace(const CMatrix& xi, std::span<const CMatrix> W, int k, double noise);

/// log2((sum_l x A_l x^H + noise) / (sum_{l != k} x A_l x^H + noise)).
double quadratic_form_rate(std::span<const CMatrix> A, const CRowVector& x, int k, double noise);

/// Effective rows of every user under the state (direct plus chi-gated reflected paths).
std::vector<CRowVector> effective_channels(const Topology& topo, const ChannelSet& channels,
                                           const DecisionState& state);

RateReport evaluate_rates(const ScenarioConfig& cfg, const Topology& topo, const ChannelSet& channels,
                          const DecisionState& state);
RateReport evaluate_rates(const ScenarioConfig& cfg, const Topology& topo,
                          std::span<const CRowVector> rows, std::span<const CVector> w);

/// Sum over groups of the minimum intended rate.
double objective(const RateReport& report);

FeasibilityReport check_feasibility(const ScenarioConfig& cfg, const Topology& topo, const ChannelSet& channels,
                                    const DecisionState& state);
FeasibilityReport check_feasibility(const ScenarioConfig& cfg, const Topology& topo, const RateReport& report,
                                    const DecisionState& state);

/// Minorizer of -ln(x): ln(xi) - xi x + 1, tight at xi = 1/x.
inline double mm_log_bound(double xi, double x) { return std::log(xi) - xi * x + 1.0; }

}  // namespace arisec
