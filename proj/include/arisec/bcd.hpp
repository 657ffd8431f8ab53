// Copyright 2026 The arisec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "arisec/rates.hpp"

namespace arisec {

enum class Scheme { proposed, fixed_deployment, without_ris };

const char* to_string(Scheme scheme);
/// Accepts "proposed", "fixed-deployment", "without-ris"; throws Error(parse) otherwise.
Scheme parse_scheme(std::string_view name);

/// One exact-objective check after a block.
struct BlockAudit {
  int outer = 0;
  std::string block;  // "tx", "reflection", "association", "deployment"
  double before = 0.0;
  double after = 0.0;
};

/// Relaxed association versus its rounded, accepted or rejected, binary version.
struct RoundingEvent {
  int outer = 0;
  double relaxed_objective = 0.0;  // exact rates at the relaxed chi
  double rounded_objective = 0.0;  // exact rates at the rounded chi, before gating
  double max_fractionality = 0.0;  // max chi (1 - chi) of the relaxed iterate
  bool changed = false;            // rounded chi differs from the current one
  bool accepted = false;
};

struct OuterRecord {
  double objective = 0.0;
  int small_scale_iterations = 0;
  int large_scale_iterations = 0;
  int tx_iterations = 0;
  int reflection_iterations = 0;
  int association_iterations = 0;
  int deployment_iterations = 0;
  double max_wiretap_residual = 0.0;
  double power_residual = 0.0;
  double seconds = 0.0;  // wall time, not part of deterministic output
};

struct BcdTrace {
  std::vector<OuterRecord> outer;
  std::vector<BlockAudit> audits;
  std::vector<RoundingEvent> rounding;
  int audit_violations = 0;        // audits that dropped by more than the tolerance
  double worst_drop = 0.0;         // largest drop seen in any audit
  int solver_failures = 0;
  std::vector<std::string> caps_hit;
  bool converged = false;
};

struct BcdOptions {
  Scheme scheme = Scheme::proposed;
  double audit_tolerance = 1e-4;
};

struct BcdResult {
  DecisionState state;
  ChannelSet channels;
  RateReport report;
  FeasibilityReport feasibility;
  BcdTrace trace;
  std::uint64_t channel_hash = 0;
};

/// Seed handed to the randomized blocks of round `round` in outer iteration `outer`.
std::uint64_t block_seed(std::uint64_t seed, int outer, int round);

/// Alternates transmit beamforming and reflection until the relative change of (w, theta)
/// is at most eps_S or the cap. Returns the number of rounds.
int run_small_scale(const ScenarioConfig& cfg, const Topology& topo, const ChannelSet& channels,
                    DecisionState& state, std::uint64_t seed, BcdTrace& trace, int outer, OuterRecord& record);

/// Alternates association and deployment (deployment skipped unless `deploy`) until the
/// relative change of (chi, q) is at most eps_L or the cap. Returns the number of rounds.
int run_large_scale(const ScenarioConfig& cfg, const Topology& topo, const FadingDraws& draws,
                    ChannelSet& channels, DecisionState& state, std::uint64_t seed, bool deploy, BcdTrace& trace,
                    int outer, OuterRecord& record);

/// Full pipeline for one realization. `topo` and `draws` are shared across schemes so that
/// every scheme sees the same channels; the without-RIS scheme ignores the ARIS draws.
BcdResult run_bcd(const ScenarioConfig& cfg, const Topology& topo, const FadingDraws& draws, std::uint64_t seed,
                  const BcdOptions& options = {});

/// Samples the realization for `seed` and runs one scheme.
BcdResult run_bcd(const ScenarioConfig& cfg, std::uint64_t seed, const BcdOptions& options = {});

/// sum_k log2(1 + P_T max_i ||e_i||^2 / noise) over intended users: a coarse upper bound.
double interference_free_bound(const ScenarioConfig& cfg, const Topology& topo, const ChannelSet& channels,
                               const DecisionState& state);

}  // namespace arisec
