// Copyright 2026 The arisec Authors
// SPDX-License-Identifier: Apache-2.0

#include "arisec/bcd.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "arisec/association.hpp"
#include "arisec/deployment.hpp"
#include "arisec/ris_reflection.hpp"
#include "arisec/tx_beamforming.hpp"

namespace arisec {

namespace {

double current_objective(const ScenarioConfig& cfg, const Topology& topo, const ChannelSet& channels,
                         const DecisionState& state) {
  return evaluate_rates(cfg, topo, channels, state).objective;
}

void audit(BcdTrace& trace, int outer, const char* block, double before, double after, double tol) {
  trace.audits.push_back({outer, block, before, after});
  const double drop = before - after;
  trace.worst_drop = std::max(trace.worst_drop, drop);
  if (drop > tol) ++trace.audit_violations;
}

void note_cap(BcdTrace& trace, const char* name) {
  if (std::find(trace.caps_hit.begin(), trace.caps_hit.end(), name) == trace.caps_hit.end()) {
    trace.caps_hit.emplace_back(name);
  }
}

// Stream seed for one block invocation; keeps randomization draws distinct across rounds.
double squared_norm(const DecisionState& s, bool large) {
  double n = 0.0;
  if (large) {
    n += s.chi.squaredNorm();
    for (const auto& q : s.q) n += q.x * q.x + q.y * q.y;
  } else {
    for (const auto& w : s.w) n += w.squaredNorm();
    for (const auto& t : s.theta) n += static_cast<double>(t.size());
  }
  return n;
}

double squared_change(const DecisionState& a, const DecisionState& b, bool large) {
  double n = 0.0;
  if (large) {
    n += (a.chi - b.chi).squaredNorm();
    for (size_t j = 0; j < a.q.size(); ++j) {
      const double d = planar_distance(a.q[j], b.q[j]);
      n += d * d;
    }
  } else {
    for (size_t k = 0; k < a.w.size(); ++k) n += (a.w[k] - b.w[k]).squaredNorm();
    for (size_t j = 0; j < a.theta.size(); ++j) {
      for (Eigen::Index m = 0; m < a.theta[j].size(); ++m) {
        n += std::norm(std::polar(1.0, a.theta[j](m)) - std::polar(1.0, b.theta[j](m)));
      }
    }
  }
  return n;
}

double relative_change(const DecisionState& before, const DecisionState& after, bool large) {
  const double denom = squared_norm(before, large);
  const double num = squared_change(before, after, large);
  if (denom <= 0.0) return num > 0.0 ? 1.0 : 0.0;
  return std::sqrt(num / denom);
}

int served_group(const RMatrix& chi, int j) {
  for (Eigen::Index k = 0; k < chi.cols(); ++k) {
    if (chi(j, k) > 0.5) return static_cast<int>(k);
  }
  return -1;
}

// Association block: penalty SCA, rounding, then an exact-objective gate.
void association_block(const ScenarioConfig& cfg, const Topology& topo, const FadingDraws& draws,
                       ChannelSet& channels, DecisionState& state, std::uint64_t seed, bool deploy,
                       BcdTrace& trace, int outer, OuterRecord& record) {
  const int J = static_cast<int>(state.chi.rows());
  const int K = static_cast<int>(state.chi.cols());
  if (J == 0) return;
  double tau = cfg.penalty_tau;
  if (cfg.tau_escalation) tau = std::min(1e3, tau * std::pow(2.0, outer));

  const auto C = build_c_matrices(channels, state.theta, state.w);
  const RMatrix start = 0.5 * state.chi + RMatrix::Constant(J, K, 0.5 / K);
  AssociationResult res = association_loop(cfg, topo, C, start, tau);
  if (res.iterations > 0 && res.solver_failures == res.iterations) {
    // The blended start broke a wiretap limit; restart from the current binary point.
    trace.solver_failures += res.solver_failures;
    record.association_iterations += res.iterations;
    res = association_loop(cfg, topo, C, state.chi, tau);
  }
  trace.solver_failures += res.solver_failures;
  record.association_iterations += res.iterations;
  if (res.cap_hit) note_cap(trace, "association");

  RoundingEvent ev;
  ev.outer = outer;
  ev.relaxed_objective = association_rates(cfg, topo, C, res.chi_relaxed).objective;
  ev.rounded_objective = association_rates(cfg, topo, C, res.chi).objective;
  ev.max_fractionality = (res.chi_relaxed.array() * (1.0 - res.chi_relaxed.array())).maxCoeff();
  ev.changed = (res.chi - state.chi).cwiseAbs().maxCoeff() > 0.5;
  if (!ev.changed) {
    trace.rounding.push_back(ev);
    return;
  }

  const double before = current_objective(cfg, topo, channels, state);
  DecisionState cand = state;
  ChannelSet cand_ch = channels;
  cand.chi = res.chi;
  std::vector<int> moved;
  for (int j = 0; j < J; ++j) {
    const int k_new = served_group(cand.chi, j);
    if (k_new == served_group(state.chi, j)) continue;
    moved.push_back(j);
    cand.theta[j].setZero();
    if (deploy) {
      cand.q[j] = cfg.region.clamp(intended_centroid(topo, k_new));
      recompose_aris(cfg, topo, draws, j, cand.q[j], cand_ch);
    }
  }
  cand.w = back_off_to_wiretap(cfg, topo, effective_channels(topo, cand_ch, cand), cand.w);
  for (int j : moved) {
    const ReflectionLoopStats s = reflection_loop_aris(cfg, topo, cand_ch, cand, j, block_seed(seed, outer, 99));
    record.reflection_iterations += s.iterations;
  }
  const RateReport after = evaluate_rates(cfg, topo, cand_ch, cand);
  if (after.objective >= before && check_feasibility(cfg, topo, after, cand).feasible()) {
    state = std::move(cand);
    channels = std::move(cand_ch);
    ev.accepted = true;
  }
  trace.rounding.push_back(ev);
}

}  // namespace

std::uint64_t block_seed(std::uint64_t seed, int outer, int round) {
  return seed ^ (static_cast<std::uint64_t>(outer + 1) << 40) ^ (static_cast<std::uint64_t>(round + 1) << 20);
}

const char* to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::proposed: return "proposed";
    case Scheme::fixed_deployment: return "fixed-deployment";
    case Scheme::without_ris: return "without-ris";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "proposed") return Scheme::proposed;
  if (name == "fixed-deployment") return Scheme::fixed_deployment;
  if (name == "without-ris") return Scheme::without_ris;
  throw Error(ErrorCode::parse, "unknown scheme '" + std::string(name) + "'");
}

int run_small_scale(const ScenarioConfig& cfg, const Topology& topo, const ChannelSet& channels,
                    DecisionState& state, std::uint64_t seed, BcdTrace& trace, int outer, OuterRecord& record) {
  const double tol = 1e-4;
  int rounds = 0;
  for (int r = 0; r < cfg.caps.small_scale; ++r) {
    ++rounds;
    const DecisionState start = state;

    double before = current_objective(cfg, topo, channels, state);
    const auto rows = effective_channels(topo, channels, state);
    const TxLoopResult tx = tx_beamforming_loop(cfg, topo, rows, state.w, block_seed(seed, outer, r));
    state.w = tx.w;
    record.tx_iterations += tx.iterations;
    trace.solver_failures += tx.solver_failures;
    if (tx.cap_hit) note_cap(trace, "tx");
    double after = current_objective(cfg, topo, channels, state);
    audit(trace, outer, "tx", before, after, tol);

    before = after;
    const ReflectionLoopStats rs = reflection_loop(cfg, topo, channels, state, block_seed(seed, outer, r));
    record.reflection_iterations += rs.iterations;
    trace.solver_failures += rs.solver_failures;
    if (rs.cap_hit) note_cap(trace, "reflection");
    after = current_objective(cfg, topo, channels, state);
    audit(trace, outer, "reflection", before, after, tol);

    if (relative_change(start, state, false) <= cfg.eps.small_scale) return rounds;
  }
  note_cap(trace, "small_scale");
  return rounds;
}

int run_large_scale(const ScenarioConfig& cfg, const Topology& topo, const FadingDraws& draws,
                    ChannelSet& channels, DecisionState& state, std::uint64_t seed, bool deploy, BcdTrace& trace,
                    int outer, OuterRecord& record) {
  const double tol = 1e-4;
  int rounds = 0;
  for (int r = 0; r < cfg.caps.large_scale; ++r) {
    ++rounds;
    const DecisionState start = state;

    double before = current_objective(cfg, topo, channels, state);
    association_block(cfg, topo, draws, channels, state, block_seed(seed, outer, r), deploy, trace, outer, record);
    double after = current_objective(cfg, topo, channels, state);
    audit(trace, outer, "association", before, after, tol);

    if (deploy) {
      before = after;
      const DeploymentStats ds = deployment_loop(cfg, topo, draws, channels, state, block_seed(seed, outer, r));
      record.deployment_iterations += ds.iterations;
      trace.solver_failures += ds.solver_failures;
      if (ds.cap_hit) note_cap(trace, "deployment");
      after = current_objective(cfg, topo, channels, state);
      audit(trace, outer, "deployment", before, after, tol);
    }

    if (relative_change(start, state, true) <= cfg.eps.large_scale) return rounds;
  }
  note_cap(trace, "large_scale");
  return rounds;
}

BcdResult run_bcd(const ScenarioConfig& cfg_in, const Topology& topo_in, const FadingDraws& draws_in,
                  std::uint64_t seed, const BcdOptions& options) {
  ScenarioConfig cfg = cfg_in;
  Topology topo = topo_in;
  FadingDraws draws = draws_in;
  BcdResult out;
  out.channel_hash = realization_hash(topo_in, draws_in);

  std::vector<Point2> positions = topo.aris_initial;
  if (options.scheme == Scheme::without_ris) {
    cfg.arises = 0;
    topo.aris_initial.clear();
    draws.aris_rain.clear();
    draws.nlos.clear();
    positions.clear();
  } else if (options.scheme == Scheme::fixed_deployment) {
    for (int j = 0; j < cfg.arises; ++j) positions[j] = cfg.region.clamp(topo.group_centers[j]);
  }
  const bool deploy = options.scheme == Scheme::proposed;

  ChannelSet channels = compose_channels(cfg, topo, draws, positions);
  DecisionState state = DecisionState::initial(cfg, positions);
  state.w = initial_beamformers(cfg, topo, effective_channels(topo, channels, state));

  DecisionState best = state;
  ChannelSet best_channels = channels;
  double best_objective = current_objective(cfg, topo, channels, state);
  double prev = best_objective;

  for (int outer = 0; outer < cfg.caps.outer; ++outer) {
    const auto t0 = std::chrono::steady_clock::now();
    OuterRecord rec;
    rec.small_scale_iterations = run_small_scale(cfg, topo, channels, state, seed, out.trace, outer, rec);
    if (cfg.arises > 0) {
      rec.large_scale_iterations =
          run_large_scale(cfg, topo, draws, channels, state, seed, deploy, out.trace, outer, rec);
    }
    const RateReport report = evaluate_rates(cfg, topo, channels, state);
    const FeasibilityReport feas = check_feasibility(cfg, topo, report, state);
    rec.objective = report.objective;
    rec.max_wiretap_residual = feas.max_wiretap();
    rec.power_residual = feas.power;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.trace.outer.push_back(rec);

    if (feas.feasible() && report.objective >= best_objective) {
      best_objective = report.objective;
      best = state;
      best_channels = channels;
    }
    const double change = std::abs(report.objective - prev);
    prev = report.objective;
    if (change <= cfg.eps.outer * std::max(std::abs(report.objective), 1e-9)) {
      out.trace.converged = true;
      break;
    }
  }
  if (!out.trace.converged) note_cap(out.trace, "outer");

  out.state = std::move(best);
  out.channels = std::move(best_channels);
  out.report = evaluate_rates(cfg, topo, out.channels, out.state);
  out.feasibility = check_feasibility(cfg, topo, out.report, out.state);
  return out;
}

BcdResult run_bcd(const ScenarioConfig& cfg, std::uint64_t seed, const BcdOptions& options) {
  const Topology topo = sample_topology(cfg, seed);
  const FadingDraws draws = sample_fading(cfg, topo, seed);
  return run_bcd(cfg, topo, draws, seed, options);
}

double interference_free_bound(const ScenarioConfig& cfg, const Topology& topo, const ChannelSet& channels,
                               const DecisionState& state) {
  const auto rows = effective_channels(topo, channels, state);
  double bound = 0.0;
  for (int k = 0; k < cfg.groups; ++k) {
    double best = 0.0;
    for (int i : topo.members(k, Role::intended)) {
      best = std::max(best, cfg.power_w * rows[i].squaredNorm() / topo.users[i].noise_power);
    }
    bound += std::log2(1.0 + best);
  }
  return bound;
}

}  // namespace arisec
