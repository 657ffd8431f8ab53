// Copyright 2026 The arisec Authors
// SPDX-License-Identifier: Apache-2.0

#include "arisec/deployment.hpp"

#include <cmath>

#include "arisec/ris_reflection.hpp"
#include "arisec/surrogates.hpp"
#include "arisec/tx_beamforming.hpp"

namespace arisec {

namespace {

// f(u) = a + 2 b u + c u^2 + 1 for one user, in noise units, with u the scaled distance power.
struct PowerPoly {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double value(double u) const { return a + 2.0 * b * u + c * u * u + 1.0; }
  double slope(double u) const { return 2.0 * b + 2.0 * c * u; }
};

PowerPoly poly(const std::vector<CMatrix>& F, int skip, double noise, double altitude, double beta) {
  PowerPoly p;
  const double s1 = std::pow(altitude, -beta / 2.0);
  for (int l = 0; l < static_cast<int>(F.size()); ++l) {
    if (l == skip) continue;
    p.a += F[l](0, 0).real() / noise;
    p.b += F[l](0, 1).real() * s1 / noise;
    p.c += F[l](1, 1).real() * s1 * s1 / noise;
  }
  return p;
}

int served_group(const DecisionState& state, int j) {
  for (Eigen::Index k = 0; k < state.chi.cols(); ++k) {
    if (state.chi(j, k) > 0.5) return static_cast<int>(k);
  }
  return -1;
}

}  // namespace

CMatrix distance_free_rows(const ChannelSet& channels, std::span<const RVector> theta, int aris, int user) {
  const CVector& h = channels.h[user];
  const CVector& gh = channels.g_hat[aris][user];
  CMatrix E(2, h.size());
  E.row(0) = h.adjoint();
  CRowVector r = CRowVector::Zero(h.size());
  for (Eigen::Index n = 0; n < gh.size(); ++n) {
    r += std::conj(gh(n)) * std::polar(1.0, theta[aris](n)) * channels.G[aris].row(n);
  }
  E.row(1) = r;
  return E;
}

std::vector<std::vector<CMatrix>> build_f_matrices(const Topology& topo, const ChannelSet& channels,
                                                   const DecisionState& state, int aris) {
  std::vector<std::vector<CMatrix>> F;
  const int k = served_group(state, aris);
  if (k < 0) return F;
  for (int i : topo.members(k)) {
    const CMatrix E = distance_free_rows(channels, state.theta, aris, i);
    std::vector<CMatrix> per_beam;
    for (const auto& w : state.w) {
      const CVector x = E * w;
      per_beam.push_back(x * x.adjoint());
    }
    F.push_back(std::move(per_beam));
  }
  return F;
}

double f_power(const CMatrix& F, double u) {
  return F(0, 0).real() + 2.0 * F(0, 1).real() * u + F(1, 1).real() * u * u;
}

DistanceResiduals expand_distance_constraints(const Point2& q, const Point2& user, double altitude, double beta,
                                              double u_bar, double u_hat) {
  const double dx = q.x - user.x;
  const double dy = q.y - user.y;
  const double d2 = dx * dx + dy * dy + altitude * altitude;
  const double p = -4.0 / beta;
  return {d2 - std::pow(u_bar, p), std::pow(u_hat, p) - d2};
}

GroupRates deployment_group_rates(const ScenarioConfig& cfg, const Topology& topo, const std::vector<int>& members,
                                  const std::vector<std::vector<CMatrix>>& F, int group, const Point2& q) {
  GroupRates g;
  g.min_intended = std::numeric_limits<double>::infinity();
  for (size_t m = 0; m < members.size(); ++m) {
    const UserNode& u = topo.users[members[m]];
    const double d = aris_user_distance(q, u.position, cfg.aris_altitude_m);
    const double dp = std::pow(d, -cfg.pathloss_exponent / 2.0);
    double signal = 0.0;
    double interference = 0.0;
    for (int l = 0; l < static_cast<int>(F[m].size()); ++l) {
      const double p = f_power(F[m][l], dp);
      if (l == group) {
        signal = p;
      } else {
        interference += p;
      }
    }
    const double rate = user_rate(signal / (interference + u.noise_power));
    if (u.role == Role::intended) {
      g.min_intended = std::min(g.min_intended, rate);
    } else {
      g.max_eaves = std::max(g.max_eaves, rate);
    }
  }
  return g;
}

DeploymentStep deployment_sca_step(const ScenarioConfig& cfg, const Topology& topo,
                                   const std::vector<int>& members, const std::vector<std::vector<CMatrix>>& F,
                                   int group, const Point2& q0) {
  const double H = cfg.aris_altitude_m;
  const double beta = cfg.pathloss_exponent;
  const double p = -4.0 / beta;
  const int M = static_cast<int>(members.size());

  ConicProblem prob;
  const int xv = prob.add_variables(2);
  const int yv = xv + 1;
  const int ub0 = prob.add_variables(M);
  const int uh0 = prob.add_variables(M);
  const int sb0 = prob.add_variables(M);
  const int sh0 = prob.add_variables(M);
  const int om = prob.add_variables(1);
  prob.cost = prob.zeros();
  prob.cost(om) = -1.0;

  const double x0 = q0.x / H;
  const double y0 = q0.y / H;
  RVector start = prob.zeros();
  start(xv) = x0;
  start(yv) = y0;
  double om_start = std::numeric_limits<double>::infinity();

  for (int m = 0; m < M; ++m) {
    const UserNode& u = topo.users[members[m]];
    const double px = u.position.x / H;
    const double py = u.position.y / H;
    const double d02 = (x0 - px) * (x0 - px) + (y0 - py) * (y0 - py) + 1.0;
    const double u0 = std::pow(d02, -beta / 4.0);
    const PowerPoly all = poly(F[m], -1, u.noise_power, H, beta);
    const PowerPoly oth = poly(F[m], group, u.noise_power, H, beta);
    const int ub = ub0 + m;
    const int uh = uh0 + m;
    const int sb = sb0 + m;
    const int sh = sh0 + m;

    // d^2 <= tangent of u_bar^p (convex quadratic in x, y).
    Constraint d1 = prob.make_constraint();
    d1.quads.push_back({{xv, yv}, RMatrix::Identity(2, 2)});
    d1.linear(xv) = -2.0 * px;
    d1.linear(yv) = -2.0 * py;
    const double slope0 = p * std::pow(u0, p - 1.0);
    d1.linear(ub) = -slope0;
    d1.constant = px * px + py * py + 1.0 - std::pow(u0, p) + slope0 * u0;
    prob.constraints.push_back(std::move(d1));

    // u_hat^p <= tangent of d^2 (affine in x, y).
    Constraint d2 = prob.make_constraint();
    PowerTerm pt;
    pt.a = prob.zeros();
    pt.a(uh) = 1.0;
    pt.exponent = p;
    d2.powers.push_back(pt);
    d2.linear(xv) = -2.0 * (x0 - px);
    d2.linear(yv) = -2.0 * (y0 - py);
    d2.constant = -d02 + 2.0 * (x0 - px) * x0 + 2.0 * (y0 - py) * y0;
    prob.constraints.push_back(std::move(d2));

    Constraint pos = prob.make_constraint();
    pos.linear(ub) = -1.0;
    prob.constraints.push_back(std::move(pos));

    start(ub) = 0.99 * u0;
    start(uh) = 1.01 * u0;

    // Tangent lower bound of a power polynomial, routed through the slack on the side
    // the slope points to.
    auto lower = [&](const PowerPoly& f, Constraint& con, double sign) {
      const double s = f.slope(u0);
      const int var = s >= 0.0 ? ub : uh;
      con.linear(var) += sign * s;
      con.constant += sign * (f.value(u0) - s * u0);
      return f.value(u0) + s * (start(var) - u0);
    };
    // f(u_bar) <= S and f(u_hat) <= S (convex, so this bounds f on [u_bar, u_hat]).
    auto upper = [&](const PowerPoly& f, int svar) {
      for (int var : {ub, uh}) {
        Constraint con = prob.make_constraint();
        con.quads.push_back({{var}, RMatrix::Constant(1, 1, f.c)});
        con.linear(var) = 2.0 * f.b;
        con.linear(svar) = -1.0;
        con.constant = f.a + 1.0;
        prob.constraints.push_back(std::move(con));
      }
      return std::max(f.value(start(ub)), f.value(start(uh)));
    };

    Constraint rate = prob.make_constraint();
    LogTerm lt;
    lt.a = prob.zeros();
    if (u.role == Role::intended) {
      Constraint sig = prob.make_constraint();
      sig.linear(sb) = 1.0;
      start(sb) = 0.999 * lower(all, sig, -1.0);
      prob.constraints.push_back(std::move(sig));
      start(sh) = 1.001 * upper(oth, sh);
      const double sh_exp = oth.value(u0);
      rate.linear(om) = kLn2;
      rate.linear(sh) = 1.0 / sh_exp;
      rate.constant = std::log(sh_exp) - 1.0;
      lt.a(sb) = 1.0;
      om_start = std::min(om_start, std::log2(start(sb) / start(sh)));
    } else {
      start(sb) = 1.001 * upper(all, sb);
      Constraint itf = prob.make_constraint();
      itf.linear(sh) = 1.0;
      start(sh) = 0.999 * lower(oth, itf, -1.0);
      prob.constraints.push_back(std::move(itf));
      const double sb_exp = all.value(u0);
      rate.linear(sb) = 1.0 / sb_exp;
      rate.constant = std::log(sb_exp) - 1.0 - cfg.wiretap(group) * kLn2;
      lt.a(sh) = 1.0;
    }
    rate.logs.push_back(lt);
    prob.constraints.push_back(std::move(rate));
  }
  start(om) = std::isfinite(om_start) ? om_start - 1.0 : 0.0;

  const Region& r = cfg.region;
  const std::pair<int, std::pair<double, double>> box[] = {{xv, {r.x_min / H, r.x_max / H}},
                                                           {yv, {r.y_min / H, r.y_max / H}}};
  for (const auto& [var, range] : box) {
    Constraint lo = prob.make_constraint();
    lo.linear(var) = -1.0;
    lo.constant = range.first;
    prob.constraints.push_back(std::move(lo));
    Constraint hi = prob.make_constraint();
    hi.linear(var) = 1.0;
    hi.constant = -range.second;
    prob.constraints.push_back(std::move(hi));
  }

  const ConicSolution sol = solve(prob, start);
  DeploymentStep out;
  out.status = sol.status;
  out.q = cfg.region.clamp({sol.x(xv) * H, sol.x(yv) * H});
  out.omega = sol.x(om);
  return out;
}

DeploymentSca deployment_sca(const ScenarioConfig& cfg, const Topology& topo, const std::vector<int>& members,
                             const std::vector<std::vector<CMatrix>>& F, int group, const Point2& q0) {
  DeploymentSca out;
  out.q = q0;
  const double limit = cfg.wiretap(group);
  GroupRates cur = deployment_group_rates(cfg, topo, members, F, group, out.q);
  out.trajectory.push_back(cur.min_intended);
  for (int it = 0; it < cfg.caps.deployment; ++it) {
    ++out.iterations;
    const DeploymentStep step = deployment_sca_step(cfg, topo, members, F, group, out.q);
    if (step.status != SolveStatus::optimal) {
      ++out.solver_failures;
      break;
    }
    // Surrogate gains can overshoot; back off toward q until the exact rates agree.
    bool moved = false;
    Point2 next = out.q;
    for (double t = 1.0; t >= 1.0 / 256.0; t *= 0.5) {
      const Point2 cand{out.q.x + t * (step.q.x - out.q.x), out.q.y + t * (step.q.y - out.q.y)};
      const GroupRates g = deployment_group_rates(cfg, topo, members, F, group, cand);
      if (g.max_eaves <= limit && g.min_intended >= cur.min_intended) {
        next = cand;
        cur = g;
        moved = true;
        break;
      }
    }
    if (!moved) break;
    const double change = planar_distance(next, out.q);
    out.q = next;
    out.trajectory.push_back(cur.min_intended);
    if (change <= cfg.eps.deployment) break;
    if (it + 1 == cfg.caps.deployment) out.cap_hit = true;
  }
  return out;
}

DeploymentStats deployment_loop_aris(const ScenarioConfig& cfg, const Topology& topo, const FadingDraws& draws,
                                     ChannelSet& channels, DecisionState& state, int aris, std::uint64_t seed) {
  DeploymentStats stats;
  const int k = served_group(state, aris);
  if (k < 0) return stats;
  const std::vector<int> members = topo.members(k);
  const auto F = build_f_matrices(topo, channels, state, aris);

  const DeploymentSca sca = deployment_sca(cfg, topo, members, F, k, state.q[aris]);
  stats.iterations = sca.iterations;
  stats.solver_failures = sca.solver_failures;
  stats.cap_hit = sca.cap_hit;
  const Point2 q = sca.q;
  if (planar_distance(q, state.q[aris]) == 0.0) return stats;

  // Recompose at the new position and keep the move only if the full state improves.
  const double before = evaluate_rates(cfg, topo, channels, state).objective;
  const DecisionState saved_state = state;
  const CMatrix saved_G = channels.G[aris];
  const auto saved_g = channels.g[aris];
  const auto saved_g_hat = channels.g_hat[aris];

  state.q[aris] = q;
  recompose_aris(cfg, topo, draws, aris, q, channels);
  state.w = back_off_to_wiretap(cfg, topo, effective_channels(topo, channels, state), state.w);
  reflection_loop_aris(cfg, topo, channels, state, aris, seed);
  const RateReport after = evaluate_rates(cfg, topo, channels, state);
  if (after.objective >= before && check_feasibility(cfg, topo, after, state).feasible()) {
    ++stats.accepted_moves;
    return stats;
  }
  state = saved_state;
  channels.G[aris] = saved_G;
  channels.g[aris] = saved_g;
  channels.g_hat[aris] = saved_g_hat;
  ++stats.reverted_moves;
  return stats;
}

DeploymentStats deployment_loop(const ScenarioConfig& cfg, const Topology& topo, const FadingDraws& draws,
                                ChannelSet& channels, DecisionState& state, std::uint64_t seed) {
  DeploymentStats total;
  for (int j = 0; j < cfg.arises; ++j) {
    const DeploymentStats s = deployment_loop_aris(cfg, topo, draws, channels, state, j, seed);
    total.iterations += s.iterations;
    total.solver_failures += s.solver_failures;
    total.accepted_moves += s.accepted_moves;
    total.reverted_moves += s.reverted_moves;
    total.cap_hit = total.cap_hit || s.cap_hit;
  }
  return total;
}

}  // namespace arisec
