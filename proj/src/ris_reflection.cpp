// Copyright 2026 The arisec Authors
// SPDX-License-Identifier: Apache-2.0

#include "arisec/ris_reflection.hpp"

#include <cmath>

namespace arisec {

namespace {

constexpr double kWiretapMarginBits = 1e-6;

struct GroupEval {
  double min_intended = std::numeric_limits<double>::infinity();
  double max_eaves = 0.0;
};

// Exact rates of one group's users for a reflection row v.
GroupEval evaluate_group(const std::vector<CMatrix>& H, const std::vector<Role>& roles,
                         const std::vector<double>& noise, std::span<const CVector> w, int k, const CRowVector& v) {
  GroupEval e;
  for (size_t u = 0; u < H.size(); ++u) {
    const CRowVector row = v * H[u];
    const double rate = user_rate(sinr(row, w, k, noise[u]));
    if (roles[u] == Role::intended) {
      e.min_intended = std::min(e.min_intended, rate);
    } else {
      e.max_eaves = std::max(e.max_eaves, rate);
    }
  }
  return e;
}

CRowVector random_row(const CMatrix& shape, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  CVector r(shape.cols());
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    r(i) = Complex(re, im);
  }
  return (shape * r).adjoint();
}

double wrap_2pi(double a) {
  double t = std::fmod(a, 2.0 * kPi);
  if (t < 0.0) t += 2.0 * kPi;
  if (t >= 2.0 * kPi) t = 0.0;
  return t;
}

}  // namespace

CMatrix stacked_channel(const CVector& h, const CMatrix& G, const CVector& g) {
  const auto n_sub = G.rows();
  if (g.size() != n_sub || G.cols() != h.size()) {
    throw Error(ErrorCode::dimension, "stacked_channel: dimension mismatch");
  }
  CMatrix H(n_sub + 1, h.size());
  H.row(0) = h.adjoint();
  for (Eigen::Index n = 0; n < n_sub; ++n) H.row(n + 1) = std::conj(g(n)) * G.row(n);
  return H;
}

std::vector<CMatrix> build_lambda(const CMatrix& H, std::span<const CVector> w) {
  std::vector<CMatrix> out;
  for (const auto& b : w) {
    const CVector hw = H * b;
    out.push_back(hw * hw.adjoint());
  }
  return out;
}

CRowVector reflection_row(const RVector& theta) {
  CRowVector v(theta.size() + 1);
  v(0) = 1.0;
  for (Eigen::Index n = 0; n < theta.size(); ++n) v(n + 1) = std::polar(1.0, theta(n));
  return v;
}

RVector update_mu_aux(const std::vector<std::vector<CMatrix>>& lambda, const std::vector<Role>& roles, int k,
                      const std::vector<double>& noise, const CMatrix& V) {
  RVector mu(static_cast<Eigen::Index>(lambda.size()));
  for (size_t u = 0; u < lambda.size(); ++u) {
    double denom = noise[u];
    for (int l = 0; l < static_cast<int>(lambda[u].size()); ++l) {
      if (roles[u] == Role::intended && l == k) continue;
      denom += (lambda[u][l] * V).trace().real();
    }
    mu(static_cast<Eigen::Index>(u)) = 1.0 / denom;
  }
  return mu;
}

VSubproblemResult solve_v_subproblem(const std::vector<std::vector<CMatrix>>& lambda, const std::vector<Role>& roles,
                                     int k, const std::vector<double>& noise, double wiretap_bps_hz, const RVector& mu,
                                     const CMatrix& V_start) {
  const int dim = static_cast<int>(V_start.rows());
  ConicProblem prob;
  const HermitianBlock block = prob.add_block(dim, true);
  const int omega = prob.add_variables(1);
  prob.cost = prob.zeros();
  prob.cost(omega) = -1.0;

  const double eps = 1e-3;
  RVector x0 = prob.zeros();
  set_block(block, (1.0 - eps) * V_start + eps * CMatrix::Identity(dim, dim), x0);

  double omega_start = std::numeric_limits<double>::infinity();
  for (size_t u = 0; u < lambda.size(); ++u) {
    const int beams = static_cast<int>(lambda[u].size());
    RVector all = prob.zeros();
    RVector others = prob.zeros();
    double all_c = 0.0;
    double others_c = 0.0;
    for (int l = 0; l < beams; ++l) {
      RVector c = prob.zeros();
      const double c0 = add_trace_coefficients(block, lambda[u][l] / noise[u], c);
      all += c;
      all_c += c0;
      if (l != k) {
        others += c;
        others_c += c0;
      }
    }
    const double mt = mu(static_cast<Eigen::Index>(u)) * noise[u];
    Constraint con = prob.make_constraint();
    LogTerm lt;
    if (roles[u] == Role::intended) {
      con.linear = mt * others;
      con.linear(omega) = kLn2;
      con.constant = mt * others_c + mt - std::log(mt) - 1.0;
      lt.a = all;
      lt.b = all_c + 1.0;
      con.logs.push_back(lt);
      const double lb = (std::log(all.dot(x0) + all_c + 1.0) - mt * (others.dot(x0) + others_c) - mt +
                         std::log(mt) + 1.0) / kLn2;
      omega_start = std::min(omega_start, lb);
    } else {
      con.linear = mt * all;
      con.constant = mt * all_c + mt - std::log(mt) - 1.0 - (wiretap_bps_hz - kWiretapMarginBits) * kLn2;
      if (beams > 1) {
        lt.a = others;
        lt.b = others_c + 1.0;
        con.logs.push_back(lt);
      }
    }
    prob.constraints.push_back(std::move(con));
  }
  x0(omega) = std::isfinite(omega_start) ? omega_start - 1.0 : 0.0;

  const ConicSolution sol = solve(prob, x0);
  VSubproblemResult out;
  out.status = sol.status;
  out.newton_steps = sol.newton_steps;
  out.V = block_matrix(block, sol.x);
  out.omega = sol.x(omega);
  return out;
}

RVector extract_phases(const CRowVector& v) {
  RVector theta(v.size() - 1);
  for (Eigen::Index n = 1; n < v.size(); ++n) theta(n - 1) = wrap_2pi(std::arg(v(n) / v(0)));
  return theta;
}

RVector principal_phases(const CMatrix& V) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(V);
  const CVector u = es.eigenvectors().col(V.rows() - 1);
  return extract_phases(u.adjoint());
}

double wrapped_angle_difference(double a, double b) {
  double d = std::fmod(a - b, 2.0 * kPi);
  if (d > kPi) d -= 2.0 * kPi;
  if (d < -kPi) d += 2.0 * kPi;
  return std::abs(d);
}

ReflectionLoopStats reflection_loop_aris(const ScenarioConfig& cfg, const Topology& topo, const ChannelSet& channels,
                                         DecisionState& state, int j, std::uint64_t seed) {
  ReflectionLoopStats stats;
  int k = -1;
  for (int kk = 0; kk < cfg.groups; ++kk) {
    if (state.chi(j, kk) > 0.5) k = kk;
  }
  if (k < 0) return stats;

  const std::vector<int> members = topo.members(k);
  std::vector<CMatrix> H;
  std::vector<std::vector<CMatrix>> lambda;
  std::vector<Role> roles;
  std::vector<double> noise;
  for (int i : members) {
    H.push_back(stacked_channel(channels.h[i], channels.G[j], channels.g[j][i]));
    lambda.push_back(build_lambda(H.back(), state.w));
    roles.push_back(topo.users[i].role);
    noise.push_back(topo.users[i].noise_power);
  }
  const double limit = cfg.wiretap(k);

  CRowVector v = reflection_row(state.theta[j]);
  GroupEval current = evaluate_group(H, roles, noise, state.w, k, v);
  CMatrix V_relaxed = v.adjoint() * v;
  const int dim = static_cast<int>(v.size());

  for (int it = 0; it < cfg.caps.reflection; ++it) {
    ++stats.iterations;
    const RVector mu = update_mu_aux(lambda, roles, k, noise, V_relaxed);
    const VSubproblemResult sub = solve_v_subproblem(lambda, roles, k, noise, limit, mu, V_relaxed);
    if (sub.status != SolveStatus::optimal) {
      ++stats.solver_failures;
      break;
    }
    V_relaxed = sub.V;

    Eigen::SelfAdjointEigenSolver<CMatrix> es(sub.V);
    const RVector ev = es.eigenvalues().cwiseMax(0.0);
    const bool rank_one = ev(dim - 1) > 0.0 && (dim < 2 || ev(dim - 2) / ev(dim - 1) <= 1e-6);

    RVector best_theta = state.theta[j];
    GroupEval best = current;
    bool improved = false;
    auto consider = [&](const RVector& theta) {
      const GroupEval e = evaluate_group(H, roles, noise, state.w, k, reflection_row(theta));
      if (e.max_eaves > limit) return;
      if (e.min_intended >= best.min_intended) {
        best = e;
        best_theta = theta;
        improved = true;
      }
    };
    consider(extract_phases(es.eigenvectors().col(dim - 1).adjoint()));
    if (!rank_one) {
      const CMatrix shape = es.eigenvectors() * ev.cwiseSqrt().asDiagonal();
      auto rng = rng_stream(seed, "ris-randomization", {static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(it)});
      for (int r = 0; r < cfg.ris_randomizations; ++r) consider(extract_phases(random_row(shape, rng)));
    }

    double change = 0.0;
    if (improved) {
      for (Eigen::Index n = 0; n < best_theta.size(); ++n) {
        const double d = wrapped_angle_difference(best_theta(n), state.theta[j](n));
        change += d * d;
      }
      change = std::sqrt(change);
      state.theta[j] = best_theta;
      current = best;
    }
    if (change <= cfg.eps.reflection) break;
    if (it + 1 == cfg.caps.reflection) stats.cap_hit = true;
  }
  return stats;
}

ReflectionLoopStats reflection_loop(const ScenarioConfig& cfg, const Topology& topo, const ChannelSet& channels,
                                    DecisionState& state, std::uint64_t seed) {
  ReflectionLoopStats total;
  for (int j = 0; j < cfg.arises; ++j) {
    const ReflectionLoopStats s = reflection_loop_aris(cfg, topo, channels, state, j, seed);
    total.iterations += s.iterations;
    total.solver_failures += s.solver_failures;
    total.cap_hit = total.cap_hit || s.cap_hit;
  }
  return total;
}

}  // namespace arisec
