// Copyright 2026 The arisec Authors
// SPDX-License-Identifier: Apache-2.0

#include "arisec/association.hpp"

#include <cmath>

#include "arisec/surrogates.hpp"

namespace arisec {

namespace {

// Quadratic a^T M a with a = [1; c], split into constant, linear (on c) and quadratic parts.
struct SplitQuad {
  double constant = 0.0;
  RVector linear;
  RMatrix quad;
};

SplitQuad split(const RMatrix& M) {
  const auto J = M.rows() - 1;
  SplitQuad s;
  s.constant = M(0, 0);
  s.linear = 2.0 * M.block(1, 0, J, 1);
  s.quad = M.block(1, 1, J, J);
  return s;
}

// Real part of C divided by the noise power, summed over beams (optionally skipping one).
RMatrix summed(const std::vector<CMatrix>& C, double noise, int skip) {
  const auto n = C.front().rows();
  RMatrix M = RMatrix::Zero(n, n);
  for (int l = 0; l < static_cast<int>(C.size()); ++l) {
    if (l != skip) M += C[l].real() / noise;
  }
  return 0.5 * (M + M.transpose());
}

}  // namespace

CMatrix gamma_matrix(const ChannelSet& channels, std::span<const RVector> theta, int user) {
  const int J = static_cast<int>(channels.G.size());
  const CVector& h = channels.h[user];
  CMatrix Gamma(J + 1, h.size());
  Gamma.row(0) = h.adjoint();
  for (int j = 0; j < J; ++j) {
    const CVector& g = channels.g[j][user];
    CRowVector r = CRowVector::Zero(h.size());
    for (Eigen::Index n = 0; n < g.size(); ++n) r += std::conj(g(n)) * std::polar(1.0, theta[j](n)) * channels.G[j].row(n);
    Gamma.row(j + 1) = r;
  }
  return Gamma;
}

std::vector<std::vector<CMatrix>> build_c_matrices(const ChannelSet& channels, std::span<const RVector> theta,
                                                   std::span<const CVector> w) {
  if (theta.size() != channels.G.size()) {
    throw Error(ErrorCode::dimension, "build_c_matrices: one phase vector per ARIS expected");
  }
  std::vector<std::vector<CMatrix>> C(channels.h.size());
  for (size_t i = 0; i < channels.h.size(); ++i) {
    const CMatrix Gamma = gamma_matrix(channels, theta, static_cast<int>(i));
    for (const auto& b : w) {
      const CVector x = Gamma * b;
      C[i].push_back(x * x.adjoint());
    }
  }
  return C;
}

RVector augmented_column(const RMatrix& chi, int k) {
  RVector a(chi.rows() + 1);
  a(0) = 1.0;
  a.tail(chi.rows()) = chi.col(k);
  return a;
}

RateReport association_rates(const ScenarioConfig& cfg, const Topology& topo,
                             const std::vector<std::vector<CMatrix>>& C, const RMatrix& chi) {
  RateReport r;
  r.group_min_intended.assign(cfg.groups, std::numeric_limits<double>::infinity());
  r.group_max_eaves.assign(cfg.groups, 0.0);
  for (size_t i = 0; i < topo.users.size(); ++i) {
    const UserNode& u = topo.users[i];
    const RVector a = augmented_column(chi, u.group);
    double signal = 0.0;
    double interference = 0.0;
    for (int l = 0; l < static_cast<int>(C[i].size()); ++l) {
      const double p = a.dot(C[i][l].real() * a);
      if (l == u.group) {
        signal = p;
      } else {
        interference += p;
      }
    }
    const double s = signal / (interference + u.noise_power);
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

double penalized_objective(const ScenarioConfig& cfg, const Topology& topo,
                           const std::vector<std::vector<CMatrix>>& C, const RMatrix& chi, double tau) {
  const double penalty = (chi.array() * (1.0 - chi.array())).sum();
  return association_rates(cfg, topo, C, chi).objective - tau * penalty;
}

AssociationStep association_sca_step(const ScenarioConfig& cfg, const Topology& topo,
                                     const std::vector<std::vector<CMatrix>>& C, const RMatrix& chi0, double tau) {
  const int J = static_cast<int>(chi0.rows());
  const int K = static_cast<int>(chi0.cols());
  const int U = static_cast<int>(topo.users.size());

  ConicProblem prob;
  const int c0 = prob.add_variables(J * K);
  const int bar0 = prob.add_variables(U);
  const int hat0 = prob.add_variables(U);
  const int om0 = prob.add_variables(K);
  auto idx = [&](int j, int k) { return c0 + j * K + k; };

  prob.cost = prob.zeros();
  for (int k = 0; k < K; ++k) prob.cost(om0 + k) = -1.0;
  for (int j = 0; j < J; ++j) {
    for (int k = 0; k < K; ++k) prob.cost(idx(j, k)) = tau * (1.0 - 2.0 * chi0(j, k));
  }

  RVector x0 = prob.zeros();
  for (int j = 0; j < J; ++j) {
    for (int k = 0; k < K; ++k) x0(idx(j, k)) = chi0(j, k);
  }
  std::vector<double> om_start(K, std::numeric_limits<double>::infinity());

  for (int i = 0; i < U; ++i) {
    const UserNode& u = topo.users[i];
    const int k = u.group;
    const RVector a0 = augmented_column(chi0, k);
    const RVector cvec = a0.tail(J);
    std::vector<int> cols;
    for (int j = 0; j < J; ++j) cols.push_back(idx(j, k));

    const RMatrix M_all = summed(C[i], u.noise_power, -1);
    const RMatrix M_oth = summed(C[i], u.noise_power, k);
    const double f_all = a0.dot(M_all * a0) + 1.0;
    const double f_oth = a0.dot(M_oth * a0) + 1.0;

    // Tangent of a^T M a + 1 at a0, written as linear + constant in the chi variables.
    auto tangent = [&](const RMatrix& M, Constraint& con, double sign) {
      const RVector grad = 2.0 * (M.block(1, 0, J, 1) + M.block(1, 1, J, J) * cvec);
      const double value = a0.dot(M * a0) + 1.0;
      for (int j = 0; j < J; ++j) con.linear(cols[j]) += sign * grad(j);
      con.constant += sign * (value - grad.dot(cvec));
    };
    // Convex a^T M a + 1 kept as is.
    auto exact = [&](const RMatrix& M, Constraint& con) {
      const SplitQuad s = split(M);
      for (int j = 0; j < J; ++j) con.linear(cols[j]) += s.linear(j);
      con.constant += s.constant + 1.0;
      if (J > 0) con.quads.push_back({cols, s.quad});
    };

    Constraint bar = prob.make_constraint();
    Constraint hat = prob.make_constraint();
    Constraint rate = prob.make_constraint();
    if (u.role == Role::intended) {
      bar.linear(bar0 + i) = 1.0;  // psi_bar <= tangent(all)
      tangent(M_all, bar, -1.0);
      exact(M_oth, hat);  // others + 1 <= psi_hat
      hat.linear(hat0 + i) = -1.0;
      // Omega ln2 - ln psi_bar + ln psi_hat0 + psi_hat / psi_hat0 - 1 <= 0
      rate.linear(om0 + k) = kLn2;
      rate.linear(hat0 + i) = 1.0 / f_oth;
      rate.constant = std::log(f_oth) - 1.0;
      LogTerm lt;
      lt.a = prob.zeros();
      lt.a(bar0 + i) = 1.0;
      rate.logs.push_back(lt);
      x0(bar0 + i) = 0.99 * f_all;
      x0(hat0 + i) = 1.01 * f_oth;
      om_start[k] = std::min(om_start[k], std::log2(f_all / f_oth));
    } else {
      exact(M_all, bar);  // all + 1 <= psi_bar
      bar.linear(bar0 + i) = -1.0;
      hat.linear(hat0 + i) = 1.0;  // psi_hat <= tangent(others)
      tangent(M_oth, hat, -1.0);
      // ln psi_bar0 + psi_bar / psi_bar0 - 1 - ln psi_hat - Upsilon ln2 <= 0
      rate.linear(bar0 + i) = 1.0 / f_all;
      rate.constant = std::log(f_all) - 1.0 - cfg.wiretap(k) * kLn2;
      LogTerm lt;
      lt.a = prob.zeros();
      lt.a(hat0 + i) = 1.0;
      rate.logs.push_back(lt);
      x0(bar0 + i) = 1.01 * f_all;
      x0(hat0 + i) = 0.99 * f_oth;
    }
    prob.constraints.push_back(std::move(bar));
    prob.constraints.push_back(std::move(hat));
    prob.constraints.push_back(std::move(rate));
  }
  for (int k = 0; k < K; ++k) x0(om0 + k) = std::isfinite(om_start[k]) ? om_start[k] - 1.0 : 0.0;

  // Box and assignment structure.
  for (int j = 0; j < J; ++j) {
    RVector row = prob.zeros();
    for (int k = 0; k < K; ++k) {
      row(idx(j, k)) = 1.0;
      Constraint lo = prob.make_constraint();
      lo.linear(idx(j, k)) = -1.0;
      prob.constraints.push_back(std::move(lo));
      Constraint hi = prob.make_constraint();
      hi.linear(idx(j, k)) = 1.0;
      hi.constant = -1.0;
      prob.constraints.push_back(std::move(hi));
    }
    prob.add_equality(row, 1.0);
  }
  for (int k = 0; k < K; ++k) {
    RVector col = prob.zeros();
    for (int j = 0; j < J; ++j) col(idx(j, k)) = 1.0;
    if (J == K) {
      // Row sums force every column sum to one; the last equality is implied.
      if (k + 1 < K) prob.add_equality(col, 1.0);
    } else {
      Constraint c = prob.make_constraint();
      c.linear = col;
      c.constant = -1.0;
      prob.constraints.push_back(std::move(c));
    }
  }

  const ConicSolution sol = solve(prob, x0);
  AssociationStep out;
  out.status = sol.status;
  out.chi = RMatrix(J, K);
  for (int j = 0; j < J; ++j) {
    for (int k = 0; k < K; ++k) out.chi(j, k) = std::clamp(sol.x(idx(j, k)), 0.0, 1.0);
  }
  out.omega = sol.x.segment(om0, K);
  return out;
}

AssociationResult association_loop(const ScenarioConfig& cfg, const Topology& topo,
                                   const std::vector<std::vector<CMatrix>>& C, const RMatrix& chi_start, double tau) {
  AssociationResult out;
  out.chi_relaxed = chi_start;
  const int J = static_cast<int>(chi_start.rows());
  const int K = static_cast<int>(chi_start.cols());
  // With a single ARIS and a single group there is nothing to decide.
  if (J == 0 || (J == 1 && K == 1)) {
    out.chi = round_and_repair(chi_start);
    return out;
  }
  out.penalized.push_back(penalized_objective(cfg, topo, C, chi_start, tau));
  for (int it = 0; it < cfg.caps.association; ++it) {
    ++out.iterations;
    const AssociationStep step = association_sca_step(cfg, topo, C, out.chi_relaxed, tau);
    if (step.status != SolveStatus::optimal) {
      ++out.solver_failures;
      break;
    }
    const double change = (step.chi - out.chi_relaxed).cwiseAbs().maxCoeff();
    out.chi_relaxed = step.chi;
    out.penalized.push_back(penalized_objective(cfg, topo, C, out.chi_relaxed, tau));
    if (change <= cfg.eps.association) break;
    if (it + 1 == cfg.caps.association) out.cap_hit = true;
  }
  out.chi = round_and_repair(out.chi_relaxed);
  return out;
}

RMatrix round_and_repair(const RMatrix& chi_relaxed) {
  const auto J = chi_relaxed.rows();
  const auto K = chi_relaxed.cols();
  if (J > K) throw Error(ErrorCode::dimension, "round_and_repair: more ARISs than groups");
  RMatrix chi = RMatrix::Zero(J, K);
  std::vector<bool> taken(static_cast<size_t>(K), false);
  for (Eigen::Index j = 0; j < J; ++j) {
    Eigen::Index best = -1;
    for (Eigen::Index k = 0; k < K; ++k) {
      if (taken[k]) continue;
      if (best < 0 || chi_relaxed(j, k) > chi_relaxed(j, best)) best = k;
    }
    chi(j, best) = 1.0;
    taken[best] = true;
  }
  return chi;
}

}  // namespace arisec
