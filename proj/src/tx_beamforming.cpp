// Copyright 2026 The arisec Authors
// SPDX-License-Identifier: Apache-2.0

#include "arisec/tx_beamforming.hpp"

#include <cmath>

namespace arisec {

namespace {

// Keeps the surrogate wiretap constraint strictly inside the exact one.
constexpr double kWiretapMarginBits = 1e-6;

double total_power(std::span<const CVector> w) {
  double p = 0.0;
  for (const auto& b : w) p += b.squaredNorm();
  return p;
}

bool wiretap_ok(const ScenarioConfig& cfg, const RateReport& r) {
  for (int k = 0; k < cfg.groups; ++k) {
    if (r.group_max_eaves[k] > cfg.wiretap(k)) return false;
  }
  return true;
}

std::vector<CVector> scaled(std::span<const CVector> w, double c) {
  std::vector<CVector> out;
  for (const auto& b : w) out.push_back(c * b);
  return out;
}

CVector random_cn(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  CVector z(n);
  for (int i = 0; i < n; ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    z(i) = Complex(re, im);
  }
  return z;
}

}  // namespace

std::vector<CMatrix> build_xi(std::span<const CRowVector> rows) {
  std::vector<CMatrix> xi;
  xi.reserve(rows.size());
  for (const auto& e : rows) xi.push_back(e.adjoint() * e);
  return xi;
}

RVector update_xi_aux(const Topology& topo, std::span<const CMatrix> Xi, std::span<const CMatrix> W) {
  const int users = static_cast<int>(topo.users.size());
  RVector xi(users);
  for (int i = 0; i < users; ++i) {
    const UserNode& u = topo.users[i];
    double denom = u.noise_power;
    for (int l = 0; l < static_cast<int>(W.size()); ++l) {
      if (u.role == Role::intended && l == u.group) continue;
      denom += (Xi[i] * W[l]).trace().real();
    }
    xi(i) = 1.0 / denom;
  }
  return xi;
}

WSubproblemResult solve_w_subproblem(const ScenarioConfig& cfg, const Topology& topo, std::span<const CMatrix> Xi,
                                     const RVector& xi, std::span<const CMatrix> W_start) {
  const int K = cfg.groups;
  const int L = cfg.antennas;
  const double P = cfg.power_w;
  ConicProblem prob;
  std::vector<HermitianBlock> blocks;
  for (int k = 0; k < K; ++k) blocks.push_back(prob.add_block(L, false));
  const int omega0 = prob.add_variables(K);
  prob.cost = prob.zeros();
  for (int k = 0; k < K; ++k) prob.cost(omega0 + k) = -1.0;

  // Start: slightly shrunk previous matrices plus a little identity, Omega below its bound.
  const double eps = 1e-3;
  RVector x0 = prob.zeros();
  for (int k = 0; k < K; ++k) {
    const CMatrix Wt = (1.0 - eps) * W_start[k] / P + CMatrix::Identity(L, L) * (eps / (K * L));
    set_block(blocks[k], Wt, x0);
  }

  std::vector<double> omega_start(K, std::numeric_limits<double>::infinity());
  const int users = static_cast<int>(topo.users.size());
  for (int i = 0; i < users; ++i) {
    const UserNode& u = topo.users[i];
    const int k = u.group;
    const CMatrix A = Xi[i] * (P / u.noise_power);
    const double xt = xi(i) * u.noise_power;
    // Per-beam trace coefficients of this user.
    std::vector<RVector> coeff(K, prob.zeros());
    for (int l = 0; l < K; ++l) add_trace_coefficients(blocks[l], A, coeff[l]);
    RVector all = prob.zeros();
    RVector others = prob.zeros();
    for (int l = 0; l < K; ++l) {
      all += coeff[l];
      if (l != k) others += coeff[l];
    }
    Constraint c = prob.make_constraint();
    LogTerm lt;
    if (u.role == Role::intended) {
      c.linear = xt * others;
      c.linear(omega0 + k) = kLn2;
      c.constant = xt - std::log(xt) - 1.0;
      lt.a = all;
      lt.b = 1.0;
      c.logs.push_back(lt);
      const double lb = (std::log(all.dot(x0) + 1.0) - xt * others.dot(x0) - c.constant) / kLn2;
      omega_start[k] = std::min(omega_start[k], lb);
    } else {
      c.linear = xt * all;
      c.constant = xt - std::log(xt) - 1.0 - (cfg.wiretap(k) - kWiretapMarginBits) * kLn2;
      if (K > 1) {
        lt.a = others;
        lt.b = 1.0;
        c.logs.push_back(lt);
      }
    }
    prob.constraints.push_back(std::move(c));
  }
  for (int k = 0; k < K; ++k) x0(omega0 + k) = std::isfinite(omega_start[k]) ? omega_start[k] - 1.0 : 0.0;

  Constraint power = prob.make_constraint();
  for (int k = 0; k < K; ++k) add_trace_coefficients(blocks[k], CMatrix::Identity(L, L), power.linear);
  power.constant = -1.0;
  prob.constraints.push_back(std::move(power));

  const ConicSolution sol = solve(prob, x0);
  WSubproblemResult out;
  out.status = sol.status;
  out.newton_steps = sol.newton_steps;
  out.omega = sol.x.segment(omega0, K);
  for (int k = 0; k < K; ++k) out.W.push_back(P * block_matrix(blocks[k], sol.x));
  return out;
}

std::vector<CVector> back_off_to_wiretap(const ScenarioConfig& cfg, const Topology& topo,
                                         std::span<const CRowVector> rows, std::span<const CVector> w) {
  if (wiretap_ok(cfg, evaluate_rates(cfg, topo, rows, w))) return {w.begin(), w.end()};
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (wiretap_ok(cfg, evaluate_rates(cfg, topo, rows, scaled(w, mid)))) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return scaled(w, lo);
}

ExtractResult extract_beamformers(const ScenarioConfig& cfg, const Topology& topo, std::span<const CRowVector> rows,
                                  std::span<const CMatrix> W, int n_rand, std::mt19937_64& rng) {
  const int K = static_cast<int>(W.size());
  std::vector<Eigen::SelfAdjointEigenSolver<CMatrix>> eig;
  std::vector<double> traces;
  bool rank_one = true;
  for (int k = 0; k < K; ++k) {
    eig.emplace_back(W[k]);
    const RVector ev = eig.back().eigenvalues().cwiseMax(0.0);
    traces.push_back(ev.sum());
    const int n = static_cast<int>(ev.size());
    const double l1 = ev(n - 1);
    const double l2 = n > 1 ? ev(n - 2) : 0.0;
    if (l1 > 0.0 && l2 / l1 > 1e-6) rank_one = false;
  }
  const double budget = cfg.power_w;

  auto finish = [&](std::vector<CVector> cand) {
    const double p = total_power(cand);
    if (p > budget) cand = scaled(cand, std::sqrt(budget / p));
    return back_off_to_wiretap(cfg, topo, rows, cand);
  };

  ExtractResult best;
  best.rank_one = rank_one;
  best.objective = -std::numeric_limits<double>::infinity();
  auto consider = [&](std::vector<CVector> cand) {
    cand = finish(std::move(cand));
    const RateReport r = evaluate_rates(cfg, topo, rows, cand);
    if (!wiretap_ok(cfg, r)) return;
    if (r.objective > best.objective) {
      best.objective = r.objective;
      best.w = std::move(cand);
      best.feasible = true;
    }
  };

  std::vector<CVector> principal;
  for (int k = 0; k < K; ++k) {
    const int n = static_cast<int>(W[k].rows());
    const CVector u = eig[k].eigenvectors().col(n - 1);
    principal.push_back(std::sqrt(rank_one ? std::max(0.0, eig[k].eigenvalues()(n - 1)) : traces[k]) * u);
  }
  consider(principal);
  if (rank_one) return best;

  std::vector<CMatrix> shape;
  for (int k = 0; k < K; ++k) {
    const RVector ev = eig[k].eigenvalues().cwiseMax(0.0);
    shape.push_back(eig[k].eigenvectors() * ev.cwiseSqrt().asDiagonal());
  }
  for (int r = 0; r < n_rand; ++r) {
    std::vector<CVector> cand;
    for (int k = 0; k < K; ++k) {
      CVector v = shape[k] * random_cn(static_cast<int>(W[k].rows()), rng);
      const double norm = v.norm();
      if (norm > 0.0) v *= std::sqrt(traces[k]) / norm;
      cand.push_back(std::move(v));
    }
    consider(std::move(cand));
  }
  return best;
}

std::vector<CVector> initial_beamformers(const ScenarioConfig& cfg, const Topology& topo,
                                         std::span<const CRowVector> rows) {
  std::vector<CVector> w;
  const double amp = std::sqrt(cfg.power_w / cfg.groups);
  for (int k = 0; k < cfg.groups; ++k) {
    int best = -1;
    double best_norm = -1.0;
    for (int i : topo.members(k, Role::intended)) {
      const double n = rows[i].norm();
      if (n > best_norm) {
        best_norm = n;
        best = i;
      }
    }
    if (best < 0 || best_norm == 0.0) {
      w.push_back(CVector::Zero(cfg.antennas));
    } else {
      w.push_back(amp * rows[best].adjoint() / best_norm);
    }
  }
  return back_off_to_wiretap(cfg, topo, rows, w);
}

void align_phases(std::span<const CVector> reference, std::vector<CVector>& w) {
  for (size_t k = 0; k < w.size() && k < reference.size(); ++k) {
    const Complex overlap = reference[k].dot(w[k]);
    if (std::abs(overlap) > 0.0) w[k] *= std::conj(overlap) / std::abs(overlap);
  }
}

TxLoopResult tx_beamforming_loop(const ScenarioConfig& cfg, const Topology& topo, std::span<const CRowVector> rows,
                                 std::span<const CVector> w_start, std::uint64_t seed) {
  TxLoopResult out;
  out.w = back_off_to_wiretap(cfg, topo, rows, w_start);
  double current = evaluate_rates(cfg, topo, rows, out.w).objective;
  const std::vector<CMatrix> Xi = build_xi(rows);
  std::vector<CMatrix> W_relaxed;
  for (const auto& b : out.w) W_relaxed.push_back(b * b.adjoint());

  for (int it = 0; it < cfg.caps.tx; ++it) {
    ++out.iterations;
    const RVector xi = update_xi_aux(topo, Xi, W_relaxed);
    const WSubproblemResult sub = solve_w_subproblem(cfg, topo, Xi, xi, W_relaxed);
    if (sub.status != SolveStatus::optimal) {
      ++out.solver_failures;
      out.trajectory.push_back(current);
      break;
    }
    W_relaxed = sub.W;
    auto rng = rng_stream(seed, "tx-randomization", {static_cast<std::uint64_t>(it)});
    ExtractResult ex = extract_beamformers(cfg, topo, rows, sub.W, cfg.tx_randomizations, rng);
    double change = 0.0;
    if (ex.feasible && ex.objective >= current) {
      align_phases(out.w, ex.w);
      for (size_t k = 0; k < ex.w.size(); ++k) change += (ex.w[k] - out.w[k]).squaredNorm();
      change = std::sqrt(change);
      out.w = std::move(ex.w);
      current = ex.objective;
    }
    out.trajectory.push_back(current);
    if (change <= cfg.eps.tx) break;
    if (it + 1 == cfg.caps.tx) out.cap_hit = true;
  }
  return out;
}

}  // namespace arisec
