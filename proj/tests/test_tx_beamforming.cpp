// Copyright 2026 The arisec Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>

#include "doctest.h"
#include "support.hpp"

using namespace arisec;
using arisec::testing::random_instance;

namespace {

struct Surrogate {
  std::vector<double> group_min;  // bits/s/Hz
  bool wiretap_ok = true;
};

// The MM-bounded rates the beamforming SDP works with, evaluated at fixed weights.
Surrogate surrogate_rates(const ScenarioConfig& cfg, const Topology& topo, const std::vector<CMatrix>& Xi,
                          const RVector& xi, const std::vector<CMatrix>& W) {
  Surrogate s;
  s.group_min.assign(cfg.groups, std::numeric_limits<double>::infinity());
  for (size_t i = 0; i < topo.users.size(); ++i) {
    const auto& u = topo.users[i];
    double all = u.noise_power, others = u.noise_power;
    for (int l = 0; l < cfg.groups; ++l) {
      const double p = (Xi[i] * W[l]).trace().real();
      all += p;
      if (l != u.group) others += p;
    }
    if (u.role == Role::intended) {
      const double r = (std::log(all) + mm_log_bound(xi(i), others)) / kLn2;
      s.group_min[u.group] = std::min(s.group_min[u.group], r);
    } else {
      // Upper bound of ln(all) by its tangent at 1/xi.
      const double r = (-std::log(xi(i)) + xi(i) * all - 1.0 - std::log(others)) / kLn2;
      if (r > cfg.wiretap(u.group)) s.wiretap_ok = false;
    }
  }
  return s;
}

// One intended user and one eavesdropper sharing the same effective row.
struct Twin {
  ScenarioConfig cfg;
  Topology topo;
  std::vector<CRowVector> rows;
};

Twin twin_users(double wiretap) {
  Twin t;
  t.cfg = ScenarioConfig::desk_defaults();
  t.cfg.groups = 1;
  t.cfg.arises = 0;
  t.cfg.wiretap_bps_hz = {wiretap};
  t.topo.users.resize(2);
  t.topo.users[1].role = Role::eavesdropper;
  for (auto& u : t.topo.users) u.noise_power = t.cfg.noise_power();
  CRowVector e(t.cfg.antennas);
  for (int l = 0; l < e.size(); ++l) e(l) = std::polar(3e-8, 0.7 * l);
  t.rows = {e, e};
  return t;
}

}  // namespace

TEST_CASE("Xi is the outer product of the effective row") {
  auto in = random_instance(1);
  const auto rows = effective_channels(in.topo, in.channels, in.state);
  const auto Xi = build_xi(rows);
  for (size_t i = 0; i < rows.size(); ++i) {
    const CMatrix W = in.state.w[0] * in.state.w[0].adjoint();
    const double direct = std::norm((rows[i] * in.state.w[0]).value());
    CHECK((Xi[i] * W).trace().real() == doctest::Approx(direct).epsilon(1e-12));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(Xi[i]);
    const RVector ev = es.eigenvalues();
    CHECK(std::abs(ev(ev.size() - 2)) <= 1e-12 * ev(ev.size() - 1));
  }
  auto off = in.state;
  off.chi.setZero();
  const auto direct_rows = effective_channels(in.topo, in.channels, off);
  const auto Xi0 = build_xi(direct_rows);
  CHECK((Xi0[2] - in.channels.h[2] * in.channels.h[2].adjoint()).norm() <= 1e-14 * Xi0[2].norm());
}

TEST_CASE("MM weights: zero beams, grid argmax, tightness") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto in = random_instance(seed);
    const auto rows = effective_channels(in.topo, in.channels, in.state);
    const auto Xi = build_xi(rows);
    std::vector<CMatrix> zero(in.cfg.groups, CMatrix::Zero(in.cfg.antennas, in.cfg.antennas));
    const double sigma2 = in.cfg.noise_power();
    CHECK(update_xi_aux(in.topo, Xi, zero).isApprox(RVector::Constant(rows.size(), 1.0 / sigma2)));

    std::vector<CMatrix> W;
    for (const auto& w : in.state.w) W.push_back(w * w.adjoint());
    const RVector xi = update_xi_aux(in.topo, Xi, W);
    for (size_t i = 0; i < rows.size(); ++i) {
      const auto& u = in.topo.users[i];
      double denom = sigma2;
      for (int l = 0; l < in.cfg.groups; ++l) {
        if (u.role == Role::intended && l == u.group) continue;
        denom += (Xi[i] * W[l]).trace().real();
      }
      const int grid = 10000;
      const double step = 10.0 / sigma2 / grid;
      double best = -1e300, arg = 0.0;
      for (int g = 1; g <= grid; ++g) {
        const double v = mm_log_bound(g * step, denom);
        if (v > best) {
          best = v;
          arg = g * step;
        }
      }
      CHECK(std::abs(arg - xi(i)) <= step);
      CHECK(std::abs(mm_log_bound(xi(i), denom) + std::log(denom)) <= 1e-9);
    }
  }
}

TEST_CASE("single user without wiretap limit gets full-power MRT") {
  auto t = twin_users(1e3);
  t.topo.users.pop_back();
  t.rows.pop_back();
  t.cfg.eavesdroppers_per_group = 0;
  t.cfg.intended_per_group = 1;
  const auto Xi = build_xi(t.rows);
  std::vector<CMatrix> W0{CMatrix::Identity(t.cfg.antennas, t.cfg.antennas) * (t.cfg.power_w / t.cfg.antennas)};
  const RVector xi = update_xi_aux(t.topo, Xi, W0);
  const auto sub = solve_w_subproblem(t.cfg, t.topo, Xi, xi, W0);
  REQUIRE(sub.status == SolveStatus::optimal);
  CHECK(sub.W[0].trace().real() == doctest::Approx(t.cfg.power_w).epsilon(1e-6));
  const CMatrix mrt = t.cfg.power_w * Xi[0] / Xi[0].trace().real();
  CHECK((sub.W[0] - mrt).norm() <= 1e-4 * mrt.norm());
  const double snr = t.cfg.power_w * t.rows[0].squaredNorm() / t.cfg.noise_power();
  CHECK(sub.omega(0) == doctest::Approx(std::log2(1.0 + snr)).epsilon(1e-6));
}

TEST_CASE("an eavesdropper with the user's channel leaves no secrecy") {
  auto loose = twin_users(1e-3);
  const auto Xi = build_xi(loose.rows);
  std::vector<CMatrix> W0{CMatrix::Zero(loose.cfg.antennas, loose.cfg.antennas)};
  const auto sub = solve_w_subproblem(loose.cfg, loose.topo, Xi, update_xi_aux(loose.topo, Xi, W0), W0);
  REQUIRE(sub.status == SolveStatus::optimal);
  CHECK(sub.omega(0) <= 1e-3 + 1e-6);

  auto strict = twin_users(0.0);
  const std::vector<CVector> start{CVector::Ones(strict.cfg.antennas)};
  const auto loop = tx_beamforming_loop(strict.cfg, strict.topo, strict.rows, start, 1);
  CHECK(evaluate_rates(strict.cfg, strict.topo, strict.rows, loop.w).objective <= 1e-9);
}

TEST_CASE("rank-1 extraction returns the principal vector") {
  auto in = random_instance(2);
  const auto rows = effective_channels(in.topo, in.channels, in.state);
  in.cfg.wiretap_bps_hz = {1e3};
  std::vector<CMatrix> W;
  for (const auto& w : in.state.w) W.push_back(w * w.adjoint());
  auto rng = rng_stream(1, "x");
  const auto ex = extract_beamformers(in.cfg, in.topo, rows, W, 10, rng);
  REQUIRE(ex.feasible);
  CHECK(ex.rank_one);
  for (int k = 0; k < in.cfg.groups; ++k) CHECK((ex.w[k] * ex.w[k].adjoint() - W[k]).norm() <= 1e-9 * W[k].norm());
  CHECK(ex.objective == doctest::Approx(evaluate_rates(in.cfg, in.topo, rows, in.state.w).objective).epsilon(1e-9));
}

TEST_CASE("randomized extraction stays feasible and below the relaxation") {
  int found = 0;
  const int trials = 20;
  for (std::uint64_t seed = 1; seed <= trials; ++seed) {
    auto in = random_instance(seed);
    const auto rows = effective_channels(in.topo, in.channels, in.state);
    const auto Xi = build_xi(rows);
    const auto w0 = initial_beamformers(in.cfg, in.topo, rows);
    std::vector<CMatrix> W0;
    for (const auto& w : w0) W0.push_back(w * w.adjoint());
    const RVector xi = update_xi_aux(in.topo, Xi, W0);
    const auto sub = solve_w_subproblem(in.cfg, in.topo, Xi, xi, W0);
    REQUIRE(sub.status == SolveStatus::optimal);
    auto rng = rng_stream(seed, "extract-test");
    const auto ex = extract_beamformers(in.cfg, in.topo, rows, sub.W, in.cfg.tx_randomizations, rng);
    if (!ex.feasible) continue;
    ++found;
    double power = 0.0;
    for (const auto& w : ex.w) power += w.squaredNorm();
    CHECK(power <= in.cfg.power_w * (1 + 1e-8));
    const auto r = evaluate_rates(in.cfg, in.topo, rows, ex.w);
    for (int k = 0; k < in.cfg.groups; ++k) CHECK(r.group_max_eaves[k] <= in.cfg.wiretap(k) + 1e-4);

    // A rank-1 point that the SDP would also accept cannot beat the SDP optimum.
    std::vector<CMatrix> Wr;
    for (const auto& w : ex.w) Wr.push_back(w * w.adjoint());
    const auto s = surrogate_rates(in.cfg, in.topo, Xi, xi, Wr);
    if (s.wiretap_ok) {
      double lhs = 0.0;
      for (double v : s.group_min) lhs += v;
      CHECK(lhs <= sub.omega.sum() + 1e-5);
    }
  }
  CHECK(found >= trials * 95 / 100);
}

TEST_CASE("beamforming loop: monotone, feasible, and settles on a converged start") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto in = random_instance(seed);
    const auto rows = effective_channels(in.topo, in.channels, in.state);
    const auto w0 = initial_beamformers(in.cfg, in.topo, rows);
    const double start = evaluate_rates(in.cfg, in.topo, rows, w0).objective;
    const auto loop = tx_beamforming_loop(in.cfg, in.topo, rows, w0, seed);
    double prev = start;
    for (double v : loop.trajectory) {
      CHECK(v >= prev - 1e-5);
      prev = v;
    }
    double power = 0.0;
    for (const auto& w : loop.w) power += w.squaredNorm();
    CHECK(power <= in.cfg.power_w * (1 + 1e-8));
    const auto r = evaluate_rates(in.cfg, in.topo, rows, loop.w);
    for (int k = 0; k < in.cfg.groups; ++k) CHECK(r.group_max_eaves[k] <= in.cfg.wiretap(k) + 1e-4);
    if (seed <= 3) {
      const auto again = tx_beamforming_loop(in.cfg, in.topo, rows, loop.w, seed + 100);
      CHECK(evaluate_rates(in.cfg, in.topo, rows, again.w).objective >= r.objective - 1e-9);
    }
  }
}

TEST_CASE("back-off scales beams until the wiretap limit holds") {
  auto t = twin_users(0.5);
  const std::vector<CVector> w{CVector::Ones(t.cfg.antennas) * 1e3};
  REQUIRE(evaluate_rates(t.cfg, t.topo, t.rows, w).group_max_eaves[0] > 0.5);
  const auto b = back_off_to_wiretap(t.cfg, t.topo, t.rows, w);
  const auto r = evaluate_rates(t.cfg, t.topo, t.rows, b);
  CHECK(r.group_max_eaves[0] <= 0.5);
  CHECK(r.group_max_eaves[0] >= 0.5 - 1e-9);
}
