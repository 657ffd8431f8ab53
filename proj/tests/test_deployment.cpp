// Copyright 2026 The arisec Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "arisec/bcd.hpp"
#include "arisec/surrogates.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace arisec;
using arisec::testing::random_instance;
using arisec::testing::relative_gap;

namespace {

ScenarioConfig single_user_config() {
  auto cfg = ScenarioConfig::desk_defaults();
  cfg.groups = 1;
  cfg.arises = 1;
  cfg.intended_per_group = 1;
  cfg.eavesdroppers_per_group = 0;
  return cfg;
}

}  // namespace

TEST_CASE("D F D^T reproduces the received power at the generating distance") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto in = random_instance(seed);
    const auto f = arisec::testing::rate_forms(in);
    for (size_t i = 0; i < f.vector_form.size(); ++i) {
      if (!std::isnan(f.distance_form[i])) CHECK(relative_gap(f.vector_form[i], f.distance_form[i]) < 1e-8);
    }
    const auto F = build_f_matrices(in.topo, in.channels, in.state, 0);
    REQUIRE(F.size() == in.topo.members(0).size());
    for (const auto& per : F) {
      for (const auto& m : per) {
        CHECK((m - m.adjoint()).norm() <= 1e-14 * m.norm());
        Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues()(0) >= -1e-12 * es.eigenvalues()(1));
      }
    }
    // Far away only the direct link is left.
    const int i = in.topo.members(0).front();
    CHECK(f_power(F[0][0], 0.0) == doctest::Approx(std::norm(in.channels.h[i].dot(in.state.w[0]))).epsilon(1e-12));
  }
}

TEST_CASE("expanded distance constraints") {
  auto rng = rng_stream(1, "distance-expansion");
  std::uniform_real_distribution<double> pos(-1000.0, 1000.0), alt(50.0, 200.0), beta(2.0, 3.0), frac(0.01, 0.99);
  for (int t = 0; t < 1000; ++t) {
    const Point2 q{pos(rng), pos(rng)}, w{pos(rng), pos(rng)};
    const double H = alt(rng), b = beta(rng);
    const double d = aris_user_distance(q, w, H);
    const double exact = std::pow(d, -b / 2.0);
    const auto eq = expand_distance_constraints(q, w, H, b, exact, exact);
    CHECK(std::abs(eq.lower) <= 1e-9 * d * d);
    CHECK(std::abs(eq.upper) <= 1e-9 * d * d);
    // u_bar below and u_hat above the distance power both satisfy the expansions.
    const auto in = expand_distance_constraints(q, w, H, b, frac(rng) * exact, exact / frac(rng));
    CHECK(in.lower <= 0.0);
    CHECK(in.upper <= 0.0);
    const auto out = expand_distance_constraints(q, w, H, b, exact / frac(rng), frac(rng) * exact);
    CHECK(out.lower > 0.0);
    CHECK(out.upper > 0.0);
  }
  // beta = 2: u^{-4/beta} = u^{-2}.
  const auto r = expand_distance_constraints({0, 0}, {3, 0}, 4.0, 2.0, 0.1, 0.5);
  CHECK(r.lower == doctest::Approx(25.0 - 100.0));
  CHECK(r.upper == doctest::Approx(4.0 - 25.0));
}

TEST_CASE("deployment surrogates bracket their functions") {
  auto rng = rng_stream(2, "deploy-surrogates");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto in = random_instance(4);
  const auto F = build_f_matrices(in.topo, in.channels, in.state, 0);
  for (int t = 0; t < 1000; ++t) {
    const double beta = 2.0 + unit(rng);
    const double p = -4.0 / beta;
    const double u0 = 1e-3 + unit(rng), u = 1e-3 + unit(rng);
    CHECK(power_lower(u0, p, u) <= std::pow(u, p) * (1 + 1e-12));
    CHECK(std::abs(power_lower(u0, p, u0) - std::pow(u0, p)) <= 1e-12 * std::pow(u0, p));

    // Tangent of x^2 (the squared-distance linearization).
    const double x0 = 10 * unit(rng) - 5, x = 10 * unit(rng) - 5;
    const RMatrix one = RMatrix::Identity(1, 1);
    const RVector a0 = RVector::Constant(1, x0), a = RVector::Constant(1, x);
    CHECK(quad_lower(one, a0, a) <= x * x + 1e-12);
    CHECK(std::abs(quad_lower(one, a0, a0) - x0 * x0) <= 1e-12);

    // Tangent of the received-power polynomial D F D^T in u.
    const CMatrix& m = F[t % F.size()][t % in.cfg.groups];
    const double slope = 2.0 * m(0, 1).real() + 2.0 * m(1, 1).real() * u0;
    const double scale = std::max(f_power(m, u), f_power(m, u0));
    CHECK(f_power(m, u0) + slope * (u - u0) <= f_power(m, u) + 1e-12 * scale);

    const double s0 = 1.0 + 1e3 * unit(rng), s = 1.0 + 1e3 * unit(rng);
    CHECK(log_upper(s0, s) >= std::log(s) - 1e-15);
    CHECK(std::abs(log_upper(s0, s0) - std::log(s0)) <= 1e-12);
  }
}

TEST_CASE("single user: SCA lands in the grid-optimal cell") {
  const auto cfg = single_user_config();
  int hits = 0;
  const int seeds = 10;
  for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
    auto in = random_instance(seed, cfg);
    const auto rows = effective_channels(in.topo, in.channels, in.state);
    in.state.w = initial_beamformers(cfg, in.topo, rows);
    reflection_loop(cfg, in.topo, in.channels, in.state, seed);
    const auto F = build_f_matrices(in.topo, in.channels, in.state, 0);
    const auto members = in.topo.members(0);

    auto rng = rng_stream(seed, "deploy-start");
    std::uniform_real_distribution<double> off(-800.0, 800.0);
    const Point2 start = cfg.region.clamp({in.topo.users[0].position.x + off(rng), in.topo.users[0].position.y + off(rng)});
    const auto sca = deployment_sca(cfg, in.topo, members, F, 0, start);
    for (size_t s = 1; s < sca.trajectory.size(); ++s) CHECK(sca.trajectory[s] >= sca.trajectory[s - 1] - 1e-9);
    CHECK(cfg.region.contains(sca.q));

    Point2 best;
    double best_rate = -1.0;
    for (double x = cfg.region.x_min; x <= cfg.region.x_max; x += 50.0) {
      for (double y = cfg.region.y_min; y <= cfg.region.y_max; y += 50.0) {
        const double r = deployment_group_rates(cfg, in.topo, members, F, 0, {x, y}).min_intended;
        if (r > best_rate) {
          best_rate = r;
          best = {x, y};
        }
      }
    }
    if (std::abs(sca.q.x - best.x) <= 50.0 && std::abs(sca.q.y - best.y) <= 50.0) ++hits;
  }
  CHECK(hits >= seeds * 9 / 10);
}

TEST_CASE("deployment loop keeps the state feasible and never lowers the objective") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto in = random_instance(seed);
    for (auto& t : in.state.theta) t.setZero();
    const auto rows = effective_channels(in.topo, in.channels, in.state);
    in.state.w = initial_beamformers(in.cfg, in.topo, rows);
    BcdTrace trace;
    OuterRecord record;
    run_small_scale(in.cfg, in.topo, in.channels, in.state, seed, trace, 0, record);
    const double before = evaluate_rates(in.cfg, in.topo, in.channels, in.state).objective;
    deployment_loop(in.cfg, in.topo, in.draws, in.channels, in.state, seed);
    const auto after = evaluate_rates(in.cfg, in.topo, in.channels, in.state);
    CHECK(after.objective >= before - 1e-9);
    CHECK(check_feasibility(in.cfg, in.topo, after, in.state).feasible());
    for (const auto& q : in.state.q) CHECK(in.cfg.region.contains(q));
    // The channel set matches a fresh composition at the final positions.
    const auto fresh = compose_channels(in.cfg, in.topo, in.draws, in.state.q);
    for (int j = 0; j < in.cfg.arises; ++j) CHECK((fresh.G[j] - in.channels.G[j]).norm() == 0.0);

    // Running again from the result does not move backwards.
    deployment_loop(in.cfg, in.topo, in.draws, in.channels, in.state, seed + 1);
    CHECK(evaluate_rates(in.cfg, in.topo, in.channels, in.state).objective >= after.objective - 1e-9);
  }
}

TEST_CASE("co-located eavesdropper: moving cannot open a secrecy margin") {
  auto cfg = single_user_config();
  cfg.eavesdroppers_per_group = 1;
  auto in = random_instance(3, cfg);
  in.topo.users[1].position = in.topo.users[0].position;
  in.draws = sample_fading(cfg, in.topo, 3);
  in.draws.nlos[0][1] = in.draws.nlos[0][0];
  in.draws.user_rain[1] = in.draws.user_rain[0];
  in.channels = compose_channels(cfg, in.topo, in.draws, in.state.q);
  const auto rows = effective_channels(in.topo, in.channels, in.state);
  in.state.w = initial_beamformers(cfg, in.topo, rows);
  const auto F = build_f_matrices(in.topo, in.channels, in.state, 0);
  const auto members = in.topo.members(0);
  const auto g0 = deployment_group_rates(cfg, in.topo, members, F, 0, in.state.q[0]);
  CHECK(g0.min_intended == doctest::Approx(g0.max_eaves).epsilon(1e-12));
  const auto sca = deployment_sca(cfg, in.topo, members, F, 0, in.state.q[0]);
  const auto g1 = deployment_group_rates(cfg, in.topo, members, F, 0, sca.q);
  CHECK(g1.max_eaves <= cfg.wiretap(0));
  CHECK(g1.min_intended == doctest::Approx(g1.max_eaves).epsilon(1e-12));
}
