// Copyright 2026 The arisec Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"
#include "support.hpp"

using namespace arisec;
using arisec::testing::random_instance;
using arisec::testing::relative_gap;

TEST_CASE("user rate") {
  CHECK(user_rate(0.0) == 0.0);
  CHECK(user_rate(1.0) == doctest::Approx(1.0));
  CHECK(user_rate(3.0) == doctest::Approx(2.0));
}

TEST_CASE("vector and trace SINR agree; interference-free case is plain SNR") {
  auto rng = rng_stream(1, "sinr-test");
  std::normal_distribution<double> n(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    CRowVector e(4);
    std::vector<CVector> w(3, CVector(4));
    for (int l = 0; l < 4; ++l) e(l) = Complex(n(rng), n(rng));
    for (auto& v : w) {
      for (int l = 0; l < 4; ++l) v(l) = Complex(n(rng), n(rng));
    }
    std::vector<CMatrix> W;
    for (const auto& v : w) W.push_back(v * v.adjoint());
    const CMatrix xi = e.adjoint() * e;
    CHECK(relative_gap(sinr(e, w, 1, 0.3), sinr_trace(xi, W, 1, 0.3)) < 1e-12);
  }
  CRowVector e = CRowVector::Ones(2);
  std::vector<CVector> one{CVector::Ones(2)};
  CHECK(sinr(e, one, 0, 0.5) == doctest::Approx(8.0));
}

TEST_CASE("five rate forms agree on random desk instances") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    auto in = random_instance(seed);
    const auto f = arisec::testing::rate_forms(in);
    for (size_t i = 0; i < f.vector_form.size(); ++i) {
      CHECK(relative_gap(f.vector_form[i], f.trace_form[i]) < 1e-10);
      CHECK(relative_gap(f.vector_form[i], f.association_form[i]) < 1e-10);
      if (!std::isnan(f.reflection_form[i])) CHECK(relative_gap(f.vector_form[i], f.reflection_form[i]) < 1e-10);
      if (!std::isnan(f.distance_form[i])) CHECK(relative_gap(f.vector_form[i], f.distance_form[i]) < 1e-8);
    }
  }
}

TEST_CASE("objective is the sum of group minima") {
  auto in = random_instance(3);
  const auto r = evaluate_rates(in.cfg, in.topo, in.channels, in.state);
  double expected = 0.0;
  for (int k = 0; k < in.cfg.groups; ++k) {
    double m = 1e300;
    for (int i : in.topo.members(k, Role::intended)) m = std::min(m, r.rate[i]);
    expected += m;
    CHECK(r.group_min_intended[k] == m);
  }
  CHECK(objective(r) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(r.objective == objective(r));
}

TEST_CASE("feasibility residuals") {
  auto in = random_instance(4);
  auto f = check_feasibility(in.cfg, in.topo, in.channels, in.state);
  CHECK(std::abs(f.power) < 1e-12);
  CHECK(f.modulus < 1e-15);
  CHECK(f.binary == 0.0);
  CHECK(f.row_sum == 0.0);
  CHECK(f.column_sum == 0.0);
  CHECK(f.region == 0.0);

  auto st = in.state;
  st.chi(0, 0) = 0.5;
  st.chi(1, 0) = 1.0;
  st.q[0] = {in.cfg.region.x_max + 10.0, 0.0};
  for (auto& w : st.w) w *= 2.0;
  f = check_feasibility(in.cfg, in.topo, in.channels, st);
  CHECK(f.power == doctest::Approx(3.0));
  CHECK(f.binary == doctest::Approx(0.5));
  CHECK(f.row_sum == doctest::Approx(1.0));  // row 1 now serves two groups
  CHECK(f.column_sum == doctest::Approx(0.5));
  CHECK(f.region == doctest::Approx(10.0));
  CHECK_FALSE(f.feasible());

  // Wiretap residual is the eavesdropper rate minus the threshold.
  const auto r = evaluate_rates(in.cfg, in.topo, in.channels, in.state);
  f = check_feasibility(in.cfg, in.topo, r, in.state);
  REQUIRE(f.wiretap.size() == 3);
  CHECK(f.wiretap[1] == doctest::Approx(r.group_max_eaves[1] - in.cfg.wiretap(1)));
}

TEST_CASE("MM log bound minorizes -ln x and is tight at xi = 1/x") {
  for (double x : {1e-3, 0.5, 2.0, 40.0}) {
    CHECK(mm_log_bound(1.0 / x, x) == doctest::Approx(-std::log(x)).epsilon(1e-12));
    for (double xi : {0.1 / x, 0.7 / x, 3.0 / x}) CHECK(mm_log_bound(xi, x) <= -std::log(x) + 1e-15);
  }
}
