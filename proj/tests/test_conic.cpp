// Copyright 2026 The arisec Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>
#include <random>

#include "arisec/conic.hpp"
#include "arisec/geometry.hpp"
#include "doctest.h"

using namespace arisec;

namespace {

CMatrix random_hermitian(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix A(n, n);
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) A(p, q) = Complex(g(rng), g(rng));
  }
  return 0.5 * (A + A.adjoint());
}

// Golden-section maximizer of a unimodal function on [a, b].
template <class F>
double golden_max(F f, double a, double b) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  while (b - a > 1e-12) {
    if (f(c) > f(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - r * (b - a);
    d = a + r * (b - a);
  }
  return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("real embedding of Hermitian matrices") {
  CHECK(hermitian_real_embedding(CMatrix::Identity(3, 3)).isApprox(RMatrix::Identity(6, 6)));

  CMatrix S(2, 2);
  S << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);  // eigenvalues +-1
  Eigen::SelfAdjointEigenSolver<RMatrix> es(hermitian_real_embedding(S));
  CHECK(es.eigenvalues()(0) == doctest::Approx(-1.0));
  CHECK(es.eigenvalues()(1) == doctest::Approx(-1.0));
  CHECK(es.eigenvalues()(3) == doctest::Approx(1.0));

  auto rng = rng_stream(1, "embed-test");
  for (int t = 0; t < 20; ++t) {
    const CMatrix A = random_hermitian(rng, 4), B = random_hermitian(rng, 4);
    const double lhs = (hermitian_real_embedding(A) * hermitian_real_embedding(B)).trace();
    CHECK(lhs == doctest::Approx(2.0 * (A * B.adjoint()).trace().real()).epsilon(1e-12));
    CHECK(hermitian_real_embedding(A).trace() == doctest::Approx(2.0 * A.trace().real()));
  }
  CMatrix bad = CMatrix::Identity(2, 2);
  bad(0, 1) = 1.0;
  CHECK_THROWS_AS(hermitian_real_embedding(bad), Error);
}

TEST_CASE("block storage and trace coefficients") {
  auto rng = rng_stream(2, "block-test");
  for (bool unit : {false, true}) {
    ConicProblem p;
    const auto b = p.add_block(3, unit);
    CMatrix X = random_hermitian(rng, 3);
    if (unit) X.diagonal().setOnes();
    RVector x = p.zeros();
    set_block(b, X, x);
    CHECK((block_matrix(b, x) - X).norm() < 1e-14);
    const CMatrix A = random_hermitian(rng, 3);
    RVector coeffs = p.zeros();
    const double constant = add_trace_coefficients(b, A, coeffs);
    CHECK(coeffs.dot(x) + constant == doctest::Approx((A * X).trace().real()).epsilon(1e-12));
  }
}

TEST_CASE("min trace with unit diagonal gives the identity") {
  ConicProblem p;
  const auto b = p.add_block(3, false);
  p.cost = p.zeros();
  add_trace_coefficients(b, CMatrix::Identity(3, 3), p.cost);
  for (int i = 0; i < 3; ++i) {
    RVector row = p.zeros();
    CMatrix E = CMatrix::Zero(3, 3);
    E(i, i) = 1.0;
    add_trace_coefficients(b, E, row);
    p.add_equality(row, 1.0);
  }
  RVector x0 = p.zeros();
  set_block(b, CMatrix::Identity(3, 3) * 2.0, x0);
  const auto sol = solve(p, x0);
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.objective == doctest::Approx(3.0).epsilon(1e-8));
  CHECK((block_matrix(b, sol.x) - CMatrix::Identity(3, 3)).norm() < 1e-6);
}

TEST_CASE("log-of-affine objective on a box") {
  // max log2(1 + x), 0 <= x <= 3, as min -t s.t. t <= ln(1 + x).
  ConicProblem p;
  const int x = p.add_variables(1);
  const int t = p.add_variables(1);
  p.cost = p.zeros();
  p.cost(t) = -1.0;
  auto hyp = p.make_constraint();
  hyp.linear(t) = 1.0;
  LogTerm lt;
  lt.a = p.zeros();
  lt.a(x) = 1.0;
  lt.b = 1.0;
  hyp.logs.push_back(lt);
  p.constraints.push_back(hyp);
  auto upper = p.make_constraint();
  upper.linear(x) = 1.0;
  upper.constant = -3.0;
  p.constraints.push_back(upper);
  auto lower = p.make_constraint();
  lower.linear(x) = -1.0;
  p.constraints.push_back(lower);
  RVector x0 = p.zeros();
  x0(x) = 1.0;
  const auto sol = solve(p, x0);
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(-sol.objective / kLn2 == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(sol.x(x) == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("sum of logs matches a golden-section oracle") {
  auto rng = rng_stream(3, "log-oracle");
  std::uniform_real_distribution<double> u(0.2, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double a1 = u(rng), b1 = u(rng), a2 = u(rng), b2 = u(rng), c = u(rng);
    // max ln(a1 x + b1) + ln(a2 x + b2) - c x on [0, 5].
    ConicProblem p;
    const int x = p.add_variables(1);
    const int t = p.add_variables(2);
    p.cost = p.zeros();
    p.cost(x) = c;
    p.cost(t) = -1.0;
    p.cost(t + 1) = -1.0;
    for (int i = 0; i < 2; ++i) {
      auto k = p.make_constraint();
      k.linear(t + i) = 1.0;
      LogTerm lt;
      lt.a = p.zeros();
      lt.a(x) = i == 0 ? a1 : a2;
      lt.b = i == 0 ? b1 : b2;
      k.logs.push_back(lt);
      p.constraints.push_back(k);
    }
    auto hi = p.make_constraint();
    hi.linear(x) = 1.0;
    hi.constant = -5.0;
    p.constraints.push_back(hi);
    auto lo = p.make_constraint();
    lo.linear(x) = -1.0;
    p.constraints.push_back(lo);
    const auto sol = solve(p, RVector::Constant(p.num_vars, 1.0));
    REQUIRE(sol.status == SolveStatus::optimal);
    auto f = [&](double v) { return std::log(a1 * v + b1) + std::log(a2 * v + b2) - c * v; };
    const double best = f(golden_max(f, 0.0, 5.0));
    CHECK(-sol.objective == doctest::Approx(best).epsilon(1e-6));
  }
}

TEST_CASE("2x2 unit-diagonal SDP matches a grid search") {
  auto rng = rng_stream(4, "sdp-grid");
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix A = random_hermitian(rng, 2);
    ConicProblem p;
    const auto b = p.add_block(2, true);
    p.cost = p.zeros();
    const double constant = add_trace_coefficients(b, A, p.cost);
    const auto sol = solve(p, p.zeros());
    REQUIRE(sol.status == SolveStatus::optimal);
    double best = 1e300;
    for (int r = 0; r <= 400; ++r) {
      for (int a = 0; a < 720; ++a) {
        const Complex z = std::polar(r / 400.0, a * kPi / 360.0);
        best = std::min(best, A(0, 0).real() + A(1, 1).real() + 2.0 * (A(1, 0) * z).real());
      }
    }
    CHECK(sol.objective + constant == doctest::Approx(best).epsilon(1e-3));
    CHECK(sol.max_violation <= 1e-8);
  }
}

TEST_CASE("infeasible problems are reported, and solves are deterministic") {
  ConicProblem p;
  const int x = p.add_variables(1);
  p.cost = p.zeros();
  p.cost(x) = 1.0;
  auto a = p.make_constraint();
  a.linear(x) = 1.0;
  a.constant = 1.0;  // x <= -1
  auto b = p.make_constraint();
  b.linear(x) = -1.0;
  b.constant = 1.0;  // x >= 1
  p.constraints = {a, b};
  const auto sol = solve(p, p.zeros());
  CHECK(sol.status == SolveStatus::infeasible);

  ConicProblem q;
  const auto blk = q.add_block(3, true);
  q.cost = q.zeros();
  auto rng = rng_stream(5, "det");
  add_trace_coefficients(blk, random_hermitian(rng, 3), q.cost);
  const auto s1 = solve(q, q.zeros());
  const auto s2 = solve(q, q.zeros());
  CHECK(s1.status == s2.status);
  CHECK(s1.objective == s2.objective);
  CHECK(max_violation(q, s1.x) <= 10 * SolverOptions{}.tol_feas);
}

TEST_CASE("power terms are convex constraints") {
  // min x s.t. 1/x <= 2, x <= 10: optimum x = 0.5.
  ConicProblem p;
  const int x = p.add_variables(1);
  p.cost = p.zeros();
  p.cost(x) = 1.0;
  auto c = p.make_constraint();
  c.constant = -2.0;
  PowerTerm pt;
  pt.a = p.zeros();
  pt.a(x) = 1.0;
  pt.exponent = -1.0;
  c.powers.push_back(pt);
  p.constraints.push_back(c);
  auto hi = p.make_constraint();
  hi.linear(x) = 1.0;
  hi.constant = -10.0;
  p.constraints.push_back(hi);
  RVector x0 = p.zeros();
  x0(x) = 5.0;
  const auto sol = solve(p, x0);
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.x(x) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(evaluate_constraint(c, RVector::Constant(1, -1.0)) == std::numeric_limits<double>::infinity());
}
