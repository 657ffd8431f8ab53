// Copyright 2026 The arisec Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "arisec/config.hpp"
#include "arisec/geometry.hpp"
#include "doctest.h"

using namespace arisec;

TEST_CASE("topology sampling is a pure function of the seed") {
  const auto cfg = ScenarioConfig::desk_defaults();
  const auto a = sample_topology(cfg, 42);
  const auto b = sample_topology(cfg, 42);
  const auto c = sample_topology(cfg, 43);
  REQUIRE(a.users.size() == b.users.size());
  bool differs = false;
  for (size_t i = 0; i < a.users.size(); ++i) {
    CHECK(a.users[i].position.x == b.users[i].position.x);
    CHECK(a.users[i].position.y == b.users[i].position.y);
    differs |= a.users[i].position.x != c.users[i].position.x;
  }
  CHECK(differs);
}

TEST_CASE("users stay inside their group disc and are laid out by role") {
  const auto cfg = ScenarioConfig::full_defaults();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto topo = sample_topology(cfg, seed);
    REQUIRE(static_cast<int>(topo.users.size()) == cfg.total_users());
    for (size_t i = 0; i < topo.users.size(); ++i) {
      const auto& u = topo.users[i];
      CHECK(planar_distance(u.position, topo.group_centers[u.group]) <= cfg.group_radius_m);
      const int m = static_cast<int>(i) % cfg.users_per_group();
      CHECK((u.role == Role::intended) == (m < cfg.intended_per_group));
    }
    CHECK(topo.members(0, Role::eavesdropper).size() == 1);
  }
}

TEST_CASE("uniform disc sampling has mean radius 2R/3") {
  auto rng = rng_stream(7, "disc-test");
  const double radius = 300.0;
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += planar_distance(sample_in_disc(rng, {}, radius), {});
  CHECK(sum / n == doctest::Approx(2.0 * radius / 3.0).epsilon(0.01));
}

TEST_CASE("distances") {
  CHECK(planar_distance({0, 0}, {3, 4}) == doctest::Approx(5.0));
  CHECK(aris_user_distance({0, 0}, {3, 0}, 4.0) == doctest::Approx(5.0));
  const Point3 a{1, -2, 3}, b{-4, 5, 0.5};
  CHECK(distance3(a, b) == doctest::Approx(Eigen::Vector3d(5, -7, 2.5).norm()).epsilon(1e-15));
}

TEST_CASE("off-axis angle agrees with the dot-product formula") {
  auto rng = rng_stream(3, "angle-test");
  std::uniform_real_distribution<double> u(-3000.0, 3000.0);
  const Point3 sat{0, 0, 220e3};
  for (int t = 0; t < 200; ++t) {
    const Point3 node{u(rng), u(rng), 0.0};
    const Point3 center{u(rng), u(rng), 0.0};
    const Eigen::Vector3d a(node.x - sat.x, node.y - sat.y, node.z - sat.z);
    const Eigen::Vector3d b(center.x - sat.x, center.y - sat.y, center.z - sat.z);
    const double expected = std::acos(std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0));
    CHECK(off_axis_angle(sat, node, center) == doctest::Approx(expected).epsilon(1e-6));
  }
  CHECK(off_axis_angle(sat, {10, 0, 0}, {10, 0, 0}) == 0.0);
}

TEST_CASE("ring layout places adjacent centers at the configured spacing") {
  auto cfg = ScenarioConfig::full_defaults();
  const auto centers = group_centers(cfg);
  for (int k = 0; k < cfg.groups; ++k) {
    CHECK(planar_distance(centers[k], centers[(k + 1) % cfg.groups]) ==
          doctest::Approx(cfg.group_spacing_m).epsilon(1e-12));
  }
  cfg.layout = GroupLayout::line;
  const auto line = group_centers(cfg);
  CHECK(line.front().x == doctest::Approx(-2.0 * cfg.group_spacing_m));
  CHECK(line[1].x - line[0].x == doctest::Approx(cfg.group_spacing_m));
}

TEST_CASE("rng streams are independent of draw order") {
  auto a = rng_stream(5, "x", {1, 2});
  auto b = rng_stream(5, "x", {1, 2});
  auto c = rng_stream(5, "x", {2, 1});
  auto d = rng_stream(5, "y", {1, 2});
  const auto va = a();
  CHECK(va == b());
  CHECK(va != c());
  CHECK(va != d());
}

TEST_CASE("scenario text parsing") {
  const auto empty = load_scenario("");
  CHECK(empty.groups == 5);
  CHECK(empty.arises == 3);
  CHECK(empty.subsurfaces == 25);
  CHECK(empty.power_w == 100.0);

  const auto rho = load_scenario("rician_db = 3\n");
  CHECK(rho.rician_linear == doctest::Approx(1.9952623149688795).epsilon(1e-12));

  const auto per_group = load_scenario("groups = 2\narises = 1\nwiretap_bps_hz = 0.3, 0.9  # comment\n");
  CHECK(per_group.wiretap(0) == doctest::Approx(0.3));
  CHECK(per_group.wiretap(1) == doctest::Approx(0.9));

  auto code_of = [](const char* text) {
    try {
      load_scenario(text);
    } catch (const Error& e) {
      return static_cast<int>(e.code());
    }
    return -1;
  };
  CHECK(code_of("arises = 6\n") == static_cast<int>(ErrorCode::invalid_config));
  CHECK(code_of("bogus = 1\n") == static_cast<int>(ErrorCode::parse));
  CHECK(code_of("groups = 2\ngroups = 3\n") == static_cast<int>(ErrorCode::parse));
  CHECK(code_of("power_w = lots\n") == static_cast<int>(ErrorCode::parse));
  CHECK(code_of("power_w = -1\n") == static_cast<int>(ErrorCode::invalid_config));
}

TEST_CASE("dump and reload reproduce the config") {
  auto cfg = ScenarioConfig::desk_defaults();
  cfg.pathloss_exponent = 2.6;
  cfg.wiretap_bps_hz = {0.25, 0.5, 1.0};
  cfg.layout = GroupLayout::line;
  const std::string text = dump_scenario(cfg);
  const auto again = load_scenario(text);
  CHECK(dump_scenario(again) == text);
  CHECK(again.pathloss_exponent == cfg.pathloss_exponent);
  CHECK(again.wiretap(2) == 1.0);
}
