// Copyright 2026 The arisec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "arisec/config.hpp"
#include "arisec/types.hpp"

namespace arisec {

enum class Role { intended, eavesdropper };

struct UserNode {
  Point2 position;
  Role role = Role::intended;
  int group = 0;
  double noise_power = 0.0;  // k_B * B * T, watts
};

struct Topology {
  std::vector<Point2> group_centers;
  std::vector<UserNode> users;  // grouped: group 0 intended, group 0 eavesdroppers, group 1, ...
  std::vector<Point2> aris_initial;
  double aris_altitude = 0.0;
  Point3 satellite;

  /// Indices into `users` for one group, optionally filtered by role.
  std::vector<int> members(int group) const;
  std::vector<int> members(int group, Role role) const;
};

/// Independent RNG stream for (seed, purpose, indices). Streams never share state,
/// so parallel trials and per-node draws stay reproducible in any order.
std::mt19937_64 rng_stream(std::uint64_t seed, std::string_view purpose,
                           std::initializer_list<std::uint64_t> indices = {});

std::vector<Point2> group_centers(const ScenarioConfig& cfg);

/// Samples user positions uniformly in each group disc. Pure in (cfg, seed).
Topology sample_topology(const ScenarioConfig& cfg, std::uint64_t seed);

/// Uniform sample in a disc of `radius` around `center`.
Point2 sample_in_disc(std::mt19937_64& rng, const Point2& center, double radius);

/// Centroid of a group's intended users (the initial hovering point of its ARIS).
Point2 intended_centroid(const Topology& topo, int group);

double planar_distance(const Point2& a, const Point2& b);
double aris_user_distance(const Point2& aris, const Point2& user, double altitude);
double distance3(const Point3& a, const Point3& b);

/// Angle at `sat` between the rays to `node` and to `beam_center`, in [0, pi].
double off_axis_angle(const Point3& sat, const Point3& node, const Point3& beam_center);

inline Point3 ground(const Point2& p) { return {p.x, p.y, 0.0}; }
inline Point3 lifted(const Point2& p, double z) { return {p.x, p.y, z}; }

}  // namespace arisec
