// Copyright 2026 The arisec Authors
// SPDX-License-Identifier: Apache-2.0

#include "arisec/geometry.hpp"

#include <cmath>

namespace arisec {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::mt19937_64 rng_stream(std::uint64_t seed, std::string_view purpose,
                           std::initializer_list<std::uint64_t> indices) {
  std::uint64_t h = splitmix64(seed ^ fnv1a(purpose));
  for (std::uint64_t i : indices) h = splitmix64(h ^ splitmix64(i + 0x632be59bd9b4e019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  return std::mt19937_64(seq);
}

std::vector<int> Topology::members(int group) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(users.size()); ++i) {
    if (users[i].group == group) out.push_back(i);
  }
  return out;
}

std::vector<int> Topology::members(int group, Role role) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(users.size()); ++i) {
    if (users[i].group == group && users[i].role == role) out.push_back(i);
  }
  return out;
}

std::vector<Point2> group_centers(const ScenarioConfig& cfg) {
  const int k_count = cfg.groups;
  std::vector<Point2> centers(k_count);
  if (k_count == 1) return centers;
  if (cfg.layout == GroupLayout::line) {
    const double offset = 0.5 * cfg.group_spacing_m * (k_count - 1);
    for (int k = 0; k < k_count; ++k) centers[k] = {k * cfg.group_spacing_m - offset, 0.0};
    return centers;
  }
  // Ring with adjacent centers group_spacing_m apart.
  const double radius = cfg.group_spacing_m / (2.0 * std::sin(kPi / k_count));
  for (int k = 0; k < k_count; ++k) {
    const double a = 2.0 * kPi * k / k_count;
    centers[k] = {radius * std::cos(a), radius * std::sin(a)};
  }
  return centers;
}

Point2 sample_in_disc(std::mt19937_64& rng, const Point2& center, double radius) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r = radius * std::sqrt(unit(rng));
  const double a = 2.0 * kPi * unit(rng);
  return {center.x + r * std::cos(a), center.y + r * std::sin(a)};
}

Point2 intended_centroid(const Topology& topo, int group) {
  Point2 c;
  const auto idx = topo.members(group, Role::intended);
  for (int i : idx) {
    c.x += topo.users[i].position.x;
    c.y += topo.users[i].position.y;
  }
  c.x /= static_cast<double>(idx.size());
  c.y /= static_cast<double>(idx.size());
  return c;
}

Topology sample_topology(const ScenarioConfig& cfg, std::uint64_t seed) {
  Topology topo;
  topo.group_centers = group_centers(cfg);
  topo.aris_altitude = cfg.aris_altitude_m;

  Point2 centroid;
  for (const auto& c : topo.group_centers) {
    centroid.x += c.x / cfg.groups;
    centroid.y += c.y / cfg.groups;
  }
  topo.satellite = {centroid.x, centroid.y, cfg.sat_altitude_m};

  const double noise = cfg.noise_power();
  for (int k = 0; k < cfg.groups; ++k) {
    auto rng = rng_stream(seed, "topology", {static_cast<std::uint64_t>(k)});
    for (int m = 0; m < cfg.users_per_group(); ++m) {
      UserNode u;
      u.position = sample_in_disc(rng, topo.group_centers[k], cfg.group_radius_m);
      u.role = m < cfg.intended_per_group ? Role::intended : Role::eavesdropper;
      u.group = k;
      u.noise_power = noise;
      topo.users.push_back(u);
    }
  }
  for (int j = 0; j < cfg.arises; ++j) {
    topo.aris_initial.push_back(cfg.region.clamp(intended_centroid(topo, j)));
  }
  return topo;
}

double planar_distance(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

double aris_user_distance(const Point2& aris, const Point2& user, double altitude) {
  const double dx = aris.x - user.x;
  const double dy = aris.y - user.y;
  return std::sqrt(dx * dx + dy * dy + altitude * altitude);
}

double distance3(const Point3& a, const Point3& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double off_axis_angle(const Point3& sat, const Point3& node, const Point3& beam_center) {
  const Eigen::Vector3d a(node.x - sat.x, node.y - sat.y, node.z - sat.z);
  const Eigen::Vector3d b(beam_center.x - sat.x, beam_center.y - sat.y, beam_center.z - sat.z);
  // atan2 keeps full precision for the milliradian angles of a narrow beam.
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

}  // namespace arisec
