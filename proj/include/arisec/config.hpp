// Copyright 2026 The arisec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "arisec/types.hpp"

namespace arisec {

enum class GroupLayout { ring, line };

struct Region {
  double x_min = -2500.0;
  double x_max = 2500.0;
  double y_min = -2500.0;
  double y_max = 2500.0;

  bool contains(const Point2& p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
  Point2 clamp(const Point2& p) const;
};

struct Thresholds {
  double tx = 1e-3;          // ||w - w_prev||
  double reflection = 1e-3;  // ||theta - theta_prev||
  double association = 1e-2; // max |chi - chi_prev|
  double deployment = 1e-2;  // ||q - q_prev||, meters
  double small_scale = 1e-3; // relative stacked change of (w, theta)
  double large_scale = 1e-2; // relative stacked change of (chi, q)
  double outer = 1e-3;       // relative objective change
};

struct IterationCaps {
  int tx = 50;
  int reflection = 50;
  int association = 30;
  int deployment = 30;
  int small_scale = 20;
  int large_scale = 20;
  int outer = 15;
};

/// Static scenario parameters. Physical quantities are SI; gains and losses are
/// stored linear (the text format accepts dB where the key name says so).
struct ScenarioConfig {
  int groups = 5;
  int arises = 3;
  int antennas = 5;
  int subsurfaces = 25;
  int elements_per_subsurface = 25;
  int intended_per_group = 3;
  int eavesdroppers_per_group = 1;

  double power_w = 100.0;
  double sat_altitude_m = 220e3;
  double aris_altitude_m = 100.0;
  double group_radius_m = 300.0;
  double group_spacing_m = 2000.0;
  GroupLayout layout = GroupLayout::ring;

  double carrier_hz = 6e9;
  double bandwidth_hz = 2e8;
  double noise_temp_k = 290.0;
  double gmax_linear = 1e5;
  double phi3db_rad = 0.004;
  double element_spacing_ratio = 0.5;
  double pathloss_exponent = 2.3;
  double ref_loss_linear = 1e-2;
  double rician_linear = 1.9952623149688795;
  double rain_mu = -3.125;
  double rain_sigma = 1.591;

  /// One value for every group, or exactly `groups` values.
  std::vector<double> wiretap_bps_hz = {0.5};
  double penalty_tau = 10.0;
  bool tau_escalation = false;
  Region region;

  Thresholds eps;
  IterationCaps caps;
  int tx_randomizations = 200;
  int ris_randomizations = 100;

  double wavelength() const { return kSpeedOfLight / carrier_hz; }
  double noise_power() const { return kBoltzmann * bandwidth_hz * noise_temp_k; }
  int users_per_group() const { return intended_per_group + eavesdroppers_per_group; }
  int total_users() const { return groups * users_per_group(); }
  double wiretap(int group) const {
    return wiretap_bps_hz.size() == 1 ? wiretap_bps_hz.front()
                                      : wiretap_bps_hz.at(static_cast<size_t>(group));
  }

  /// Full-scale defaults (what an empty config text yields).
  static ScenarioConfig full_defaults() { return ScenarioConfig{}; }
  /// Small instance used by the experiment harness and the acceptance suite.
  static ScenarioConfig desk_defaults();
};

/// Throws Error(invalid_config) naming the first offending field.
void validate(const ScenarioConfig& cfg);

/// Parses flat `key = value` text on top of the full-scale defaults; `#` starts a comment.
/// Unknown or duplicate keys are parse errors. The result is validated.
ScenarioConfig load_scenario(std::string_view text);
ScenarioConfig load_scenario(std::string_view text, ScenarioConfig base);

/// Applies one key/value pair (same keys and units as the text format).
void apply_setting(ScenarioConfig& cfg, std::string_view key, std::string_view value);

/// Canonical text form; `load_scenario(dump_scenario(c))` reproduces `c`.
std::string dump_scenario(const ScenarioConfig& cfg);

/// Every accepted key with its unit and meaning, one per line.
std::string scenario_schema();

double db_to_linear(double db);
double linear_to_db(double linear);

}  // namespace arisec
