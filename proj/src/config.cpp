// Copyright 2026 The arisec Authors
// SPDX-License-Identifier: Apache-2.0

#include "arisec/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace arisec {

Point2 Region::clamp(const Point2& p) const {
  return {std::clamp(p.x, x_min, x_max), std::clamp(p.y, y_min, y_max)};
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

ScenarioConfig ScenarioConfig::desk_defaults() {
  ScenarioConfig cfg;
  cfg.groups = 3;
  cfg.arises = 2;
  cfg.antennas = 4;
  cfg.subsurfaces = 8;
  cfg.elements_per_subsurface = 8;
  cfg.intended_per_group = 2;
  cfg.eavesdroppers_per_group = 1;
  return cfg;
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double parse_double(std::string_view key, std::string_view text) {
  const std::string v = trim(text);
  double out = 0.0;
  const auto* begin = v.data();
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (v.empty() || ec != std::errc() || ptr != end || !std::isfinite(out)) {
    throw Error(ErrorCode::parse, "key '" + std::string(key) + "': not a number: '" + v + "'");
  }
  return out;
}

int parse_int(std::string_view key, std::string_view text) {
  const std::string v = trim(text);
  int out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    throw Error(ErrorCode::parse, "key '" + std::string(key) + "': not an integer: '" + v + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view text) {
  const std::string v = trim(text);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error(ErrorCode::parse, "key '" + std::string(key) + "': not a boolean: '" + v + "'");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct KeyInfo {
  const char* unit;
  const char* doc;
  std::function<void(ScenarioConfig&, std::string_view key, std::string_view value)> set;
  std::function<std::string(const ScenarioConfig&)> get;  // empty: alias, not dumped
};

template <typename Field>
KeyInfo int_key(const char* unit, const char* doc, Field field) {
  return {unit, doc,
          [field](ScenarioConfig& c, std::string_view k, std::string_view v) {
            c.*field = parse_int(k, v);
          },
          [field](const ScenarioConfig& c) { return std::to_string(c.*field); }};
}

template <typename Field>
KeyInfo double_key(const char* unit, const char* doc, Field field) {
  return {unit, doc,
          [field](ScenarioConfig& c, std::string_view k, std::string_view v) {
            c.*field = parse_double(k, v);
          },
          [field](const ScenarioConfig& c) { return format_double(c.*field); }};
}

template <typename Sub, typename Field>
KeyInfo nested_double(const char* unit, const char* doc, Sub sub, Field field) {
  return {unit, doc,
          [sub, field](ScenarioConfig& c, std::string_view k, std::string_view v) {
            (c.*sub).*field = parse_double(k, v);
          },
          [sub, field](const ScenarioConfig& c) { return format_double((c.*sub).*field); }};
}

template <typename Sub, typename Field>
KeyInfo nested_int(const char* unit, const char* doc, Sub sub, Field field) {
  return {unit, doc,
          [sub, field](ScenarioConfig& c, std::string_view k, std::string_view v) {
            (c.*sub).*field = parse_int(k, v);
          },
          [sub, field](const ScenarioConfig& c) { return std::to_string((c.*sub).*field); }};
}

KeyInfo db_alias(const char* unit, const char* doc, double ScenarioConfig::*field, double sign) {
  return {unit, doc,
          [field, sign](ScenarioConfig& c, std::string_view k, std::string_view v) {
            c.*field = db_to_linear(sign * parse_double(k, v));
          },
          {}};
}

// Ordered: dump_scenario and scenario_schema iterate in this order.
const std::vector<std::pair<std::string, KeyInfo>>& key_table() {
  using C = ScenarioConfig;
  static const std::vector<std::pair<std::string, KeyInfo>> table = {
      {"groups", int_key("count", "multicast groups K (one beam each)", &C::groups)},
      {"arises", int_key("count", "aerial RIS platforms J, 0 <= J <= K", &C::arises)},
      {"antennas", int_key("count", "satellite antennas / feeds L", &C::antennas)},
      {"subsurfaces", int_key("count", "subsurfaces per ARIS N", &C::subsurfaces)},
      {"elements_per_subsurface",
       int_key("count", "elements sharing one phase shift (coherent gain)", &C::elements_per_subsurface)},
      {"intended_per_group", int_key("count", "intended users per group M_k", &C::intended_per_group)},
      {"eavesdroppers_per_group",
       int_key("count", "eavesdroppers per group E_k", &C::eavesdroppers_per_group)},
      {"power_w", double_key("W", "total satellite transmit power P_T", &C::power_w)},
      {"sat_altitude_m", double_key("m", "satellite altitude", &C::sat_altitude_m)},
      {"aris_altitude_m", double_key("m", "ARIS hovering altitude H", &C::aris_altitude_m)},
      {"group_radius_m", double_key("m", "radius of each user group", &C::group_radius_m)},
      {"group_spacing_m",
       double_key("m", "distance between adjacent group centers", &C::group_spacing_m)},
      {"layout",
       {"ring|line", "group-center layout",
        [](C& c, std::string_view k, std::string_view v) {
          const std::string s = trim(v);
          if (s == "ring") c.layout = GroupLayout::ring;
          else if (s == "line") c.layout = GroupLayout::line;
          else throw Error(ErrorCode::parse, "key '" + std::string(k) + "': expected ring or line");
        },
        [](const C& c) { return std::string(c.layout == GroupLayout::ring ? "ring" : "line"); }}},
      {"carrier_hz", double_key("Hz", "carrier frequency", &C::carrier_hz)},
      {"bandwidth_hz", double_key("Hz", "processing bandwidth B", &C::bandwidth_hz)},
      {"noise_temp_k", double_key("K", "receiver noise temperature T", &C::noise_temp_k)},
      {"gmax_linear", double_key("linear", "satellite maximum beam gain G_max", &C::gmax_linear)},
      {"gmax_dbi", db_alias("dBi", "satellite maximum beam gain (alias of gmax_linear)", &C::gmax_linear, 1.0)},
      {"phi3db_rad", double_key("rad", "3 dB beam half-angle", &C::phi3db_rad)},
      {"element_spacing_ratio",
       double_key("d/lambda", "ARIS element spacing over wavelength", &C::element_spacing_ratio)},
      {"pathloss_exponent", double_key("-", "air-ground path loss exponent beta", &C::pathloss_exponent)},
      {"ref_loss_linear", double_key("linear", "path gain at 1 m, L0", &C::ref_loss_linear)},
      {"ref_loss_db", db_alias("dB", "path loss at 1 m (alias of ref_loss_linear, L0 = 10^(-dB/10))",
                               &C::ref_loss_linear, -1.0)},
      {"rician_linear", double_key("linear", "Rician K-factor rho", &C::rician_linear)},
      {"rician_db", db_alias("dB", "Rician K-factor (alias of rician_linear)", &C::rician_linear, 1.0)},
      {"rain_mu", double_key("ln dB", "mean of ln(rain attenuation in dB)", &C::rain_mu)},
      {"rain_sigma", double_key("ln dB", "std-dev of ln(rain attenuation in dB)", &C::rain_sigma)},
      {"wiretap_bps_hz",
       {"bit/s/Hz", "eavesdropper rate threshold: one value or one per group",
        [](C& c, std::string_view k, std::string_view v) {
          std::vector<double> values;
          std::string item;
          std::istringstream in{std::string(v)};
          while (std::getline(in, item, ',')) values.push_back(parse_double(k, item));
          if (values.empty()) throw Error(ErrorCode::parse, "key 'wiretap_bps_hz': empty list");
          c.wiretap_bps_hz = values;
        },
        [](const C& c) {
          std::string out;
          for (size_t i = 0; i < c.wiretap_bps_hz.size(); ++i) {
            if (i) out += ",";
            out += format_double(c.wiretap_bps_hz[i]);
          }
          return out;
        }}},
      {"penalty_tau", double_key("-", "binary-relaxation penalty factor tau", &C::penalty_tau)},
      {"tau_escalation",
       {"bool", "double tau after every large-scale round (capped at 1e3)",
        [](C& c, std::string_view k, std::string_view v) { c.tau_escalation = parse_bool(k, v); },
        [](const C& c) { return std::string(c.tau_escalation ? "true" : "false"); }}},
      {"region_x_min", nested_double("m", "deployment region lower x bound", &C::region, &Region::x_min)},
      {"region_x_max", nested_double("m", "deployment region upper x bound", &C::region, &Region::x_max)},
      {"region_y_min", nested_double("m", "deployment region lower y bound", &C::region, &Region::y_min)},
      {"region_y_max", nested_double("m", "deployment region upper y bound", &C::region, &Region::y_max)},
      {"eps_t", nested_double("-", "transmit beamforming loop threshold", &C::eps, &Thresholds::tx)},
      {"eps_r", nested_double("rad", "reflection loop threshold", &C::eps, &Thresholds::reflection)},
      {"eps_a", nested_double("-", "association SCA threshold", &C::eps, &Thresholds::association)},
      {"eps_d", nested_double("m", "deployment SCA threshold", &C::eps, &Thresholds::deployment)},
      {"eps_s", nested_double("-", "small-scale relative threshold", &C::eps, &Thresholds::small_scale)},
      {"eps_l", nested_double("-", "large-scale relative threshold", &C::eps, &Thresholds::large_scale)},
      {"eps", nested_double("-", "outer relative objective threshold", &C::eps, &Thresholds::outer)},
      {"max_tx_iters", nested_int("count", "cap on transmit MM iterations", &C::caps, &IterationCaps::tx)},
      {"max_ris_iters",
       nested_int("count", "cap on reflection MM iterations", &C::caps, &IterationCaps::reflection)},
      {"max_assoc_iters",
       nested_int("count", "cap on association SCA steps", &C::caps, &IterationCaps::association)},
      {"max_deploy_iters",
       nested_int("count", "cap on deployment SCA steps", &C::caps, &IterationCaps::deployment)},
      {"max_small_iters",
       nested_int("count", "cap on small-scale rounds", &C::caps, &IterationCaps::small_scale)},
      {"max_large_iters",
       nested_int("count", "cap on large-scale rounds", &C::caps, &IterationCaps::large_scale)},
      {"max_outer_iters", nested_int("count", "cap on outer BCD rounds", &C::caps, &IterationCaps::outer)},
      {"tx_randomizations",
       int_key("count", "Gaussian randomization draws for beamformers", &C::tx_randomizations)},
      {"ris_randomizations",
       int_key("count", "Gaussian randomization draws for phase shifts", &C::ris_randomizations)},
  };
  return table;
}

const KeyInfo* find_key(std::string_view key) {
  for (const auto& [name, info] : key_table()) {
    if (name == key) return &info;
  }
  return nullptr;
}

// Keys that write the same field; setting more than one in a text is an error.
std::string canonical_field(const std::string& key) {
  if (key == "gmax_dbi") return "gmax_linear";
  if (key == "ref_loss_db") return "ref_loss_linear";
  if (key == "rician_db") return "rician_linear";
  return key;
}

void require(bool ok, const char* field, const std::string& msg) {
  if (!ok) throw Error(ErrorCode::invalid_config, std::string(field) + ": " + msg);
}

}  // namespace

void validate(const ScenarioConfig& c) {
  require(c.groups >= 1, "groups", "K must be >= 1");
  require(c.arises >= 0, "arises", "J must be >= 0");
  require(c.arises <= c.groups, "arises", "J exceeds K");
  require(c.antennas >= 1, "antennas", "L must be >= 1");
  require(c.subsurfaces >= 1, "subsurfaces", "N must be >= 1");
  require(c.elements_per_subsurface >= 1, "elements_per_subsurface", "must be >= 1");
  require(c.intended_per_group >= 1, "intended_per_group", "must be >= 1");
  require(c.eavesdroppers_per_group >= 0, "eavesdroppers_per_group", "must be >= 0");
  require(c.power_w > 0, "power_w", "must be > 0");
  require(c.sat_altitude_m > 0, "sat_altitude_m", "must be > 0");
  require(c.aris_altitude_m > 0, "aris_altitude_m", "must be > 0");
  require(c.group_radius_m > 0, "group_radius_m", "must be > 0");
  require(c.group_spacing_m > 0, "group_spacing_m", "must be > 0");
  require(c.carrier_hz > 0, "carrier_hz", "must be > 0");
  require(c.bandwidth_hz > 0, "bandwidth_hz", "must be > 0");
  require(c.noise_temp_k > 0, "noise_temp_k", "must be > 0");
  require(c.gmax_linear > 0, "gmax_linear", "must be > 0");
  require(c.phi3db_rad > 0 && c.phi3db_rad < kPi / 2, "phi3db_rad", "must lie in (0, pi/2)");
  require(c.element_spacing_ratio > 0, "element_spacing_ratio", "must be > 0");
  require(c.pathloss_exponent > 0, "pathloss_exponent", "must be > 0");
  require(c.ref_loss_linear > 0, "ref_loss_linear", "must be > 0");
  require(c.rician_linear > 0, "rician_linear", "must be > 0");
  require(c.rain_sigma >= 0, "rain_sigma", "must be >= 0");
  require(c.wiretap_bps_hz.size() == 1 || static_cast<int>(c.wiretap_bps_hz.size()) == c.groups,
          "wiretap_bps_hz", "needs one value or one per group");
  for (double u : c.wiretap_bps_hz) require(u >= 0, "wiretap_bps_hz", "must be >= 0");
  require(c.penalty_tau > 0, "penalty_tau", "must be > 0");
  require(c.region.x_min < c.region.x_max, "region_x_min", "must be below region_x_max");
  require(c.region.y_min < c.region.y_max, "region_y_min", "must be below region_y_max");
  const double eps[] = {c.eps.tx, c.eps.reflection, c.eps.association, c.eps.deployment,
                        c.eps.small_scale, c.eps.large_scale, c.eps.outer};
  for (double e : eps) require(e > 0, "eps", "all thresholds must be > 0");
  const int caps[] = {c.caps.tx, c.caps.reflection, c.caps.association, c.caps.deployment,
                      c.caps.small_scale, c.caps.large_scale, c.caps.outer};
  for (int n : caps) require(n >= 1, "max_*_iters", "all iteration caps must be >= 1");
  require(c.tx_randomizations >= 1, "tx_randomizations", "must be >= 1");
  require(c.ris_randomizations >= 1, "ris_randomizations", "must be >= 1");
}

void apply_setting(ScenarioConfig& cfg, std::string_view key, std::string_view value) {
  const KeyInfo* info = find_key(key);
  if (info == nullptr) throw Error(ErrorCode::parse, "unknown key '" + std::string(key) + "'");
  info->set(cfg, key, value);
}

ScenarioConfig load_scenario(std::string_view text) {
  return load_scenario(text, ScenarioConfig::full_defaults());
}

ScenarioConfig load_scenario(std::string_view text, ScenarioConfig base) {
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::parse, "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(stripped).substr(0, eq));
    const std::string value = trim(std::string_view(stripped).substr(eq + 1));
    if (!seen.insert(canonical_field(key)).second) {
      throw Error(ErrorCode::parse, "line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    try {
      apply_setting(base, key, value);
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  validate(base);
  return base;
}

std::string dump_scenario(const ScenarioConfig& cfg) {
  std::string out;
  for (const auto& [name, info] : key_table()) {
    if (!info.get) continue;
    out += name + " = " + info.get(cfg) + "\n";
  }
  return out;
}

std::string scenario_schema() {
  std::string out;
  for (const auto& [name, info] : key_table()) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-24s [%s] %s\n", name.c_str(), info.unit, info.doc);
    out += buf;
  }
  return out;
}

}  // namespace arisec
