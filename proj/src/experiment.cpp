// Copyright 2026 The arisec Authors
// SPDX-License-Identifier: Apache-2.0

#include "arisec/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace arisec {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in{std::string(s)};
  while (std::getline(in, item, ',')) {
    const std::string t = trim(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

double parse_number(const std::string& key, const std::string& text) {
  try {
    size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::parse, "spec key '" + key + "': '" + text + "' is not a number");
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot write '" + path.string() + "'");
  out << data;
  if (!out) throw Error(ErrorCode::io, "write failed for '" + path.string() + "'");
}

ordered_json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

double number_from(const ordered_json& j) { return j.is_null() ? std::nan("") : j.get<double>(); }

ResultRow failed_row(std::size_t point, const std::vector<double>& axis_values, std::uint64_t seed, Scheme scheme,
                     const std::string& what) {
  ResultRow r;
  r.point = point;
  r.axis_values = axis_values;
  r.seed = seed;
  r.scheme = scheme;
  r.status = "error: " + what;
  const double nan = std::nan("");
  r.objective = r.sum_rate = r.max_eaves_rate = r.wiretap_residual = r.power_residual = r.worst_drop = nan;
  return r;
}

ResultRow make_row(std::size_t point, const std::vector<double>& axis_values, std::uint64_t seed, Scheme scheme,
                   const BcdResult& res, double seconds) {
  ResultRow r;
  r.point = point;
  r.axis_values = axis_values;
  r.seed = seed;
  r.scheme = scheme;
  r.objective = res.report.objective;
  r.sum_rate = res.report.sum_rate;
  r.group_rates = res.report.group_min_intended;
  r.max_eaves_rate = 0.0;
  for (double e : res.report.group_max_eaves) r.max_eaves_rate = std::max(r.max_eaves_rate, e);
  r.wiretap_residual = res.feasibility.max_wiretap();
  r.power_residual = res.feasibility.power;
  r.feasible = res.feasibility.feasible();
  r.outer_iterations = static_cast<int>(res.trace.outer.size());
  for (const auto& o : res.trace.outer) {
    r.inner_iterations += o.tx_iterations + o.reflection_iterations + o.association_iterations + o.deployment_iterations;
  }
  r.converged = res.trace.converged;
  r.audit_violations = res.trace.audit_violations;
  r.worst_drop = res.trace.worst_drop;
  for (const auto& e : res.trace.rounding) r.rounding_rejected += (e.changed && !e.accepted) ? 1 : 0;
  r.channel_hash = res.channel_hash;
  r.seconds = seconds;
  return r;
}

}  // namespace

const std::vector<std::string>& supported_axes() {
  static const std::vector<std::string> axes = {"elements_per_subsurface", "subsurfaces",   "wiretap_bps_hz",
                                                "pathloss_exponent",       "power_w",       "aris_altitude_m"};
  return axes;
}

ExperimentSpec parse_experiment(std::string_view text, const std::filesystem::path& base_dir) {
  ExperimentSpec spec;
  std::vector<std::pair<std::string, std::string>> sets;
  std::map<std::string, int> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::parse, "spec line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (seen[key]++) throw Error(ErrorCode::parse, "spec line " + std::to_string(lineno) + ": duplicate key '" + key + "'");

    if (key == "name") {
      spec.name = value;
    } else if (key == "scenario") {
      if (value == "desk") {
        spec.scenario = ScenarioConfig::desk_defaults();
      } else if (value == "full") {
        spec.scenario = ScenarioConfig::full_defaults();
      } else {
        spec.scenario = load_scenario(read_file(base_dir / value));
      }
    } else if (key.rfind("set.", 0) == 0) {
      sets.emplace_back(key.substr(4), value);
    } else if (key.rfind("axis.", 0) == 0) {
      SweepAxis axis;
      axis.key = key.substr(5);
      const auto& ok = supported_axes();
      if (std::find(ok.begin(), ok.end(), axis.key) == ok.end()) {
        throw Error(ErrorCode::parse, "spec key '" + key + "': '" + axis.key + "' cannot be swept");
      }
      for (const auto& item : split_list(value)) axis.values.push_back(parse_number(key, item));
      spec.axes.push_back(std::move(axis));
    } else if (key == "trials") {
      spec.trials = static_cast<int>(parse_number(key, value));
    } else if (key == "seed") {
      spec.seed = static_cast<std::uint64_t>(parse_number(key, value));
    } else if (key == "schemes") {
      spec.schemes.clear();
      for (const auto& item : split_list(value)) spec.schemes.push_back(parse_scheme(item));
    } else {
      throw Error(ErrorCode::parse, "spec line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  for (const auto& [k, v] : sets) apply_setting(spec.scenario, k, v);
  validate(spec);
  return spec;
}

ExperimentSpec load_experiment(const std::filesystem::path& path) {
  return parse_experiment(read_file(path), path.parent_path());
}

void validate(const ExperimentSpec& spec) {
  if (spec.trials < 1) throw Error(ErrorCode::invalid_config, "trials must be >= 1");
  if (spec.schemes.empty()) throw Error(ErrorCode::invalid_config, "at least one scheme is required");
  for (const auto& a : spec.axes) {
    if (a.values.empty()) throw Error(ErrorCode::invalid_config, "axis '" + a.key + "' has no values");
  }
  for (std::size_t p = 0; p < grid_size(spec); ++p) validate(point_config(spec, p));
}

ExperimentSpec figure_spec(int figure) {
  ExperimentSpec spec;
  spec.name = "fig" + std::to_string(figure);
  const SweepAxis n_axis{"subsurfaces", {4, 8}};
  // Above the saturation point of the wiretap sweep, so the threshold does not mask the
  // swept parameter.
  if (figure != 4) spec.scenario.wiretap_bps_hz = {30.0};
  switch (figure) {
    case 3:
      spec.axes = {{"elements_per_subsurface", {4, 8, 16}}, n_axis};
      break;
    case 4:
      spec.axes = {{"wiretap_bps_hz", {0.5, 1, 2, 4, 30, 60}}, n_axis};
      break;
    case 5:
      spec.axes = {{"pathloss_exponent", {2.0, 2.3, 2.6}}, n_axis};
      break;
    case 6:
      spec.axes = {{"power_w", {25, 50, 100}}, n_axis};
      break;
    case 7:
      spec.axes = {{"aris_altitude_m", {50, 100, 150, 200}}, {"pathloss_exponent", {2.0, 2.3, 2.6}}};
      break;
    default:
      throw Error(ErrorCode::argument, "figure must be 3, 4, 5, 6 or 7");
  }
  return spec;
}

std::size_t grid_size(const ExperimentSpec& spec) {
  std::size_t n = 1;
  for (const auto& a : spec.axes) n *= a.values.size();
  return n;
}

std::vector<double> grid_point(const ExperimentSpec& spec, std::size_t p) {
  std::vector<double> values(spec.axes.size());
  for (std::size_t i = spec.axes.size(); i-- > 0;) {
    const std::size_t n = spec.axes[i].values.size();
    values[i] = spec.axes[i].values[p % n];
    p /= n;
  }
  return values;
}

ScenarioConfig point_config(const ExperimentSpec& spec, std::size_t p) {
  ScenarioConfig cfg = spec.scenario;
  const auto values = grid_point(spec, p);
  for (std::size_t i = 0; i < values.size(); ++i) apply_setting(cfg, spec.axes[i].key, fmt(values[i]));
  return cfg;
}

ResultsTable run_experiment(const ExperimentSpec& spec, const RunOptions& options) {
  validate(spec);
  ResultsTable table;
  for (const auto& a : spec.axes) table.axis_names.push_back(a.key);
  const std::size_t points = grid_size(spec);
  const std::size_t trials = static_cast<std::size_t>(spec.trials);
  const std::size_t schemes = spec.schemes.size();
  const std::size_t tasks = points * trials;
  table.rows.resize(tasks * schemes);

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  auto worker = [&]() {
    for (std::size_t task = next++; task < tasks; task = next++) {
      const std::size_t p = task / trials;
      const std::uint64_t seed = spec.seed + task % trials;
      const auto values = grid_point(spec, p);
      const ScenarioConfig cfg = point_config(spec, p);
      Topology topo;
      FadingDraws draws;
      std::string sample_error;
      try {
        topo = sample_topology(cfg, seed);
        draws = sample_fading(cfg, topo, seed);
      } catch (const std::exception& e) {
        sample_error = e.what();
      }
      for (std::size_t s = 0; s < schemes; ++s) {
        const Scheme scheme = spec.schemes[s];
        ResultRow& slot = table.rows[task * schemes + s];
        if (!sample_error.empty()) {
          slot = failed_row(p, values, seed, scheme, sample_error);
          continue;
        }
        try {
          const auto t0 = std::chrono::steady_clock::now();
          BcdOptions opts;
          opts.scheme = scheme;
          const BcdResult res = run_bcd(cfg, topo, draws, seed, opts);
          const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
          slot = make_row(p, values, seed, scheme, res, secs);
        } catch (const std::exception& e) {
          slot = failed_row(p, values, seed, scheme, e.what());
        }
      }
      const std::size_t finished = ++done;
      if (options.progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        options.progress(finished, tasks);
      }
    }
  };
  const int workers = std::max(1, std::min<int>(options.workers, static_cast<int>(tasks)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return table;
}

std::string to_csv(const ResultsTable& table) {
  std::ostringstream out;
  out << "# schema=" << table.schema << "\n";
  out << "point";
  for (const auto& a : table.axis_names) out << "," << a;
  out << ",seed,scheme,status,objective,sum_rate,group_rates,max_eaves_rate,wiretap_residual,power_residual,"
         "feasible,outer_iterations,inner_iterations,converged,audit_violations,worst_drop,rounding_rejected,"
         "channel_hash\n";
  for (const auto& r : table.rows) {
    out << r.point;
    for (double v : r.axis_values) out << "," << fmt(v);
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    out << "," << r.seed << "," << to_string(r.scheme) << "," << status << "," << fmt(r.objective) << ","
        << fmt(r.sum_rate) << ",";
    for (std::size_t k = 0; k < r.group_rates.size(); ++k) out << (k ? ";" : "") << fmt(r.group_rates[k]);
    out << "," << fmt(r.max_eaves_rate) << "," << fmt(r.wiretap_residual) << "," << fmt(r.power_residual) << ","
        << (r.feasible ? 1 : 0) << "," << r.outer_iterations << "," << r.inner_iterations << ","
        << (r.converged ? 1 : 0) << "," << r.audit_violations << "," << fmt(r.worst_drop) << ","
        << r.rounding_rejected << "," << hex64(r.channel_hash) << "\n";
  }
  return out.str();
}

std::string to_json(const ResultsTable& table) {
  ordered_json doc;
  doc["schema"] = table.schema;
  doc["axes"] = table.axis_names;
  ordered_json rows = ordered_json::array();
  for (const auto& r : table.rows) {
    ordered_json j;
    j["point"] = r.point;
    ordered_json values = ordered_json::array();
    for (double v : r.axis_values) values.push_back(number(v));
    j["axis_values"] = values;
    j["seed"] = r.seed;
    j["scheme"] = to_string(r.scheme);
    j["status"] = r.status;
    j["objective"] = number(r.objective);
    j["sum_rate"] = number(r.sum_rate);
    ordered_json rates = ordered_json::array();
    for (double v : r.group_rates) rates.push_back(number(v));
    j["group_rates"] = rates;
    j["max_eaves_rate"] = number(r.max_eaves_rate);
    j["wiretap_residual"] = number(r.wiretap_residual);
    j["power_residual"] = number(r.power_residual);
    j["feasible"] = r.feasible;
    j["outer_iterations"] = r.outer_iterations;
    j["inner_iterations"] = r.inner_iterations;
    j["converged"] = r.converged;
    j["audit_violations"] = r.audit_violations;
    j["worst_drop"] = number(r.worst_drop);
    j["rounding_rejected"] = r.rounding_rejected;
    j["channel_hash"] = hex64(r.channel_hash);
    rows.push_back(std::move(j));
  }
  doc["rows"] = std::move(rows);
  return doc.dump(1) + "\n";
}

ResultsTable from_json(std::string_view text) {
  ResultsTable table;
  try {
    const ordered_json doc = ordered_json::parse(text);
    table.schema = doc.at("schema").get<std::string>();
    if (table.schema != kResultsSchema) throw Error(ErrorCode::parse, "unsupported results schema '" + table.schema + "'");
    table.axis_names = doc.at("axes").get<std::vector<std::string>>();
    for (const auto& j : doc.at("rows")) {
      ResultRow r;
      r.point = j.at("point").get<std::size_t>();
      for (const auto& v : j.at("axis_values")) r.axis_values.push_back(number_from(v));
      r.seed = j.at("seed").get<std::uint64_t>();
      r.scheme = parse_scheme(j.at("scheme").get<std::string>());
      r.status = j.at("status").get<std::string>();
      r.objective = number_from(j.at("objective"));
      r.sum_rate = number_from(j.at("sum_rate"));
      for (const auto& v : j.at("group_rates")) r.group_rates.push_back(number_from(v));
      r.max_eaves_rate = number_from(j.at("max_eaves_rate"));
      r.wiretap_residual = number_from(j.at("wiretap_residual"));
      r.power_residual = number_from(j.at("power_residual"));
      r.feasible = j.at("feasible").get<bool>();
      r.outer_iterations = j.at("outer_iterations").get<int>();
      r.inner_iterations = j.at("inner_iterations").get<int>();
      r.converged = j.at("converged").get<bool>();
      r.audit_violations = j.at("audit_violations").get<int>();
      r.worst_drop = number_from(j.at("worst_drop"));
      r.rounding_rejected = j.at("rounding_rejected").get<int>();
      r.channel_hash = std::stoull(j.at("channel_hash").get<std::string>(), nullptr, 16);
      table.rows.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse, std::string("results json: ") + e.what());
  }
  return table;
}

std::string timing_csv(const ResultsTable& table) {
  std::ostringstream out;
  out << "point,seed,scheme,seconds\n";
  for (const auto& r : table.rows) {
    out << r.point << "," << r.seed << "," << to_string(r.scheme) << "," << fmt(r.seconds) << "\n";
  }
  return out.str();
}

std::vector<std::filesystem::path> write_results(const ResultsTable& table, const std::filesystem::path& dir,
                                                 const std::string& stem, bool timing) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create '" + dir.string() + "': " + ec.message());
  std::vector<std::filesystem::path> written = {dir / (stem + ".csv"), dir / (stem + ".json")};
  write_file(written[0], to_csv(table));
  write_file(written[1], to_json(table));
  if (timing) {
    written.push_back(dir / (stem + ".timing.csv"));
    write_file(written.back(), timing_csv(table));
  }
  return written;
}

std::vector<PointSummary> summarize(const ResultsTable& table) {
  std::map<std::pair<std::size_t, int>, PointSummary> acc;
  for (const auto& r : table.rows) {
    if (r.status != "ok") continue;
    auto& s = acc[{r.point, static_cast<int>(r.scheme)}];
    s.point = r.point;
    s.axis_values = r.axis_values;
    s.scheme = r.scheme;
    s.mean_objective += r.objective;
    ++s.runs;
  }
  std::vector<PointSummary> out;
  for (auto& [key, s] : acc) {
    if (s.runs > 0) s.mean_objective /= s.runs;
    out.push_back(s);
  }
  return out;
}

}  // namespace arisec
