// Copyright 2026 The arisec Authors
// SPDX-License-Identifier: Apache-2.0

#include "arisec/arisec.h"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "arisec/bcd.hpp"
#include "arisec/config.hpp"
#include "arisec/experiment.hpp"

struct arisec_config {
  arisec::ScenarioConfig cfg;
};

struct arisec_run {
  arisec::BcdResult result;
};

struct arisec_experiment {
  arisec::ExperimentSpec spec;
};

struct arisec_table {
  arisec::ResultsTable table;
};

namespace {

thread_local std::string g_last_error;

arisec_status map_code(arisec::ErrorCode code) {
  switch (code) {
    case arisec::ErrorCode::parse: return ARISEC_ERR_PARSE;
    case arisec::ErrorCode::invalid_config: return ARISEC_ERR_INVALID_CONFIG;
    case arisec::ErrorCode::dimension: return ARISEC_ERR_DIMENSION;
    case arisec::ErrorCode::io: return ARISEC_ERR_IO;
    case arisec::ErrorCode::infeasible: return ARISEC_ERR_INFEASIBLE;
    case arisec::ErrorCode::numerical: return ARISEC_ERR_NUMERICAL;
    case arisec::ErrorCode::argument: return ARISEC_ERR_ARGUMENT;
  }
  return ARISEC_ERR_INTERNAL;
}

// Runs `body`, translating exceptions into status codes and the thread's last error.
template <typename F>
arisec_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return ARISEC_OK;
  } catch (const arisec::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return ARISEC_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ARISEC_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw arisec::Error(arisec::ErrorCode::argument, what);
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::string read_file(const char* path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw arisec::Error(arisec::ErrorCode::io, std::string("cannot open '") + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void copy_out(const std::vector<double>& values, double* out, size_t capacity, size_t* count) {
  require(count != nullptr, "count must not be null");
  require(out != nullptr || capacity == 0, "output buffer is null");
  *count = values.size();
  for (size_t i = 0; i < values.size() && i < capacity; ++i) out[i] = values[i];
}

}  // namespace

extern "C" {

const char* arisec_version(void) { return "1.0.0"; }

const char* arisec_last_error(void) { return g_last_error.c_str(); }

const char* arisec_status_name(arisec_status status) {
  switch (status) {
    case ARISEC_OK: return "ok";
    case ARISEC_ERR_PARSE: return "parse error";
    case ARISEC_ERR_INVALID_CONFIG: return "invalid configuration";
    case ARISEC_ERR_DIMENSION: return "dimension mismatch";
    case ARISEC_ERR_IO: return "i/o error";
    case ARISEC_ERR_INFEASIBLE: return "infeasible";
    case ARISEC_ERR_NUMERICAL: return "numerical failure";
    case ARISEC_ERR_ARGUMENT: return "invalid argument";
    case ARISEC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void arisec_string_free(char* text) { std::free(text); }

arisec_status arisec_config_new(const char* preset, arisec_config** out) {
  return guarded([&] {
    require(preset && out, "preset and out must not be null");
    const std::string p = preset;
    arisec::ScenarioConfig cfg;
    if (p == "desk") {
      cfg = arisec::ScenarioConfig::desk_defaults();
    } else if (p == "full") {
      cfg = arisec::ScenarioConfig::full_defaults();
    } else {
      throw arisec::Error(arisec::ErrorCode::argument, "preset must be 'desk' or 'full'");
    }
    *out = new arisec_config{cfg};
  });
}

arisec_status arisec_config_parse(const char* text, arisec_config** out) {
  return guarded([&] {
    require(text && out, "text and out must not be null");
    *out = new arisec_config{arisec::load_scenario(text)};
  });
}

arisec_status arisec_config_load(const char* path, arisec_config** out) {
  return guarded([&] {
    require(path && out, "path and out must not be null");
    *out = new arisec_config{arisec::load_scenario(read_file(path))};
  });
}

arisec_status arisec_config_set(arisec_config* config, const char* key, const char* value) {
  return guarded([&] {
    require(config && key && value, "config, key and value must not be null");
    arisec::ScenarioConfig next = config->cfg;
    arisec::apply_setting(next, key, value);
    config->cfg = next;
  });
}

arisec_status arisec_config_validate(const arisec_config* config) {
  return guarded([&] {
    require(config, "config must not be null");
    arisec::validate(config->cfg);
  });
}

arisec_status arisec_config_dump(const arisec_config* config, char** out_text) {
  return guarded([&] {
    require(config && out_text, "config and out_text must not be null");
    *out_text = duplicate(arisec::dump_scenario(config->cfg));
  });
}

arisec_status arisec_config_schema(char** out_text) {
  return guarded([&] {
    require(out_text, "out_text must not be null");
    *out_text = duplicate(arisec::scenario_schema());
  });
}

void arisec_config_free(arisec_config* config) { delete config; }

arisec_status arisec_run_bcd(const arisec_config* config, uint64_t seed, const char* scheme, arisec_run** out) {
  return guarded([&] {
    require(config && scheme && out, "config, scheme and out must not be null");
    arisec::validate(config->cfg);
    arisec::BcdOptions opts;
    opts.scheme = arisec::parse_scheme(scheme);
    *out = new arisec_run{arisec::run_bcd(config->cfg, seed, opts)};
  });
}

arisec_status arisec_run_get_summary(const arisec_run* run, arisec_run_summary* out) {
  return guarded([&] {
    require(run && out, "run and out must not be null");
    const auto& r = run->result;
    arisec_run_summary s{};
    s.objective = r.report.objective;
    s.sum_rate = r.report.sum_rate;
    for (double e : r.report.group_max_eaves) s.max_eaves_rate = std::max(s.max_eaves_rate, e);
    s.wiretap_residual = r.feasibility.max_wiretap();
    s.power_residual = r.feasibility.power;
    s.feasible = r.feasibility.feasible() ? 1 : 0;
    s.converged = r.trace.converged ? 1 : 0;
    s.outer_iterations = static_cast<int>(r.trace.outer.size());
    s.audit_violations = r.trace.audit_violations;
    s.channel_hash = r.channel_hash;
    *out = s;
  });
}

arisec_status arisec_run_group_rates(const arisec_run* run, double* out, size_t capacity, size_t* count) {
  return guarded([&] {
    require(run, "run must not be null");
    copy_out(run->result.report.group_min_intended, out, capacity, count);
  });
}

arisec_status arisec_run_positions(const arisec_run* run, double* out, size_t capacity, size_t* count) {
  return guarded([&] {
    require(run, "run must not be null");
    std::vector<double> xy;
    for (const auto& q : run->result.state.q) {
      xy.push_back(q.x);
      xy.push_back(q.y);
    }
    copy_out(xy, out, capacity, count);
  });
}

arisec_status arisec_run_association(const arisec_run* run, double* out, size_t capacity, size_t* count) {
  return guarded([&] {
    require(run, "run must not be null");
    const auto& chi = run->result.state.chi;
    std::vector<double> values;
    for (Eigen::Index j = 0; j < chi.rows(); ++j) {
      for (Eigen::Index k = 0; k < chi.cols(); ++k) values.push_back(chi(j, k));
    }
    copy_out(values, out, capacity, count);
  });
}

arisec_status arisec_run_trace(const arisec_run* run, double* out, size_t capacity, size_t* count) {
  return guarded([&] {
    require(run, "run must not be null");
    std::vector<double> values;
    for (const auto& o : run->result.trace.outer) values.push_back(o.objective);
    copy_out(values, out, capacity, count);
  });
}

void arisec_run_free(arisec_run* run) { delete run; }

arisec_status arisec_experiment_load(const char* path, arisec_experiment** out) {
  return guarded([&] {
    require(path && out, "path and out must not be null");
    *out = new arisec_experiment{arisec::load_experiment(path)};
  });
}

arisec_status arisec_experiment_parse(const char* text, const char* base_dir, arisec_experiment** out) {
  return guarded([&] {
    require(text && out, "text and out must not be null");
    *out = new arisec_experiment{arisec::parse_experiment(text, base_dir ? base_dir : "")};
  });
}

arisec_status arisec_experiment_figure(int figure, arisec_experiment** out) {
  return guarded([&] {
    require(out, "out must not be null");
    *out = new arisec_experiment{arisec::figure_spec(figure)};
  });
}

arisec_status arisec_experiment_set_trials(arisec_experiment* experiment, int trials) {
  return guarded([&] {
    require(experiment, "experiment must not be null");
    if (trials < 1) throw arisec::Error(arisec::ErrorCode::invalid_config, "trials must be >= 1");
    experiment->spec.trials = trials;
  });
}

arisec_status arisec_experiment_set_seed(arisec_experiment* experiment, uint64_t seed) {
  return guarded([&] {
    require(experiment, "experiment must not be null");
    experiment->spec.seed = seed;
  });
}

arisec_status arisec_experiment_set_scenario(arisec_experiment* experiment, const char* key, const char* value) {
  return guarded([&] {
    require(experiment && key && value, "experiment, key and value must not be null");
    arisec::ExperimentSpec next = experiment->spec;
    arisec::apply_setting(next.scenario, key, value);
    arisec::validate(next);
    experiment->spec = std::move(next);
  });
}

arisec_status arisec_experiment_name(const arisec_experiment* experiment, char** out_text) {
  return guarded([&] {
    require(experiment && out_text, "experiment and out_text must not be null");
    *out_text = duplicate(experiment->spec.name);
  });
}

arisec_status arisec_experiment_grid_size(const arisec_experiment* experiment, size_t* out) {
  return guarded([&] {
    require(experiment && out, "experiment and out must not be null");
    *out = arisec::grid_size(experiment->spec);
  });
}

void arisec_experiment_free(arisec_experiment* experiment) { delete experiment; }

arisec_status arisec_experiment_run(const arisec_experiment* experiment, int workers, arisec_progress_fn progress,
                                    void* user, arisec_table** out) {
  return guarded([&] {
    require(experiment && out, "experiment and out must not be null");
    arisec::RunOptions opts;
    opts.workers = workers;
    if (progress) opts.progress = [progress, user](size_t done, size_t total) { progress(done, total, user); };
    *out = new arisec_table{arisec::run_experiment(experiment->spec, opts)};
  });
}

arisec_status arisec_table_row_count(const arisec_table* table, size_t* out) {
  return guarded([&] {
    require(table && out, "table and out must not be null");
    *out = table->table.rows.size();
  });
}

arisec_status arisec_table_failed_count(const arisec_table* table, size_t* out) {
  return guarded([&] {
    require(table && out, "table and out must not be null");
    size_t n = 0;
    for (const auto& r : table->table.rows) n += r.status == "ok" ? 0 : 1;
    *out = n;
  });
}

arisec_status arisec_table_to_csv(const arisec_table* table, char** out_text) {
  return guarded([&] {
    require(table && out_text, "table and out_text must not be null");
    *out_text = duplicate(arisec::to_csv(table->table));
  });
}

arisec_status arisec_table_to_json(const arisec_table* table, char** out_text) {
  return guarded([&] {
    require(table && out_text, "table and out_text must not be null");
    *out_text = duplicate(arisec::to_json(table->table));
  });
}

arisec_status arisec_table_from_json(const char* text, arisec_table** out) {
  return guarded([&] {
    require(text && out, "text and out must not be null");
    *out = new arisec_table{arisec::from_json(text)};
  });
}

arisec_status arisec_table_summary_csv(const arisec_table* table, char** out_text) {
  return guarded([&] {
    require(table && out_text, "table and out_text must not be null");
    std::ostringstream s;
    s << "point";
    for (const auto& a : table->table.axis_names) s << "," << a;
    s << ",scheme,runs,mean_objective\n";
    for (const auto& p : arisec::summarize(table->table)) {
      s << p.point;
      char buf[40];
      for (double v : p.axis_values) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        s << "," << buf;
      }
      std::snprintf(buf, sizeof buf, "%.17g", p.mean_objective);
      s << "," << arisec::to_string(p.scheme) << "," << p.runs << "," << buf << "\n";
    }
    *out_text = duplicate(s.str());
  });
}

arisec_status arisec_table_write(const arisec_table* table, const char* dir, const char* stem, int timing) {
  return guarded([&] {
    require(table && dir && stem, "table, dir and stem must not be null");
    arisec::write_results(table->table, dir, stem, timing != 0);
  });
}

void arisec_table_free(arisec_table* table) { delete table; }

}  // extern "C"
