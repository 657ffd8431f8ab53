// Copyright 2026 The arisec Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end. Talks to the library only through the C interface.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "arisec/arisec.h"

namespace {

constexpr int kExitLibraryError = 1;
constexpr int kExitFailedTrials = 3;

struct Failure {
  arisec_status status;
};

void check(arisec_status s, const char* what) {
  if (s == ARISEC_OK) return;
  std::cerr << "arisec: " << what << ": " << arisec_status_name(s) << ": " << arisec_last_error() << "\n";
  throw Failure{s};
}

struct ExperimentDeleter {
  void operator()(arisec_experiment* e) const { arisec_experiment_free(e); }
};
struct TableDeleter {
  void operator()(arisec_table* t) const { arisec_table_free(t); }
};
struct ConfigDeleter {
  void operator()(arisec_config* c) const { arisec_config_free(c); }
};
using ExperimentPtr = std::unique_ptr<arisec_experiment, ExperimentDeleter>;
using TablePtr = std::unique_ptr<arisec_table, TableDeleter>;
using ConfigPtr = std::unique_ptr<arisec_config, ConfigDeleter>;

std::string take(char* text) {
  std::string s = text ? text : "";
  arisec_string_free(text);
  return s;
}

struct RunFlags {
  long long seed = -1;
  int trials = 0;
  int workers = 1;
  std::string out;
  bool timing = false;
  bool quiet = false;
  std::vector<std::string> sets;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--seed", f.seed, "First trial seed (trial t uses seed + t)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--trials", f.trials, "Monte Carlo trials per grid point")->check(CLI::PositiveNumber);
  cmd->add_option("--workers", f.workers, "Parallel trial workers")->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "Output directory (default: $ARISEC_OUT_DIR or ./results)");
  cmd->add_option("--set", f.sets, "Scenario override key=value, repeatable");
  cmd->add_flag("--timing", f.timing, "Also write a wall-time sidecar CSV");
  cmd->add_flag("--quiet", f.quiet, "No progress output");
}

void progress(size_t done, size_t total, void*) {
  std::fprintf(stderr, "\r  %zu/%zu trials", done, total);
  if (done == total) std::fprintf(stderr, "\n");
}

int execute(arisec_experiment* exp, const RunFlags& f) {
  if (f.seed >= 0) check(arisec_experiment_set_seed(exp, static_cast<uint64_t>(f.seed)), "--seed");
  if (f.trials > 0) check(arisec_experiment_set_trials(exp, f.trials), "--trials");
  for (const auto& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "arisec: --set expects key=value, got '" << kv << "'\n";
      throw Failure{ARISEC_ERR_ARGUMENT};
    }
    check(arisec_experiment_set_scenario(exp, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()), "--set");
  }

  std::string out = f.out;
  if (out.empty()) {
    const char* env = std::getenv("ARISEC_OUT_DIR");
    out = env && *env ? env : "results";
  }
  char* name_c = nullptr;
  check(arisec_experiment_name(exp, &name_c), "experiment name");
  const std::string name = take(name_c);

  arisec_table* raw = nullptr;
  check(arisec_experiment_run(exp, f.workers, f.quiet ? nullptr : progress, nullptr, &raw), "run");
  TablePtr table(raw);
  check(arisec_table_write(table.get(), out.c_str(), name.c_str(), f.timing ? 1 : 0), "write results");

  char* summary = nullptr;
  check(arisec_table_summary_csv(table.get(), &summary), "summary");
  std::cout << take(summary);

  size_t failed = 0;
  check(arisec_table_failed_count(table.get(), &failed), "failed count");
  std::cerr << "wrote " << out << "/" << name << ".{csv,json}" << (f.timing ? " and timing sidecar" : "") << "\n";
  if (failed > 0) {
    std::cerr << "arisec: " << failed << " trial rows failed; see the status column\n";
    return kExitFailedTrials;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secure multicast optimization with aerial reflecting surfaces"};
  app.set_version_flag("--version", std::string(arisec_version()));
  app.require_subcommand(1);

  RunFlags run_flags;
  std::string spec_path;
  auto* run = app.add_subcommand("run", "Run an experiment spec file");
  run->add_option("spec", spec_path, "Experiment spec (key = value text)")->required()->check(CLI::ExistingFile);
  add_run_flags(run, run_flags);

  RunFlags sweep_flags;
  int figure = 0;
  auto* sweep = app.add_subcommand("sweep", "Run a preset figure sweep at desk scale");
  sweep->add_option("--figure", figure, "Figure preset (3-7)")->required()->check(CLI::Range(3, 7));
  add_run_flags(sweep, sweep_flags);

  std::string config_path;
  bool dump = false;
  auto* validate = app.add_subcommand("validate", "Check a scenario config file");
  validate->add_option("config", config_path, "Scenario config (key = value text)")->required()->check(CLI::ExistingFile);
  validate->add_flag("--dump", dump, "Print the canonical form of the config");

  auto* keys = app.add_subcommand("keys", "List every scenario key with its unit");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      arisec_experiment* raw = nullptr;
      check(arisec_experiment_load(spec_path.c_str(), &raw), "load spec");
      ExperimentPtr exp(raw);
      return execute(exp.get(), run_flags);
    }
    if (*sweep) {
      arisec_experiment* raw = nullptr;
      check(arisec_experiment_figure(figure, &raw), "figure preset");
      ExperimentPtr exp(raw);
      return execute(exp.get(), sweep_flags);
    }
    if (*validate) {
      arisec_config* raw = nullptr;
      check(arisec_config_load(config_path.c_str(), &raw), "load config");
      ConfigPtr cfg(raw);
      if (dump) {
        char* text = nullptr;
        check(arisec_config_dump(cfg.get(), &text), "dump");
        std::cout << take(text);
      } else {
        std::cout << config_path << ": ok\n";
      }
      return 0;
    }
    if (*keys) {
      char* text = nullptr;
      check(arisec_config_schema(&text), "schema");
      std::cout << take(text);
      return 0;
    }
  } catch (const Failure&) {
    return kExitLibraryError;
  }
  return 0;
}
