#ifndef BOHMLAB_LAB_RUNNER_HPP
#define BOHMLAB_LAB_RUNNER_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bohmlab/error.hpp"
#include "bohmlab/lab/config.hpp"
#include "bohmlab/lab/report.hpp"
#include "bohmlab/lab/scenarios.hpp"

namespace bohmlab::lab {

/// Exit status of the command-line tool.
enum ExitStatus : int { exit_pass = 0, exit_check_failed = 1, exit_config_error = 2 };

/// A scenario that passed validation and is ready to run.
struct PreparedScenario {
  Scenario scenario;
  /// null for an empty config, which runs no checks
  const Operation* op = nullptr;
  std::vector<double> tolerances;
  std::string source;
};

namespace detail {

inline Constants read_constants(const Config& cfg) {
  Constants k;
  k.hbar = cfg.number("hbar", k.hbar);
  k.m = cfg.number("m", k.m);
  k.c = cfg.number("c", k.c);
  k.C = cfg.maybe_number("C");
  k.A = cfg.maybe_number("A");
  k.E = cfg.maybe_number("E");
  const auto lambda = cfg.maybe_number("lambda");
  const auto p_lambda = cfg.maybe_number("p_lambda");
  try {
    k.validate(true);
    if (lambda && p_lambda) {
      k.lambda = lambda;
      k.p_lambda = p_lambda;
    } else if (lambda) {
      if (!(*lambda > 0.0) || !std::isfinite(*lambda)) cfg.fail(cfg.line_of("lambda"), "`lambda` must be finite and > 0");
      k = k.with_canonical_scale(k.planck() / *lambda);
    } else {
      const double p = p_lambda.value_or(1.0);
      if (!(p > 0.0) || !std::isfinite(p)) cfg.fail(cfg.line_of("p_lambda"), "`p_lambda` must be finite and > 0");
      k = k.with_canonical_scale(p);
    }
    k.validate(true);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::configuration) throw;
    cfg.fail(e.what());
  }
  return k;
}

}  // namespace detail

/// Parses and validates a scenario config. Any problem is an Error of kind
/// configuration naming the file and, where it applies, the line.
inline PreparedScenario prepare(const Config& cfg, double tol_scale) {
  if (!(tol_scale > 0.0) || !std::isfinite(tol_scale))
    throw Error(ErrorKind::configuration, "--tol-scale must be finite and > 0");
  PreparedScenario p;
  p.source = std::filesystem::path(cfg.source()).filename().string();
  p.scenario.cfg = cfg;
  p.scenario.id = cfg.text("id", std::filesystem::path(cfg.source()).stem().string());
  if (cfg.empty()) return p;

  p.scenario.module = cfg.text("module");
  p.scenario.operation = cfg.text("operation");
  p.scenario.paper_ref = cfg.text("paper_ref");
  p.op = &find_operation(cfg, p.scenario.module, p.scenario.operation);

  std::set<std::string> allowed = common_keys();
  allowed.insert(p.op->params.begin(), p.op->params.end());
  for (const auto& check : p.op->checks) allowed.insert("tol." + check.name);
  for (const auto& key : cfg.keys())
    if (!allowed.count(key)) cfg.fail(cfg.line_of(key), "unknown key `" + key + "`");

  for (const auto& check : p.op->checks) {
    const std::string key = "tol." + check.name;
    const double tol = cfg.number(key, check.tolerance) * tol_scale;
    if (!(tol > 0.0) || !std::isfinite(tol)) {
      if (cfg.has(key)) cfg.fail(cfg.line_of(key), "tolerance `" + key + "` must be finite and > 0");
      cfg.fail("tolerance for `" + check.name + "` must be finite and > 0");
    }
    p.tolerances.push_back(tol);
  }
  p.scenario.k = detail::read_constants(cfg);
  return p;
}

inline PreparedScenario prepare_file(const std::string& path, double tol_scale) {
  return prepare(Config::load(path), tol_scale);
}

struct RunOutcome {
  RunSummary summary;
  /// a configuration problem surfaced while running (for example a CFL violation)
  bool config_error = false;
};

/// Runs a prepared scenario. Numerical failures are recorded in the summary's
/// error field instead of escaping, so a suite can continue.
inline RunOutcome execute(const PreparedScenario& p, const std::optional<std::filesystem::path>& out_dir) {
  RunOutcome o;
  RunSummary& s = o.summary;
  s.id = p.scenario.id;
  s.module = p.scenario.module;
  s.operation = p.scenario.operation;
  s.paper_ref = p.scenario.paper_ref;
  s.source = p.source;
  const auto start = std::chrono::steady_clock::now();
  if (p.op) {
    Artifacts artifacts(out_dir, s.id);
    try {
      const std::vector<Measurement> measured = p.op->run(p.scenario, artifacts);
      for (std::size_t i = 0; i < p.op->checks.size(); ++i) {
        const CheckSpec& spec = p.op->checks[i];
        auto it = std::find_if(measured.begin(), measured.end(), [&](const Measurement& m) { return m.name == spec.name; });
        if (it != measured.end()) s.checks.push_back(judge(spec, *it, p.tolerances[i]));
      }
    } catch (const Error& e) {
      s.error = s.id + ": " + e.what();
      o.config_error = e.kind() == ErrorKind::configuration;
    } catch (const std::exception& e) {
      s.error = s.id + ": " + e.what();
    }
    s.artifacts = artifacts.paths();
  }
  s.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    std::ofstream f(*out_dir / (s.id + ".json"));
    f << to_json(s).dump(2) << '\n';
    if (!f) throw Error(ErrorKind::io, "cannot write " + (*out_dir / (s.id + ".json")).string());
  }
  return o;
}

inline int exit_status(const RunOutcome& o) {
  if (o.config_error) return exit_config_error;
  return o.summary.pass() ? exit_pass : exit_check_failed;
}

struct SuiteOutcome {
  std::vector<RunOutcome> runs;
  json report;
  int status = exit_pass;
  /// config problems, one message per offending file
  std::vector<std::string> config_errors;
};

/// Scenario files (*.cfg) in a directory, sorted by name.
inline std::vector<std::filesystem::path> scenario_files(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw Error(ErrorKind::configuration, dir.string() + ": not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".cfg") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  return files;
}

/// Validates every config first; any config error stops the suite before a
/// single scenario runs.
inline SuiteOutcome run_suite(const std::filesystem::path& dir, const std::optional<std::filesystem::path>& out_dir,
                              double tol_scale) {
  SuiteOutcome outcome;
  std::vector<PreparedScenario> prepared;
  std::map<std::string, std::string> seen;
  for (const auto& file : scenario_files(dir)) {
    try {
      PreparedScenario p = prepare_file(file.string(), tol_scale);
      auto [it, fresh] = seen.emplace(p.scenario.id, file.filename().string());
      if (!fresh)
        throw Error(ErrorKind::configuration,
                    file.string() + ": scenario id `" + p.scenario.id + "` already used by " + it->second);
      prepared.push_back(std::move(p));
    } catch (const Error& e) {
      outcome.config_errors.push_back(e.what());
    }
  }
  if (!outcome.config_errors.empty()) {
    outcome.status = exit_config_error;
    return outcome;
  }

  const auto start = std::chrono::steady_clock::now();
  std::vector<RunSummary> summaries;
  for (const auto& p : prepared) {
    outcome.runs.push_back(execute(p, out_dir));
    summaries.push_back(outcome.runs.back().summary);
    outcome.status = std::max(outcome.status, exit_status(outcome.runs.back()));
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  outcome.report = suite_json(summaries, wall);
  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    std::ofstream f(*out_dir / "suite.json");
    f << outcome.report.dump(2) << '\n';
    if (!f) throw Error(ErrorKind::io, "cannot write " + (*out_dir / "suite.json").string());
  }
  return outcome;
}

}  // namespace bohmlab::lab

#endif  // BOHMLAB_LAB_RUNNER_HPP
