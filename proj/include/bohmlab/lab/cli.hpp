#ifndef BOHMLAB_LAB_CLI_HPP
#define BOHMLAB_LAB_CLI_HPP

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bohmlab/error.hpp"
#include "bohmlab/lab/runner.hpp"

namespace bohmlab::lab {

namespace detail {

inline void print_summary(std::ostream& out, const RunSummary& s) {
  out << (s.pass() ? "PASS " : "FAIL ") << s.id;
  if (s.error) out << "  error: " << *s.error;
  out << '\n';
  for (const auto& c : s.checks) {
    out << "  " << (c.pass ? "ok   " : "FAIL ") << c.name << "  value=" << c.value << "  tol=" << c.tolerance;
    if (c.order) out << "  order=" << *c.order;
    if (c.exact) out << "  (exact)";
    out << '\n';
  }
}

}  // namespace detail

/// Command-line entry point: `run <config>` or `suite <dir>`, with
/// `--out <dir>` and `--tol-scale <float>`. Returns the process exit status.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Residual certification lab for polar (amplitude/phase) wave equations"};
  app.require_subcommand(1);
  std::string out_dir = "bohmlab-out";
  double tol_scale = 1.0;
  app.add_option("--out", out_dir, "directory for JSON reports and CSV fields")->capture_default_str();
  app.add_option("--tol-scale", tol_scale, "multiplier applied to every check tolerance")->capture_default_str();

  std::string config_path;
  auto* run = app.add_subcommand("run", "run one scenario config");
  run->add_option("config", config_path, "scenario file")->required();
  run->fallthrough();

  std::string suite_dir;
  auto* suite = app.add_subcommand("suite", "run every *.cfg in a directory and write suite.json");
  suite->add_option("dir", suite_dir, "directory of scenario files")->required();
  suite->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return exit_config_error;
  }

  try {
    if (*run) {
      const PreparedScenario p = prepare_file(config_path, tol_scale);
      const RunOutcome o = execute(p, std::filesystem::path(out_dir));
      detail::print_summary(out, o.summary);
      return exit_status(o);
    }
    const SuiteOutcome s = run_suite(suite_dir, std::filesystem::path(out_dir), tol_scale);
    if (!s.config_errors.empty()) {
      err << "suite aborted, invalid scenario files:\n";
      for (const auto& msg : s.config_errors) err << "  " << msg << '\n';
      return s.status;
    }
    for (const auto& r : s.runs) detail::print_summary(out, r.summary);
    out << s.report["total_checks"].get<std::size_t>() << " checks, " << s.report["failed_checks"].get<std::size_t>()
        << " failed\n";
    return s.status;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return e.kind() == ErrorKind::configuration ? exit_config_error : exit_check_failed;
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return exit_check_failed;
  }
}

}  // namespace bohmlab::lab

#endif  // BOHMLAB_LAB_CLI_HPP
