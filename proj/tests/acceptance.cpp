// Acceptance run: executes the bundled scenario suite and judges each
// criterion against tolerances fixed here, independent of the tolerances
// written in the scenario files. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "bohmlab/field_io.hpp"
#include "bohmlab/lab/cli.hpp"

using namespace bohmlab;
using namespace bohmlab::lab;
namespace fs = std::filesystem;

namespace {

// Criterion tolerances.
constexpr double separation_analytic_tol = 1e-12;
constexpr double separation_stencil_tol = 1e-6;
constexpr double spin_closed_form_tol = 1e-6;
constexpr double scale_law_tol = 1e-14;
constexpr double canonical_relation_tol = 1e-10;
constexpr double canonical_t_end = 10.0;
constexpr double madelung_min_order = 1.8;
// A measured order approaches 2 from below by O(dx^2); "order 2" is read as >= 1.95.
constexpr double second_order_min = 1.95;
constexpr double dirac_phase_rate_tol = 1e-8;
constexpr double dirac_spin_density_tol = 1e-6;
constexpr double kg_residual_tol = 1e-6;
constexpr double kg_mass_tol = 1e-10;
constexpr double telegraph_solver_tol = 1e-6;
constexpr double telegraph_residual_tol = 1e-8;
constexpr double hyperbola_tol = 1e-12;
constexpr double static_first_integral_tol = 1e-12;
constexpr double static_exponential_tol = 1e-10;
constexpr double suite_wall_limit_s = 60.0;

class Verdict {
 public:
  void expect(bool ok, const std::string& what) {
    pass_ = pass_ && ok;
    if (!detail_.empty()) detail_ += "; ";
    detail_ += (ok ? "" : "NOT ") + what;
  }
  bool pass() const { return pass_; }
  const std::string& detail() const { return detail_; }

 private:
  bool pass_ = true;
  std::string detail_;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

class Results {
 public:
  explicit Results(const SuiteOutcome& suite) {
    for (const auto& r : suite.runs) runs_[r.summary.id] = r.summary;
  }

  const CheckResult* find(const std::string& id, const std::string& check) const {
    auto it = runs_.find(id);
    if (it == runs_.end()) return nullptr;
    for (const auto& c : it->second.checks)
      if (c.name == check) return &c;
    return nullptr;
  }

  void at_most(Verdict& v, const std::string& id, const std::string& check, double tol) const {
    const CheckResult* c = find(id, check);
    if (!c) return v.expect(false, id + "/" + check + " present");
    v.expect(std::isfinite(c->value) && c->value <= tol, id + "/" + check + " " + fmt(c->value) + " <= " + fmt(tol));
  }

  /// Observed order at least `min_order`; a pair of levels both at rounding
  /// level is accepted and reported as exact.
  void order_at_least(Verdict& v, const std::string& id, const std::string& check, double min_order) const {
    const CheckResult* c = find(id, check);
    if (!c) return v.expect(false, id + "/" + check + " present");
    if (c->exact) return v.expect(true, id + "/" + check + " exact");
    v.expect(c->order && *c->order >= min_order,
             id + "/" + check + " order " + (c->order ? fmt(*c->order) : "n/a") + " >= " + fmt(min_order));
  }

 private:
  std::map<std::string, RunSummary> runs_;
};

double last_time(const fs::path& csv) {
  std::ifstream in(csv);
  const auto [header, rows] = io::read_table(in);
  if (rows.empty() || header.empty() || header[0] != "t") return std::nan("");
  return rows.back()[0];
}

int cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"bohmlab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream sink;
  return run_cli(static_cast<int>(argv.size()), argv.data(), sink, sink);
}

}  // namespace

int main() {
  const fs::path scenarios = BOHMLAB_SCENARIO_DIR;
  const fs::path work = fs::temp_directory_path() / "bohmlab_acceptance";
  fs::remove_all(work);

  const auto t0 = std::chrono::steady_clock::now();
  const SuiteOutcome first = run_suite(scenarios, work / "first", 1.0);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!first.config_errors.empty()) {
    for (const auto& e : first.config_errors) std::cerr << e << '\n';
    return 1;
  }
  const Results r(first);

  struct Criterion {
    std::string name;
    std::function<void(Verdict&)> check;
  };
  const std::vector<Criterion> criteria{
      {"separation solution satisfies its defining equation",
       [&](Verdict& v) {
         r.at_most(v, "separation_solution", "separation_analytic", separation_analytic_tol);
         r.at_most(v, "separation_solution", "separation_stencil", separation_stencil_tol);
       }},
      {"spin potential and force match their closed forms",
       [&](Verdict& v) {
         r.at_most(v, "spin_potential_eq_a", "VS_matches_paper", spin_closed_form_tol);
         r.at_most(v, "spin_potential_eq_a", "force_closed_form", spin_closed_form_tol);
         r.order_at_least(v, "spin_potential_eq_a", "force_forms_agree", second_order_min);
       }},
      {"scale laws of V_Q and V_S",
       [&](Verdict& v) {
         r.at_most(v, "scale_laws", "VQ_scale_invariance", scale_law_tol);
         r.at_most(v, "scale_laws", "VS_scale_quadratic", scale_law_tol);
       }},
      {"canonical action/amplitude relation",
       [&](Verdict& v) {
         r.at_most(v, "canonical_reduced_flow", "action_amplitude_relation", canonical_relation_tol);
         r.at_most(v, "dirac_canonical_flow", "slope_dS_dR", canonical_relation_tol);
         const double t_end = last_time(work / "first" / "canonical_reduced_flow" / "trajectory.csv");
         v.expect(std::abs(t_end - canonical_t_end) <= 1e-9, "reduced flow reaches t = " + fmt(t_end));
       }},
      {"Madelung residuals converge (plane wave, harmonic ground state)",
       [&](Verdict& v) {
         for (const char* id : {"madelung_plane_wave", "madelung_harmonic"})
           for (const char* eq : {"hamilton_jacobi", "continuity"}) r.order_at_least(v, id, eq, madelung_min_order);
       }},
      {"Dirac chiral transport, rest-state phase rate and spin density",
       [&](Verdict& v) {
         for (const char* eq : {"D+R", "D+S", "D-R", "D-S"}) r.order_at_least(v, "dirac_transport", eq, second_order_min);
         r.at_most(v, "dirac_rest_state", "upper_phase_rate", dirac_phase_rate_tol);
         r.at_most(v, "dirac_rest_state", "spin_density_balance", dirac_spin_density_tol);
       }},
      {"Klein-Gordon dispersion",
       [&](Verdict& v) {
         r.at_most(v, "kg_plane_wave", "amplitude_residual", kg_residual_tol);
         r.at_most(v, "kg_plane_wave", "MR2_dispersion_family", kg_mass_tol);
       }},
      {"telegraph decay mode",
       [&](Verdict& v) {
         r.at_most(v, "telegraph_decay", "solver_error", telegraph_solver_tol);
         r.at_most(v, "telegraph_decay", "amplitude_residual", telegraph_residual_tol);
         r.at_most(v, "telegraph_decay", "phase_residual", telegraph_residual_tol);
       }},
      {"hyperbola constraint on the boost family",
       [&](Verdict& v) { r.at_most(v, "hyperbola_boost", "hyperbola_defect", hyperbola_tol); }},
      {"static special case",
       [&](Verdict& v) {
         r.at_most(v, "static_case_a03", "first_integral", static_first_integral_tol);
         r.order_at_least(v, "static_case_a03", "VQ_closed_form_stencil", second_order_min);
         r.at_most(v, "static_case_a0", "VQ_closed_form_ode", static_exponential_tol);
       }},
      {"suite determinism, wall time and exit status",
       [&](Verdict& v) {
         const SuiteOutcome second = run_suite(scenarios, work / "second", 1.0);
         v.expect(without_timing(first.report) == without_timing(second.report), "repeat suite.json identical");
         bool same_runs = true;
         for (const auto& run : first.runs) {
           const std::string name = run.summary.id + ".json";
           std::ifstream a(work / "first" / name), b(work / "second" / name);
           same_runs = same_runs && without_timing(json::parse(a)) == without_timing(json::parse(b));
         }
         v.expect(same_runs, "repeat scenario reports identical");
         v.expect(wall < suite_wall_limit_s, "suite wall time " + fmt(wall) + " s < " + fmt(suite_wall_limit_s) + " s");
         v.expect(first.status == exit_pass, "bundled suite exit 0");

         // one tightened tolerance must turn exactly that check red
         const fs::path red = work / "red";
         fs::create_directories(red);
         std::ifstream src(scenarios / "spin_potential_eq_a.cfg");
         std::ofstream dst(red / "spin_potential_eq_a.cfg");
         for (std::string line; std::getline(src, line);)
           dst << (line.rfind("tol.VS_matches_paper", 0) == 0 ? "tol.VS_matches_paper = 1e-13" : line) << '\n';
         dst.close();
         const int status = cli({"--out", (work / "red_out").string(), "suite", red.string()});
         v.expect(status == exit_check_failed, "induced failure exits " + std::to_string(status));
         std::ifstream suite_file(work / "red_out" / "suite.json");
         const json suite = json::parse(suite_file);
         v.expect(suite["scenarios"][0]["failed_checks"] == json::array({"VS_matches_paper"}),
                  "failing check named VS_matches_paper");
         const int scaled = cli({"--out", (work / "scaled_out").string(), "--tol-scale", "1e-30", "suite",
                                 scenarios.string()});
         v.expect(scaled == exit_check_failed, "tightened --tol-scale exits " + std::to_string(scaled));
       }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      criteria[i].check(v);
    } catch (const std::exception& e) {
      v.expect(false, std::string("no exception: ") + e.what());
    }
    failed += v.pass() ? 0 : 1;
    std::cout << (v.pass() ? "PASS" : "FAIL") << "  [" << (i + 1) << "] " << criteria[i].name << "  (" << v.detail()
              << ")\n";
  }
  fs::remove_all(work);
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
