#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "noetherlab/cli/scenario.hpp"

namespace noetherlab::cli {

/// One verification row. `relation` is "<=" when the check passes iff
/// abs_err <= tol and ">" when it must exceed tol (expected violations).
struct Check {
  std::string name;
  Complex analytic;
  Complex oracle;
  double abs_err = 0.0;
  double rel_err = 0.0;
  double tol = 0.0;
  std::string relation = "<=";
  bool pass = false;
};

Check make_check(std::string name, Complex analytic, Complex oracle, double tol,
                 std::string relation = "<=");

struct Curve {
  std::string name;
  std::string x_label;
  std::string y_label;
  std::vector<std::pair<double, double>> points;
};

struct ScenarioResult {
  std::string name;
  std::string kind;
  std::string source;
  Json config;
  Json engine;   // provenance: mode, order / samples, seed, workers
  Json details;  // kind-specific numbers (ledger rows, refinement tables, ...)
  std::vector<Check> checks;
  std::vector<Curve> curves;
  double elapsed_seconds = 0.0;

  bool passed() const;
};

ScenarioResult run_scenario(const Scenario& scenario, const RunOptions& options);

/// report.json. Everything except the "timestamp" object is a function of
/// the scenarios and options alone.
Json build_report(const std::vector<ScenarioResult>& results, const RunOptions& options,
                  const std::string& timestamp);
void write_summary_csv(const std::vector<ScenarioResult>& results, std::ostream& out);
void write_curve_csv(const Curve& curve, std::ostream& out);

Json complex_json(Complex z);
Json vector_json(const Vector& v);

}  // namespace noetherlab::cli
