#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "noetherlab/builtins.hpp"
#include "noetherlab/error.hpp"
#include "noetherlab/measure.hpp"
#include "noetherlab/noether.hpp"
#include "noetherlab/pathspace.hpp"

namespace noetherlab::cli {

using Json = nlohmann::ordered_json;

enum class ScenarioKind { logderiv_check, theorem1_check, noether_check, anomaly_demo };

std::string to_string(ScenarioKind kind);

/// Which Theorem 1 variants a run evaluates.
enum class VariantSelection { paper, corrected, both };

struct RunOptions {
  std::optional<std::uint64_t> seed;
  VariantSelection variant = VariantSelection::both;
  int jobs = 1;
};

/// Every problem found while loading one scenario, each prefixed with its
/// source location.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> messages);
  const std::vector<std::string>& messages() const { return messages_; }

 private:
  std::vector<std::string> messages_;
};

struct ProbeBox {
  int count = 10;
  double lo = -1.5;
  double hi = 1.5;
};

struct NamedTestFunction {
  std::string label;
  TestFunction phi;
  std::optional<PairingEngine> engine;  // overrides the scenario engine
};

struct LogDerivSpec {
  DensityMeasure measure;
  VectorField field;
  double convergence_step = 0.05;
  double min_order = 1.8;
  double max_order = 2.2;
};

struct Theorem1Spec {
  NoetherProblem problem;
  Vector delta;
  FamilyFrame frame = FamilyFrame::pullback;
  ProbeBox points;
};

struct NoetherSpec {
  NoetherProblem problem;
  Vector delta;
  ProbeBox points;
  bool expect_vanishing = true;
  bool closed_form = false;  // residual = -<x, Delta> L
  double certificate_threshold = 1e-8;
  double closed_form_tolerance = 1e-8;
};

struct AnomalySpec {
  LatticePathSpace space{1, 1, 1.0};
  Hamiltonian hamiltonian;
  FamilyBuilder family;
  Vector delta;
  Vector q;
  InitialData initial_data;
  ProbeBox probes;
  std::vector<int> refinement{1, 2, 4};
  std::string expect_status;
  std::optional<double> ratio_target;
  double ratio_tolerance = 0.01;
  bool trace_is_dim = false;
  double fd_trace_tolerance = 1e-8;
  std::optional<ProbeBox> grid;
  bool fd_check = false;
  double epsilon = 1.0;
  std::vector<NamedTestFunction> fd_probes;
  double fd_tolerance = 1e-6;
};

struct Scenario {
  std::string name;
  ScenarioKind kind = ScenarioKind::logderiv_check;
  std::string source;  // file path or "builtin:<name>"
  Json config;         // the parsed document, echoed into the report
  std::uint64_t seed = 1;
  PairingEngine engine;
  double fd_step = 1e-4;
  double tolerance = 1e-6;
  std::vector<NamedTestFunction> test_functions;

  std::optional<LogDerivSpec> logderiv;
  std::optional<Theorem1Spec> theorem1;
  std::optional<NoetherSpec> noether;
  std::optional<AnomalySpec> anomaly;
};

/// Parses and validates a YAML scenario. All problems are collected and
/// raised together as one ValidationError.
Scenario load_scenario(const std::string& text, const std::string& source,
                       const RunOptions& options);
Scenario load_scenario_file(const std::string& path, const RunOptions& options);

/// Names of the scenarios compiled into the binary.
std::vector<std::string> builtin_scenario_names();
/// YAML text of a builtin scenario, or nullopt.
std::optional<std::string> builtin_scenario_text(const std::string& name);

}  // namespace noetherlab::cli
