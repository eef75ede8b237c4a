#include "noetherlab/cli/runner.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "noetherlab/finite_difference.hpp"
#include "noetherlab/transport.hpp"

namespace noetherlab::cli {

Check make_check(std::string name, Complex analytic, Complex oracle, double tol, std::string relation) {
  Check c;
  c.name = std::move(name);
  c.analytic = analytic;
  c.oracle = oracle;
  c.abs_err = std::abs(analytic - oracle);
  c.rel_err = c.abs_err / std::max(1.0, std::abs(analytic));
  c.tol = tol;
  c.relation = std::move(relation);
  const bool finite = std::isfinite(c.rel_err);
  c.pass = finite && (c.relation == "<=" ? c.rel_err <= tol : c.rel_err > tol);
  return c;
}

bool ScenarioResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

Json complex_json(Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return nullptr;
  if (z.imag() == 0.0) return z.real();
  return Json{{"re", z.real()}, {"im", z.imag()}};
}

Json vector_json(const Vector& v) {
  Json arr = Json::array();
  for (double x : v) arr.push_back(std::isfinite(x) ? Json(x) : Json(nullptr));
  return arr;
}

namespace {

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

std::vector<Vector> random_points(const ProbeBox& box, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(box.lo, box.hi);
  std::vector<Vector> out(box.count, Vector(dim));
  for (Vector& x : out) {
    for (int i = 0; i < dim; ++i) x[i] = u(rng);
  }
  return out;
}

Json engine_json(const PairingEngine& e, std::uint64_t seed) {
  Json j;
  switch (e.mode) {
    case PairingMode::gauss_hermite:
      j["mode"] = "gauss_hermite";
      j["order"] = e.order_or_samples;
      break;
    case PairingMode::tensor_grid:
      j["mode"] = "tensor_grid";
      j["order"] = e.order_or_samples;
      j["panels"] = e.panels;
      j["box"] = {{"lo", vector_json(e.box->lo)}, {"hi", vector_json(e.box->hi)}};
      break;
    case PairingMode::monte_carlo:
      j["mode"] = "monte_carlo";
      j["samples"] = e.order_or_samples;
      j["workers"] = e.workers;
      break;
  }
  j["seed"] = seed;
  return j;
}

void run_logderiv(const Scenario& sc, ScenarioResult& out) {
  const LogDerivSpec& spec = *sc.logderiv;
  Json entries = Json::array();
  bool curve_done = false;
  for (const NamedTestFunction& t : sc.test_functions) {
    const PairingEngine& e = t.engine ? *t.engine : sc.engine;
    const Complex fd = weak_derivative_fd(spec.measure, spec.field, t.phi, e, sc.fd_step);
    const Complex analytic = analytic_weak_derivative(spec.measure, spec.field, t.phi, e);
    const Complex ibp = integration_by_parts_form(spec.measure, spec.field, t.phi, e);
    out.checks.push_back(make_check("eq1:" + t.label, analytic, fd, sc.tolerance));

    // The IBP form is the exact t-derivative of the discrete pairing, so the
    // observed order is free of quadrature error.
    const double bound = injectivity_bound(spec.measure, spec.field, e);
    const double step = std::min(spec.convergence_step, 0.5 * bound);
    const ConvergenceStudy cs = fd_convergence(spec.measure, spec.field, t.phi, e, step, ibp);
    if (cs.exact) {
      const double floor = 1e-12 * std::max(1.0, std::abs(ibp)) / step;
      Check c = make_check("fd_exact:" + t.label, std::max(cs.error_full, cs.error_half), 0.0, floor);
      out.checks.push_back(c);
    } else {
      const double mid = 0.5 * (spec.min_order + spec.max_order);
      Check c = make_check("fd_order:" + t.label, cs.observed_order, mid, 0.5 * (spec.max_order - spec.min_order));
      c.relation = "abs<=";
      c.pass = c.abs_err <= c.tol;
      out.checks.push_back(c);
    }
    entries.push_back({{"test_function", t.label},
                       {"fd", complex_json(fd)},
                       {"analytic", complex_json(analytic)},
                       {"integration_by_parts", complex_json(ibp)},
                       {"convergence",
                        {{"delta", step},
                         {"error_full", cs.error_full},
                         {"error_half", cs.error_half},
                         {"observed_order", finite_or_null(cs.observed_order)},
                         {"exact", cs.exact}}}});
    if (!curve_done && !cs.exact) {
      Curve curve{sc.name + "_fd_convergence", "delta", "abs_error", {}};
      double d = step;
      for (int i = 0; i < 6; ++i, d *= 0.5) {
        const Complex fd_d = weak_derivative_fd(spec.measure, spec.field, t.phi, e, d);
        curve.points.emplace_back(d, std::abs(fd_d - ibp));
      }
      out.curves.push_back(std::move(curve));
      curve_done = true;
    }
  }
  out.details["entries"] = entries;
}

Json outcome_json(const VariantOutcome& o) {
  Json pairings = Json::array();
  for (const Complex& p : o.pairings) pairings.push_back(complex_json(p));
  return {{"available", o.available}, {"max_rel_error", finite_or_null(o.max_rel_error)}, {"pairings", pairings}};
}

void run_theorem1(const Scenario& sc, const RunOptions& options, ScenarioResult& out) {
  const Theorem1Spec& spec = *sc.theorem1;
  std::vector<TestFunction> probes;
  for (const auto& t : sc.test_functions) probes.push_back(t.phi);
  const std::vector<Vector> points = random_points(spec.points, spec.problem.lagrangian.n(), sc.seed);
  const VariantAdjudication adj =
      adjudicate_variants(spec.problem, spec.delta, probes, points, sc.engine, sc.fd_step, sc.tolerance, spec.frame);

  auto add_variant = [&](const std::string& name, const VariantOutcome& o) {
    if (!o.available) {
      out.checks.push_back(make_check(name + ":available", 0.0, 1.0, 0.0));
      return;
    }
    for (std::size_t i = 0; i < o.pairings.size(); ++i) {
      out.checks.push_back(make_check(name + ":" + sc.test_functions[i].label, o.pairings[i], adj.oracle[i], sc.tolerance));
    }
  };
  switch (options.variant) {
    case VariantSelection::paper: add_variant("paper_literal", adj.paper_literal); break;
    case VariantSelection::corrected: add_variant("transport_corrected", adj.transport_corrected); break;
    case VariantSelection::both: {
      if (adj.winner != "transport_corrected") add_variant("paper_literal", adj.paper_literal);
      if (adj.winner != "paper_literal") add_variant("transport_corrected", adj.transport_corrected);
      Check c = make_check("adjudication_decisive", adj.decisive ? 1.0 : 0.0, 1.0, 0.0);
      out.checks.push_back(c);
      break;
    }
  }
  Json oracle = Json::array();
  for (const Complex& o : adj.oracle) oracle.push_back(complex_json(o));
  out.details["ledger"] = {{"scenario", sc.name},
                           {"frame", to_string(adj.frame)},
                           {"differ_analytically", adj.differ_analytically},
                           {"max_pointwise_gap", adj.max_pointwise_gap},
                           {"tolerance", adj.tolerance},
                           {"oracle", oracle},
                           {"paper_literal", outcome_json(adj.paper_literal)},
                           {"transport_corrected", outcome_json(adj.transport_corrected)},
                           {"winner", adj.winner},
                           {"decisive", adj.decisive}};
}

void run_noether(const Scenario& sc, const RunOptions& options, ScenarioResult& out) {
  const NoetherSpec& spec = *sc.noether;
  const int n = spec.problem.lagrangian.n();
  const std::vector<Vector> points = random_points(spec.points, n, sc.seed);
  NoetherOptions opt;
  for (const auto& t : sc.test_functions) opt.certificate_probes.push_back(t.phi);
  opt.engine = sc.engine;
  opt.step = sc.fd_step;
  opt.certificate_threshold = spec.certificate_threshold;
  opt.residual_tolerance = sc.tolerance;
  const Theorem1Variant variant = options.variant == VariantSelection::paper ? Theorem1Variant::paper_literal
                                                                              : Theorem1Variant::transport_corrected;
  const NoetherResidual r = noether_residual(spec.problem, spec.delta, points, variant, opt);

  out.checks.push_back(make_check("certificate", r.certificate.max_abs_derivative, 0.0, spec.certificate_threshold,
                                  spec.expect_vanishing ? "<=" : ">"));
  const std::string expected = spec.expect_vanishing ? "vanishing" : "not invariant";
  out.checks.push_back(make_check("status:" + expected, to_string(r.status) == expected ? 1.0 : 0.0, 1.0, 0.0));
  if (spec.expect_vanishing) out.checks.push_back(make_check("residual_max", r.max_abs, 0.0, sc.tolerance));
  if (spec.closed_form) {
    double worst = -1.0;
    Complex at_res, at_closed;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const Vector& x = points[i];
      const FieldConfiguration& g = spec.problem.field;
      const Complex closed = -x.dot(spec.delta) * spec.problem.lagrangian.value(x, g.value(x), g.derivative(x));
      const double diff = std::abs(r.residuals[i] - closed);
      if (diff > worst) {
        worst = diff;
        at_res = r.residuals[i];
        at_closed = closed;
      }
    }
    Check c = make_check("closed_form_residual", at_res, at_closed, spec.closed_form_tolerance);
    c.relation = "abs<=";
    c.pass = c.abs_err <= c.tol;
    out.checks.push_back(c);
  }
  out.details = {{"variant", to_string(variant)},
                 {"status", to_string(r.status)},
                 {"certificate", {{"max_abs_derivative", r.certificate.max_abs_derivative},
                                  {"threshold", r.certificate.threshold},
                                  {"invariant", r.certificate.invariant}}},
                 {"points", static_cast<int>(points.size())},
                 {"max_abs_residual", r.max_abs},
                 {"mean_abs_residual", r.mean_abs}};
}

void run_anomaly(const Scenario& sc, ScenarioResult& out) {
  const AnomalySpec& spec = *sc.anomaly;
  const int m = spec.space.dim();
  const std::vector<Vector> probes = random_points(spec.probes, m, sc.seed);
  AnomalyOptions opt;
  opt.certificate_tolerance = sc.tolerance;
  opt.refinement_factors = spec.refinement;
  opt.fd_check = spec.fd_check;
  opt.epsilon = spec.epsilon;
  opt.fd_step = sc.fd_step;
  opt.fd_tolerance = spec.fd_tolerance;
  for (const auto& t : spec.fd_probes) opt.fd_probes.push_back(t.phi);
  const AnomalyReport r = anomaly_report(spec.space, spec.family, spec.delta, spec.hamiltonian, spec.q,
                                         spec.initial_data, probes, sc.engine, opt);

  const bool inapplicable = spec.expect_status == "Corollary inapplicable";
  out.checks.push_back(make_check("certificate", r.max_certificate, 0.0, sc.tolerance, inapplicable ? ">" : "<="));
  out.checks.push_back(make_check("status:" + spec.expect_status, r.status == spec.expect_status ? 1.0 : 0.0, 1.0, 0.0));

  const TransformationFamily family = spec.family(spec.space);
  const VectorField h1 = generator_field(family, spec.delta);
  double worst = -1.0;
  Complex at_a, at_fd;
  double trace_gap = 0.0;
  for (const AnomalySample& s : r.samples) {
    const double fd = fd_jacobian([&](const Vector& y) { return h1.value(y); }, s.path).trace();
    if (std::abs(s.anomaly - fd) > worst) {
      worst = std::abs(s.anomaly - fd);
      at_a = s.anomaly;
      at_fd = fd;
    }
    trace_gap = std::max(trace_gap, std::abs(s.anomaly - m));
  }
  Check fdc = make_check("anomaly_vs_fd_trace", at_a, at_fd, spec.fd_trace_tolerance);
  fdc.relation = "abs<=";
  fdc.pass = fdc.abs_err <= fdc.tol;
  out.checks.push_back(fdc);
  if (spec.trace_is_dim) {
    Check c = make_check("trace_equals_M", m + trace_gap, m, 0.0);
    c.relation = "abs<=";
    c.pass = trace_gap == 0.0;
    out.checks.push_back(c);
  }
  if (spec.ratio_target) {
    for (std::size_t i = 0; i < r.refinement_ratios.size(); ++i) {
      Check c = make_check("refinement_ratio_" + std::to_string(i + 1), r.refinement_ratios[i], *spec.ratio_target,
                           *spec.ratio_target * spec.ratio_tolerance);
      c.relation = "abs<=";
      c.pass = c.abs_err <= c.tol;
      out.checks.push_back(c);
    }
    if (r.refinement_ratios.empty()) out.checks.push_back(make_check("refinement_ratio", 0.0, *spec.ratio_target, 0.0));
  }
  for (std::size_t i = 0; i < r.corollary_checks.size(); ++i) {
    const CorollaryCheck& c = r.corollary_checks[i];
    out.checks.push_back(make_check("corollary_fd:" + spec.fd_probes[i].label,
                                    c.action_part + c.anomaly_part + c.damping_part, c.fd, spec.fd_tolerance));
  }

  Curve refinement{sc.name + "_anomaly_vs_M", "M", "anomaly", {}};
  Json table = Json::array();
  for (const RefinementEntry& e : r.refinement) {
    refinement.points.emplace_back(e.dim, e.anomaly);
    table.push_back({{"steps", e.steps}, {"M", e.dim}, {"anomaly", e.anomaly}, {"certificate", e.certificate}});
  }
  out.curves.push_back(std::move(refinement));
  if (spec.grid) {
    Curve field{sc.name + "_anomaly_field", "x1", "anomaly", {}};
    const ProbeBox& g = *spec.grid;
    for (int i = 0; i < g.count; ++i) {
      const double s = g.count == 1 ? g.lo : g.lo + (g.hi - g.lo) * i / (g.count - 1);
      Vector path = Vector::Zero(m);
      path[0] = s;
      field.points.emplace_back(s, anomaly_term(spec.space, family, spec.delta, path));
    }
    out.curves.push_back(std::move(field));
  }
  Json ratios = Json::array();
  for (double x : r.refinement_ratios) ratios.push_back(x);
  Json corollary = Json::array();
  for (std::size_t i = 0; i < r.corollary_checks.size(); ++i) {
    const CorollaryCheck& c = r.corollary_checks[i];
    corollary.push_back({{"test_function", spec.fd_probes[i].label},
                         {"fd", complex_json(c.fd)},
                         {"action_part", complex_json(c.action_part)},
                         {"anomaly_part", complex_json(c.anomaly_part)},
                         {"damping_part", complex_json(c.damping_part)},
                         {"rel_error", c.rel_error},
                         {"anomaly_only_error", c.anomaly_only_error}});
  }
  out.details = {{"status", r.status},
                 {"M", m},
                 {"max_certificate", r.max_certificate},
                 {"max_action_derivative", r.max_action_derivative},
                 {"refinement", table},
                 {"refinement_ratios", ratios},
                 {"corollary_checks", corollary}};
}

std::string format_double(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

}  // namespace

ScenarioResult run_scenario(const Scenario& sc, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  ScenarioResult out;
  out.name = sc.name;
  out.kind = to_string(sc.kind);
  out.source = sc.source;
  out.config = sc.config;
  out.engine = engine_json(sc.engine, sc.seed);
  out.details = Json::object();
  switch (sc.kind) {
    case ScenarioKind::logderiv_check: run_logderiv(sc, out); break;
    case ScenarioKind::theorem1_check: run_theorem1(sc, options, out); break;
    case ScenarioKind::noether_check: run_noether(sc, options, out); break;
    case ScenarioKind::anomaly_demo: run_anomaly(sc, out); break;
  }
  out.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

Json build_report(const std::vector<ScenarioResult>& results, const RunOptions& options,
                  const std::string& timestamp) {
  Json report;
  report["tool"] = "noetherlab";
  report["version"] = NOETHERLAB_VERSION;
  Json elapsed = Json::object();
  for (const auto& r : results) elapsed[r.name] = r.elapsed_seconds;
  report["timestamp"] = {{"utc", timestamp}, {"elapsed_seconds", elapsed}};
  const char* variant = options.variant == VariantSelection::paper       ? "paper"
                        : options.variant == VariantSelection::corrected ? "corrected"
                                                                         : "both";
  report["options"] = {{"seed", options.seed ? Json(*options.seed) : Json(nullptr)}, {"variant", variant}};
  bool all = true;
  Json scenarios = Json::array();
  Json ledger = Json::array();
  for (const auto& r : results) {
    all = all && r.passed();
    Json checks = Json::array();
    for (const Check& c : r.checks) {
      checks.push_back({{"check", c.name},
                        {"analytic", complex_json(c.analytic)},
                        {"oracle", complex_json(c.oracle)},
                        {"abs_err", finite_or_null(c.abs_err)},
                        {"rel_err", finite_or_null(c.rel_err)},
                        {"tol", c.tol},
                        {"relation", c.relation},
                        {"pass", c.pass}});
    }
    Json curves = Json::array();
    for (const Curve& c : r.curves) curves.push_back("curves/" + c.name + ".csv");
    scenarios.push_back({{"name", r.name},
                         {"kind", r.kind},
                         {"source", r.source},
                         {"passed", r.passed()},
                         {"engine", r.engine},
                         {"checks", checks},
                         {"details", r.details},
                         {"curves", curves},
                         {"config", r.config}});
    if (r.details.contains("ledger")) ledger.push_back(r.details["ledger"]);
  }
  report["passed"] = all;
  report["scenarios"] = scenarios;
  report["variant_ledger"] = ledger;
  return report;
}

void write_summary_csv(const std::vector<ScenarioResult>& results, std::ostream& out) {
  out << "scenario,check,analytic,oracle,abs_err,rel_err,tol,pass\n";
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  for (const auto& r : results) {
    for (const Check& c : r.checks) {
      out << quote(r.name) << ',' << quote(c.name) << ',' << format_double(c.analytic.real()) << ','
          << format_double(c.oracle.real()) << ',' << format_double(c.abs_err) << ',' << format_double(c.rel_err)
          << ',' << format_double(c.tol) << ',' << (c.pass ? "true" : "false") << '\n';
    }
  }
}

void write_curve_csv(const Curve& curve, std::ostream& out) {
  out << curve.x_label << ',' << curve.y_label << '\n';
  for (const auto& [x, y] : curve.points) out << format_double(x) << ',' << format_double(y) << '\n';
}

}  // namespace noetherlab::cli
