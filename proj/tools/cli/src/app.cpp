#include "noetherlab/cli/app.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <thread>

#include "noetherlab/cli/runner.hpp"
#include "noetherlab/cli/scenario.hpp"

namespace noetherlab::cli {
namespace {

namespace fs = std::filesystem;

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Fault {
  std::string scenario;
  std::string message;
  std::optional<Vector> probe;
};

int run_command(const std::vector<std::string>& configs, const std::string& out_dir, const RunOptions& options,
                std::ostream& out, std::ostream& err) {
  // Load everything first so that all validation problems surface together.
  std::vector<Scenario> scenarios;
  std::vector<std::string> problems;
  for (const std::string& c : configs) {
    try {
      if (fs::exists(c)) {
        scenarios.push_back(load_scenario_file(c, options));
      } else if (auto text = builtin_scenario_text(c)) {
        scenarios.push_back(load_scenario(*text, "builtin:" + c, options));
      } else {
        problems.push_back(c + ": no such file or builtin scenario");
      }
    } catch (const ValidationError& e) {
      problems.insert(problems.end(), e.messages().begin(), e.messages().end());
    }
  }
  std::map<std::string, int> seen;
  for (const Scenario& s : scenarios) {
    if (seen[s.name]++ == 1) problems.push_back(s.source + ": duplicate scenario name '" + s.name + "'");
  }
  if (!problems.empty()) {
    err << "error: " << problems.size() << " validation problem" << (problems.size() == 1 ? "" : "s") << ":\n";
    for (const auto& p : problems) err << "  " << p << '\n';
    return kExitInvalid;
  }

  std::vector<std::optional<ScenarioResult>> results(scenarios.size());
  std::vector<std::optional<Fault>> faults(scenarios.size());
  std::vector<std::string> late_errors(scenarios.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) {
      try {
        results[i] = run_scenario(scenarios[i], options);
      } catch (const NumericFault& e) {
        faults[i] = Fault{scenarios[i].name, e.what(), e.probe()};
      } catch (const Error& e) {
        late_errors[i] = scenarios[i].source + ": " + e.what();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(scenarios.size())));
  std::vector<std::future<void>> pool;
  for (int j = 0; j < jobs; ++j) pool.push_back(std::async(std::launch::async, worker));
  for (auto& f : pool) f.get();

  bool faulted = false;
  for (const auto& f : faults) {
    if (!f) continue;
    faulted = true;
    err << "numeric fault in scenario '" << f->scenario << "': " << f->message << '\n';
    if (f->probe) err << "  probe point: " << format_point(*f->probe) << '\n';
  }
  if (faulted) return kExitNumericFault;
  bool invalid = false;
  for (const auto& e : late_errors) {
    if (e.empty()) continue;
    invalid = true;
    err << "error: " << e << '\n';
  }
  if (invalid) return kExitInvalid;

  std::vector<ScenarioResult> done;
  for (auto& r : results) done.push_back(std::move(*r));

  std::error_code ec;
  fs::create_directories(fs::path(out_dir) / "curves", ec);
  if (ec) {
    err << "error: cannot create output directory " << out_dir << ": " << ec.message() << '\n';
    return kExitInvalid;
  }
  {
    std::ofstream f(fs::path(out_dir) / "report.json");
    f << build_report(done, options, utc_now()).dump(2) << '\n';
  }
  {
    std::ofstream f(fs::path(out_dir) / "summary.csv");
    write_summary_csv(done, f);
  }
  for (const auto& r : done) {
    for (const Curve& c : r.curves) {
      std::ofstream f(fs::path(out_dir) / "curves" / (c.name + ".csv"));
      write_curve_csv(c, f);
    }
  }

  bool all = true;
  for (const auto& r : done) {
    const bool ok = r.passed();
    all = all && ok;
    std::size_t failed = 0;
    for (const Check& c : r.checks) failed += c.pass ? 0 : 1;
    out << (ok ? "PASS " : "FAIL ") << r.name << " (" << r.checks.size() - failed << "/" << r.checks.size()
        << " checks)\n";
    for (const Check& c : r.checks) {
      if (!c.pass) {
        out << "  failed " << c.name << ": abs_err " << c.abs_err << ", rel_err " << c.rel_err << " vs tol " << c.tol
            << " (" << c.relation << ")\n";
      }
    }
  }
  out << "wrote " << (fs::path(out_dir) / "report.json").string() << '\n';
  return all ? kExitPass : kExitCheckFailed;
}

int list_builtins(const std::string& kind_filter, std::ostream& out, std::ostream& err) {
  std::optional<BuiltinKind> kind;
  if (!kind_filter.empty()) {
    kind = parse_builtin_kind(kind_filter);
    if (!kind) {
      err << "error: unknown kind '" << kind_filter
          << "' (expected measure, field, family, lagrangian, configuration, hamiltonian, action or "
             "test-function)\n";
      return kExitInvalid;
    }
  }
  for (const BuiltinInfo& b : builtin_catalog()) {
    if (kind && b.kind != *kind) continue;
    out << b.name << "  [" << to_string(b.kind) << "]  " << b.summary << '\n';
    for (const ParamSpec& p : b.params) {
      out << "    " << p.name << " (" << p.type << ", default " << p.default_value << "): " << p.description << '\n';
    }
  }
  return kExitPass;
}

}  // namespace

int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"noetherlab: verification harness for transport, Noether and anomaly identities", "noetherlab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", NOETHERLAB_VERSION);

  std::vector<std::string> configs;
  std::string out_dir = "noetherlab-out";
  std::optional<std::uint64_t> seed;
  std::string variant = "both";
  int jobs = 1;
  CLI::App* run = app.add_subcommand("run", "run scenario files or builtin scenarios");
  run->add_option("configs", configs, "scenario YAML files or builtin scenario names")->required();
  run->add_option("--out", out_dir, "output directory")->capture_default_str();
  run->add_option("--seed", seed, "override every scenario seed");
  run->add_option("--variant", variant, "Theorem 1 variants to check")
      ->check(CLI::IsMember({"paper", "corrected", "both"}))
      ->capture_default_str();
  run->add_option("--jobs", jobs, "scenarios run concurrently")->check(CLI::PositiveNumber)->capture_default_str();

  std::string kind;
  CLI::App* list = app.add_subcommand("list-builtins", "print the builtin catalog with parameter schemas");
  list->add_option("--kind", kind, "only list builtins of this kind");

  CLI::App* scen = app.add_subcommand("list-scenarios", "print the builtin scenario names");

  std::vector<std::string> argv{"noetherlab"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::vector<const char*> cargv;
  for (const auto& a : argv) cargv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitInvalid;
  }

  if (*run) {
    RunOptions options;
    options.seed = seed;
    options.variant = variant == "paper" ? VariantSelection::paper
                      : variant == "corrected" ? VariantSelection::corrected
                                               : VariantSelection::both;
    options.jobs = jobs;
    return run_command(configs, out_dir, options, out, err);
  }
  if (*list) return list_builtins(kind, out, err);
  if (*scen) {
    for (const auto& name : builtin_scenario_names()) out << name << '\n';
    return kExitPass;
  }
  return kExitInvalid;
}

}  // namespace noetherlab::cli
