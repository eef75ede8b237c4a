#include "noetherlab/cli/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace noetherlab::cli {

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::logderiv_check: return "logderiv_check";
    case ScenarioKind::theorem1_check: return "theorem1_check";
    case ScenarioKind::noether_check: return "noether_check";
    case ScenarioKind::anomaly_demo: return "anomaly_demo";
  }
  return "unknown";
}

namespace {

std::string join(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += (out.empty() ? "" : "\n") + l;
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> messages)
    : Error(join(messages)), messages_(std::move(messages)) {}

namespace {

Json to_json(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Sequence: {
      Json arr = Json::array();
      for (const auto& item : node) arr.push_back(to_json(item));
      return arr;
    }
    case YAML::NodeType::Map: {
      Json obj = Json::object();
      for (const auto& kv : node) obj[kv.first.as<std::string>()] = to_json(kv.second);
      return obj;
    }
    case YAML::NodeType::Scalar: {
      const std::string s = node.Scalar();
      if (node.Tag() == "!") return s;  // quoted
      if (s == "true") return true;
      if (s == "false") return false;
      long long i = 0;
      if (YAML::convert<long long>::decode(node, i)) return i;
      double d = 0.0;
      if (YAML::convert<double>::decode(node, d) && std::isfinite(d)) return d;
      return s;
    }
    default: return nullptr;
  }
}

struct EngineSpec {
  PairingMode mode = PairingMode::gauss_hermite;
  int order = 40;
  int panels = 8;
  std::vector<double> lo{-4.0};
  std::vector<double> hi{4.0};
  int samples = 100000;
  int workers = 1;
};

/// Collects every problem instead of stopping at the first.
class Loader {
 public:
  Loader(std::string source, const RunOptions& options) : source_(std::move(source)), options_(options) {}

  std::vector<std::string> errors;

  void fail(const YAML::Node& at, const std::string& field, const std::string& message) {
    std::ostringstream os;
    os << source_;
    if (at.IsDefined() && at.Mark().line >= 0) os << ":" << at.Mark().line + 1;
    os << ": " << (field.empty() ? "" : "'" + field + "': ") << message;
    errors.push_back(os.str());
  }

  void check_keys(const YAML::Node& node, const std::string& where, std::set<std::string> allowed) {
    if (!node.IsMap()) return;
    for (const auto& kv : node) {
      const std::string key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(kv.first, where.empty() ? key : where + "." + key, "unknown field");
    }
  }

  template <class T>
  std::optional<T> get(const YAML::Node& parent, const std::string& key, const std::string& where,
                       bool required) {
    const YAML::Node n = parent.IsMap() ? parent[key] : YAML::Node();
    const std::string field = where.empty() ? key : where + "." + key;
    if (!n.IsDefined() || n.IsNull()) {
      if (required) fail(parent, field, "required field is missing");
      return std::nullopt;
    }
    T value{};
    if (!n.IsScalar() || !YAML::convert<T>::decode(n, value)) {
      fail(n, field, "cannot read '" + (n.IsScalar() ? n.Scalar() : std::string("<non-scalar>")) + "' as " +
                         type_name<T>());
      return std::nullopt;
    }
    if constexpr (std::is_floating_point_v<T>) {
      if (!std::isfinite(value)) {
        fail(n, field, "must be finite");
        return std::nullopt;
      }
    }
    return value;
  }

  template <class T>
  T get_or(const YAML::Node& parent, const std::string& key, const std::string& where, T fallback) {
    return get<T>(parent, key, where, false).value_or(fallback);
  }

  std::optional<std::vector<double>> numbers(const YAML::Node& n, const std::string& field) {
    std::vector<double> out;
    if (n.IsScalar()) {
      double v = 0.0;
      if (!YAML::convert<double>::decode(n, v)) {
        fail(n, field, "expected a number");
        return std::nullopt;
      }
      return std::vector<double>{v};
    }
    if (!n.IsSequence()) {
      fail(n, field, "expected a number or a list of numbers");
      return std::nullopt;
    }
    for (const auto& item : n) {
      if (item.IsSequence()) {  // matrix rows, flattened row-major
        auto row = numbers(item, field);
        if (!row) return std::nullopt;
        out.insert(out.end(), row->begin(), row->end());
        continue;
      }
      double v = 0.0;
      if (!item.IsScalar() || !YAML::convert<double>::decode(item, v)) {
        fail(item, field, "expected a number");
        return std::nullopt;
      }
      out.push_back(v);
    }
    return out;
  }

  std::optional<Vector> vector(const YAML::Node& parent, const std::string& key, const std::string& where) {
    const YAML::Node n = parent[key];
    if (!n.IsDefined() || n.IsNull()) return std::nullopt;
    auto v = numbers(n, where.empty() ? key : where + "." + key);
    if (!v) return std::nullopt;
    return Vector(Eigen::Map<const Vector>(v->data(), static_cast<Eigen::Index>(v->size())));
  }

  /// {builtin: name, params: {...}} resolved against the catalog.
  template <class T>
  std::optional<T> builtin(const YAML::Node& parent, const std::string& key, BuiltinKind kind,
                           const std::function<T(const std::string&, const Params&)>& make) {
    const YAML::Node n = parent[key];
    if (!n.IsDefined() || n.IsNull()) {
      fail(parent, key, "required field is missing");
      return std::nullopt;
    }
    return builtin_node<T>(n, key, kind, make);
  }

  template <class T>
  std::optional<T> builtin_node(const YAML::Node& n, const std::string& field, BuiltinKind kind,
                                const std::function<T(const std::string&, const Params&)>& make,
                                std::set<std::string> extra_keys = {}) {
    if (!n.IsMap()) {
      fail(n, field, "expected a mapping with 'builtin' and optional 'params'");
      return std::nullopt;
    }
    extra_keys.insert("builtin");
    extra_keys.insert("params");
    check_keys(n, field, extra_keys);
    const auto name = get<std::string>(n, "builtin", field, true);
    if (!name) return std::nullopt;
    const BuiltinInfo* info = find_builtin(*name);
    if (info == nullptr) {
      fail(n["builtin"], field + ".builtin", "unknown builtin '" + *name + "'");
      return std::nullopt;
    }
    if (info->kind != kind) {
      fail(n["builtin"], field + ".builtin",
           "'" + *name + "' is a " + to_string(info->kind) + ", expected a " + to_string(kind));
      return std::nullopt;
    }
    Params params;
    bool ok = true;
    if (const YAML::Node p = n["params"]; p.IsDefined() && !p.IsNull()) {
      if (!p.IsMap()) {
        fail(p, field + ".params", "expected a mapping");
        return std::nullopt;
      }
      for (const auto& kv : p) {
        const std::string pname = kv.first.as<std::string>();
        const bool known = std::any_of(info->params.begin(), info->params.end(),
                                       [&](const ParamSpec& s) { return s.name == pname; });
        if (!known) {
          fail(kv.first, field + ".params." + pname, "unknown parameter for '" + *name + "'");
          ok = false;
          continue;
        }
        auto v = numbers(kv.second, field + ".params." + pname);
        if (!v) {
          ok = false;
          continue;
        }
        params.set(pname, *v);
      }
    }
    if (!ok) return std::nullopt;
    try {
      return make(*name, params);
    } catch (const Error& e) {
      fail(n, field, e.what());
      return std::nullopt;
    }
  }

  std::optional<EngineSpec> engine(const YAML::Node& parent, const std::string& field) {
    EngineSpec spec;
    const YAML::Node n = parent["engine"];
    if (!n.IsDefined() || n.IsNull()) return spec;
    if (!n.IsMap()) {
      fail(n, field, "expected a mapping");
      return std::nullopt;
    }
    check_keys(n, field, {"mode", "order", "panels", "box", "samples", "workers"});
    const std::string mode = get_or<std::string>(n, "mode", field, "gauss_hermite");
    if (mode == "gauss_hermite") {
      spec.mode = PairingMode::gauss_hermite;
    } else if (mode == "tensor_grid") {
      spec.mode = PairingMode::tensor_grid;
      spec.order = 20;
    } else if (mode == "monte_carlo") {
      spec.mode = PairingMode::monte_carlo;
    } else {
      fail(n["mode"], field + ".mode", "expected gauss_hermite, tensor_grid or monte_carlo");
      return std::nullopt;
    }
    spec.order = get_or<int>(n, "order", field, spec.order);
    spec.panels = get_or<int>(n, "panels", field, spec.panels);
    spec.samples = get_or<int>(n, "samples", field, spec.samples);
    spec.workers = get_or<int>(n, "workers", field, spec.workers);
    if (spec.order < 1) fail(n["order"], field + ".order", "must be >= 1");
    if (spec.panels < 1) fail(n["panels"], field + ".panels", "must be >= 1");
    if (spec.samples < 2) fail(n["samples"], field + ".samples", "must be >= 2");
    if (spec.workers < 1) fail(n["workers"], field + ".workers", "must be >= 1");
    if (const YAML::Node box = n["box"]; box.IsDefined()) {
      check_keys(box, field + ".box", {"lo", "hi"});
      auto lo = box["lo"].IsDefined() ? numbers(box["lo"], field + ".box.lo") : std::nullopt;
      auto hi = box["hi"].IsDefined() ? numbers(box["hi"], field + ".box.hi") : std::nullopt;
      if (!lo || !hi) {
        fail(box, field + ".box", "needs numeric 'lo' and 'hi'");
      } else {
        spec.lo = *lo;
        spec.hi = *hi;
      }
    } else if (spec.mode == PairingMode::tensor_grid) {
      fail(n, field + ".box", "tensor_grid needs a bounding box");
    }
    return spec;
  }

  std::optional<PairingEngine> resolve(const EngineSpec& spec, int dim, const YAML::Node& at,
                                       const std::string& field, std::uint64_t seed) {
    switch (spec.mode) {
      case PairingMode::gauss_hermite: return PairingEngine::gauss_hermite(spec.order);
      case PairingMode::monte_carlo: return PairingEngine::monte_carlo(spec.samples, seed, spec.workers);
      case PairingMode::tensor_grid: {
        auto widen = [&](const std::vector<double>& v) -> std::optional<Vector> {
          if (v.size() == 1) return Vector::Constant(dim, v[0]);
          if (static_cast<int>(v.size()) == dim) return Eigen::Map<const Vector>(v.data(), dim);
          fail(at, field + ".box", "corner has length " + std::to_string(v.size()) + ", expected " +
                                       std::to_string(dim));
          return std::nullopt;
        };
        auto lo = widen(spec.lo);
        auto hi = widen(spec.hi);
        if (!lo || !hi) return std::nullopt;
        if (!((hi->array() > lo->array()).all())) {
          fail(at, field + ".box", "needs lo < hi componentwise");
          return std::nullopt;
        }
        return PairingEngine::tensor_grid({*lo, *hi}, spec.order, spec.panels);
      }
    }
    return std::nullopt;
  }

  ProbeBox probe_box(const YAML::Node& parent, const std::string& key, ProbeBox fallback) {
    const YAML::Node n = parent[key];
    if (!n.IsDefined() || n.IsNull()) return fallback;
    if (!n.IsMap()) {
      fail(n, key, "expected a mapping with count, lo, hi");
      return fallback;
    }
    check_keys(n, key, {"count", "lo", "hi"});
    ProbeBox b;
    b.count = get_or<int>(n, "count", key, fallback.count);
    b.lo = get_or<double>(n, "lo", key, fallback.lo);
    b.hi = get_or<double>(n, "hi", key, fallback.hi);
    if (b.count < 1) fail(n, key + ".count", "must be >= 1");
    if (!(b.hi > b.lo)) fail(n, key, "needs lo < hi");
    return b;
  }

  std::vector<NamedTestFunction> test_functions(const YAML::Node& parent, const std::string& key,
                                                bool required, std::uint64_t seed) {
    std::vector<NamedTestFunction> out;
    const YAML::Node n = parent[key];
    if (!n.IsDefined() || n.IsNull()) {
      if (required) fail(parent, key, "required field is missing");
      return out;
    }
    if (!n.IsSequence() || n.size() == 0) {
      fail(n, key, "expected a non-empty list");
      return out;
    }
    int i = 0;
    for (const auto& item : n) {
      const std::string field = key + "[" + std::to_string(i++) + "]";
      auto phi = builtin_node<TestFunction>(item, field, BuiltinKind::test_function, make_test_function,
                                            {"engine", "label"});
      if (!phi) continue;
      NamedTestFunction t{get_or<std::string>(item, "label", field, item["builtin"].as<std::string>()), *phi, {}};
      if (item["engine"].IsDefined()) {
        if (auto spec = engine(item, field + ".engine")) t.engine = resolve(*spec, phi->dim(), item, field + ".engine", seed);
      }
      out.push_back(std::move(t));
    }
    return out;
  }

  const std::string& source() const { return source_; }
  const RunOptions& options() const { return options_; }

 private:
  template <class T>
  static std::string type_name() {
    if constexpr (std::is_same_v<T, int>) return "an integer";
    if constexpr (std::is_same_v<T, double>) return "a number";
    if constexpr (std::is_same_v<T, bool>) return "true or false";
    return "a string";
  }

  std::string source_;
  const RunOptions& options_;
};


void check_dim(Loader& ld, const YAML::Node& at, const std::string& what, int got, int want) {
  if (got != want) {
    ld.fail(at, what, "dimension " + std::to_string(got) + " does not match " + std::to_string(want));
  }
}

std::optional<NoetherProblem> noether_problem(Loader& ld, const YAML::Node& doc) {
  auto lag = ld.builtin<LagrangianDensity>(doc, "lagrangian", BuiltinKind::lagrangian, make_lagrangian);
  auto cfg = ld.builtin<FieldConfiguration>(doc, "configuration", BuiltinKind::configuration, make_configuration);
  auto fam = ld.builtin<TransformationFamily>(doc, "family", BuiltinKind::family, make_family);
  auto nu = ld.builtin<DensityMeasure>(doc, "measure", BuiltinKind::measure, make_measure);
  if (!lag || !cfg || !fam || !nu) return std::nullopt;
  const std::size_t before = ld.errors.size();
  check_dim(ld, doc["configuration"], "configuration (n)", cfg->n(), lag->n());
  check_dim(ld, doc["configuration"], "configuration (m)", cfg->m(), lag->m());
  check_dim(ld, doc["family"], "family (n)", fam->n(), lag->n());
  check_dim(ld, doc["family"], "family (m)", fam->m(), lag->m());
  check_dim(ld, doc["measure"], "measure", nu->dim(), lag->n());
  if (ld.errors.size() != before) return std::nullopt;
  return NoetherProblem{*lag, *cfg, *fam, *nu};
}

Vector delta_of(Loader& ld, const YAML::Node& doc, int p) {
  auto d = ld.vector(doc, "delta", "");
  if (!d) return Vector::Ones(p);
  if (d->size() == 1 && p > 1) return Vector::Constant(p, (*d)[0]);
  check_dim(ld, doc["delta"], "delta", static_cast<int>(d->size()), p);
  return *d;
}

void require_test_dims(Loader& ld, const YAML::Node& doc, const std::string& key,
                       const std::vector<NamedTestFunction>& tfs, int dim) {
  for (std::size_t i = 0; i < tfs.size(); ++i) {
    check_dim(ld, doc[key][i], key + "[" + std::to_string(i) + "]", tfs[i].phi.dim(), dim);
  }
}

std::optional<InitialData> initial_data(Loader& ld, const YAML::Node& doc, int d) {
  const YAML::Node n = doc["initial_data"];
  if (!n.IsDefined() || n.IsNull()) return InitialData::one(d);
  ld.check_keys(n, "initial_data", {"type", "kappa", "center", "width"});
  const std::string type = ld.get_or<std::string>(n, "type", "initial_data", "one");
  if (type == "one") return InitialData::one(d);
  if (type == "plane_wave") {
    Vector k = ld.vector(n, "kappa", "initial_data").value_or(Vector::Zero(d));
    if (k.size() == 1 && d > 1) k = Vector::Constant(d, k[0]);
    check_dim(ld, n, "initial_data.kappa", static_cast<int>(k.size()), d);
    return InitialData::plane_wave(k);
  }
  if (type == "gaussian") {
    Vector c = ld.vector(n, "center", "initial_data").value_or(Vector::Zero(d));
    if (c.size() == 1 && d > 1) c = Vector::Constant(d, c[0]);
    check_dim(ld, n, "initial_data.center", static_cast<int>(c.size()), d);
    try {
      return InitialData::gaussian(c, ld.get_or<double>(n, "width", "initial_data", 1.0));
    } catch (const Error& e) {
      ld.fail(n, "initial_data", e.what());
      return std::nullopt;
    }
  }
  ld.fail(n["type"], "initial_data.type", "expected one, plane_wave or gaussian");
  return std::nullopt;
}

}  // namespace

Scenario load_scenario(const std::string& text, const std::string& source, const RunOptions& options) {
  YAML::Node doc;
  try {
    doc = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ValidationError({source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg});
  }
  if (!doc.IsMap()) throw ValidationError({source + ": a scenario must be a YAML mapping"});

  Loader ld(source, options);
  Scenario sc;
  sc.source = source;
  sc.config = to_json(doc);
  ld.check_keys(doc, "",
                {"name", "kind", "seed", "engine", "fd", "tolerance", "measure", "field", "lagrangian",
                 "configuration", "family", "delta", "test_functions", "points", "frame", "convergence",
                 "expect", "closed_form", "certificate_threshold", "certificate_probes", "space",
                 "hamiltonian", "q", "initial_data", "probes", "refinement", "ratio", "trace", "grid",
                 "corollary_check", "closed_form_tolerance", "fd_trace_tolerance"});

  sc.name = ld.get<std::string>(doc, "name", "", true).value_or("");
  const auto kind = ld.get<std::string>(doc, "kind", "", true);
  if (kind) {
    if (*kind == "logderiv_check") sc.kind = ScenarioKind::logderiv_check;
    else if (*kind == "theorem1_check") sc.kind = ScenarioKind::theorem1_check;
    else if (*kind == "noether_check") sc.kind = ScenarioKind::noether_check;
    else if (*kind == "anomaly_demo") sc.kind = ScenarioKind::anomaly_demo;
    else ld.fail(doc["kind"], "kind", "expected logderiv_check, theorem1_check, noether_check or anomaly_demo");
  }
  const int seed = ld.get_or<int>(doc, "seed", "", 1);
  sc.seed = options.seed.value_or(static_cast<std::uint64_t>(seed));
  const auto engine_spec = ld.engine(doc, "engine");
  if (const YAML::Node fd = doc["fd"]; fd.IsDefined()) {
    ld.check_keys(fd, "fd", {"step"});
    sc.fd_step = ld.get_or<double>(fd, "step", "fd", sc.fd_step);
    if (!(sc.fd_step > 0.0)) ld.fail(fd, "fd.step", "must be positive");
  }
  if (!kind) throw ValidationError(ld.errors);

  auto finish_engine = [&](int dim) {
    if (engine_spec) {
      if (auto e = ld.resolve(*engine_spec, dim, doc["engine"], "engine", sc.seed)) sc.engine = *e;
    }
  };

  switch (sc.kind) {
    case ScenarioKind::logderiv_check: {
      sc.tolerance = ld.get_or<double>(doc, "tolerance", "", 1e-6);
      auto nu = ld.builtin<DensityMeasure>(doc, "measure", BuiltinKind::measure, make_measure);
      auto k = ld.builtin<VectorField>(doc, "field", BuiltinKind::field, make_field);
      sc.test_functions = ld.test_functions(doc, "test_functions", true, sc.seed);
      if (nu && k) {
        check_dim(ld, doc["field"], "field", k->dim(), nu->dim());
        require_test_dims(ld, doc, "test_functions", sc.test_functions, nu->dim());
        finish_engine(nu->dim());
        LogDerivSpec spec{*nu, *k};
        if (const YAML::Node c = doc["convergence"]; c.IsDefined()) {
          ld.check_keys(c, "convergence", {"step", "min_order", "max_order"});
          spec.convergence_step = ld.get_or<double>(c, "step", "convergence", spec.convergence_step);
          spec.min_order = ld.get_or<double>(c, "min_order", "convergence", spec.min_order);
          spec.max_order = ld.get_or<double>(c, "max_order", "convergence", spec.max_order);
        }
        if (nu->is_flat() && sc.engine.mode != PairingMode::tensor_grid) {
          for (const auto& t : sc.test_functions) {
            if (!t.engine) ld.fail(doc["engine"], "engine", "a flat measure needs a tensor_grid engine with a box");
          }
        }
        sc.logderiv = spec;
      }
      break;
    }
    case ScenarioKind::theorem1_check: {
      sc.tolerance = ld.get_or<double>(doc, "tolerance", "", 1e-5);
      auto pb = noether_problem(ld, doc);
      sc.test_functions = ld.test_functions(doc, "test_functions", true, sc.seed);
      const ProbeBox points = ld.probe_box(doc, "points", ProbeBox{});
      FamilyFrame frame = FamilyFrame::pullback;
      const std::string frame_name = ld.get_or<std::string>(doc, "frame", "", "pullback");
      if (frame_name == "pushforward") frame = FamilyFrame::pushforward;
      else if (frame_name != "pullback") ld.fail(doc["frame"], "frame", "expected pullback or pushforward");
      if (pb) {
        const Vector delta = delta_of(ld, doc, pb->family.p());
        require_test_dims(ld, doc, "test_functions", sc.test_functions, pb->lagrangian.n());
        finish_engine(pb->lagrangian.n());
        sc.theorem1 = Theorem1Spec{*pb, delta, frame, points};
      }
      break;
    }
    case ScenarioKind::noether_check: {
      sc.tolerance = ld.get_or<double>(doc, "tolerance", "", 1e-6);
      auto pb = noether_problem(ld, doc);
      sc.test_functions = ld.test_functions(doc, "certificate_probes", true, sc.seed);
      const ProbeBox points = ld.probe_box(doc, "points", ProbeBox{100, -2.0, 2.0});
      bool expect_vanishing = true;
      const auto expect = ld.get<std::string>(doc, "expect", "", true);
      if (expect) {
        if (*expect == "not_invariant") expect_vanishing = false;
        else if (*expect != "vanishing") ld.fail(doc["expect"], "expect", "expected vanishing or not_invariant");
      }
      const bool closed_form = ld.get_or<bool>(doc, "closed_form", "", false);
      const double threshold = ld.get_or<double>(doc, "certificate_threshold", "", 1e-8);
      const double closed_tol = ld.get_or<double>(doc, "closed_form_tolerance", "", 1e-8);
      if (pb) {
        const Vector delta = delta_of(ld, doc, pb->family.p());
        require_test_dims(ld, doc, "certificate_probes", sc.test_functions, pb->lagrangian.n());
        finish_engine(pb->lagrangian.n());
        sc.noether = NoetherSpec{*pb, delta, points, expect_vanishing, closed_form, threshold, closed_tol};
      }
      break;
    }
    case ScenarioKind::anomaly_demo: {
      sc.tolerance = ld.get_or<double>(doc, "tolerance", "", 1e-12);
      AnomalySpec spec;
      const YAML::Node s = doc["space"];
      int d = 1;
      if (!s.IsDefined()) {
        ld.fail(doc, "space", "required field is missing");
      } else {
        ld.check_keys(s, "space", {"d", "steps", "t"});
        d = ld.get_or<int>(s, "d", "space", 1);
        try {
          spec.space = LatticePathSpace(d, ld.get_or<int>(s, "steps", "space", 1), ld.get_or<double>(s, "t", "space", 1.0));
        } catch (const Error& e) {
          ld.fail(s, "space", e.what());
        }
      }
      d = spec.space.d();
      const int m = spec.space.dim();
      auto h = ld.builtin<Hamiltonian>(doc, "hamiltonian", BuiltinKind::hamiltonian, make_hamiltonian);
      if (h) {
        check_dim(ld, doc["hamiltonian"], "hamiltonian (d)", h->d, d);
        spec.hamiltonian = *h;
      }
      auto builder = ld.builtin<FamilyBuilder>(doc, "family", BuiltinKind::family, make_lattice_family_builder);
      if (builder) {
        try {
          const TransformationFamily f = (*builder)(spec.space);
          check_dim(ld, doc["family"], "family (n)", f.n(), m);
          spec.delta = delta_of(ld, doc, f.p());
          spec.family = *builder;
        } catch (const Error& e) {
          ld.fail(doc["family"], "family", e.what());
        }
      }
      spec.q = ld.vector(doc, "q", "").value_or(Vector::Zero(d));
      if (spec.q.size() == 1 && d > 1) spec.q = Vector::Constant(d, spec.q[0]);
      check_dim(ld, doc["q"], "q", static_cast<int>(spec.q.size()), d);
      if (auto f = initial_data(ld, doc, d)) spec.initial_data = *f;
      spec.probes = ld.probe_box(doc, "probes", ProbeBox{10, -1.5, 1.5});
      if (const YAML::Node r = doc["refinement"]; r.IsDefined()) {
        if (auto v = ld.numbers(r, "refinement")) {
          spec.refinement.clear();
          for (double f : *v) {
            if (f < 1 || f != std::round(f)) ld.fail(r, "refinement", "factors must be positive integers");
            spec.refinement.push_back(static_cast<int>(f));
          }
        }
      }
      const auto expect = ld.get<std::string>(doc, "expect", "", true);
      if (expect) {
        if (*expect != "anomaly" && *expect != "anomaly-free" && *expect != "Corollary inapplicable") {
          ld.fail(doc["expect"], "expect", "expected anomaly, anomaly-free or Corollary inapplicable");
        }
        spec.expect_status = *expect;
      }
      if (const YAML::Node r = doc["ratio"]; r.IsDefined()) {
        ld.check_keys(r, "ratio", {"target", "rel"});
        spec.ratio_target = ld.get<double>(r, "target", "ratio", true);
        spec.ratio_tolerance = ld.get_or<double>(r, "rel", "ratio", spec.ratio_tolerance);
      }
      const std::string trace = ld.get_or<std::string>(doc, "trace", "", "free");
      if (trace == "dim") spec.trace_is_dim = true;
      else if (trace != "free") ld.fail(doc["trace"], "trace", "expected dim or free");
      spec.fd_trace_tolerance = ld.get_or<double>(doc, "fd_trace_tolerance", "", spec.fd_trace_tolerance);
      if (doc["grid"].IsDefined()) spec.grid = ld.probe_box(doc, "grid", ProbeBox{41, -2.0, 2.0});
      if (const YAML::Node c = doc["corollary_check"]; c.IsDefined()) {
        ld.check_keys(c, "corollary_check", {"epsilon", "tolerance", "test_functions"});
        spec.fd_check = true;
        spec.epsilon = ld.get_or<double>(c, "epsilon", "corollary_check", 1.0);
        spec.fd_tolerance = ld.get_or<double>(c, "tolerance", "corollary_check", spec.fd_tolerance);
        if (!(spec.epsilon > 0.0)) ld.fail(c, "corollary_check.epsilon", "must be positive");
        spec.fd_probes = ld.test_functions(c, "test_functions", true, sc.seed);
        require_test_dims(ld, c, "test_functions", spec.fd_probes, m);
        if (m > kMaxDeterministicPathDim && engine_spec && engine_spec->mode != PairingMode::monte_carlo) {
          ld.fail(c, "corollary_check", "M = " + std::to_string(m) + " > 12 needs a monte_carlo engine");
        }
      }
      finish_engine(m);
      sc.anomaly = spec;
      break;
    }
  }
  if (!ld.errors.empty()) throw ValidationError(ld.errors);
  return sc;
}

Scenario load_scenario_file(const std::string& path, const RunOptions& options) {
  std::ifstream in(path);
  if (!in) throw ValidationError({path + ": cannot open scenario file"});
  std::stringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str(), path, options);
}

}  // namespace noetherlab::cli
