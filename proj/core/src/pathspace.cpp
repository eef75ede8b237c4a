#include "noetherlab/pathspace.hpp"

#include <cmath>
#include <future>

#include "noetherlab/error.hpp"
#include "noetherlab/finite_difference.hpp"

namespace noetherlab {

LatticePathSpace::LatticePathSpace(int d, int steps, double t_total)
    : d_(d), steps_(steps), dt_(0.0), t_total_(0.0) {
  if (d < 1 || steps < 1) throw DomainError("lattice path space: d and N must be >= 1");
  if (!(t_total > 0.0) || !std::isfinite(t_total)) {
    throw DomainError("lattice path space: horizon must be positive and finite");
  }
  dt_ = t_total / steps;
  t_total_ = dt_ * steps;
}

Vector LatticePathSpace::q(const Vector& path, int j) const {
  return path.segment(q_offset(j), d_);
}

Vector LatticePathSpace::p(const Vector& path, int j) const {
  return path.segment(p_offset(j), d_);
}

LatticePathSpace LatticePathSpace::refined(int factor) const {
  if (factor < 1) throw DomainError("lattice path space: refinement factor must be >= 1");
  return LatticePathSpace(d_, steps_ * factor, t_total_);
}

// ---------------------------------------------------------------------------
// Hamiltonians

Hamiltonian Hamiltonian::zero(int d) {
  Hamiltonian h;
  h.d = d;
  h.value = [](const Vector&, const Vector&) { return 0.0; };
  h.grad_q = [d](const Vector&, const Vector&) -> Vector { return Vector::Zero(d); };
  h.grad_p = h.grad_q;
  h.quadratic = true;
  h.name = "zero";
  return h;
}

Hamiltonian Hamiltonian::free_particle(int d, double mass) {
  if (!(mass > 0.0)) throw DomainError("free particle: mass must be positive");
  Hamiltonian h;
  h.d = d;
  h.value = [mass](const Vector&, const Vector& p) { return 0.5 * p.squaredNorm() / mass; };
  h.grad_q = [d](const Vector&, const Vector&) -> Vector { return Vector::Zero(d); };
  h.grad_p = [mass](const Vector&, const Vector& p) -> Vector { return p / mass; };
  h.quadratic = true;
  h.name = "free-particle";
  return h;
}

Hamiltonian Hamiltonian::harmonic(int d, double mass, double omega) {
  if (!(mass > 0.0)) throw DomainError("harmonic: mass must be positive");
  Hamiltonian h;
  h.d = d;
  const double k = mass * omega * omega;
  h.value = [mass, k](const Vector& q, const Vector& p) {
    return 0.5 * p.squaredNorm() / mass + 0.5 * k * q.squaredNorm();
  };
  h.grad_q = [k](const Vector& q, const Vector&) -> Vector { return k * q; };
  h.grad_p = [mass](const Vector&, const Vector& p) -> Vector { return p / mass; };
  h.quadratic = true;
  h.name = "harmonic";
  return h;
}

Hamiltonian Hamiltonian::quartic(int d, double lambda) {
  Hamiltonian h;
  h.d = d;
  h.value = [lambda](const Vector& q, const Vector& p) {
    const double r2 = q.squaredNorm();
    return 0.5 * p.squaredNorm() + 0.25 * lambda * r2 * r2;
  };
  h.grad_q = [lambda](const Vector& q, const Vector&) -> Vector {
    return lambda * q.squaredNorm() * q;
  };
  h.grad_p = [](const Vector&, const Vector& p) -> Vector { return p; };
  h.quadratic = lambda == 0.0;
  h.name = "quartic";
  return h;
}

Hamiltonian Hamiltonian::custom(int d, std::function<double(const Vector&, const Vector&)> value,
                                std::function<Vector(const Vector&, const Vector&)> grad_q,
                                std::function<Vector(const Vector&, const Vector&)> grad_p,
                                bool quadratic, Validation validation) {
  if (d < 1) throw DomainError("hamiltonian: d must be >= 1");
  if (validation == Validation::check) {
    const auto probes = default_probes(2 * d);
    const std::function<double(const Vector&)> f = [&](const Vector& z) {
      return value(z.head(d), z.tail(d));
    };
    const DerivativeCheck chk = check_gradient(
        f,
        [&](const Vector& z) -> Vector {
          Vector g(2 * d);
          g << grad_q(z.head(d), z.tail(d)), grad_p(z.head(d), z.tail(d));
          return g;
        },
        probes);
    if (!chk.passed()) {
      throw DomainError("hamiltonian: gradient disagrees with finite differences at " +
                        format_point(chk.worst_point));
    }
  }
  Hamiltonian h;
  h.d = d;
  h.value = std::move(value);
  h.grad_q = std::move(grad_q);
  h.grad_p = std::move(grad_p);
  h.quadratic = quadratic;
  return h;
}

// ---------------------------------------------------------------------------
// Discretized action

DiscreteAction::DiscreteAction(LatticePathSpace space, Hamiltonian hamiltonian, Vector q,
                               KineticRule rule)
    : space_(space), hamiltonian_(std::move(hamiltonian)), q_(std::move(q)), rule_(rule) {
  if (hamiltonian_.d != space_.d()) {
    throw DimensionError("discretize_action: hamiltonian has d = " +
                         std::to_string(hamiltonian_.d) + ", path space has d = " +
                         std::to_string(space_.d()));
  }
  if (q_.size() != space_.d()) throw DimensionError("discretize_action: q has the wrong dimension");
}

void DiscreteAction::check(const Vector& path) const {
  if (path.size() != space_.dim()) {
    throw DimensionError("action: path has dimension " + std::to_string(path.size()) +
                         ", expected " + std::to_string(space_.dim()));
  }
}

double DiscreteAction::kinetic(const Vector& path) const {
  check(path);
  const int n = space_.steps();
  const int d = space_.d();
  double sum = 0.0;
  for (int j = 1; j <= n; ++j) {
    const auto qj = path.segment(space_.q_offset(j), d);
    const Vector dq = j == 1 ? Vector(qj) : Vector(qj - path.segment(space_.q_offset(j - 1), d));
    const auto pj = path.segment(space_.p_offset(j), d);
    if (rule_ == KineticRule::forward) {
      sum += dq.dot(pj);
    } else {
      const auto pprev = path.segment(space_.p_offset(j == 1 ? 1 : j - 1), d);
      sum += 0.5 * dq.dot(pprev + pj);
    }
  }
  return sum;
}

Vector DiscreteAction::kinetic_gradient(const Vector& path) const {
  check(path);
  const int n = space_.steps();
  const int d = space_.d();
  Vector g = Vector::Zero(space_.dim());
  for (int j = 1; j <= n; ++j) {
    const auto qj = path.segment(space_.q_offset(j), d);
    const Vector dq = j == 1 ? Vector(qj) : Vector(qj - path.segment(space_.q_offset(j - 1), d));
    const int pj = space_.p_offset(j);
    const int pprev = space_.p_offset(j == 1 ? 1 : j - 1);
    // Weight vector multiplying dq in term j.
    Vector w = rule_ == KineticRule::forward
                   ? Vector(path.segment(pj, d))
                   : Vector(0.5 * (path.segment(pprev, d) + path.segment(pj, d)));
    g.segment(space_.q_offset(j), d) += w;
    if (j > 1) g.segment(space_.q_offset(j - 1), d) -= w;
    if (rule_ == KineticRule::forward) {
      g.segment(pj, d) += dq;
    } else {
      g.segment(pj, d) += 0.5 * dq;
      g.segment(pprev, d) += 0.5 * dq;
    }
  }
  return g;
}

double DiscreteAction::hamiltonian_term(const Vector& path) const {
  check(path);
  double sum = 0.0;
  for (int j = 1; j <= space_.steps(); ++j) {
    sum += hamiltonian_.value(space_.q(path, j) + q_, space_.p(path, j));
  }
  return sum * space_.dt();
}

Vector DiscreteAction::hamiltonian_gradient(const Vector& path) const {
  check(path);
  const int d = space_.d();
  Vector g(space_.dim());
  for (int j = 1; j <= space_.steps(); ++j) {
    const Vector qj = space_.q(path, j) + q_;
    const Vector pj = space_.p(path, j);
    g.segment(space_.q_offset(j), d) = space_.dt() * hamiltonian_.grad_q(qj, pj);
    g.segment(space_.p_offset(j), d) = space_.dt() * hamiltonian_.grad_p(qj, pj);
  }
  return g;
}

Vector DiscreteAction::gradient(const Vector& path) const {
  return hamiltonian_gradient(path) - kinetic_gradient(path);
}

DiscreteAction discretize_action(const LatticePathSpace& space, const Hamiltonian& h,
                                 const Vector& q, KineticRule rule) {
  return DiscreteAction(space, h, q, rule);
}

QuadraticForm extract_quadratic_form(const DiscreteAction& action) {
  if (!action.is_quadratic()) {
    throw DomainError("extract_quadratic_form: the hamiltonian is not declared quadratic");
  }
  const int m = action.dim();
  QuadraticForm form;
  const Vector zero = Vector::Zero(m);
  form.b = action.gradient(zero);
  form.c = action.value(zero);
  form.a.resize(m, m);
  Vector e = Vector::Zero(m);
  for (int i = 0; i < m; ++i) {
    e[i] = 1.0;
    form.a.col(i) = action.gradient(e) - form.b;
    e[i] = 0.0;
  }
  form.a = 0.5 * (form.a + form.a.transpose()).eval();
  return form;
}

PathAction PathAction::from(const DiscreteAction& action) {
  PathAction out;
  out.dim_ = action.dim();
  out.value_ = [action](const Vector& x) { return action.value(x); };
  out.gradient_ = [action](const Vector& x) { return action.gradient(x); };
  if (action.is_quadratic()) out.form_ = extract_quadratic_form(action);
  return out;
}

PathAction PathAction::quadratic(QuadraticForm form) {
  const Eigen::Index m = form.a.rows();
  if (form.a.cols() != m || form.b.size() != m) {
    throw DimensionError("quadratic action: A must be M x M and b of length M");
  }
  form.a = 0.5 * (form.a + form.a.transpose()).eval();
  PathAction out;
  out.dim_ = static_cast<int>(m);
  out.value_ = [form](const Vector& x) { return form.value(x); };
  out.gradient_ = [form](const Vector& x) { return form.gradient(x); };
  out.form_ = form;
  return out;
}

PathAction PathAction::custom(int dim, std::function<double(const Vector&)> value,
                              std::function<Vector(const Vector&)> gradient,
                              Validation validation) {
  if (validation == Validation::check) {
    const auto probes = default_probes(dim);
    const DerivativeCheck chk = check_gradient(value, gradient, probes);
    if (!chk.passed()) {
      throw DomainError("action: gradient disagrees with finite differences at " +
                        format_point(chk.worst_point));
    }
  }
  PathAction out;
  out.dim_ = dim;
  out.value_ = std::move(value);
  out.gradient_ = std::move(gradient);
  return out;
}

// ---------------------------------------------------------------------------
// Initial data and endpoint factor

InitialData InitialData::one(int d) {
  InitialData f;
  f.d = d;
  f.value = [](const Vector&) { return Complex(1.0, 0.0); };
  f.gradient = [d](const Vector&) -> CVector { return CVector::Zero(d); };
  f.frequency = Vector::Zero(d);
  return f;
}

InitialData InitialData::plane_wave(Vector kappa) {
  InitialData f;
  f.d = static_cast<int>(kappa.size());
  f.value = [kappa](const Vector& q) { return std::exp(Complex(0.0, kappa.dot(q))); };
  f.gradient = [kappa](const Vector& q) -> CVector {
    return Complex(0.0, 1.0) * std::exp(Complex(0.0, kappa.dot(q))) * kappa.cast<Complex>();
  };
  f.frequency = std::move(kappa);
  return f;
}

InitialData InitialData::gaussian(Vector center, double width) {
  if (!(width > 0.0)) throw DomainError("initial data: width must be positive");
  InitialData f;
  f.d = static_cast<int>(center.size());
  const double s = 1.0 / (width * width);
  f.value = [center, s](const Vector& q) {
    return Complex(std::exp(-0.5 * s * (q - center).squaredNorm()), 0.0);
  };
  f.gradient = [center, s](const Vector& q) -> CVector {
    const double v = std::exp(-0.5 * s * (q - center).squaredNorm());
    return (-s * v * (q - center)).cast<Complex>();
  };
  return f;
}

EndpointFactor EndpointFactor::one(int dim) {
  EndpointFactor e;
  e.dim = dim;
  e.value = [](const Vector&) { return Complex(1.0, 0.0); };
  e.gradient = [dim](const Vector&) -> CVector { return CVector::Zero(dim); };
  e.frequency = Vector::Zero(dim);
  return e;
}

EndpointFactor EndpointFactor::from_initial_data(const LatticePathSpace& space,
                                                 const InitialData& f, const Vector& q) {
  if (f.d != space.d() || q.size() != space.d()) {
    throw DimensionError("initial data: dimension differs from the path space");
  }
  const int m = space.dim();
  const int off = space.q_offset(space.steps());
  const int d = space.d();
  EndpointFactor e;
  e.dim = m;
  e.value = [f, q, off, d](const Vector& x) { return f.value(x.segment(off, d) + q); };
  e.gradient = [f, q, off, d, m](const Vector& x) -> CVector {
    CVector g = CVector::Zero(m);
    g.segment(off, d) = f.gradient(x.segment(off, d) + q);
    return g;
  };
  if (f.frequency) {
    Vector w = Vector::Zero(m);
    w.segment(off, d) = *f.frequency;
    e.frequency = w;
    e.phase = f.frequency->dot(q);
  }
  return e;
}

// ---------------------------------------------------------------------------
// Anomaly

double anomaly_term(const TransformationFamily& family, const Vector& delta, const Vector& path) {
  if (family.m() != 0) throw DimensionError("anomaly_term: the family must have trivial G (m = 0)");
  if (path.size() != family.n()) {
    throw DimensionError("anomaly_term: path has dimension " + std::to_string(path.size()) +
                         ", family acts on R^" + std::to_string(family.n()));
  }
  if (delta.size() != family.p()) throw DimensionError("anomaly_term: Delta has the wrong dimension");
  const VariationFields vf(family, FieldConfiguration::zero(family.n(), 0), delta);
  return vf.h1_jacobian(path).trace();
}

double anomaly_term(const LatticePathSpace& space, const TransformationFamily& family,
                    const Vector& delta, const Vector& path) {
  if (family.n() != space.dim()) {
    throw DimensionError("anomaly_term: family acts on R^" + std::to_string(family.n()) +
                         ", path space has M = " + std::to_string(space.dim()));
  }
  return anomaly_term(family, delta, path);
}

VectorField generator_field(const TransformationFamily& family, const Vector& delta) {
  if (family.m() != 0) throw DimensionError("generator_field: the family must have trivial G");
  const VariationFields vf(family, FieldConfiguration::zero(family.n(), 0), delta);
  return VectorField::custom(
      family.n(), [vf](const Vector& x) { return vf.h1(x); },
      [vf](const Vector& x) { return vf.h1_jacobian(x); }, Validation::skip);
}

Vector unit_increment_path(const LatticePathSpace& space) {
  Vector path = Vector::Zero(space.dim());
  for (int j = 1; j <= space.steps(); ++j) {
    path.segment(space.q_offset(j), space.d()).setConstant(static_cast<double>(j));
  }
  return path;
}

namespace {

// Integral over R^M of g(x) e^{-eps |x|^2 / 2} dx, via the normalized
// N(0, I / eps) under `engine`.
PairResult damped_integral(int m, double eps, const Integrand& g, const PairingEngine& engine) {
  const double scale = std::pow(2.0 * kPi / eps, 0.5 * m);
  PairResult r;
  if (engine.mode == PairingMode::tensor_grid) {
    r = integrate_log_weight(
        m, [eps](const Vector& x) { return -0.5 * eps * x.squaredNorm(); }, g, engine);
    return r;
  }
  const DensityMeasure frame =
      DensityMeasure::gaussian(Vector::Zero(m), Matrix::Identity(m, m) / eps);
  r = integrate(frame, g, engine);
  r.value *= scale;
  r.std_error *= scale;
  return r;
}

}  // namespace

AnomalyReport anomaly_report(const LatticePathSpace& space, const FamilyBuilder& build_family,
                             const Vector& delta, const Hamiltonian& h, const Vector& q,
                             const InitialData& f, std::span<const Vector> probes,
                             const PairingEngine& engine, const AnomalyOptions& options) {
  if (probes.empty()) throw DomainError("anomaly_report: probe set is empty");
  const DiscreteAction action = discretize_action(space, h, q, options.rule);
  const EndpointFactor endpoint = EndpointFactor::from_initial_data(space, f, q);
  const TransformationFamily family = build_family(space);
  if (family.n() != space.dim()) {
    throw DimensionError("anomaly_report: family dimension differs from the path space");
  }
  const VectorField h1 = generator_field(family, delta);

  AnomalyReport report;
  report.certificate_tolerance = options.certificate_tolerance;
  bool nonzero = false;
  for (const Vector& x : probes) {
    AnomalySample s;
    s.path = x;
    const Vector k = h1.value(x);
    s.action_derivative = action.gradient(x).dot(k);
    s.certificate = std::abs(Complex(0.0, s.action_derivative) * endpoint.value(x) +
                             bilinear(endpoint.gradient(x), k));
    s.anomaly = anomaly_term(space, family, delta, x);
    report.max_certificate = std::max(report.max_certificate, s.certificate);
    report.max_action_derivative = std::max(report.max_action_derivative, std::abs(s.action_derivative));
    nonzero = nonzero || s.anomaly != 0.0;
    report.samples.push_back(std::move(s));
  }
  report.corollary_applies = report.max_certificate <= options.certificate_tolerance;
  if (!report.corollary_applies) {
    report.status = "Corollary inapplicable";
  } else {
    report.status = nonzero ? "anomaly" : "anomaly-free";
  }

  // Refinement sweep: one task per level.
  std::vector<std::future<RefinementEntry>> levels;
  for (int factor : options.refinement_factors) {
    levels.push_back(std::async(std::launch::async, [&, factor] {
      const LatticePathSpace fine = space.refined(factor);
      const TransformationFamily fam = build_family(fine);
      const DiscreteAction act = discretize_action(fine, h, q, options.rule);
      const EndpointFactor end = EndpointFactor::from_initial_data(fine, f, q);
      const Vector x = options.reference_path(fine);
      const Vector k = generator_field(fam, delta).value(x);
      RefinementEntry e;
      e.steps = fine.steps();
      e.dim = fine.dim();
      e.anomaly = anomaly_term(fine, fam, delta, x);
      e.certificate = std::abs(Complex(0.0, act.gradient(x).dot(k)) * end.value(x) +
                               bilinear(end.gradient(x), k));
      return e;
    }));
  }
  for (auto& level : levels) report.refinement.push_back(level.get());
  for (std::size_t i = 1; i < report.refinement.size(); ++i) {
    const double prev = report.refinement[i - 1].anomaly;
    if (prev != 0.0) report.refinement_ratios.push_back(report.refinement[i].anomaly / prev);
  }

  if (options.fd_check) {
    const int m = space.dim();
    const double eps = options.epsilon;
    if (!(eps > 0.0)) throw DomainError("anomaly_report: epsilon must be positive");
    if (engine.mode != PairingMode::monte_carlo && m > kMaxDeterministicPathDim) {
      throw DomainError("anomaly_report: FD check with M = " + std::to_string(m) +
                        " > 12 needs a monte_carlo engine");
    }
    const Vector zero_r(0);
    const Matrix zero_a(0, m);
    auto pulled_back = [&](const TestFunction& phi, double z) {
      const Vector zz = delta * z;
      return damped_integral(
                 m, eps,
                 [&](const Vector& x) -> Complex {
                   const Vector y = family.apply(zz, x, zero_r, zero_a).x;
                   const double det = family.jacobian(zz, x, zero_r, zero_a).wrt_x.determinant();
                   const double damp = std::exp(-0.5 * eps * (y.squaredNorm() - x.squaredNorm()));
                   return phi.value(x) * std::exp(Complex(0.0, action.value(y))) *
                          endpoint.value(y) * damp * det;
                 },
                 engine)
          .value;
    };
    for (const TestFunction& phi : options.fd_probes) {
      if (phi.dim() != m) throw DimensionError("anomaly_report: FD probe dimension mismatch");
      CorollaryCheck c;
      c.fd = (pulled_back(phi, options.fd_step) - pulled_back(phi, -options.fd_step)) /
             (2.0 * options.fd_step);
      auto part = [&](auto&& density) {
        return damped_integral(m, eps, density, engine).value;
      };
      c.action_part = part([&](const Vector& x) {
        const Vector k = h1.value(x);
        return phi.value(x) * std::exp(Complex(0.0, action.value(x))) *
               (Complex(0.0, action.gradient(x).dot(k)) * endpoint.value(x) +
                bilinear(endpoint.gradient(x), k));
      });
      c.anomaly_part = part([&](const Vector& x) {
        return phi.value(x) * std::exp(Complex(0.0, action.value(x))) * endpoint.value(x) *
               h1.jacobian(x).trace();
      });
      c.damping_part = part([&](const Vector& x) {
        return phi.value(x) * std::exp(Complex(0.0, action.value(x))) * endpoint.value(x) *
               (-eps * x.dot(h1.value(x)));
      });
      const double scale = std::max(1.0, std::abs(c.fd));
      c.rel_error = std::abs(c.fd - (c.action_part + c.anomaly_part + c.damping_part)) / scale;
      c.anomaly_only_error = std::abs(c.fd - c.anomaly_part) / scale;
      report.corollary_checks_passed =
          report.corollary_checks_passed && c.rel_error <= options.fd_tolerance;
      report.corollary_checks.push_back(c);
    }
  }
  return report;
}

}  // namespace noetherlab
