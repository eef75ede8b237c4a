#include "noetherlab/noether.hpp"

#include <cmath>

#include "noetherlab/error.hpp"
#include "noetherlab/finite_difference.hpp"

namespace noetherlab {
namespace {

// Fixed m x n matrix used as the alpha probe in validations.
Matrix alpha_probe(int m, int n, double scale = 1.0) {
  static constexpr double kTable[] = {0.3, -0.7, 0.45, 0.9, -0.2, 0.61, -0.38, 0.15};
  Matrix a(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = scale * kTable[(2 * i + 3 * j) % 8];
  }
  return a;
}

Vector cycle_probe(const std::vector<Vector>& probes, std::size_t i) {
  return probes[i % probes.size()];
}

Vector flatten(const Matrix& a) {
  return Eigen::Map<const Vector>(a.data(), a.size());
}

Matrix unflatten(const Vector& v, int rows, int cols) {
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Vector stack(const FamilyImage& img) {
  Vector out(img.x.size() + img.r.size());
  out << img.x, img.r;
  return out;
}

// D_x of x -> F(z, x, g(x), g'(x)), stacked as (n + m) x n.
Matrix composite_jacobian(const TransformationFamily& family, const FieldConfiguration& field,
                          const Vector& z, const Vector& x) {
  if (family.has_analytic_jacobian()) {
    const FamilyJacobian j =
        family.jacobian(z, x, field.value(x), field.derivative(x));
    return j.wrt_x + j.wrt_r * field.derivative(x);
  }
  return fd_jacobian(
      [&](const Vector& y) {
        return stack(family.apply(z, y, field.value(y), field.derivative(y)));
      },
      x);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw DimensionError(what);
}

}  // namespace

// ---------------------------------------------------------------------------
// LagrangianDensity

LagrangianDensity LagrangianDensity::create(int n, int m, ValueFn value, VectorPartialFn d_x,
                                            VectorPartialFn d_r, MatrixPartialFn d_alpha,
                                            Validation validation) {
  if (n < 1 || m < 0) throw DomainError("lagrangian: invalid dimensions");
  if (validation == Validation::check) {
    const auto xs = default_probes(n);
    const auto rs = default_probes(std::max(m, 1));
    double worst = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const Vector& x = xs[i];
      const Vector r = m > 0 ? cycle_probe(rs, i + 1) : Vector(0);
      const Matrix a = alpha_probe(m, n, 1.0 - 0.1 * static_cast<double>(i % 3));
      worst = std::max(worst, scaled_error(CMatrix(d_x(x, r, a)),
                                           CMatrix(fd_gradient(
                                               [&](const Vector& y) { return value(y, r, a); }, x))));
      if (m > 0) {
        worst = std::max(worst, scaled_error(CMatrix(d_r(x, r, a)),
                                             CMatrix(fd_gradient(
                                                 [&](const Vector& s) { return value(x, s, a); }, r))));
        const CVector fd_a = fd_gradient(
            [&](const Vector& v) { return value(x, r, unflatten(v, m, n)); }, flatten(a));
        const CMatrix analytic = d_alpha(x, r, a);
        worst = std::max(worst, scaled_error(CMatrix(Eigen::Map<const CVector>(analytic.data(),
                                                                               analytic.size())),
                                             CMatrix(fd_a)));
      }
    }
    if (worst > kDerivativeCheckTol) {
      throw DomainError("lagrangian: partial derivatives disagree with finite differences (error " +
                        std::to_string(worst) + ")");
    }
  }
  LagrangianDensity l;
  l.n_ = n;
  l.m_ = m;
  l.value_ = std::move(value);
  l.d_x_ = std::move(d_x);
  l.d_r_ = std::move(d_r);
  l.d_alpha_ = std::move(d_alpha);
  return l;
}

// ---------------------------------------------------------------------------
// FieldConfiguration

FieldConfiguration FieldConfiguration::create(int n, int m, ValueFn g, DerivativeFn g_prime,
                                              Validation validation) {
  if (n < 1 || m < 0) throw DomainError("field configuration: invalid dimensions");
  if (validation == Validation::check && m > 0) {
    const auto probes = default_probes(n);
    const DerivativeCheck chk = check_jacobian(g, g_prime, probes);
    if (!chk.passed()) {
      throw DomainError("field configuration: g' disagrees with finite differences at " +
                        format_point(chk.worst_point));
    }
  }
  FieldConfiguration f;
  f.n_ = n;
  f.m_ = m;
  f.g_ = std::move(g);
  f.g_prime_ = std::move(g_prime);
  return f;
}

FieldConfiguration FieldConfiguration::zero(int n, int m) {
  return create(
      n, m, [m](const Vector&) -> Vector { return Vector::Zero(m); },
      [m, n](const Vector&) -> Matrix { return Matrix::Zero(m, n); }, Validation::skip);
}

FieldConfiguration FieldConfiguration::identity(int n) {
  return create(
      n, n, [](const Vector& x) { return x; },
      [n](const Vector&) -> Matrix { return Matrix::Identity(n, n); }, Validation::skip);
}

// ---------------------------------------------------------------------------
// TransformationFamily

TransformationFamily TransformationFamily::create(int p, int n, int m, MapFn map,
                                                  GeneratorFn generator, JacobianFn jacobian,
                                                  PartialsFn partials, Validation validation) {
  if (p < 1 || n < 1 || m < 0) throw DomainError("transformation family: invalid dimensions");
  TransformationFamily f;
  f.p_ = p;
  f.n_ = n;
  f.m_ = m;
  f.map_ = std::move(map);
  f.generator_ = std::move(generator);
  f.jacobian_ = std::move(jacobian);
  f.partials_ = std::move(partials);
  if (validation == Validation::check) {
    const auto probes = default_probes(n);
    const FamilyCheck chk = check_family(f, probes);
    if (!chk.passed()) {
      throw DomainError("transformation family failed validation (identity " +
                        std::to_string(chk.identity_error) + ", generator " +
                        std::to_string(chk.generator_error) + ", jacobian " +
                        std::to_string(chk.jacobian_error) + ", partials " +
                        std::to_string(chk.partials_error) + ")");
    }
  }
  return f;
}

FamilyJacobian TransformationFamily::jacobian(const Vector& z, const Vector& x, const Vector& r,
                                              const Matrix& a) const {
  if (jacobian_) return jacobian_(z, x, r, a);
  FamilyJacobian j;
  j.wrt_x = fd_jacobian([&](const Vector& y) { return stack(map_(z, y, r, a)); }, x);
  if (m_ > 0) {
    j.wrt_r = fd_jacobian([&](const Vector& s) { return stack(map_(z, x, s, a)); }, r);
  } else {
    j.wrt_r = Matrix::Zero(n_, 0);
  }
  return j;
}

GeneratorPartials TransformationFamily::partials(const Vector& x, const Vector& r,
                                                 const Matrix& a, const Vector& delta) const {
  if (partials_) return partials_(x, r, a, delta);
  auto h = [&](const Vector& y, const Vector& s) {
    const FamilyGenerator g = generator_(y, s, a);
    Vector out(n_ + m_);
    out << g.e_part * delta, g.g_part * delta;
    return out;
  };
  const Matrix jx = fd_jacobian([&](const Vector& y) { return h(y, r); }, x);
  const Matrix jr = m_ > 0 ? fd_jacobian([&](const Vector& s) { return h(x, s); }, r)
                           : Matrix::Zero(n_ + m_, 0);
  GeneratorPartials out;
  out.h1_x = jx.topRows(n_);
  out.h2_x = jx.bottomRows(m_);
  out.h1_r = jr.topRows(n_);
  out.h2_r = jr.bottomRows(m_);
  return out;
}

bool FamilyCheck::passed() const {
  return identity_error <= 1e-12 && generator_error <= kDerivativeCheckTol &&
         jacobian_error <= kDerivativeCheckTol && partials_error <= kDerivativeCheckTol;
}

FamilyCheck check_family(const TransformationFamily& family, std::span<const Vector> x_probes) {
  const int p = family.p();
  const int n = family.n();
  const int m = family.m();
  const auto rs = default_probes(std::max(m, 1));
  FamilyCheck chk;
  std::size_t i = 0;
  for (const Vector& x : x_probes) {
    require(x.size() == n, "check_family: probe dimension mismatch");
    const Vector r = m > 0 ? cycle_probe(rs, i + 2) : Vector(0);
    const Matrix a = alpha_probe(m, n);
    const Vector zero = Vector::Zero(p);
    const FamilyImage id = family.apply(zero, x, r, a);
    chk.identity_error = std::max(chk.identity_error, (id.x - x).cwiseAbs().maxCoeff());
    if (m > 0) chk.identity_error = std::max(chk.identity_error, (id.r - r).cwiseAbs().maxCoeff());

    const FamilyGenerator gen = family.generator(x, r, a);
    const Matrix fd_z =
        fd_jacobian([&](const Vector& z) { return stack(family.apply(z, x, r, a)); }, zero);
    Matrix analytic(n + m, p);
    analytic << gen.e_part, gen.g_part;
    chk.generator_error = std::max(chk.generator_error, scaled_error(analytic, fd_z));

    if (family.has_analytic_jacobian()) {
      Vector z_small = Vector::Constant(p, 0.01);
      for (const Vector& z : {zero, z_small}) {
        const FamilyJacobian j = family.jacobian(z, x, r, a);
        const Matrix fx =
            fd_jacobian([&](const Vector& y) { return stack(family.apply(z, y, r, a)); }, x);
        chk.jacobian_error = std::max(chk.jacobian_error, scaled_error(j.wrt_x, fx));
        if (m > 0) {
          const Matrix fr =
              fd_jacobian([&](const Vector& s) { return stack(family.apply(z, x, s, a)); }, r);
          chk.jacobian_error = std::max(chk.jacobian_error, scaled_error(j.wrt_r, fr));
        }
      }
    }
    if (family.has_analytic_partials()) {
      Vector delta = Vector::LinSpaced(p, 1.0, 0.5);
      const GeneratorPartials an = family.partials(x, r, a, delta);
      auto h = [&](const Vector& y, const Vector& s) {
        const FamilyGenerator g = family.generator(y, s, a);
        Vector out(n + m);
        out << g.e_part * delta, g.g_part * delta;
        return out;
      };
      const Matrix jx = fd_jacobian([&](const Vector& y) { return h(y, r); }, x);
      Matrix an_x(n + m, n);
      an_x << an.h1_x, an.h2_x;
      chk.partials_error = std::max(chk.partials_error, scaled_error(an_x, jx));
      if (m > 0) {
        const Matrix jr = fd_jacobian([&](const Vector& s) { return h(x, s); }, r);
        Matrix an_r(n + m, m);
        an_r << an.h1_r, an.h2_r;
        chk.partials_error = std::max(chk.partials_error, scaled_error(an_r, jr));
      }
    }
    ++i;
  }
  return chk;
}

// ---------------------------------------------------------------------------
// Variation fields

VariationFields::VariationFields(TransformationFamily family, FieldConfiguration field,
                                 Vector delta)
    : family_(std::move(family)), field_(std::move(field)), delta_(std::move(delta)) {
  require(family_.n() == field_.n() && family_.m() == field_.m(),
          "variation_fields: family and field dimensions differ");
  require(delta_.size() == family_.p(), "variation_fields: Delta has the wrong dimension");
}

Vector VariationFields::h1(const Vector& x) const {
  return family_.generator(x, field_.value(x), field_.derivative(x)).e_part * delta_;
}

Vector VariationFields::h2(const Vector& x) const {
  return family_.generator(x, field_.value(x), field_.derivative(x)).g_part * delta_;
}

Matrix VariationFields::h3(const Vector& x) const {
  if (family_.has_analytic_partials()) {
    const Matrix gp = field_.derivative(x);
    const GeneratorPartials pt = family_.partials(x, field_.value(x), gp, delta_);
    return pt.h2_x + pt.h2_r * gp;
  }
  return fd_jacobian([this](const Vector& y) { return h2(y); }, x);
}

Matrix VariationFields::h1_jacobian(const Vector& x) const {
  if (family_.has_analytic_partials()) {
    const Matrix gp = field_.derivative(x);
    const GeneratorPartials pt = family_.partials(x, field_.value(x), gp, delta_);
    return pt.h1_x + pt.h1_r * gp;
  }
  return fd_jacobian([this](const Vector& y) { return h1(y); }, x);
}

VariationFields variation_fields(const TransformationFamily& family,
                                 const FieldConfiguration& field, const Vector& delta) {
  return VariationFields(family, field, delta);
}

// ---------------------------------------------------------------------------
// Transformed field g_z

FieldConfiguration transformed_field(const TransformationFamily& family,
                                     const FieldConfiguration& field, const Vector& z) {
  require(family.n() == field.n() && family.m() == field.m(),
          "transformed_field: family and field dimensions differ");
  require(z.size() == family.p(), "transformed_field: z has the wrong dimension");
  if (z.isZero(0.0)) return field;
  const int n = family.n();
  const int m = family.m();

  auto base_point = [family, field, z, n](const Vector& y) -> Vector {
    auto phi1 = [&](const Vector& x) {
      return family.apply(z, x, field.value(x), field.derivative(x)).x;
    };
    Vector x = y;
    Vector res = phi1(x) - y;
    const double tol = 1e-12 * std::max(1.0, y.norm());
    for (int it = 0; it < 50; ++it) {
      if (res.norm() <= tol) return x;
      const Matrix d1 = composite_jacobian(family, field, z, x).topRows(n);
      const double det = d1.determinant();
      if (!(det > 0.0)) {
        throw GraphConditionError("transformed_field: F_{Z,1}(z) is not invertible near " +
                                  format_point(x));
      }
      const Vector step = d1.partialPivLu().solve(res);
      double lambda = 1.0;
      Vector trial = x - step;
      Vector trial_res = phi1(trial) - y;
      while (trial_res.norm() >= res.norm() && lambda > 1.0 / 1024.0) {
        lambda *= 0.5;
        trial = x - lambda * step;
        trial_res = phi1(trial) - y;
      }
      x = trial;
      res = trial_res;
    }
    if (res.norm() <= tol) return x;
    throw NumericFault("transformed_field: Newton iteration did not converge at " +
                           format_point(y), y);
  };

  auto value = [family, field, z, base_point](const Vector& y) -> Vector {
    const Vector x = base_point(y);
    return family.apply(z, x, field.value(x), field.derivative(x)).r;
  };
  auto derivative = [family, field, z, base_point, n, m](const Vector& y) -> Matrix {
    const Vector x = base_point(y);
    const Matrix d = composite_jacobian(family, field, z, x);
    const Matrix d1 = d.topRows(n);
    const Matrix d2 = d.bottomRows(m);
    return d1.transpose().partialPivLu().solve(d2.transpose()).transpose();
  };
  return FieldConfiguration::create(n, m, value, derivative, Validation::skip);
}

// ---------------------------------------------------------------------------
// Family measure

std::string to_string(FamilyFrame frame) {
  return frame == FamilyFrame::pushforward ? "pushforward" : "pullback";
}

std::string to_string(Theorem1Variant variant) {
  return variant == Theorem1Variant::paper_literal ? "paper_literal" : "transport_corrected";
}

std::string to_string(NoetherStatus status) {
  switch (status) {
    case NoetherStatus::vanishing:
      return "vanishing";
    case NoetherStatus::invariant_but_nonzero:
      return "invariant_but_nonzero";
    case NoetherStatus::not_invariant:
      return "not invariant";
  }
  return "unknown";
}

namespace {

void check_problem(const NoetherProblem& pb) {
  const int n = pb.family.n();
  const int m = pb.family.m();
  require(pb.field.n() == n && pb.field.m() == m, "noether: field dimensions differ from family");
  require(pb.lagrangian.n() == n && pb.lagrangian.m() == m,
          "noether: lagrangian dimensions differ from family");
  require(pb.measure.dim() == n, "noether: measure dimension differs from family");
}

}  // namespace

FamilyMeasure::FamilyMeasure(NoetherProblem problem, Vector z, FamilyFrame frame)
    : problem_(std::move(problem)), z_(std::move(z)), frame_(frame) {
  check_problem(problem_);
  require(z_.size() == problem_.family.p(), "family_measure: z has the wrong dimension");
}

PairResult FamilyMeasure::pair(const TestFunction& phi, const PairingEngine& engine) const {
  require(phi.dim() == problem_.family.n(), "family_measure: test function dimension mismatch");
  const int n = problem_.family.n();
  const int m = problem_.family.m();
  const auto& pb = problem_;
  return integrate(
      pb.measure,
      [&](const Vector& x) -> Complex {
        const Vector r = pb.field.value(x);
        const Matrix a = pb.field.derivative(x);
        const FamilyImage img = pb.family.apply(z_, x, r, a);
        const Matrix d = composite_jacobian(pb.family, pb.field, z_, x);
        const Matrix d1 = d.topRows(n);
        const Matrix d2 = d.bottomRows(m);
        const Eigen::PartialPivLU<Matrix> lu = d1.partialPivLu();
        const double det = lu.determinant();
        if (!(det > 0.0)) {
          throw GraphConditionError("family_measure: F_{Z,1}(z) is not orientation preserving at " +
                                    format_point(x));
        }
        // g_z' at the image point: D(F2 o graph) * D(F1 o graph)^{-1}.
        const Matrix gz_prime = d1.transpose().partialPivLu().solve(d2.transpose()).transpose();
        const Complex l = pb.lagrangian.value(img.x, img.r, gz_prime);
        if (frame_ == FamilyFrame::pushforward) return phi.value(img.x) * l;
        const double w =
            std::exp(pb.measure.log_density(img.x) - pb.measure.log_density(x)) * det;
        return phi.value(x) * l * w;
      },
      engine);
}

FamilyMeasure family_measure(const NoetherProblem& problem, const Vector& z, FamilyFrame frame) {
  return FamilyMeasure(problem, z, frame);
}

// ---------------------------------------------------------------------------
// Five-term formula

Theorem1Terms theorem1_evaluate(const NoetherProblem& pb, const Vector& delta, const Vector& x,
                                Theorem1Variant variant) {
  check_problem(pb);
  require(x.size() == pb.family.n(), "theorem1_evaluate: point dimension mismatch");
  if (variant == Theorem1Variant::paper_literal && pb.family.m() != pb.family.n()) {
    throw DimensionError(
        "theorem1_evaluate: paper_literal places h2 in E and tr h3 needs a square matrix; "
        "it requires dim G == dim E");
  }
  const VariationFields vf(pb.family, pb.field, delta);
  const Vector r = pb.field.value(x);
  const Matrix a = pb.field.derivative(x);
  const Vector h1 = vf.h1(x);
  const Vector h2 = vf.h2(x);
  const Matrix h3 = vf.h3(x);
  const Complex l = pb.lagrangian.value(x, r, a);

  Theorem1Terms out;
  out.terms[0] = bilinear(pb.lagrangian.d_x(x, r, a), h1);
  out.terms[1] = bilinear(pb.lagrangian.d_r(x, r, a), h2);
  out.terms[2] = bilinear(pb.lagrangian.d_alpha(x, r, a), h3);
  if (variant == Theorem1Variant::paper_literal) {
    out.terms[3] = l * h3.trace();
    out.terms[4] = l * log_derivative_along_vector(pb.measure, h2, x);
  } else {
    out.terms[3] = l * vf.h1_jacobian(x).trace();
    out.terms[4] = l * log_derivative_along_vector(pb.measure, h1, x);
  }
  out.total = out.terms[0] + out.terms[1] + out.terms[2] + out.terms[3] + out.terms[4];
  return out;
}

Complex theorem1_pairing(const NoetherProblem& pb, const Vector& delta, const TestFunction& phi,
                         const PairingEngine& engine, Theorem1Variant variant) {
  check_problem(pb);
  require(phi.dim() == pb.family.n(), "theorem1_pairing: test function dimension mismatch");
  return integrate(
             pb.measure,
             [&](const Vector& x) {
               return phi.value(x) * theorem1_evaluate(pb, delta, x, variant).total;
             },
             engine)
      .value;
}

Complex family_weak_derivative_fd(const NoetherProblem& pb, const Vector& delta,
                                  const TestFunction& phi, const PairingEngine& engine,
                                  double step, FamilyFrame frame) {
  check_problem(pb);
  require(delta.size() == pb.family.p(), "family_weak_derivative_fd: Delta has the wrong dimension");
  if (!(step > 0.0)) throw DomainError("family_weak_derivative_fd: step must be positive");
  const Complex plus = FamilyMeasure(pb, step * delta, frame).pair(phi, engine).value;
  const Complex minus = FamilyMeasure(pb, -step * delta, frame).pair(phi, engine).value;
  return (plus - minus) / (2.0 * step);
}

InvarianceCertificate certify_invariance(const NoetherProblem& pb, const Vector& delta,
                                         std::span<const TestFunction> probes,
                                         const PairingEngine& engine, double step,
                                         double threshold, FamilyFrame frame) {
  if (probes.empty()) throw DomainError("certify_invariance: probe set is empty");
  InvarianceCertificate cert;
  cert.threshold = threshold;
  for (const TestFunction& phi : probes) {
    cert.max_abs_derivative = std::max(
        cert.max_abs_derivative, std::abs(family_weak_derivative_fd(pb, delta, phi, engine, step, frame)));
  }
  cert.invariant = cert.max_abs_derivative <= threshold;
  return cert;
}

NoetherResidual noether_residual(const NoetherProblem& pb, const Vector& delta,
                                 std::span<const Vector> probe_points, Theorem1Variant variant,
                                 const NoetherOptions& options) {
  NoetherResidual out;
  out.certificate = certify_invariance(pb, delta, options.certificate_probes, options.engine,
                                       options.step, options.certificate_threshold, options.frame);
  double sum = 0.0;
  for (const Vector& x : probe_points) {
    const Complex v = theorem1_evaluate(pb, delta, x, variant).total;
    out.residuals.push_back(v);
    out.max_abs = std::max(out.max_abs, std::abs(v));
    sum += std::abs(v);
  }
  if (!probe_points.empty()) out.mean_abs = sum / static_cast<double>(probe_points.size());
  if (!out.certificate.invariant) {
    out.status = NoetherStatus::not_invariant;
  } else if (out.max_abs <= options.residual_tolerance) {
    out.status = NoetherStatus::vanishing;
  } else {
    out.status = NoetherStatus::invariant_but_nonzero;
  }
  return out;
}

VariantAdjudication adjudicate_variants(const NoetherProblem& pb, const Vector& delta,
                                        std::span<const TestFunction> probes,
                                        std::span<const Vector> points,
                                        const PairingEngine& engine, double step,
                                        double tolerance, FamilyFrame frame) {
  if (probes.empty()) throw DomainError("adjudicate_variants: probe set is empty");
  check_problem(pb);
  VariantAdjudication adj;
  adj.frame = frame;
  adj.tolerance = tolerance;
  adj.paper_literal.available = pb.family.m() == pb.family.n();
  adj.transport_corrected.available = true;

  for (const TestFunction& phi : probes) {
    const Complex fd = family_weak_derivative_fd(pb, delta, phi, engine, step, frame);
    adj.oracle.push_back(fd);
    const double scale = std::max(1.0, std::abs(fd));
    for (auto [variant, outcome] :
         {std::pair{Theorem1Variant::paper_literal, &adj.paper_literal},
          std::pair{Theorem1Variant::transport_corrected, &adj.transport_corrected}}) {
      if (!outcome->available) continue;
      const Complex v = theorem1_pairing(pb, delta, phi, engine, variant);
      outcome->pairings.push_back(v);
      outcome->max_rel_error = std::max(outcome->max_rel_error, std::abs(v - fd) / scale);
    }
  }
  if (adj.paper_literal.available) {
    for (const Vector& x : points) {
      const Complex a = theorem1_evaluate(pb, delta, x, Theorem1Variant::paper_literal).total;
      const Complex b = theorem1_evaluate(pb, delta, x, Theorem1Variant::transport_corrected).total;
      adj.max_pointwise_gap = std::max(adj.max_pointwise_gap, std::abs(a - b));
    }
    adj.differ_analytically = adj.max_pointwise_gap > 1e-12;
  } else {
    adj.differ_analytically = true;
  }

  const bool lit_ok = adj.paper_literal.available && adj.paper_literal.max_rel_error <= tolerance;
  const bool cor_ok = adj.transport_corrected.max_rel_error <= tolerance;
  if (lit_ok && cor_ok) {
    adj.winner = "both";
  } else if (lit_ok) {
    adj.winner = "paper_literal";
  } else if (cor_ok) {
    adj.winner = "transport_corrected";
  } else {
    adj.winner = "neither";
  }
  auto separated = [&](const VariantOutcome& loser) {
    return !loser.available || loser.max_rel_error >= 10.0 * tolerance;
  };
  if (adj.differ_analytically) {
    adj.decisive = (lit_ok != cor_ok) &&
                   (lit_ok ? separated(adj.transport_corrected) : separated(adj.paper_literal));
  } else {
    adj.decisive = cor_ok && (!adj.paper_literal.available || lit_ok);
  }
  return adj;
}

}  // namespace noetherlab
