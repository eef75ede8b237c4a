#include "noetherlab/transport.hpp"

#include <cmath>
#include <limits>

#include "noetherlab/error.hpp"

namespace noetherlab {
namespace {

constexpr std::size_t kMaxBoundPoints = 20000;

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()[0];
}

}  // namespace

Vector Flow::apply(const Vector& x) const { return x - t_ * field_.value(x); }

Matrix Flow::jacobian(const Vector& x) const {
  const int n = field_.dim();
  return Matrix::Identity(n, n) - t_ * field_.jacobian(x);
}

bool Flow::orientation_preserving_on(std::span<const Vector> points) const {
  for (const Vector& x : points) {
    if (!(jacobian(x).determinant() > 0.0)) return false;
  }
  return true;
}

double injectivity_bound(const VectorField& k, std::span<const Vector> points) {
  if (k.is_constant() || points.empty()) return std::numeric_limits<double>::infinity();
  const std::size_t stride = std::max<std::size_t>(1, points.size() / kMaxBoundPoints);
  double worst = 0.0;
  for (std::size_t i = 0; i < points.size(); i += stride) {
    worst = std::max(worst, spectral_norm(k.jacobian(points[i])));
  }
  if (worst == 0.0) return std::numeric_limits<double>::infinity();
  return 0.5 / worst;
}

double injectivity_bound(const DensityMeasure& nu, const VectorField& k,
                         const PairingEngine& engine) {
  if (k.is_constant()) return std::numeric_limits<double>::infinity();
  const auto points = quadrature_points(nu, engine);
  return injectivity_bound(k, points);
}

// ---------------------------------------------------------------------------

PushforwardMeasure::PushforwardMeasure(DensityMeasure base, Flow flow)
    : base_(std::move(base)), flow_(std::move(flow)) {
  if (base_.dim() != flow_.field().dim()) {
    throw DimensionError("pushforward: measure and field dimensions differ");
  }
}

Vector PushforwardMeasure::preimage(const Vector& y) const {
  const double t = flow_.t();
  if (t == 0.0) return y;
  if (flow_.field().is_constant()) return y + t * flow_.field().value(y);
  Vector x = y;
  for (int it = 0; it < 50; ++it) {
    const Vector r = flow_.apply(x) - y;
    if (r.norm() <= 1e-14 * std::max(1.0, y.norm())) return x;
    x -= flow_.jacobian(x).partialPivLu().solve(r);
  }
  if ((flow_.apply(x) - y).norm() <= 1e-12 * std::max(1.0, y.norm())) return x;
  throw NumericFault("pushforward: Newton inversion of the flow did not converge at " +
                         format_point(y), y);
}

double PushforwardMeasure::log_density(const Vector& y) const {
  if (flow_.t() == 0.0) return base_.log_density(y);
  const Vector x = preimage(y);
  const double det = flow_.jacobian(x).determinant();
  if (!(det > 0.0)) {
    throw NumericFault("pushforward: flow Jacobian is singular at " + format_point(x), x);
  }
  return base_.log_density(x) - std::log(det);
}

PairResult PushforwardMeasure::pair(const TestFunction& phi, const PairingEngine& engine) const {
  return pushforward_pairing(base_, flow_.field(), flow_.t(), phi, engine);
}

PairResult PushforwardMeasure::pair_by_density(const TestFunction& phi,
                                               const PairingEngine& engine) const {
  if (phi.dim() != base_.dim()) throw DimensionError("pushforward pairing: dimension mismatch");
  return integrate_log_weight(
      base_.dim(), [this](const Vector& y) { return log_density(y); },
      [&phi](const Vector& y) { return phi.value(y); }, engine);
}

// ---------------------------------------------------------------------------

PairResult pushforward_pairing(const DensityMeasure& nu, const VectorField& k, double t,
                               const TestFunction& phi, const PairingEngine& engine) {
  if (nu.dim() != k.dim() || nu.dim() != phi.dim()) {
    throw DimensionError("pushforward_pairing: dimension mismatch");
  }
  if (t != 0.0) {
    const double t_max = injectivity_bound(nu, k, engine);
    if (!(std::abs(t) < t_max)) {
      throw DomainError("pushforward_pairing: |t| = " + std::to_string(std::abs(t)) +
                        " exceeds the injectivity bound " + std::to_string(t_max));
    }
  }
  return integrate(
      nu, [&](const Vector& x) { return phi.value(x - t * k.value(x)); }, engine);
}

namespace {

Complex central_difference(const DensityMeasure& nu, const VectorField& k,
                           const TestFunction& phi, const PairingEngine& engine, double delta) {
  auto at = [&](double t) {
    return integrate(nu, [&](const Vector& x) { return phi.value(x - t * k.value(x)); }, engine)
        .value;
  };
  return (at(delta) - at(-delta)) / (2.0 * delta);
}

void check_step(const DensityMeasure& nu, const VectorField& k, const PairingEngine& engine,
                double delta) {
  if (!(delta > 0.0)) throw DomainError("weak_derivative_fd: step must be positive");
  const double t_max = injectivity_bound(nu, k, engine);
  if (!(delta < t_max)) {
    throw DomainError("weak_derivative_fd: step " + std::to_string(delta) +
                      " exceeds the injectivity bound " + std::to_string(t_max));
  }
}

}  // namespace

Complex weak_derivative_fd(const DensityMeasure& nu, const VectorField& k,
                           const TestFunction& phi, const PairingEngine& engine, double delta) {
  if (nu.dim() != k.dim() || nu.dim() != phi.dim()) {
    throw DimensionError("weak_derivative_fd: dimension mismatch");
  }
  check_step(nu, k, engine, delta);
  return central_difference(nu, k, phi, engine, delta);
}

Complex analytic_weak_derivative(const DensityMeasure& nu, const VectorField& k,
                                 const TestFunction& phi, const PairingEngine& engine) {
  if (nu.dim() != k.dim() || nu.dim() != phi.dim()) {
    throw DimensionError("analytic_weak_derivative: dimension mismatch");
  }
  return integrate(
             nu,
             [&](const Vector& x) { return phi.value(x) * log_derivative_along_field(nu, k, x); },
             engine)
      .value;
}

Complex integration_by_parts_form(const DensityMeasure& nu, const VectorField& k,
                                  const TestFunction& phi, const PairingEngine& engine) {
  if (nu.dim() != k.dim() || nu.dim() != phi.dim()) {
    throw DimensionError("integration_by_parts_form: dimension mismatch");
  }
  return -integrate(
              nu,
              [&](const Vector& x) {
                return bilinear(phi.gradient(x), k.value(x));
              },
              engine)
              .value;
}

ConvergenceStudy fd_convergence(const DensityMeasure& nu, const VectorField& k,
                                const TestFunction& phi, const PairingEngine& engine,
                                double delta, Complex reference) {
  check_step(nu, k, engine, delta);
  ConvergenceStudy study;
  study.delta = delta;
  study.error_full = std::abs(central_difference(nu, k, phi, engine, delta) - reference);
  study.error_half = std::abs(central_difference(nu, k, phi, engine, 0.5 * delta) - reference);
  // Rounding floor of a central difference of O(1) pairings at this step.
  const double floor = 1e-12 * std::max(1.0, std::abs(reference)) / delta;
  if (study.error_full <= floor && study.error_half <= floor) {
    study.exact = true;
    study.observed_order = std::numeric_limits<double>::quiet_NaN();
  } else {
    study.observed_order = std::log2(study.error_full / study.error_half);
  }
  return study;
}

RadonNikodymReport radon_nikodym_check(const DensityMeasure& nu, const VectorField& k,
                                       std::span<const TestFunction> probes,
                                       const PairingEngine& engine, double tolerance,
                                       double delta) {
  if (probes.empty()) throw DomainError("radon_nikodym_check: probe set is empty");
  RadonNikodymReport report;
  report.tolerance = tolerance;
  for (const TestFunction& phi : probes) {
    RadonNikodymEntry e;
    e.fd = weak_derivative_fd(nu, k, phi, engine, delta);
    e.analytic = analytic_weak_derivative(nu, k, phi, engine);
    e.abs_error = std::abs(e.fd - e.analytic);
    e.rel_error = e.abs_error / std::max(1.0, std::abs(e.analytic));
    report.max_rel_error = std::max(report.max_rel_error, e.rel_error);
    report.entries.push_back(e);
  }
  report.passed = report.max_rel_error <= tolerance;
  return report;
}

}  // namespace noetherlab
