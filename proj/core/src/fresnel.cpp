#include <cmath>

#include "noetherlab/error.hpp"
#include "noetherlab/pathspace.hpp"
#include "noetherlab/quadrature.hpp"

namespace noetherlab {

FeynmanWeight::FeynmanWeight(PathAction action, EndpointFactor endpoint, double epsilon)
    : action_(std::move(action)), endpoint_(std::move(endpoint)), epsilon_(epsilon) {
  if (!(epsilon_ > 0.0) || !std::isfinite(epsilon_)) {
    throw DomainError("feynman weight: epsilon must be positive");
  }
  if (endpoint_.dim != action_.dim()) {
    throw DimensionError("feynman weight: endpoint factor and action dimensions differ");
  }
}

Complex FeynmanWeight::phase(const Vector& x) const {
  return std::exp(Complex(0.0, action_.value(x)));
}

Complex FeynmanWeight::density(const Vector& x) const {
  return phase(x) * endpoint_.value(x) * std::exp(-0.5 * epsilon_ * x.squaredNorm());
}

bool FeynmanWeight::closed_form_applies(const TestFunction& phi) const {
  return action_.quadratic_form().has_value() && endpoint_.frequency.has_value() &&
         phi.frequency().has_value() && phi.dim() == dim();
}

FeynmanWeight make_feynman_weight(const DiscreteAction& action, const InitialData& f,
                                  double epsilon) {
  return FeynmanWeight(PathAction::from(action),
                       EndpointFactor::from_initial_data(action.space(), f, action.q()), epsilon);
}

namespace {

struct GaussianExponent {
  Matrix a;         // quadratic part of the phase
  Vector linear;    // total real frequency multiplying i x
  double constant;  // constant phase
};

GaussianExponent collect(const FeynmanWeight& weight, const TestFunction& phi) {
  if (!weight.closed_form_applies(phi)) {
    throw DomainError(
        "fresnel closed form needs a quadratic action, plane-wave initial data and a plane-wave "
        "test function");
  }
  const QuadraticForm& form = *weight.action().quadratic_form();
  return {form.a, form.b + *phi.frequency() + *weight.endpoint().frequency,
          form.c + weight.endpoint().phase};
}

}  // namespace

Complex fresnel_closed_form(const FeynmanWeight& weight, const TestFunction& phi) {
  const GaussianExponent g = collect(weight, phi);
  const int m = weight.dim();
  const double eps = weight.epsilon();
  // integral of exp(-x^T B x / 2 + J^T x) with B = eps I - i A, J = i w.
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(g.a);
  Complex det_factor = 1.0;
  for (int k = 0; k < m; ++k) {
    det_factor /= std::sqrt(Complex(eps, -eig.eigenvalues()[k]));
  }
  const CMatrix b = Complex(eps, 0.0) * CMatrix::Identity(m, m) - Complex(0.0, 1.0) * g.a.cast<Complex>();
  const CVector j = Complex(0.0, 1.0) * g.linear.cast<Complex>();
  const CVector sol = b.partialPivLu().solve(j);
  const Complex quad = 0.5 * (j.transpose() * sol)(0);
  return std::pow(2.0 * kPi, 0.5 * m) * det_factor * std::exp(quad + Complex(0.0, g.constant));
}

Complex fresnel_separable_quadrature(const FeynmanWeight& weight, const TestFunction& phi,
                                     int nodes_per_panel) {
  const GaussianExponent g = collect(weight, phi);
  const int m = weight.dim();
  const double eps = weight.epsilon();
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(g.a);
  const Vector lambda = eig.eigenvalues();
  const Vector w = eig.eigenvectors().transpose() * g.linear;
  // The damping factor is below e^{-45} outside [-half, half].
  const double half = std::sqrt(90.0 / eps);
  const Rule1D base = gauss_legendre(nodes_per_panel);

  Complex product = std::exp(Complex(0.0, g.constant));
  for (int k = 0; k < m; ++k) {
    const double freq = std::abs(lambda[k]) * half + std::abs(w[k]) + 1.0;
    const double width = std::min({0.5, 1.0 / freq, 1.0 / std::sqrt(eps)});
    const int panels = static_cast<int>(std::ceil(2.0 * half / width));
    const double h = 2.0 * half / panels;
    const Complex a(-0.5 * eps, 0.5 * lambda[k]);
    Complex sum = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double mid = -half + (p + 0.5) * h;
      Complex panel = 0.0;
      for (std::size_t i = 0; i < base.nodes.size(); ++i) {
        const double y = mid + 0.5 * h * base.nodes[i];
        panel += base.weights[i] * std::exp(a * (y * y) + Complex(0.0, w[k] * y));
      }
      sum += 0.5 * h * panel;
    }
    product *= sum;
  }
  return product;
}

PairResult fresnel_pair(const FeynmanWeight& weight, const TestFunction& phi,
                        const PairingEngine& engine) {
  const int m = weight.dim();
  if (phi.dim() != m) {
    throw DimensionError("fresnel_pair: test function has dimension " + std::to_string(phi.dim()) +
                         ", paths have M = " + std::to_string(m));
  }
  if (weight.closed_form_applies(phi)) return {fresnel_closed_form(weight, phi), 0.0, 0};
  if (engine.mode != PairingMode::monte_carlo && m > kMaxDeterministicPathDim) {
    throw DomainError("fresnel_pair: no closed form and M = " + std::to_string(m) +
                      " > 12 for deterministic quadrature; use a monte_carlo engine");
  }
  const double eps = weight.epsilon();
  auto g = [&](const Vector& x) { return phi.value(x) * weight.phase(x) * weight.endpoint().value(x); };
  if (engine.mode == PairingMode::tensor_grid) {
    return integrate_log_weight(
        m, [eps](const Vector& x) { return -0.5 * eps * x.squaredNorm(); }, g, engine);
  }
  const DensityMeasure frame =
      DensityMeasure::gaussian(Vector::Zero(m), Matrix::Identity(m, m) / eps);
  PairResult r = integrate(frame, g, engine);
  const double scale = std::pow(2.0 * kPi / eps, 0.5 * m);
  r.value *= scale;
  r.std_error *= scale;
  return r;
}

}  // namespace noetherlab
