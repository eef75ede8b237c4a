#include "noetherlab/measure.hpp"

#include <cmath>
#include <limits>
#include <thread>

#include "noetherlab/error.hpp"
#include "noetherlab/finite_difference.hpp"
#include "noetherlab/quadrature.hpp"

namespace noetherlab {
namespace {

bool finite(Complex v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

void require_dim(int expected, Eigen::Index got, const char* what) {
  if (got != expected) {
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(expected) +
                         ", got " + std::to_string(got));
  }
}

// Walks every multi-index of a tensor product rule with `sizes[i]` points per
// axis, calling visit(index) in lexicographic order.
template <typename Visit>
void for_each_multi_index(const std::vector<int>& sizes, Visit&& visit) {
  const std::size_t n = sizes.size();
  std::vector<int> idx(n, 0);
  for (int s : sizes) {
    if (s <= 0) return;
  }
  while (true) {
    visit(idx);
    std::size_t axis = 0;
    while (axis < n) {
      if (++idx[axis] < sizes[axis]) break;
      idx[axis] = 0;
      ++axis;
    }
    if (axis == n) return;
  }
}

PairResult integrate_gauss_hermite(const DensityMeasure& nu, const Integrand& integrand,
                                   const PairingEngine& engine) {
  if (nu.is_flat()) {
    throw DomainError("flat measure paired without a bounding box: use a tensor_grid engine");
  }
  if (!nu.frame()) {
    throw DomainError("gauss_hermite pairing needs a measure with a Gaussian frame");
  }
  const GaussianFrame& frame = *nu.frame();
  const int n = nu.dim();
  const Rule1D rule = gauss_hermite(engine.order_or_samples);
  const double sqrt2 = std::sqrt(2.0);
  const double jac = std::pow(2.0, 0.5 * n) * frame.chol.diagonal().prod();

  Complex sum = 0.0;
  Vector u(n);
  Vector x(n);
  std::size_t count = 0;
  for_each_multi_index(std::vector<int>(n, engine.order_or_samples), [&](const std::vector<int>& idx) {
    double w = 1.0;
    for (int i = 0; i < n; ++i) {
      u[i] = rule.nodes[idx[i]];
      w *= rule.weights[idx[i]];
    }
    x.noalias() = frame.mean + sqrt2 * (frame.chol * u);
    const double log_ratio = nu.log_density(x) + u.squaredNorm();
    const Complex f = integrand(x);
    const Complex term = w * std::exp(log_ratio) * f;
    if (!finite(term)) {
      throw NumericFault("non-finite integrand value at " + format_point(x), x);
    }
    sum += term;
    ++count;
  });
  return {jac * sum, 0.0, count};
}

PairResult integrate_grid(int n, const std::function<double(const Vector&)>& log_weight,
                          const Integrand& integrand, const PairingEngine& engine) {
  if (!engine.box) throw DomainError("tensor_grid pairing needs a bounding box");
  const Box& box = *engine.box;
  require_dim(n, box.lo.size(), "tensor_grid box");
  require_dim(n, box.hi.size(), "tensor_grid box");
  std::vector<Rule1D> rules;
  std::vector<int> sizes;
  for (int i = 0; i < n; ++i) {
    rules.push_back(composite_gauss_legendre(box.lo[i], box.hi[i], engine.panels,
                                             engine.order_or_samples));
    sizes.push_back(static_cast<int>(rules.back().nodes.size()));
  }
  Complex sum = 0.0;
  Vector x(n);
  std::size_t count = 0;
  for_each_multi_index(sizes, [&](const std::vector<int>& idx) {
    double w = 1.0;
    for (int i = 0; i < n; ++i) {
      x[i] = rules[i].nodes[idx[i]];
      w *= rules[i].weights[idx[i]];
    }
    const double lw = log_weight(x);
    if (lw == -std::numeric_limits<double>::infinity()) {
      ++count;
      return;
    }
    const Complex term = w * std::exp(lw) * integrand(x);
    if (!finite(term)) {
      throw NumericFault("non-finite integrand value at " + format_point(x), x);
    }
    sum += term;
    ++count;
  });
  return {sum, 0.0, count};
}

struct StreamSums {
  Complex sum = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;
  bool fault = false;
  Vector fault_point;
};

std::mt19937_64 stream_rng(std::uint64_t seed, int stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

PairResult integrate_monte_carlo(const DensityMeasure& nu, const Integrand& integrand,
                                 const PairingEngine& engine) {
  if (!nu.has_sampler()) throw DomainError("monte_carlo pairing needs a measure with a sampler");
  if (nu.kind() != MeasureKind::normalized_probability) {
    throw DomainError("monte_carlo pairing needs a normalized probability measure");
  }
  const int workers = std::max(1, engine.workers);
  const long total = engine.order_or_samples;
  if (total < 2) throw DomainError("monte_carlo pairing needs at least two samples");
  std::vector<StreamSums> sums(workers);
  auto run_stream = [&](int s) {
    const long count = total / workers + (s < total % workers ? 1 : 0);
    std::mt19937_64 rng = stream_rng(engine.seed, s);
    StreamSums& acc = sums[s];
    for (long i = 0; i < count; ++i) {
      const Vector x = nu.sample(rng);
      const Complex f = integrand(x);
      if (!finite(f)) {
        acc.fault = true;
        acc.fault_point = x;
        return;
      }
      acc.sum += f;
      acc.sum_sq += std::norm(f);
      ++acc.count;
    }
  };
  if (workers == 1) {
    run_stream(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (int s = 0; s < workers; ++s) threads.emplace_back(run_stream, s);
    for (auto& t : threads) t.join();
  }
  Complex sum = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;
  for (const StreamSums& acc : sums) {
    if (acc.fault) {
      throw NumericFault("non-finite integrand value at " + format_point(acc.fault_point),
                         acc.fault_point);
    }
    sum += acc.sum;
    sum_sq += acc.sum_sq;
    count += acc.count;
  }
  const double nd = static_cast<double>(count);
  const Complex mean = sum / nd;
  const double var = std::max(0.0, (sum_sq - nd * std::norm(mean)) / (nd - 1.0));
  return {mean, std::sqrt(var / nd), count};
}

}  // namespace

// ---------------------------------------------------------------------------
// DensityMeasure

DensityMeasure DensityMeasure::gaussian(Vector mean, Matrix covariance) {
  const int n = static_cast<int>(mean.size());
  require_dim(n, covariance.rows(), "gaussian covariance");
  require_dim(n, covariance.cols(), "gaussian covariance");
  Eigen::LLT<Matrix> llt(covariance);
  if (llt.info() != Eigen::Success) {
    throw DomainError("gaussian: covariance is not positive definite");
  }
  Matrix chol = llt.matrixL();
  const Matrix precision = llt.solve(Matrix::Identity(n, n));
  const double log_norm = -0.5 * n * std::log(2.0 * kPi) - chol.diagonal().array().log().sum();

  DensityMeasure nu;
  nu.dim_ = n;
  nu.kind_ = MeasureKind::normalized_probability;
  nu.log_density_ = [mean, chol, log_norm](const Vector& x) {
    const Vector y = chol.triangularView<Eigen::Lower>().solve(x - mean);
    return log_norm - 0.5 * y.squaredNorm();
  };
  nu.gradient_ = [mean, precision](const Vector& x) -> Vector { return -precision * (x - mean); };
  nu.frame_ = GaussianFrame{mean, chol};
  nu.sampler_ = [mean, chol](std::mt19937_64& rng) -> Vector {
    std::normal_distribution<double> normal;
    Vector z(mean.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
    return mean + chol * z;
  };
  return nu;
}

DensityMeasure DensityMeasure::standard_gaussian(int dim) {
  return gaussian(Vector::Zero(dim), Matrix::Identity(dim, dim));
}

DensityMeasure DensityMeasure::flat(int dim) {
  if (dim < 1) throw DomainError("flat measure: dimension must be positive");
  DensityMeasure nu;
  nu.dim_ = dim;
  nu.kind_ = MeasureKind::flat;
  nu.log_density_ = [](const Vector&) { return 0.0; };
  nu.gradient_ = [dim](const Vector&) -> Vector { return Vector::Zero(dim); };
  return nu;
}

DensityMeasure DensityMeasure::custom(int dim, ScalarFn log_density, GradientFn gradient,
                                      MeasureKind kind, std::optional<GaussianFrame> frame,
                                      Sampler sampler, Validation validation) {
  if (dim < 1) throw DomainError("custom measure: dimension must be positive");
  if (kind == MeasureKind::flat) {
    throw DomainError("custom measure: use DensityMeasure::flat for the flat kind");
  }
  if (validation == Validation::check) {
    const auto probes = default_probes(dim);
    const DerivativeCheck chk = check_gradient(log_density, gradient, probes);
    if (!chk.passed()) {
      throw DomainError("custom measure: log_density_gradient disagrees with finite differences"
                        " (error " + std::to_string(chk.max_error) + " at " +
                        format_point(chk.worst_point) + ")");
    }
  }
  DensityMeasure nu;
  nu.dim_ = dim;
  nu.kind_ = kind;
  nu.log_density_ = std::move(log_density);
  nu.gradient_ = std::move(gradient);
  nu.frame_ = std::move(frame);
  nu.sampler_ = std::move(sampler);
  return nu;
}

DensityMeasure DensityMeasure::scaled(double factor) const {
  if (!(factor > 0.0)) throw DomainError("scaled: factor must be positive");
  DensityMeasure nu = *this;
  const double shift = std::log(factor);
  nu.log_density_ = [base = log_density_, shift](const Vector& x) { return base(x) + shift; };
  if (kind_ != MeasureKind::flat) {
    nu.kind_ = MeasureKind::unnormalized;
    nu.sampler_ = {};
  } else {
    // A rescaled flat measure is still translation invariant.
    nu.kind_ = MeasureKind::flat;
  }
  return nu;
}

double DensityMeasure::log_density(const Vector& x) const { return log_density_(x); }

Vector DensityMeasure::log_density_gradient(const Vector& x) const { return gradient_(x); }

Vector DensityMeasure::sample(std::mt19937_64& rng) const {
  if (!sampler_) throw DomainError("measure has no sampler");
  return sampler_(rng);
}

// ---------------------------------------------------------------------------
// TestFunction

TestFunction TestFunction::polynomial_times_gaussian(std::vector<Monomial> terms, Vector center,
                                                     double width) {
  const int n = static_cast<int>(center.size());
  if (n < 1) throw DomainError("test function: dimension must be positive");
  if (!(width > 0.0)) throw DomainError("test function: width must be positive");
  for (const Monomial& m : terms) require_dim(n, static_cast<Eigen::Index>(m.powers.size()), "monomial");
  const bool has_envelope = std::isfinite(width);
  const double inv_w2 = has_envelope ? 1.0 / (width * width) : 0.0;

  auto poly = [terms](const Vector& x, Vector* grad) {
    double value = 0.0;
    if (grad) grad->setZero(x.size());
    for (const Monomial& m : terms) {
      double term = m.coefficient;
      for (Eigen::Index i = 0; i < x.size(); ++i) term *= std::pow(x[i], m.powers[i]);
      value += term;
      if (grad) {
        for (Eigen::Index i = 0; i < x.size(); ++i) {
          const int p = m.powers[i];
          if (p == 0) continue;
          double d = m.coefficient * p * std::pow(x[i], p - 1);
          for (Eigen::Index j = 0; j < x.size(); ++j) {
            if (j != i) d *= std::pow(x[j], m.powers[j]);
          }
          (*grad)[i] += d;
        }
      }
    }
    return value;
  };

  TestFunction phi;
  phi.dim_ = n;
  phi.family_ = TestFamily::polynomial_times_gaussian;
  phi.value_ = [poly, center, inv_w2](const Vector& x) -> Complex {
    const double env = std::exp(-0.5 * inv_w2 * (x - center).squaredNorm());
    return poly(x, nullptr) * env;
  };
  phi.gradient_ = [poly, center, inv_w2](const Vector& x) -> CVector {
    Vector g;
    const double p = poly(x, &g);
    const double env = std::exp(-0.5 * inv_w2 * (x - center).squaredNorm());
    const Vector out = env * (g - p * inv_w2 * (x - center));
    return out.cast<Complex>();
  };
  // A single constant monomial without envelope is the function 1.
  if (!has_envelope && terms.size() == 1 && terms[0].coefficient == 1.0) {
    bool constant = true;
    for (int p : terms[0].powers) constant = constant && p == 0;
    if (constant) phi.frequency_ = Vector::Zero(n);
  }
  return phi;
}

TestFunction TestFunction::polynomial(int dim, std::vector<Monomial> terms) {
  return polynomial_times_gaussian(std::move(terms), Vector::Zero(dim),
                                   std::numeric_limits<double>::infinity());
}

TestFunction TestFunction::one(int dim) {
  return polynomial(dim, {Monomial{1.0, std::vector<int>(dim, 0)}});
}

TestFunction TestFunction::compact_bump(Vector center, double radius) {
  const int n = static_cast<int>(center.size());
  if (n < 1) throw DomainError("test function: dimension must be positive");
  if (!(radius > 0.0)) throw DomainError("compact bump: radius must be positive");
  const double inv_r2 = 1.0 / (radius * radius);
  TestFunction phi;
  phi.dim_ = n;
  phi.family_ = TestFamily::compact_bump;
  phi.radius_ = radius;
  phi.center_ = center;
  phi.value_ = [center, inv_r2](const Vector& x) -> Complex {
    const double s = (x - center).squaredNorm() * inv_r2;
    if (s >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s));
  };
  phi.gradient_ = [center, inv_r2, n](const Vector& x) -> CVector {
    const double s = (x - center).squaredNorm() * inv_r2;
    if (s >= 1.0) return CVector::Zero(n);
    const double one_minus = 1.0 - s;
    const double v = std::exp(1.0 - 1.0 / one_minus);
    const Vector g = (-v / (one_minus * one_minus) * 2.0 * inv_r2) * (x - center);
    return g.cast<Complex>();
  };
  return phi;
}

TestFunction TestFunction::plane_wave(Vector frequency) {
  const int n = static_cast<int>(frequency.size());
  if (n < 1) throw DomainError("test function: dimension must be positive");
  TestFunction phi;
  phi.dim_ = n;
  phi.family_ = TestFamily::plane_wave;
  phi.frequency_ = frequency;
  phi.value_ = [frequency](const Vector& x) -> Complex {
    return std::polar(1.0, frequency.dot(x));
  };
  phi.gradient_ = [frequency](const Vector& x) -> CVector {
    const Complex v = std::polar(1.0, frequency.dot(x));
    return (Complex(0.0, 1.0) * v) * frequency.cast<Complex>();
  };
  return phi;
}

TestFunction TestFunction::custom(int dim, ValueFn value, GradientFn gradient, TestFamily family,
                                  Validation validation) {
  if (dim < 1) throw DomainError("test function: dimension must be positive");
  if (validation == Validation::check) {
    const auto probes = default_probes(dim);
    const DerivativeCheck chk = check_gradient(value, gradient, probes);
    if (!chk.passed()) {
      throw DomainError("test function: gradient disagrees with finite differences at " +
                        format_point(chk.worst_point));
    }
  }
  TestFunction phi;
  phi.dim_ = dim;
  phi.family_ = family;
  phi.value_ = std::move(value);
  phi.gradient_ = std::move(gradient);
  return phi;
}

// ---------------------------------------------------------------------------
// VectorField

VectorField VectorField::constant(Vector h) {
  const int n = static_cast<int>(h.size());
  if (n < 1) throw DomainError("vector field: dimension must be positive");
  VectorField k;
  k.dim_ = n;
  k.constant_ = true;
  k.value_ = [h](const Vector&) { return h; };
  k.jacobian_ = [n](const Vector&) -> Matrix { return Matrix::Zero(n, n); };
  return k;
}

VectorField VectorField::linear(Matrix a) {
  const int n = static_cast<int>(a.rows());
  require_dim(n, a.cols(), "linear vector field");
  if (n < 1) throw DomainError("vector field: dimension must be positive");
  VectorField k;
  k.dim_ = n;
  k.value_ = [a](const Vector& x) -> Vector { return a * x; };
  k.jacobian_ = [a](const Vector&) { return a; };
  return k;
}

VectorField VectorField::identity(int dim) { return linear(Matrix::Identity(dim, dim)); }

VectorField VectorField::custom(int dim, ValueFn value, JacobianFn jacobian,
                                Validation validation) {
  if (dim < 1) throw DomainError("vector field: dimension must be positive");
  if (validation == Validation::check) {
    const auto probes = default_probes(dim);
    const DerivativeCheck chk = check_jacobian(value, jacobian, probes);
    if (!chk.passed()) {
      throw DomainError("vector field: jacobian disagrees with finite differences at " +
                        format_point(chk.worst_point));
    }
  }
  VectorField k;
  k.dim_ = dim;
  k.value_ = std::move(value);
  k.jacobian_ = std::move(jacobian);
  return k;
}

// ---------------------------------------------------------------------------
// Engines and pairings

PairingEngine PairingEngine::gauss_hermite(int order) {
  PairingEngine e;
  e.mode = PairingMode::gauss_hermite;
  e.order_or_samples = order;
  return e;
}

PairingEngine PairingEngine::tensor_grid(Box box, int order, int panels) {
  PairingEngine e;
  e.mode = PairingMode::tensor_grid;
  e.order_or_samples = order;
  e.panels = panels;
  e.box = std::move(box);
  return e;
}

PairingEngine PairingEngine::monte_carlo(int samples, std::uint64_t seed, int workers) {
  PairingEngine e;
  e.mode = PairingMode::monte_carlo;
  e.order_or_samples = samples;
  e.seed = seed;
  e.workers = workers;
  e.reported_tolerance = 0.0;
  return e;
}

PairResult integrate(const DensityMeasure& nu, const Integrand& integrand,
                     const PairingEngine& engine) {
  if (engine.order_or_samples < 1) throw DomainError("engine: order_or_samples must be positive");
  switch (engine.mode) {
    case PairingMode::gauss_hermite:
      return integrate_gauss_hermite(nu, integrand, engine);
    case PairingMode::tensor_grid:
      return integrate_grid(nu.dim(), [&nu](const Vector& x) { return nu.log_density(x); },
                            integrand, engine);
    case PairingMode::monte_carlo:
      if (nu.is_flat()) {
        throw DomainError("flat measure paired without a bounding box: use a tensor_grid engine");
      }
      return integrate_monte_carlo(nu, integrand, engine);
  }
  throw DomainError("unknown pairing mode");
}

PairResult integrate_log_weight(int dim, const std::function<double(const Vector&)>& log_weight,
                                const Integrand& integrand, const PairingEngine& engine) {
  if (engine.mode != PairingMode::tensor_grid) {
    throw DomainError("integrate_log_weight needs a tensor_grid engine");
  }
  return integrate_grid(dim, log_weight, integrand, engine);
}

PairResult pair(const DensityMeasure& nu, const TestFunction& phi, const PairingEngine& engine) {
  require_dim(nu.dim(), phi.dim(), "pair");
  return integrate(nu, [&phi](const Vector& x) { return phi.value(x); }, engine);
}

std::vector<Vector> quadrature_points(const DensityMeasure& nu, const PairingEngine& engine) {
  std::vector<Vector> pts;
  const int n = nu.dim();
  switch (engine.mode) {
    case PairingMode::gauss_hermite: {
      if (!nu.frame()) throw DomainError("gauss_hermite needs a Gaussian frame");
      const Rule1D rule = gauss_hermite(engine.order_or_samples);
      Vector u(n);
      for_each_multi_index(std::vector<int>(n, engine.order_or_samples), [&](const std::vector<int>& idx) {
        for (int i = 0; i < n; ++i) u[i] = rule.nodes[idx[i]];
        pts.push_back(nu.frame()->mean + std::sqrt(2.0) * (nu.frame()->chol * u));
      });
      break;
    }
    case PairingMode::tensor_grid: {
      if (!engine.box) throw DomainError("tensor_grid needs a bounding box");
      std::vector<Rule1D> rules;
      std::vector<int> sizes;
      for (int i = 0; i < n; ++i) {
        rules.push_back(composite_gauss_legendre(engine.box->lo[i], engine.box->hi[i],
                                                 engine.panels, engine.order_or_samples));
        sizes.push_back(static_cast<int>(rules.back().nodes.size()));
      }
      Vector x(n);
      for_each_multi_index(sizes, [&](const std::vector<int>& idx) {
        for (int i = 0; i < n; ++i) x[i] = rules[i].nodes[idx[i]];
        pts.push_back(x);
      });
      break;
    }
    case PairingMode::monte_carlo: {
      std::mt19937_64 rng = stream_rng(engine.seed, 0);
      const int count = std::min(engine.order_or_samples, 4096);
      for (int i = 0; i < count; ++i) pts.push_back(nu.sample(rng));
      break;
    }
  }
  return pts;
}

double log_derivative_along_vector(const DensityMeasure& nu, const Vector& h, const Vector& x) {
  require_dim(nu.dim(), h.size(), "log_derivative_along_vector direction");
  require_dim(nu.dim(), x.size(), "log_derivative_along_vector point");
  if (nu.is_flat()) return 0.0;
  const double ld = nu.log_density(x);
  if (!std::isfinite(ld)) {
    throw NumericFault("log density not finite at " + format_point(x), x);
  }
  return nu.log_density_gradient(x).dot(h);
}

double log_derivative_along_field(const DensityMeasure& nu, const VectorField& k,
                                  const Vector& x) {
  require_dim(nu.dim(), k.dim(), "log_derivative_along_field");
  const Matrix jac = k.jacobian(x);
  if (!jac.allFinite()) {
    throw NumericFault("non-finite Jacobian entries at " + format_point(x), x);
  }
  return log_derivative_along_vector(nu, k.value(x), x) + jac.trace();
}

}  // namespace noetherlab
