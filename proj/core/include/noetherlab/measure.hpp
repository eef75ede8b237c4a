#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "noetherlab/linalg.hpp"

namespace noetherlab {

/// Whether user-supplied derivatives are compared against central differences
/// when an object is built.
enum class Validation { check, skip };

enum class MeasureKind { normalized_probability, unnormalized, flat };

/// Reference Gaussian N(mean, chol * chol^T) used to place Gauss-Hermite nodes.
struct GaussianFrame {
  Vector mean;
  Matrix chol;  // lower triangular
};

/// A measure on R^n with a smooth density exp(log_density). The flat kind is the
/// finite-dimensional stand-in for the translation-invariant Lebesgue
/// (pseudo)measure: log_density == 0 and its gradient vanishes identically.
class DensityMeasure {
 public:
  using ScalarFn = std::function<double(const Vector&)>;
  using GradientFn = std::function<Vector(const Vector&)>;
  using Sampler = std::function<Vector(std::mt19937_64&)>;

  /// Normalized N(mean, covariance). Carries a sampler and its own frame.
  static DensityMeasure gaussian(Vector mean, Matrix covariance);
  static DensityMeasure standard_gaussian(int dim);
  static DensityMeasure flat(int dim);

  /// Arbitrary smooth density. The gradient is validated against central
  /// differences at default_probes(dim) unless `validation` is skip.
  static DensityMeasure custom(int dim, ScalarFn log_density, GradientFn gradient,
                               MeasureKind kind, std::optional<GaussianFrame> frame = {},
                               Sampler sampler = {}, Validation validation = Validation::check);

  /// Same measure with its density multiplied by `factor` > 0. The result is
  /// unnormalized and drops the sampler; every logarithmic derivative is
  /// unchanged.
  DensityMeasure scaled(double factor) const;

  int dim() const { return dim_; }
  MeasureKind kind() const { return kind_; }
  bool is_flat() const { return kind_ == MeasureKind::flat; }
  double log_density(const Vector& x) const;
  Vector log_density_gradient(const Vector& x) const;
  const std::optional<GaussianFrame>& frame() const { return frame_; }
  bool has_sampler() const { return static_cast<bool>(sampler_); }
  Vector sample(std::mt19937_64& rng) const;

 private:
  DensityMeasure() = default;

  int dim_ = 0;
  MeasureKind kind_ = MeasureKind::unnormalized;
  ScalarFn log_density_;
  GradientFn gradient_;
  std::optional<GaussianFrame> frame_;
  Sampler sampler_;
};

enum class TestFamily { polynomial_times_gaussian, compact_bump, plane_wave };

struct Monomial {
  double coefficient = 1.0;
  std::vector<int> powers;
};

/// Test function phi on R^n with its gradient. Complex valued so that plane
/// waves exp(i <w, x>) fit the same interface.
class TestFunction {
 public:
  using ValueFn = std::function<Complex(const Vector&)>;
  using GradientFn = std::function<CVector(const Vector&)>;

  /// sum_k c_k x^{p_k} * exp(-|x - center|^2 / (2 width^2)). An infinite width
  /// gives a pure polynomial.
  static TestFunction polynomial_times_gaussian(std::vector<Monomial> terms, Vector center,
                                                double width);
  static TestFunction polynomial(int dim, std::vector<Monomial> terms);
  static TestFunction one(int dim);
  /// exp(1 - 1 / (1 - |x - c|^2 / R^2)) inside the ball, zero outside.
  static TestFunction compact_bump(Vector center, double radius);
  static TestFunction plane_wave(Vector frequency);
  static TestFunction custom(int dim, ValueFn value, GradientFn gradient, TestFamily family,
                             Validation validation = Validation::check);

  int dim() const { return dim_; }
  TestFamily family() const { return family_; }
  Complex value(const Vector& x) const { return value_(x); }
  CVector gradient(const Vector& x) const { return gradient_(x); }

  /// For plane waves (and the constant one, frequency 0): the wave vector.
  const std::optional<Vector>& frequency() const { return frequency_; }
  /// Support ball of compact bumps.
  const std::optional<double>& support_radius() const { return radius_; }
  const std::optional<Vector>& support_center() const { return center_; }

 private:
  TestFunction() = default;

  int dim_ = 0;
  TestFamily family_ = TestFamily::polynomial_times_gaussian;
  ValueFn value_;
  GradientFn gradient_;
  std::optional<Vector> frequency_;
  std::optional<double> radius_;
  std::optional<Vector> center_;
};

/// Smooth vector field k on R^n with its Jacobian k'.
class VectorField {
 public:
  using ValueFn = std::function<Vector(const Vector&)>;
  using JacobianFn = std::function<Matrix(const Vector&)>;

  /// k_h(x) = h for all x.
  static VectorField constant(Vector h);
  static VectorField linear(Matrix a);
  static VectorField identity(int dim);
  static VectorField custom(int dim, ValueFn value, JacobianFn jacobian,
                            Validation validation = Validation::check);

  int dim() const { return dim_; }
  Vector value(const Vector& x) const { return value_(x); }
  Matrix jacobian(const Vector& x) const { return jacobian_(x); }
  bool is_constant() const { return constant_; }

 private:
  VectorField() = default;

  int dim_ = 0;
  bool constant_ = false;
  ValueFn value_;
  JacobianFn jacobian_;
};

enum class PairingMode { gauss_hermite, tensor_grid, monte_carlo };

struct Box {
  Vector lo;
  Vector hi;
};

/// Numerical realization of the pairing <nu, phi>.
struct PairingEngine {
  PairingMode mode = PairingMode::gauss_hermite;
  int order_or_samples = 20;
  std::uint64_t seed = 0;
  double reported_tolerance = 1e-10;
  int panels = 1;   // tensor_grid: panels per axis
  int workers = 1;  // monte_carlo: sample streams
  std::optional<Box> box;

  static PairingEngine gauss_hermite(int order);
  static PairingEngine tensor_grid(Box box, int order, int panels);
  static PairingEngine monte_carlo(int samples, std::uint64_t seed, int workers = 1);
};

struct PairResult {
  Complex value;
  double std_error = 0.0;  // monte_carlo only
  std::size_t evaluations = 0;
};

using Integrand = std::function<Complex(const Vector&)>;

/// Integral of integrand(x) * exp(log_density(x)) dx under the engine.
PairResult integrate(const DensityMeasure& nu, const Integrand& integrand,
                     const PairingEngine& engine);

/// Same as integrate() for an arbitrary log weight, over engine.box with the
/// tensor grid rule. Used for densities that are not wrapped as a measure.
PairResult integrate_log_weight(int dim, const std::function<double(const Vector&)>& log_weight,
                                const Integrand& integrand, const PairingEngine& engine);

PairResult pair(const DensityMeasure& nu, const TestFunction& phi, const PairingEngine& engine);

/// The nodes the engine would use for nu (for monte_carlo, the first stream's
/// draws, capped at 4096 points).
std::vector<Vector> quadrature_points(const DensityMeasure& nu, const PairingEngine& engine);

/// beta^nu(h, x) = <grad log density(x), h>. Exactly zero for flat measures.
double log_derivative_along_vector(const DensityMeasure& nu, const Vector& h, const Vector& x);

/// beta^nu_k(x) = beta^nu(k(x), x) + tr k'(x).
double log_derivative_along_field(const DensityMeasure& nu, const VectorField& k,
                                  const Vector& x);

}  // namespace noetherlab
