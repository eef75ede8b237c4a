#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "noetherlab/measure.hpp"

namespace noetherlab {

/// Lagrange-type density L(x, r, alpha) with x in R^n, r in R^m and alpha an
/// m x n matrix (the value of g' at x), together with its three partials.
class LagrangianDensity {
 public:
  using ValueFn = std::function<Complex(const Vector&, const Vector&, const Matrix&)>;
  using VectorPartialFn = std::function<CVector(const Vector&, const Vector&, const Matrix&)>;
  using MatrixPartialFn = std::function<CMatrix(const Vector&, const Vector&, const Matrix&)>;

  static LagrangianDensity create(int n, int m, ValueFn value, VectorPartialFn d_x,
                                  VectorPartialFn d_r, MatrixPartialFn d_alpha,
                                  Validation validation = Validation::check);

  int n() const { return n_; }
  int m() const { return m_; }
  Complex value(const Vector& x, const Vector& r, const Matrix& a) const { return value_(x, r, a); }
  /// L_1': gradient in x (length n).
  CVector d_x(const Vector& x, const Vector& r, const Matrix& a) const { return d_x_(x, r, a); }
  /// L_2': gradient in r (length m).
  CVector d_r(const Vector& x, const Vector& r, const Matrix& a) const { return d_r_(x, r, a); }
  /// L_3': gradient in alpha (m x n), acting on a matrix by entrywise pairing.
  CMatrix d_alpha(const Vector& x, const Vector& r, const Matrix& a) const {
    return d_alpha_(x, r, a);
  }

 private:
  LagrangianDensity() = default;

  int n_ = 0;
  int m_ = 0;
  ValueFn value_;
  VectorPartialFn d_x_;
  VectorPartialFn d_r_;
  MatrixPartialFn d_alpha_;
};

/// A field g: R^n -> R^m with derivative g' (m x n).
class FieldConfiguration {
 public:
  using ValueFn = std::function<Vector(const Vector&)>;
  using DerivativeFn = std::function<Matrix(const Vector&)>;

  static FieldConfiguration create(int n, int m, ValueFn g, DerivativeFn g_prime,
                                   Validation validation = Validation::check);
  static FieldConfiguration zero(int n, int m);
  static FieldConfiguration identity(int n);

  int n() const { return n_; }
  int m() const { return m_; }
  Vector value(const Vector& x) const { return g_(x); }
  Matrix derivative(const Vector& x) const { return g_prime_(x); }

 private:
  FieldConfiguration() = default;

  int n_ = 0;
  int m_ = 0;
  ValueFn g_;
  DerivativeFn g_prime_;
};

struct FamilyImage {
  Vector x;  // E-part, F_{Z,1}
  Vector r;  // G-part, F_{Z,2}
};

/// z-derivative of F at z = 0.
struct FamilyGenerator {
  Matrix e_part;  // n x p
  Matrix g_part;  // m x p
};

/// Partials of F(z, ., ., alpha) at fixed z, stacked as [E-rows; G-rows].
struct FamilyJacobian {
  Matrix wrt_x;  // (n + m) x n
  Matrix wrt_r;  // (n + m) x m
};

/// Partials of the generator applied to a fixed Delta, at fixed alpha.
struct GeneratorPartials {
  Matrix h1_x;  // n x n
  Matrix h1_r;  // n x m
  Matrix h2_x;  // m x n
  Matrix h2_r;  // m x m
};

/// Parametric family F(z, x, r, alpha) -> (x_z, r_z) of transformations of
/// E x G with F(0, x, r, alpha) = (x, r).
///
/// The analytic jacobian and generator partials are optional. When they are
/// supplied the family is treated as alpha-independent: chain rules through
/// the field g then only need g'. Without them every derivative falls back to
/// central differences of the composed maps, which also covers alpha.
class TransformationFamily {
 public:
  using MapFn =
      std::function<FamilyImage(const Vector& z, const Vector& x, const Vector& r, const Matrix& a)>;
  using GeneratorFn =
      std::function<FamilyGenerator(const Vector& x, const Vector& r, const Matrix& a)>;
  using JacobianFn =
      std::function<FamilyJacobian(const Vector& z, const Vector& x, const Vector& r, const Matrix& a)>;
  using PartialsFn = std::function<GeneratorPartials(const Vector& x, const Vector& r,
                                                     const Matrix& a, const Vector& delta)>;

  static TransformationFamily create(int p, int n, int m, MapFn map, GeneratorFn generator,
                                     JacobianFn jacobian = {}, PartialsFn partials = {},
                                     Validation validation = Validation::check);

  int p() const { return p_; }
  int n() const { return n_; }
  int m() const { return m_; }

  FamilyImage apply(const Vector& z, const Vector& x, const Vector& r, const Matrix& a) const {
    return map_(z, x, r, a);
  }
  FamilyGenerator generator(const Vector& x, const Vector& r, const Matrix& a) const {
    return generator_(x, r, a);
  }
  bool has_analytic_jacobian() const { return static_cast<bool>(jacobian_); }
  bool has_analytic_partials() const { return static_cast<bool>(partials_); }
  FamilyJacobian jacobian(const Vector& z, const Vector& x, const Vector& r, const Matrix& a) const;
  GeneratorPartials partials(const Vector& x, const Vector& r, const Matrix& a,
                             const Vector& delta) const;

 private:
  TransformationFamily() = default;

  int p_ = 0;
  int n_ = 0;
  int m_ = 0;
  MapFn map_;
  GeneratorFn generator_;
  JacobianFn jacobian_;
  PartialsFn partials_;
};

/// Validation summary for a family: identity at z = 0 and agreement of every
/// supplied derivative with central differences.
struct FamilyCheck {
  double identity_error = 0.0;
  double generator_error = 0.0;
  double jacobian_error = 0.0;
  double partials_error = 0.0;
  bool passed() const;
};

FamilyCheck check_family(const TransformationFamily& family, std::span<const Vector> x_probes);

/// h_{1,Delta}, h_{2,Delta} and h_{3,Delta} = h_{2,Delta}', evaluated lazily.
class VariationFields {
 public:
  VariationFields(TransformationFamily family, FieldConfiguration field, Vector delta);

  Vector h1(const Vector& x) const;
  Vector h2(const Vector& x) const;
  /// x-derivative of h2 (m x n).
  Matrix h3(const Vector& x) const;
  /// x-derivative of h1 (n x n).
  Matrix h1_jacobian(const Vector& x) const;

  const Vector& delta() const { return delta_; }

 private:
  TransformationFamily family_;
  FieldConfiguration field_;
  Vector delta_;
};

VariationFields variation_fields(const TransformationFamily& family,
                                 const FieldConfiguration& field, const Vector& delta);

/// g_z, defined by its graph {F(z)(x, g(x), g'(x))}. Evaluating g_z at y
/// inverts x -> F_{Z,1}(z)(x, g(x), g'(x)) by damped Newton (tolerance 1e-12,
/// at most 50 iterations).
FieldConfiguration transformed_field(const TransformationFamily& family,
                                     const FieldConfiguration& field, const Vector& z);

/// The ingredients of the measure-valued function z -> F_{g,nu}(z).
struct NoetherProblem {
  LagrangianDensity lagrangian;
  FieldConfiguration field;
  TransformationFamily family;
  DensityMeasure measure;
};

/// Which measure the z-derivative is taken of.
///
/// pushforward: F_{g,nu}(z) = L(., g_z, g_z') nu_z with nu_z = (F_{Z,1}(z))_* nu,
///   paired as phi -> integral of phi L(., g_z, g_z') dnu_z.
/// pullback: the same measure carried back along F_{Z,1}(z), i.e.
///   A -> F_{g,nu}(z)(F_{Z,1}(z)(A)); this is the measure whose invariance is
///   the classical Noether hypothesis (equal integrals over corresponding
///   domains).
enum class FamilyFrame { pushforward, pullback };

enum class Theorem1Variant { paper_literal, transport_corrected };

std::string to_string(FamilyFrame frame);
std::string to_string(Theorem1Variant variant);

/// F_{g,nu}(z) as a pairing functional.
class FamilyMeasure {
 public:
  FamilyMeasure(NoetherProblem problem, Vector z, FamilyFrame frame);

  PairResult pair(const TestFunction& phi, const PairingEngine& engine) const;
  const Vector& z() const { return z_; }
  FamilyFrame frame() const { return frame_; }

 private:
  NoetherProblem problem_;
  Vector z_;
  FamilyFrame frame_;
};

FamilyMeasure family_measure(const NoetherProblem& problem, const Vector& z,
                             FamilyFrame frame = FamilyFrame::pushforward);

/// Breakdown of the five-term expression at one point:
///   L1'.h1 + L2'.h2 + L3'.h2' + L tr(D) + L beta^nu(v, x)
/// with (D, v) = (h3, h2) for paper_literal and (h1', h1) for
/// transport_corrected. The total is a density relative to nu.
struct Theorem1Terms {
  std::array<Complex, 5> terms{};
  Complex total;
};

Theorem1Terms theorem1_evaluate(const NoetherProblem& problem, const Vector& delta,
                                const Vector& x, Theorem1Variant variant);

/// pair(nu, phi * total) for the given variant.
Complex theorem1_pairing(const NoetherProblem& problem, const Vector& delta,
                         const TestFunction& phi, const PairingEngine& engine,
                         Theorem1Variant variant);

/// Oracle: central difference in z of <F_{g,nu}(z Delta), phi> at z = 0.
Complex family_weak_derivative_fd(const NoetherProblem& problem, const Vector& delta,
                                  const TestFunction& phi, const PairingEngine& engine,
                                  double step, FamilyFrame frame = FamilyFrame::pullback);

struct InvarianceCertificate {
  double max_abs_derivative = 0.0;
  double threshold = 0.0;
  bool invariant = false;
};

InvarianceCertificate certify_invariance(const NoetherProblem& problem, const Vector& delta,
                                         std::span<const TestFunction> probes,
                                         const PairingEngine& engine, double step,
                                         double threshold,
                                         FamilyFrame frame = FamilyFrame::pullback);

struct NoetherOptions {
  std::vector<TestFunction> certificate_probes;
  PairingEngine engine;
  double step = 1e-4;
  double certificate_threshold = 1e-8;
  double residual_tolerance = 1e-6;
  FamilyFrame frame = FamilyFrame::pullback;
};

enum class NoetherStatus { vanishing, invariant_but_nonzero, not_invariant };

struct NoetherResidual {
  InvarianceCertificate certificate;
  std::vector<Complex> residuals;
  double max_abs = 0.0;
  double mean_abs = 0.0;
  NoetherStatus status = NoetherStatus::not_invariant;
  bool passed() const { return status == NoetherStatus::vanishing; }
};

std::string to_string(NoetherStatus status);

/// Evaluates the five-term expression at every probe point after computing the
/// invariance certificate. The residual must vanish when the certificate
/// passes.
NoetherResidual noether_residual(const NoetherProblem& problem, const Vector& delta,
                                 std::span<const Vector> probe_points, Theorem1Variant variant,
                                 const NoetherOptions& options);

struct VariantOutcome {
  bool available = false;  // paper_literal needs m == n
  std::vector<Complex> pairings;
  double max_rel_error = 0.0;  // vs the FD oracle, scaled by max(1, |fd|)
};

/// One row of the variant ledger.
struct VariantAdjudication {
  FamilyFrame frame = FamilyFrame::pullback;
  std::vector<Complex> oracle;
  VariantOutcome paper_literal;
  VariantOutcome transport_corrected;
  double max_pointwise_gap = 0.0;
  bool differ_analytically = false;
  double tolerance = 0.0;
  /// "paper_literal", "transport_corrected", "both" or "neither".
  std::string winner;
  /// Exactly one variant within tolerance and the other off by >= 10x when
  /// they differ; every available variant within tolerance otherwise.
  bool decisive = false;
};

VariantAdjudication adjudicate_variants(const NoetherProblem& problem, const Vector& delta,
                                        std::span<const TestFunction> probes,
                                        std::span<const Vector> points,
                                        const PairingEngine& engine, double step,
                                        double tolerance, FamilyFrame frame);

}  // namespace noetherlab
