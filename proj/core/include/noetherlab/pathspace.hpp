#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "noetherlab/measure.hpp"
#include "noetherlab/noether.hpp"

namespace noetherlab {

/// Paths on [0, t_total] sampled at N lattice times, stored as one point of
/// R^M with M = 2dN and layout (Q_1, ..., Q_N, P_1, ..., P_N), each block of
/// length d. Q_0 = 0: paths are pinned at the start and the offset q is
/// carried separately.
class LatticePathSpace {
 public:
  LatticePathSpace(int d, int steps, double t_total);

  int d() const { return d_; }
  int steps() const { return steps_; }
  int dim() const { return 2 * d_ * steps_; }
  double dt() const { return dt_; }
  double t_total() const { return t_total_; }

  /// Offset of Q_j / P_j (j = 1..N) inside a path vector.
  int q_offset(int j) const { return (j - 1) * d_; }
  int p_offset(int j) const { return d_ * steps_ + (j - 1) * d_; }
  Vector q(const Vector& path, int j) const;
  Vector p(const Vector& path, int j) const;

  /// Same horizon with `factor` times as many steps.
  LatticePathSpace refined(int factor) const;

 private:
  int d_;
  int steps_;
  double dt_;
  double t_total_;
};

/// Classical Hamiltonian h(q, p) on R^d x R^d.
///
/// Quadratic Hamiltonians carry the flag so that discretized actions built
/// from them can be evaluated with the closed-form Fresnel rule.
struct Hamiltonian {
  int d = 0;
  std::function<double(const Vector&, const Vector&)> value;
  std::function<Vector(const Vector&, const Vector&)> grad_q;
  std::function<Vector(const Vector&, const Vector&)> grad_p;
  bool quadratic = false;
  std::string name = "custom";

  static Hamiltonian zero(int d);
  /// |p|^2 / (2 mass)
  static Hamiltonian free_particle(int d, double mass = 1.0);
  /// |p|^2 / (2 mass) + mass omega^2 |q|^2 / 2
  static Hamiltonian harmonic(int d, double mass = 1.0, double omega = 1.0);
  /// |p|^2 / 2 + lambda |q|^4 / 4; not quadratic.
  static Hamiltonian quartic(int d, double lambda);
  /// Gradient validated against central differences unless skipped.
  static Hamiltonian custom(int d, std::function<double(const Vector&, const Vector&)> value,
                            std::function<Vector(const Vector&, const Vector&)> grad_q,
                            std::function<Vector(const Vector&, const Vector&)> grad_p,
                            bool quadratic = false, Validation validation = Validation::check);
};

enum class KineticRule {
  forward,   // sum_j <Q_j - Q_{j-1}, P_j>
  midpoint,  // sum_j <Q_j - Q_{j-1}, (P_{j-1} + P_j) / 2>, with P_0 := P_1
};

/// S(x) = x^T A x / 2 + b^T x + c with A symmetric.
struct QuadraticForm {
  Matrix a;
  Vector b;
  double c = 0.0;

  double value(const Vector& x) const { return 0.5 * x.dot(a * x) + b.dot(x) + c; }
  Vector gradient(const Vector& x) const { return a * x + b; }
};

/// Discretized phase-space action S = H-term - kinetic term on R^M.
class DiscreteAction {
 public:
  DiscreteAction(LatticePathSpace space, Hamiltonian hamiltonian, Vector q,
                 KineticRule rule = KineticRule::forward);

  const LatticePathSpace& space() const { return space_; }
  const Hamiltonian& hamiltonian() const { return hamiltonian_; }
  const Vector& q() const { return q_; }
  KineticRule rule() const { return rule_; }
  int dim() const { return space_.dim(); }

  double kinetic(const Vector& path) const;
  double hamiltonian_term(const Vector& path) const;
  double value(const Vector& path) const { return hamiltonian_term(path) - kinetic(path); }
  Vector kinetic_gradient(const Vector& path) const;
  Vector hamiltonian_gradient(const Vector& path) const;
  Vector gradient(const Vector& path) const;

  bool is_quadratic() const { return hamiltonian_.quadratic; }

 private:
  void check(const Vector& path) const;

  LatticePathSpace space_;
  Hamiltonian hamiltonian_;
  Vector q_;
  KineticRule rule_;
};

DiscreteAction discretize_action(const LatticePathSpace& space, const Hamiltonian& h,
                                 const Vector& q, KineticRule rule = KineticRule::forward);

/// Any smooth action on R^M; quadratic ones carry their exact (A, b, c).
class PathAction {
 public:
  static PathAction from(const DiscreteAction& action);
  static PathAction quadratic(QuadraticForm form);
  static PathAction custom(int dim, std::function<double(const Vector&)> value,
                           std::function<Vector(const Vector&)> gradient,
                           Validation validation = Validation::check);

  int dim() const { return dim_; }
  double value(const Vector& x) const { return value_(x); }
  Vector gradient(const Vector& x) const { return gradient_(x); }
  const std::optional<QuadraticForm>& quadratic_form() const { return form_; }

 private:
  PathAction() = default;

  int dim_ = 0;
  std::function<double(const Vector&)> value_;
  std::function<Vector(const Vector&)> gradient_;
  std::optional<QuadraticForm> form_;
};

/// Recovers (A, b, c) of an action known to be quadratic from gradient
/// differences: b = grad S(0), A e_i = grad S(e_i) - b, then symmetrized.
QuadraticForm extract_quadratic_form(const DiscreteAction& action);

/// Initial data f: R^d -> C. Plane waves exp(i <kappa, q>) keep the pairing
/// Gaussian and therefore admit the closed form.
struct InitialData {
  int d = 0;
  std::function<Complex(const Vector&)> value;
  std::function<CVector(const Vector&)> gradient;
  std::optional<Vector> frequency;

  static InitialData one(int d);
  static InitialData plane_wave(Vector kappa);
  static InitialData gaussian(Vector center, double width);
};

/// The factor f(Q_N + q) as a function on R^M.
struct EndpointFactor {
  int dim = 0;
  std::function<Complex(const Vector&)> value;
  std::function<CVector(const Vector&)> gradient;
  /// For plane-wave data: f(Q_N + q) = exp(i (<frequency, x> + phase)).
  std::optional<Vector> frequency;
  double phase = 0.0;

  static EndpointFactor one(int dim);
  static EndpointFactor from_initial_data(const LatticePathSpace& space, const InitialData& f,
                                          const Vector& q);
};

/// phi -> integral of phi e^{iS} f e^{-eps |x|^2 / 2} dx over R^M: the
/// Feynman pseudomeasure on the lattice, regularized by Gaussian damping.
class FeynmanWeight {
 public:
  FeynmanWeight(PathAction action, EndpointFactor endpoint, double epsilon);

  const PathAction& action() const { return action_; }
  const EndpointFactor& endpoint() const { return endpoint_; }
  double epsilon() const { return epsilon_; }
  int dim() const { return action_.dim(); }

  /// e^{i S(x)}; modulus one.
  Complex phase(const Vector& x) const;
  /// e^{i S(x)} f(x) e^{-eps |x|^2 / 2}
  Complex density(const Vector& x) const;

  /// True when the closed form applies to phi: quadratic action, plane-wave
  /// (or trivial) endpoint factor and plane-wave (or constant) phi.
  bool closed_form_applies(const TestFunction& phi) const;

 private:
  PathAction action_;
  EndpointFactor endpoint_;
  double epsilon_;
};

FeynmanWeight make_feynman_weight(const DiscreteAction& action, const InitialData& f,
                                  double epsilon);

/// Complex-Gaussian evaluation. Requires closed_form_applies(phi).
Complex fresnel_closed_form(const FeynmanWeight& weight, const TestFunction& phi);

/// Rotates into the eigenbasis of A and integrates each damped 1-D Fresnel
/// factor by composite Gauss-Legendre on a truncated line. Same inputs as
/// fresnel_closed_form; used to cross-check it.
Complex fresnel_separable_quadrature(const FeynmanWeight& weight, const TestFunction& phi,
                                     int nodes_per_panel = 20);

/// Largest M accepted by deterministic quadrature for actions without a closed
/// form.
inline constexpr int kMaxDeterministicPathDim = 12;

/// Regularized pairing. Uses the closed form when it applies; otherwise the
/// engine integrates against N(0, I / eps) (Gauss-Hermite or Monte Carlo) and
/// the result is rescaled by (2 pi / eps)^{M/2}.
PairResult fresnel_pair(const FeynmanWeight& weight, const TestFunction& phi,
                        const PairingEngine& engine);

/// tr h1'(path) for a family acting on R^M with trivial G: the logarithmic
/// derivative of the flat measure along the generator.
double anomaly_term(const LatticePathSpace& space, const TransformationFamily& family,
                    const Vector& delta, const Vector& path);
double anomaly_term(const TransformationFamily& family, const Vector& delta, const Vector& path);

/// h1 = generator . Delta as a vector field on R^M.
VectorField generator_field(const TransformationFamily& family, const Vector& delta);

using FamilyBuilder = std::function<TransformationFamily(const LatticePathSpace&)>;
using PathBuilder = std::function<Vector(const LatticePathSpace&)>;

/// Q_j = j (1, ..., 1), P_j = 0: unit increments on every step.
Vector unit_increment_path(const LatticePathSpace& space);

struct AnomalyOptions {
  double certificate_tolerance = 1e-12;
  std::vector<int> refinement_factors{1, 2, 4};
  PathBuilder reference_path = unit_increment_path;
  KineticRule rule = KineticRule::forward;
  /// Part (d): FD check of the regularized pairing in z.
  bool fd_check = false;
  double epsilon = 1.0;
  double fd_step = 1e-4;
  double fd_tolerance = 1e-6;
  std::vector<TestFunction> fd_probes;
};

struct AnomalySample {
  Vector path;
  double action_derivative = 0.0;  // <grad S, h1>
  double certificate = 0.0;        // |i <grad S, h1> f + <grad f, h1>|
  double anomaly = 0.0;            // tr h1'
};

struct RefinementEntry {
  int steps = 0;
  int dim = 0;
  double anomaly = 0.0;
  double certificate = 0.0;
};

struct CorollaryCheck {
  Complex fd;
  Complex action_part;   // pairing of phi e^{iS} (i <grad S, h1> f + <grad f, h1>) e^{-eps|x|^2/2}
  Complex anomaly_part;  // pairing of phi W tr h1'
  Complex damping_part;  // pairing of phi W (-eps <x, h1>)
  double rel_error = 0.0;          // fd vs the sum of the three parts
  double anomaly_only_error = 0.0; // fd vs anomaly_part, scaled by max(1, |fd|)
};

struct AnomalyReport {
  std::vector<AnomalySample> samples;
  double max_certificate = 0.0;
  double max_action_derivative = 0.0;
  double certificate_tolerance = 0.0;
  bool corollary_applies = false;
  /// "anomaly" when the certificate passes and the trace is nonzero somewhere,
  /// "anomaly-free" when it passes with zero trace, "Corollary inapplicable"
  /// otherwise.
  std::string status;
  std::vector<RefinementEntry> refinement;
  std::vector<double> refinement_ratios;
  std::vector<CorollaryCheck> corollary_checks;
  bool corollary_checks_passed = true;
};

AnomalyReport anomaly_report(const LatticePathSpace& space, const FamilyBuilder& family,
                             const Vector& delta, const Hamiltonian& h, const Vector& q,
                             const InitialData& f, std::span<const Vector> probes,
                             const PairingEngine& engine, const AnomalyOptions& options = {});

}  // namespace noetherlab
