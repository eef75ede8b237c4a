#pragma once

#include <span>
#include <vector>

#include "noetherlab/measure.hpp"

namespace noetherlab {

/// S_k(t)(x) = x - t k(x).
class Flow {
 public:
  Flow(VectorField field, double t) : field_(std::move(field)), t_(t) {}

  const VectorField& field() const { return field_; }
  double t() const { return t_; }

  Vector apply(const Vector& x) const;
  /// I - t k'(x)
  Matrix jacobian(const Vector& x) const;
  /// True when det(I - t k'(x)) > 0 at every point.
  bool orientation_preserving_on(std::span<const Vector> points) const;

 private:
  VectorField field_;
  double t_;
};

/// 0.5 / max over points of the spectral norm of k'(x); +inf when k' vanishes
/// on every point. For |t| below this bound, I - t k' stays nonsingular.
double injectivity_bound(const VectorField& k, std::span<const Vector> points);

/// Injectivity bound on the nodes that `engine` uses for nu.
double injectivity_bound(const DensityMeasure& nu, const VectorField& k,
                         const PairingEngine& engine);

/// The image measure (S_k(t))_* nu. Its density is only needed pointwise for
/// diagnostics; pairings go through the base measure.
class PushforwardMeasure {
 public:
  PushforwardMeasure(DensityMeasure base, Flow flow);

  const DensityMeasure& base() const { return base_; }
  const Flow& flow() const { return flow_; }

  /// log density of the image at y: log rho(x) - log det(I - t k'(x)) with
  /// S(x) = y. Exactly the base log density at t = 0; for constant fields the
  /// preimage is y + t h.
  double log_density(const Vector& y) const;

  /// Pairing through the base measure: integral of phi(S(x)) dnu(x).
  PairResult pair(const TestFunction& phi, const PairingEngine& engine) const;

  /// Pairing by integrating phi against the image density directly on a
  /// tensor grid (needs the inverse flow; used to cross-check the base route).
  PairResult pair_by_density(const TestFunction& phi, const PairingEngine& engine) const;

  /// Preimage of y under the flow (Newton iteration).
  Vector preimage(const Vector& y) const;

 private:
  DensityMeasure base_;
  Flow flow_;
};

/// <(S_k(t))_* nu, phi> = integral of phi(x - t k(x)) dnu(x).
PairResult pushforward_pairing(const DensityMeasure& nu, const VectorField& k, double t,
                               const TestFunction& phi, const PairingEngine& engine);

/// Central difference in t of pushforward_pairing at t = 0 with step delta.
/// This is the weak-derivative oracle: it uses no analytic log-derivative.
Complex weak_derivative_fd(const DensityMeasure& nu, const VectorField& k,
                           const TestFunction& phi, const PairingEngine& engine, double delta);

/// pair(nu, phi * beta^nu_k): the analytic side of the weak derivative.
Complex analytic_weak_derivative(const DensityMeasure& nu, const VectorField& k,
                                 const TestFunction& phi, const PairingEngine& engine);

/// -pair(nu, <grad phi, k>): the integration-by-parts form of the same number.
Complex integration_by_parts_form(const DensityMeasure& nu, const VectorField& k,
                                  const TestFunction& phi, const PairingEngine& engine);

/// Step-halving study of the weak-derivative oracle against a reference value.
struct ConvergenceStudy {
  double delta = 0.0;
  double error_full = 0.0;  // |fd(delta) - reference|
  double error_half = 0.0;  // |fd(delta / 2) - reference|
  double observed_order = 0.0;
  /// True when both errors sit at the rounding floor (the pairing is at most
  /// quadratic in t, so the central difference is exact).
  bool exact = false;
};

ConvergenceStudy fd_convergence(const DensityMeasure& nu, const VectorField& k,
                                const TestFunction& phi, const PairingEngine& engine,
                                double delta, Complex reference);

struct RadonNikodymEntry {
  Complex fd;
  Complex analytic;
  double abs_error = 0.0;
  double rel_error = 0.0;  // abs_error / max(1, |analytic|)
};

struct RadonNikodymReport {
  std::vector<RadonNikodymEntry> entries;
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// Certifies f'(0) << nu with density beta^nu_k by comparing the FD oracle
/// with pair(nu, phi * beta^nu_k) over every probe.
RadonNikodymReport radon_nikodym_check(const DensityMeasure& nu, const VectorField& k,
                                       std::span<const TestFunction> probes,
                                       const PairingEngine& engine, double tolerance,
                                       double delta = 1e-4);

}  // namespace noetherlab
