#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "noetherlab/builtins.hpp"
#include "noetherlab/error.hpp"
#include "noetherlab/finite_difference.hpp"
#include "noetherlab/pathspace.hpp"

using namespace noetherlab;
using proptest::Gen;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

double rel(Complex a, Complex b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

FeynmanWeight one_dim_weight(double a, double eps) {
  return FeynmanWeight(PathAction::quadratic({Matrix::Constant(1, 1, a), Vector::Zero(1), 0.0}),
                       EndpointFactor::one(1), eps);
}

FeynmanWeight lattice_harmonic(double eps) {
  const LatticePathSpace space(1, 2, 1.0);
  return make_feynman_weight(discretize_action(space, Hamiltonian::harmonic(1), vec({0.25})),
                             InitialData::one(1), eps);
}

}  // namespace

TEST(LatticePathSpace, LayoutAndRefinement) {
  const LatticePathSpace s(2, 3, 1.5);
  EXPECT_EQ(s.dim(), 12);
  EXPECT_EQ(s.dt() * s.steps(), s.t_total());
  EXPECT_EQ(s.q_offset(2), 2);
  EXPECT_EQ(s.p_offset(1), 6);
  const LatticePathSpace f = s.refined(4);
  EXPECT_EQ(f.steps(), 12);
  EXPECT_EQ(f.dim(), 48);
  EXPECT_EQ(f.t_total(), 1.5);
  EXPECT_THROW(LatticePathSpace(0, 1, 1.0), DomainError);
  EXPECT_THROW(LatticePathSpace(1, 1, -1.0), DomainError);
}

TEST(DiscreteAction, ZeroHamiltonianOnZeroPath) {
  const DiscreteAction s = discretize_action(LatticePathSpace(2, 3, 1.0), Hamiltonian::zero(2), Vector::Zero(2));
  EXPECT_EQ(s.value(Vector::Zero(12)), 0.0);
}

TEST(DiscreteAction, ForwardKineticHandEvaluation) {
  const DiscreteAction s = discretize_action(LatticePathSpace(1, 2, 1.0), Hamiltonian::zero(1), vec({0.0}));
  EXPECT_EQ(s.kinetic(vec({1, 2, 3, 5})), 8.0);
  EXPECT_EQ(s.value(vec({1, 2, 3, 5})), -8.0);
}

TEST(DiscreteAction, MidpointKineticHandEvaluation) {
  const DiscreteAction s = discretize_action(LatticePathSpace(1, 2, 1.0), Hamiltonian::zero(1), vec({0.0}),
                                             KineticRule::midpoint);
  // (1 - 0) * 3 + (2 - 1) * (3 + 5) / 2
  EXPECT_EQ(s.kinetic(vec({1, 2, 3, 5})), 7.0);
}

TEST(DiscreteAction, HamiltonianTermByDirectSubstitution) {
  const DiscreteAction s =
      discretize_action(LatticePathSpace(1, 1, 1.0), Hamiltonian::free_particle(1), vec({0.0}));
  EXPECT_EQ(s.hamiltonian_term(vec({0, 2})), 2.0);
  EXPECT_EQ(s.kinetic(vec({0, 2})), 0.0);
}

TEST(DiscreteAction, GradientMatchesFiniteDifferences) {
  for (KineticRule rule : {KineticRule::forward, KineticRule::midpoint}) {
    for (const Hamiltonian& h : {Hamiltonian::harmonic(2, 1.3, 0.7), Hamiltonian::quartic(2, 0.5)}) {
      const DiscreteAction s = discretize_action(LatticePathSpace(2, 3, 2.0), h, vec({0.3, -0.1}), rule);
      proptest::for_all(5, 7, [&](Gen& g, int) {
        const Vector x = g.vector(s.dim());
        const DerivativeCheck c = check_gradient(
            std::function<double(const Vector&)>([&](const Vector& y) { return s.value(y); }),
            std::function<Vector(const Vector&)>([&](const Vector& y) { return s.gradient(y); }),
            std::span<const Vector>(&x, 1));
        EXPECT_TRUE(c.passed()) << c.max_error;
      });
    }
  }
}

TEST(DiscreteAction, DimensionMismatch) {
  const DiscreteAction s = discretize_action(LatticePathSpace(1, 2, 1.0), Hamiltonian::zero(1), vec({0.0}));
  EXPECT_THROW(s.value(Vector::Zero(3)), DimensionError);
  EXPECT_THROW(discretize_action(LatticePathSpace(1, 2, 1.0), Hamiltonian::zero(2), vec({0.0})), DimensionError);
}

TEST(QuadraticExtraction, ReproducesTheActionExactly) {
  for (KineticRule rule : {KineticRule::forward, KineticRule::midpoint}) {
    const DiscreteAction s =
        discretize_action(LatticePathSpace(2, 2, 1.0), Hamiltonian::harmonic(2, 1.0, 1.5), vec({0.2, 0.4}), rule);
    const QuadraticForm f = extract_quadratic_form(s);
    EXPECT_LT((f.a - f.a.transpose()).norm(), 1e-15);
    proptest::for_all(5, 3, [&](Gen& g, int) {
      const Vector x = g.vector(s.dim(), -2.0, 2.0);
      EXPECT_NEAR(f.value(x), s.value(x), 1e-12);
    });
  }
  const DiscreteAction quartic =
      discretize_action(LatticePathSpace(1, 2, 1.0), Hamiltonian::quartic(1, 1.0), vec({0.0}));
  EXPECT_THROW(extract_quadratic_form(quartic), DomainError);
}

TEST(FeynmanWeight, PhaseHasUnitModulus) {
  const LatticePathSpace space(1, 3, 1.0);
  const FeynmanWeight w = make_feynman_weight(
      discretize_action(space, Hamiltonian::quartic(1, 0.8), vec({0.1})), InitialData::one(1), 0.5);
  proptest::for_all(50, 11, [&](Gen& g, int) {
    EXPECT_LE(std::abs(std::abs(w.phase(g.vector(6, -5.0, 5.0))) - 1.0), 1e-14);
  });
}

TEST(FeynmanWeight, RejectsNonPositiveEpsilon) {
  const PathAction a = PathAction::quadratic({Matrix::Identity(1, 1), Vector::Zero(1), 0.0});
  EXPECT_THROW(FeynmanWeight(a, EndpointFactor::one(1), 0.0), DomainError);
  EXPECT_THROW(FeynmanWeight(a, EndpointFactor::one(1), -1.0), DomainError);
  EXPECT_THROW(FeynmanWeight(a, EndpointFactor::one(2), 1.0), DimensionError);
}

// Frozen from scipy: sqrt(2 pi / (eps - i a)), confirmed by direct quadrature.
TEST(Fresnel, OneDimensionalOracle) {
  struct Case {
    double a, eps;
    Complex expected;
  };
  const Case cases[] = {{1.0, 1.0, {1.9473668878447328, 0.8066257758615741}},
                        {2.0, 0.1, {1.283425284827969, 1.220857300767992}},
                        {-0.5, 0.01, {2.5313124081675373, -2.4811923718696947}}};
  for (const Case& c : cases) {
    const FeynmanWeight w = one_dim_weight(c.a, c.eps);
    const TestFunction one = TestFunction::one(1);
    EXPECT_LT(rel(fresnel_closed_form(w, one), c.expected), 1e-14);
    EXPECT_LT(rel(fresnel_separable_quadrature(w, one), c.expected), 1e-10);
    EXPECT_LT(rel(fresnel_closed_form(w, one), std::sqrt(2.0 * kPi / Complex(c.eps, -c.a))), 1e-14);
  }
}

TEST(Fresnel, ZeroActionIsTheGaussianNormalization) {
  for (double eps : {1.0, 0.1, 0.01}) {
    const Complex v = fresnel_pair(one_dim_weight(0.0, eps), TestFunction::one(1), PairingEngine::gauss_hermite(4)).value;
    EXPECT_NEAR(v.real(), std::sqrt(2.0 * kPi / eps), 1e-10);
    EXPECT_EQ(v.imag(), 0.0);
  }
}

TEST(Fresnel, OddTestFunctionVanishes) {
  const FeynmanWeight w = one_dim_weight(1.3, 0.5);
  const TestFunction odd = TestFunction::polynomial(1, {{1.0, {1}}, {-0.4, {3}}});
  EXPECT_FALSE(w.closed_form_applies(odd));
  EXPECT_LE(std::abs(fresnel_pair(w, odd, PairingEngine::gauss_hermite(40)).value), 1e-10);
}

// Frozen from numpy; the eps = 1 value also agrees with a 70^4 brute-force
// Gauss-Hermite sum to 1e-14.
TEST(Fresnel, LatticeHarmonicOracle) {
  const TestFunction phi = TestFunction::plane_wave(vec({0.3, -0.2, 0.1, 0.4}));
  const std::pair<double, Complex> cases[] = {{1.0, {13.960748813475114, 7.570816203494191}},
                                              {0.1, {41.84501108260811, 26.075567009202363}},
                                              {0.01, {61.17700765189849, 29.49722724878323}}};
  for (const auto& [eps, expected] : cases) {
    const FeynmanWeight w = lattice_harmonic(eps);
    ASSERT_TRUE(w.closed_form_applies(phi));
    EXPECT_LT(rel(fresnel_pair(w, phi, PairingEngine::gauss_hermite(4)).value, expected), 1e-12);
    EXPECT_LT(rel(fresnel_separable_quadrature(w, phi), expected), 1e-8);
  }
}

TEST(Fresnel, ClosedFormAgreesWithGenericQuadratureWhenDampingIsStrong) {
  const FeynmanWeight w = lattice_harmonic(4.0);
  const TestFunction phi = TestFunction::plane_wave(vec({0.3, -0.2, 0.1, 0.4}));
  const Complex closed = fresnel_closed_form(w, phi);
  const TestFunction wrapped = TestFunction::custom(
      4, [phi](const Vector& x) { return phi.value(x); }, [phi](const Vector& x) { return phi.gradient(x); },
      TestFamily::plane_wave);
  ASSERT_FALSE(w.closed_form_applies(wrapped));
  EXPECT_LT(rel(fresnel_pair(w, wrapped, PairingEngine::gauss_hermite(30)).value, closed), 1e-9);
}

TEST(Fresnel, PlaneWaveInitialDataShiftsTheLinearTerm) {
  const LatticePathSpace space(1, 1, 1.0);
  const DiscreteAction s = discretize_action(space, Hamiltonian::harmonic(1), vec({0.2}));
  const FeynmanWeight w = make_feynman_weight(s, InitialData::plane_wave(vec({0.7})), 0.8);
  ASSERT_TRUE(w.closed_form_applies(TestFunction::one(2)));
  EXPECT_LT(rel(fresnel_closed_form(w, TestFunction::one(2)), fresnel_separable_quadrature(w, TestFunction::one(2))),
            1e-9);
}

TEST(Fresnel, RefusesLargeDeterministicPairingsWithoutClosedForm) {
  const LatticePathSpace space(1, 7, 1.0);
  const FeynmanWeight w = make_feynman_weight(discretize_action(space, Hamiltonian::quartic(1, 1.0), vec({0.0})),
                                              InitialData::one(1), 1.0);
  EXPECT_THROW(fresnel_pair(w, TestFunction::one(14), PairingEngine::gauss_hermite(3)), DomainError);
  EXPECT_NO_THROW(fresnel_pair(w, TestFunction::one(14), PairingEngine::monte_carlo(200, 1)));
  EXPECT_THROW(fresnel_pair(w, TestFunction::one(3), PairingEngine::monte_carlo(200, 1)), DimensionError);
}

TEST(Fresnel, EpsilonHalvingConvergesMonotonically) {
  const TestFunction phi = TestFunction::plane_wave(vec({0.3, -0.2, 0.1, 0.4}));
  double prev_gap = INFINITY;
  Complex prev = fresnel_closed_form(lattice_harmonic(0.1), phi);
  for (double eps = 0.05; eps > 1e-4; eps /= 2.0) {
    const Complex cur = fresnel_closed_form(lattice_harmonic(eps), phi);
    const double gap = std::abs(cur - prev);
    EXPECT_LT(gap, prev_gap);
    prev_gap = gap;
    prev = cur;
  }
}

TEST(Anomaly, DeskModelOnTwoDimensions) {
  const LatticePathSpace space(1, 1, 1.0);
  const TransformationFamily fam = desk_generator_family(space);
  const PathAction xy = xy_desk_action(1);
  const VectorField k = generator_field(fam, vec({1.0}));
  proptest::for_all(20, 5, [&](Gen& g, int) {
    const Vector x = g.vector(2, -2.0, 2.0);
    EXPECT_NEAR((k.value(x) - vec({x[0] * x[0], -x[0] * x[1]})).norm(), 0.0, 1e-15);
    EXPECT_LE(std::abs(xy.gradient(x).dot(k.value(x))), 1e-12);
    EXPECT_NEAR(anomaly_term(space, fam, vec({1.0}), x), x[0], 1e-14);
    const Matrix fd = fd_jacobian([&](const Vector& y) { return k.value(y); }, x);
    EXPECT_NEAR(fd.trace(), x[0], 1e-8);
  });
  EXPECT_EQ(anomaly_term(space, fam, vec({1.0}), vec({1.0, 0.0})), 1.0);
}

TEST(Anomaly, ScalingTraceIsTheDimension) {
  const LatticePathSpace space(1, 4, 1.0);
  const TransformationFamily fam = lattice_scaling_family(space.dim());
  Gen g(2);
  EXPECT_EQ(anomaly_term(space, fam, vec({1.0}), g.vector(8)), 8.0);
}

TEST(Anomaly, TranslationHasNone) {
  Gen g(4);
  const TransformationFamily fam = lattice_translation_family(g.vector(6));
  EXPECT_EQ(anomaly_term(fam, vec({1.0}), g.vector(6)), 0.0);
}

TEST(Anomaly, FlatMeasureReductionIsBitExact) {
  const LatticePathSpace space(2, 2, 1.0);
  const TransformationFamily fam = desk_generator_family(space);
  const DensityMeasure flat = DensityMeasure::flat(space.dim());
  proptest::for_all(20, 9, [&](Gen& g, int) {
    const Vector x = g.vector(space.dim(), -2.0, 2.0);
    const Vector delta = g.vector(1);
    EXPECT_EQ(anomaly_term(space, fam, delta, x),
              log_derivative_along_field(flat, generator_field(fam, delta), x));
  });
}

TEST(Anomaly, DimensionMismatch) {
  const LatticePathSpace space(1, 2, 1.0);
  EXPECT_THROW(anomaly_term(space, lattice_scaling_family(6), vec({1.0}), Vector::Zero(6)), DimensionError);
  EXPECT_THROW(anomaly_term(space, lattice_scaling_family(4), vec({1.0}), Vector::Zero(5)), DimensionError);
  EXPECT_THROW(anomaly_term(translation_family(2, 1), vec({1.0, 0.0}), Vector::Zero(2)), DimensionError);
}

TEST(AnomalyReport, DeskFamilyIsAnomalousAndDoublesWithRefinement) {
  const LatticePathSpace space(1, 4, 1.0);
  Gen g(17);
  std::vector<Vector> probes;
  for (int i = 0; i < 10; ++i) probes.push_back(g.vector(space.dim(), -1.5, 1.5));
  const AnomalyReport r = anomaly_report(space, desk_generator_family, vec({1.0}), Hamiltonian::zero(1),
                                         vec({0.0}), InitialData::one(1), probes, PairingEngine::gauss_hermite(4));
  EXPECT_EQ(r.status, "anomaly");
  EXPECT_LE(r.max_certificate, 1e-12);
  ASSERT_EQ(r.refinement.size(), 3u);
  EXPECT_EQ(r.refinement[0].dim, 8);
  EXPECT_EQ(r.refinement[2].dim, 32);
  for (const RefinementEntry& e : r.refinement) EXPECT_EQ(e.anomaly, 0.5 * e.dim);
  ASSERT_EQ(r.refinement_ratios.size(), 2u);
  for (double ratio : r.refinement_ratios) EXPECT_NEAR(ratio, 2.0, 0.02);
}

TEST(AnomalyReport, ScalingWithGenericHamiltonianIsInapplicable) {
  const LatticePathSpace space(1, 2, 1.0);
  Gen g(23);
  std::vector<Vector> probes{g.vector(4), g.vector(4)};
  const FamilyBuilder scaling = [](const LatticePathSpace& s) { return lattice_scaling_family(s.dim()); };
  const AnomalyReport r = anomaly_report(space, scaling, vec({1.0}), Hamiltonian::quartic(1, 1.0), vec({0.3}),
                                         InitialData::one(1), probes, PairingEngine::gauss_hermite(4));
  EXPECT_EQ(r.status, "Corollary inapplicable");
  EXPECT_FALSE(r.corollary_applies);
}

TEST(AnomalyReport, ZeroTranslationIsAnomalyFree) {
  // The zero translation: certificate passes with a vanishing trace.
  const LatticePathSpace space(1, 1, 1.0);
  const FamilyBuilder none = [](const LatticePathSpace& s) { return lattice_translation_family(Vector::Zero(s.dim())); };
  const std::vector<Vector> probes{vec({0.4, -0.3})};
  const AnomalyReport r = anomaly_report(space, none, vec({1.0}), Hamiltonian::zero(1), vec({0.0}),
                                         InitialData::one(1), probes, PairingEngine::gauss_hermite(4));
  EXPECT_EQ(r.status, "anomaly-free");
  EXPECT_TRUE(r.refinement_ratios.empty());
}

TEST(AnomalyReport, FiniteDifferenceMatchesTheDecomposition) {
  const LatticePathSpace space(1, 1, 1.0);
  AnomalyOptions opt;
  opt.fd_check = true;
  opt.epsilon = 1.0;
  opt.fd_probes = {TestFunction::one(2), TestFunction::plane_wave(vec({0.4, -0.2})),
                   gaussian_poly(vec({0.2, 0.1}), 1.2, 0.5)};
  opt.refinement_factors = {1};
  const std::vector<Vector> probes{vec({0.5, -0.7}), vec({-1.1, 0.3})};
  const AnomalyReport r = anomaly_report(space, desk_generator_family, vec({1.0}), Hamiltonian::zero(1),
                                         vec({0.0}), InitialData::one(1), probes, PairingEngine::gauss_hermite(60), opt);
  ASSERT_EQ(r.corollary_checks.size(), 3u);
  EXPECT_TRUE(r.corollary_checks_passed);
  for (const CorollaryCheck& c : r.corollary_checks) {
    EXPECT_LE(c.rel_error, 1e-6);
    EXPECT_LE(std::abs(c.action_part), 1e-12);
  }
}

TEST(AnomalyReport, EmptyProbeSetIsAnError) {
  const LatticePathSpace space(1, 1, 1.0);
  EXPECT_THROW(anomaly_report(space, desk_generator_family, vec({1.0}), Hamiltonian::zero(1), vec({0.0}),
                              InitialData::one(1), {}, PairingEngine::gauss_hermite(4)),
               DomainError);
}
