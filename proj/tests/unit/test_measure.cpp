#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "noetherlab/builtins.hpp"
#include "noetherlab/error.hpp"
#include "noetherlab/finite_difference.hpp"
#include "noetherlab/measure.hpp"

using namespace noetherlab;

namespace {

// Characteristic function of N(mean, cov).
Complex characteristic(const Vector& mean, const Matrix& cov, const Vector& w) {
  return std::exp(Complex(-0.5 * w.dot(cov * w), w.dot(mean)));
}

}  // namespace

TEST(GaussianPairing, PlaneWaveMatchesCharacteristicFunction) {
  proptest::for_all(12, 1, [](proptest::Gen& g, int) {
    const int n = g.integer(1, 3);
    const Vector mean = g.vector(n, -0.5, 0.5);
    const Matrix cov = g.spd(n);
    const Vector w = g.vector(n);
    const DensityMeasure nu = DensityMeasure::gaussian(mean, cov);
    const Complex v = pair(nu, TestFunction::plane_wave(w), PairingEngine::gauss_hermite(24)).value;
    EXPECT_LT(std::abs(v - characteristic(mean, cov, w)), 1e-12);
  });
}

TEST(GaussianPairing, TotalMassIsOne) {
  proptest::for_all(6, 2, [](proptest::Gen& g, int) {
    const int n = g.integer(1, 3);
    const DensityMeasure nu = g.gaussian(n);
    EXPECT_NEAR(pair(nu, TestFunction::one(n), PairingEngine::gauss_hermite(4)).value.real(), 1.0,
                1e-14);
  });
}

TEST(GaussianPairing, IsLinearInTheTestFunction) {
  proptest::for_all(8, 3, [](proptest::Gen& g, int) {
    const int n = g.integer(1, 2);
    const DensityMeasure nu = g.gaussian(n);
    const TestFunction a = g.test_function(n);
    const TestFunction b = g.test_function(n);
    const double s = g.uniform(-2.0, 2.0);
    const TestFunction sum = TestFunction::custom(
        n, [&](const Vector& x) { return a.value(x) + s * b.value(x); },
        [&](const Vector& x) -> CVector { return a.gradient(x) + s * b.gradient(x); },
        TestFamily::polynomial_times_gaussian, Validation::skip);
    const PairingEngine e = PairingEngine::gauss_hermite(20);
    const Complex lhs = pair(nu, sum, e).value;
    const Complex rhs = pair(nu, a, e).value + s * pair(nu, b, e).value;
    EXPECT_LT(std::abs(lhs - rhs), 1e-13);
  });
}

TEST(GaussianPairing, OddFunctionsVanishUnderCenteredMeasure) {
  const DensityMeasure nu = DensityMeasure::gaussian(Vector::Zero(2), Matrix::Identity(2, 2) * 1.7);
  const TestFunction odd = TestFunction::polynomial(2, {{1.0, {1, 0}}, {-0.5, {2, 1}}, {0.25, {0, 3}}});
  EXPECT_LT(std::abs(pair(nu, odd, PairingEngine::gauss_hermite(21)).value), 1e-14);
}

// scipy.integrate.quad of e^{0.7ix} exp(-x^2/2 - x^4/4), tests/oracle/oracles.py.
// The quartic tail converges slowly under Gauss-Hermite: order 80 is only
// good to ~1e-8, order 160 to ~1e-13.
TEST(CustomDensity, QuarticPairingMatchesOracle) {
  const DensityMeasure nu = quartic_density(1);
  const Complex v =
      pair(nu, TestFunction::plane_wave(Vector::Constant(1, 0.7)), PairingEngine::gauss_hermite(160))
          .value;
  EXPECT_NEAR(v.real(), 1.7234208730197278, 1e-12);
  EXPECT_NEAR(v.imag(), 0.0, 1e-14);
}

TEST(CustomDensity, WrongGradientIsRejected) {
  EXPECT_THROW(DensityMeasure::custom(
                   1, [](const Vector& x) { return -x.squaredNorm(); },
                   [](const Vector& x) -> Vector { return x; }, MeasureKind::unnormalized),
               DomainError);
}

TEST(FlatMeasure, PairsOnATensorGrid) {
  const DensityMeasure flat = DensityMeasure::flat(2);
  const TestFunction phi = gaussian_poly(Vector::Zero(2), 0.5, 0.0);
  const Box box{Vector::Constant(2, -5.0), Vector::Constant(2, 5.0)};
  const Complex v = pair(flat, phi, PairingEngine::tensor_grid(box, 12, 8)).value;
  EXPECT_NEAR(v.real(), 2.0 * kPi * 0.25, 1e-12);
}

TEST(FlatMeasure, RefusesGaussHermiteAndMonteCarlo) {
  const DensityMeasure flat = DensityMeasure::flat(1);
  const TestFunction one = TestFunction::one(1);
  try {
    pair(flat, one, PairingEngine::gauss_hermite(10));
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("flat measure paired without a bounding box"),
              std::string::npos);
  }
  EXPECT_THROW(pair(flat, one, PairingEngine::monte_carlo(100, 1)), DomainError);
}

TEST(FlatMeasure, LogDerivativeIsExactlyZero) {
  const DensityMeasure flat = DensityMeasure::flat(3);
  Vector h(3);
  h << 1e300, -2.0, 3.0;
  EXPECT_EQ(log_derivative_along_vector(flat, h, Vector::Ones(3)), 0.0);
}

TEST(ScaledMeasure, LogDerivativesAreNormalizationIndependent) {
  proptest::for_all(8, 4, [](proptest::Gen& g, int) {
    const int n = g.integer(1, 3);
    const DensityMeasure nu = g.gaussian(n);
    const DensityMeasure scaled = nu.scaled(g.uniform(0.1, 10.0));
    EXPECT_EQ(scaled.kind(), MeasureKind::unnormalized);
    EXPECT_FALSE(scaled.has_sampler());
    const Vector x = g.vector(n);
    const Vector h = g.vector(n);
    EXPECT_EQ(log_derivative_along_vector(nu, h, x), log_derivative_along_vector(scaled, h, x));
  });
}

TEST(ScaledMeasure, PairingScalesByTheFactor) {
  const DensityMeasure nu = DensityMeasure::standard_gaussian(1);
  const TestFunction phi = TestFunction::plane_wave(Vector::Constant(1, 0.4));
  const PairingEngine e = PairingEngine::gauss_hermite(20);
  EXPECT_LT(std::abs(pair(nu.scaled(3.0), phi, e).value - 3.0 * pair(nu, phi, e).value), 1e-14);
  EXPECT_THROW(pair(nu.scaled(3.0), phi, PairingEngine::monte_carlo(100, 1)), DomainError);
}

TEST(LogDerivative, NonFiniteLogDensityRaisesNumericFault) {
  const DensityMeasure nu = DensityMeasure::custom(
      1, [](const Vector& x) { return x[0] > 5.0 ? -INFINITY : -0.5 * x[0] * x[0]; },
      [](const Vector& x) -> Vector { return -x; }, MeasureKind::unnormalized);
  try {
    log_derivative_along_vector(nu, Vector::Ones(1), Vector::Constant(1, 6.0));
    FAIL() << "expected NumericFault";
  } catch (const NumericFault& e) {
    EXPECT_EQ(e.probe()[0], 6.0);
  }
}

TEST(LogDerivative, GaussianScoreMatchesClosedForm) {
  proptest::for_all(8, 5, [](proptest::Gen& g, int) {
    const int n = g.integer(1, 3);
    const Vector mean = g.vector(n);
    const Matrix cov = g.spd(n);
    const DensityMeasure nu = DensityMeasure::gaussian(mean, cov);
    const Vector x = g.vector(n);
    const Vector h = g.vector(n);
    const double exact = -(cov.inverse() * (x - mean)).dot(h);
    EXPECT_NEAR(log_derivative_along_vector(nu, h, x), exact, 1e-12);
    const Matrix a = g.matrix(n, n);
    EXPECT_NEAR(log_derivative_along_field(nu, VectorField::linear(a), x),
                -(cov.inverse() * (x - mean)).dot(a * x) + a.trace(), 1e-12);
  });
}

TEST(LogDerivative, DimensionMismatchThrows) {
  const DensityMeasure nu = DensityMeasure::standard_gaussian(2);
  EXPECT_THROW(log_derivative_along_vector(nu, Vector::Ones(3), Vector::Ones(2)), DimensionError);
  EXPECT_THROW(pair(nu, TestFunction::one(3), PairingEngine::gauss_hermite(4)), DimensionError);
}

TEST(TestFunctions, GradientsAgreeWithFiniteDifferences) {
  proptest::for_all(12, 6, [](proptest::Gen& g, int) {
    const int n = g.integer(1, 3);
    const TestFunction phi = g.test_function(n);
    const auto probes = default_probes(n);
    EXPECT_TRUE(check_gradient([&](const Vector& x) { return phi.value(x); },
                               [&](const Vector& x) { return phi.gradient(x); }, probes)
                    .passed());
  });
}

TEST(TestFunctions, BumpVanishesOutsideItsSupport) {
  const TestFunction bump = TestFunction::compact_bump(Vector::Zero(2), 1.0);
  EXPECT_EQ(bump.value(Vector::Constant(2, 0.8)), Complex(0.0));
  EXPECT_NEAR(bump.value(Vector::Zero(2)).real(), 1.0, 1e-15);
  EXPECT_EQ(*bump.support_radius(), 1.0);
}

TEST(TestFunctions, ConstantOneHasZeroFrequency) {
  const TestFunction one = TestFunction::one(3);
  ASSERT_TRUE(one.frequency().has_value());
  EXPECT_TRUE(one.frequency()->isZero(0.0));
}

TEST(VectorFields, WrongJacobianIsRejected) {
  EXPECT_THROW(VectorField::custom(
                   1, [](const Vector& x) -> Vector { return x.array().sin().matrix(); },
                   [](const Vector&) -> Matrix { return Matrix::Identity(1, 1); }),
               DomainError);
}

TEST(MonteCarlo, IsBitReproducible) {
  const DensityMeasure nu = DensityMeasure::gaussian(Vector::Constant(2, 0.2), Matrix::Identity(2, 2));
  const TestFunction phi = TestFunction::plane_wave(Vector::Constant(2, 0.5));
  for (int workers : {1, 3}) {
    const PairResult a = pair(nu, phi, PairingEngine::monte_carlo(20000, 99, workers));
    const PairResult b = pair(nu, phi, PairingEngine::monte_carlo(20000, 99, workers));
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.std_error, b.std_error);
    EXPECT_EQ(a.evaluations, 20000u);
  }
  const PairResult c = pair(nu, phi, PairingEngine::monte_carlo(20000, 100, 1));
  const PairResult a = pair(nu, phi, PairingEngine::monte_carlo(20000, 99, 1));
  EXPECT_NE(a.value, c.value);
}

TEST(MonteCarlo, AgreesWithQuadratureWithinStandardErrors) {
  const Vector mean = Vector::Constant(1, 0.3);
  const Matrix cov = Matrix::Constant(1, 1, 1.5);
  const DensityMeasure nu = DensityMeasure::gaussian(mean, cov);
  const TestFunction phi = TestFunction::plane_wave(Vector::Constant(1, 0.7));
  const PairResult mc = pair(nu, phi, PairingEngine::monte_carlo(100000, 7, 2));
  EXPECT_GT(mc.std_error, 0.0);
  EXPECT_LT(std::abs(mc.value - characteristic(mean, cov, Vector::Constant(1, 0.7))),
            4.0 * mc.std_error);
}

TEST(MonteCarlo, NonFiniteIntegrandRaisesNumericFault) {
  const DensityMeasure nu = DensityMeasure::standard_gaussian(1);
  EXPECT_THROW(integrate(nu, [](const Vector& x) { return Complex(x[0] > 0 ? NAN : 0.0); },
                         PairingEngine::monte_carlo(100, 1)),
               NumericFault);
}

TEST(QuadraturePoints, GaussHermiteCountIsOrderToTheN) {
  const DensityMeasure nu = DensityMeasure::standard_gaussian(2);
  EXPECT_EQ(quadrature_points(nu, PairingEngine::gauss_hermite(5)).size(), 25u);
}
