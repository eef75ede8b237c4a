#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "noetherlab/builtins.hpp"
#include "noetherlab/error.hpp"
#include "noetherlab/finite_difference.hpp"
#include "noetherlab/noether.hpp"

using namespace noetherlab;

namespace {

Vector v1(double a) { return Vector::Constant(1, a); }

FieldConfiguration square_config() {
  return FieldConfiguration::create(
      1, 1, [](const Vector& x) -> Vector { return v1(x[0] * x[0]); },
      [](const Vector& x) -> Matrix { return Matrix::Constant(1, 1, 2.0 * x[0]); });
}

// (x, r + z x^2) without analytic jacobian or partials: exercises every FD fallback.
TransformationFamily quadratic_shift_fd_only() {
  return TransformationFamily::create(
      1, 1, 1,
      [](const Vector& z, const Vector& x, const Vector& r, const Matrix&) {
        return FamilyImage{x, r + z[0] * x.cwiseAbs2()};
      },
      [](const Vector& x, const Vector&, const Matrix&) {
        return FamilyGenerator{Matrix::Zero(1, 1), Matrix::Constant(1, 1, x[0] * x[0])};
      });
}

NoetherProblem s1_problem() {
  return {field_squared_lagrangian(1, 1), FieldConfiguration::identity(1), translation_family(1, 1),
          DensityMeasure::standard_gaussian(1)};
}

TestFunction phi_poly() { return gaussian_poly(v1(0.3), 1.0, 1.0); }

}  // namespace

TEST(VariationFields, IdentityFamilyVanishes) {
  const VariationFields vf(identity_family(2, 2), sine_configuration(2), v1(1.0));
  const Vector x = Vector::LinSpaced(2, 0.2, -0.7);
  EXPECT_TRUE(vf.h1(x).isZero(0.0));
  EXPECT_TRUE(vf.h2(x).isZero(0.0));
  EXPECT_TRUE(vf.h3(x).isZero(0.0));
}

TEST(VariationFields, TranslationOfE) {
  const VariationFields vf(translation_family(1, 1), FieldConfiguration::identity(1), v1(1.0));
  for (double x : {-1.0, 0.0, 2.5}) {
    EXPECT_EQ(vf.h1(v1(x))[0], 1.0);
    EXPECT_EQ(vf.h2(v1(x))[0], 0.0);
    EXPECT_EQ(vf.h3(v1(x))(0, 0), 0.0);
  }
}

TEST(VariationFields, QuadraticShiftAnalyticAndFdAgree) {
  const VariationFields analytic(g_shift_family(1, 1, 2), FieldConfiguration::identity(1), v1(1.0));
  const VariationFields fd(quadratic_shift_fd_only(), FieldConfiguration::identity(1), v1(1.0));
  for (double x : {-1.3, 0.4, 2.0}) {
    EXPECT_EQ(analytic.h1(v1(x))[0], 0.0);
    EXPECT_DOUBLE_EQ(analytic.h2(v1(x))[0], x * x);
    EXPECT_DOUBLE_EQ(analytic.h3(v1(x))(0, 0), 2.0 * x);
    EXPECT_NEAR(fd.h3(v1(x))(0, 0), 2.0 * x, 1e-8);
    EXPECT_NEAR(fd.h1_jacobian(v1(x))(0, 0), 0.0, 1e-10);
  }
}

TEST(VariationFields, LinearInDelta) {
  proptest::for_all(6, 31, [](proptest::Gen& g, int) {
    const TransformationFamily fam = translation_family(2, 2);
    const FieldConfiguration field = sine_configuration(2);
    const Vector d1 = g.vector(2);
    const Vector d2 = g.vector(2);
    const Vector x = g.vector(2);
    const VariationFields a(fam, field, d1), b(fam, field, d2), c(fam, field, d1 + d2);
    EXPECT_LT((c.h1(x) - a.h1(x) - b.h1(x)).norm(), 1e-15);
    EXPECT_LT((c.h2(x) - a.h2(x) - b.h2(x)).norm(), 1e-15);
    EXPECT_LT((c.h3(x) - a.h3(x) - b.h3(x)).norm(), 1e-15);
    const NoetherProblem pb{kinetic_potential_lagrangian(2, 2), field, fam,
                            DensityMeasure::standard_gaussian(2)};
    for (auto variant : {Theorem1Variant::paper_literal, Theorem1Variant::transport_corrected}) {
      const Complex sum = theorem1_evaluate(pb, d1, x, variant).total +
                          theorem1_evaluate(pb, d2, x, variant).total;
      EXPECT_LT(std::abs(theorem1_evaluate(pb, d1 + d2, x, variant).total - sum), 1e-14);
    }
  });
}

TEST(VariationFields, DimensionMismatchThrows) {
  EXPECT_THROW(VariationFields(translation_family(2, 1), FieldConfiguration::identity(2), Vector::Ones(2)),
               DimensionError);
  EXPECT_THROW(VariationFields(translation_family(1, 1), FieldConfiguration::identity(1), Vector::Ones(2)),
               DimensionError);
}

TEST(TransformedField, ZeroParameterReturnsField) {
  const FieldConfiguration g = transformed_field(translation_family(1, 1), square_config(), v1(0.0));
  EXPECT_EQ(g.value(v1(0.7))[0], 0.7 * 0.7);
}

TEST(TransformedField, ShiftOfSquare) {
  const FieldConfiguration g = transformed_field(translation_family(1, 1), square_config(), v1(0.1));
  for (double y = -2.0; y <= 2.0; y += 0.25) {
    EXPECT_NEAR(g.value(v1(y))[0], (y - 0.1) * (y - 0.1), 1e-12);
    EXPECT_NEAR(g.derivative(v1(y))(0, 0), 2.0 * (y - 0.1), 1e-12);
  }
}

TEST(TransformedField, GShiftAddsConstant) {
  const FieldConfiguration base = sine_configuration(1);
  const FieldConfiguration g = transformed_field(g_shift_family(1, 1, 0), base, v1(0.3));
  for (double y : {-1.0, 0.2, 1.7}) {
    EXPECT_NEAR(g.value(v1(y))[0], std::sin(y) + 0.3, 1e-15);
    EXPECT_NEAR(g.derivative(v1(y))(0, 0), std::cos(y), 1e-15);
  }
}

TEST(TransformedField, NonlinearInverseThroughNewton) {
  // x -> (1 + z) x with g = sin: g_z(y) = sin(y / (1 + z)).
  const FieldConfiguration g = transformed_field(scaling_family(1, 1), sine_configuration(1), v1(0.25));
  for (double y : {-1.0, 0.3, 2.2}) {
    EXPECT_NEAR(g.value(v1(y))[0], std::sin(y / 1.25), 1e-12);
    EXPECT_NEAR(g.derivative(v1(y))(0, 0), std::cos(y / 1.25) / 1.25, 1e-12);
  }
}

TEST(TransformedField, OrientationReversalIsAGraphConditionError) {
  const FieldConfiguration g = transformed_field(scaling_family(1, 1), sine_configuration(1), v1(-1.5));
  EXPECT_THROW(g.value(v1(1.0)), GraphConditionError);
}

TEST(FamilyMeasure, UnitLagrangianAtZeroPairsAsNu) {
  const NoetherProblem pb{unit_lagrangian(1, 1), sine_configuration(1), scaling_family(1, 1),
                          DensityMeasure::standard_gaussian(1)};
  const PairingEngine e = PairingEngine::gauss_hermite(30);
  const TestFunction phi = phi_poly();
  for (FamilyFrame frame : {FamilyFrame::pushforward, FamilyFrame::pullback}) {
    EXPECT_LT(std::abs(family_measure(pb, v1(0.0), frame).pair(phi, e).value - pair(pb.measure, phi, e).value),
              1e-15);
  }
}

TEST(FamilyMeasure, TranslationShiftsTheMean) {
  const NoetherProblem pb{unit_lagrangian(1, 1), FieldConfiguration::identity(1), translation_family(1, 1),
                          DensityMeasure::standard_gaussian(1)};
  const TestFunction x = TestFunction::polynomial(1, {{1.0, {1}}});
  EXPECT_NEAR(family_measure(pb, v1(0.2)).pair(x, PairingEngine::gauss_hermite(10)).value.real(), 0.2, 1e-14);
}

TEST(FamilyMeasure, IdentityFamilyIsConstantInZ) {
  const NoetherProblem pb{weighted_lagrangian(2, 2), quadratic_configuration(), identity_family(2, 2),
                          DensityMeasure::standard_gaussian(2)};
  const PairingEngine e = PairingEngine::gauss_hermite(12);
  const TestFunction phi = TestFunction::plane_wave(Vector::LinSpaced(2, 0.3, -0.4));
  const Complex at0 = family_measure(pb, v1(0.0)).pair(phi, e).value;
  for (FamilyFrame frame : {FamilyFrame::pushforward, FamilyFrame::pullback}) {
    EXPECT_EQ(family_measure(pb, v1(0.7), frame).pair(phi, e).value, at0);
  }
}

TEST(Theorem1, TranslationTermsAtOne) {
  const Theorem1Terms t = theorem1_evaluate(s1_problem(), v1(1.0), v1(1.0), Theorem1Variant::transport_corrected);
  const double expected[] = {0, 0, 0, 0, -1};
  for (int i = 0; i < 5; ++i) EXPECT_EQ(t.terms[i], Complex(expected[i]));
  EXPECT_EQ(t.total, Complex(-1.0));
}

TEST(Theorem1, PaperLiteralOnLinearGShift) {
  const NoetherProblem pb{unit_lagrangian(1, 1), FieldConfiguration::identity(1), g_shift_family(1, 1, 1),
                          DensityMeasure::standard_gaussian(1)};
  const Theorem1Terms t = theorem1_evaluate(pb, v1(1.0), v1(0.5), Theorem1Variant::paper_literal);
  const double expected[] = {0, 0, 0, 1, -0.25};
  for (int i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(t.terms[i].real(), expected[i]);
  EXPECT_DOUBLE_EQ(t.total.real(), 0.75);
}

TEST(Theorem1, IdentityFamilyAnnihilatesEverything) {
  const NoetherProblem pb{weighted_lagrangian(2, 2), quadratic_configuration(), identity_family(2, 2),
                          DensityMeasure::gaussian(Vector::Constant(2, 0.1), Matrix::Identity(2, 2))};
  const PairingEngine e = PairingEngine::gauss_hermite(12);
  for (auto variant : {Theorem1Variant::paper_literal, Theorem1Variant::transport_corrected}) {
    const Theorem1Terms t = theorem1_evaluate(pb, v1(1.0), Vector::LinSpaced(2, 0.4, -0.9), variant);
    for (const Complex& term : t.terms) EXPECT_LE(std::abs(term), 1e-10);
  }
  EXPECT_LE(std::abs(family_weak_derivative_fd(pb, v1(1.0), gaussian_poly(Vector::LinSpaced(2, 0.3, -0.2), 1.0), e, 1e-4)), 1e-10);
}

TEST(Theorem1, PaperLiteralRefusesUnequalDimensions) {
  const NoetherProblem pb{unit_lagrangian(2, 1), FieldConfiguration::zero(2, 1), translation_family(2, 1),
                          DensityMeasure::standard_gaussian(2)};
  EXPECT_THROW(theorem1_evaluate(pb, Vector::Ones(2), Vector::Zero(2), Theorem1Variant::paper_literal),
               DimensionError);
  EXPECT_NO_THROW(theorem1_evaluate(pb, Vector::Ones(2), Vector::Zero(2), Theorem1Variant::transport_corrected));
}

TEST(Theorem1, UnnormalizedDensityChangesNoTerm) {
  const NoetherProblem pb{weighted_lagrangian(2, 2), quadratic_configuration(), rotation_family(2, true),
                          DensityMeasure::gaussian(Vector::Zero(2), Matrix::Identity(2, 2) * 0.7)};
  NoetherProblem scaled = pb;
  scaled.measure = pb.measure.scaled(13.0);
  const Vector x = Vector::LinSpaced(2, -0.3, 0.8);
  for (auto variant : {Theorem1Variant::paper_literal, Theorem1Variant::transport_corrected}) {
    const Theorem1Terms a = theorem1_evaluate(pb, v1(1.0), x, variant);
    const Theorem1Terms b = theorem1_evaluate(scaled, v1(1.0), x, variant);
    for (int i = 0; i < 5; ++i) EXPECT_EQ(a.terms[i], b.terms[i]);
  }
}

// Frozen from scipy (tests/oracle/oracles.py): central differences with step 1e-4.
TEST(FamilyOracle, TranslationScenarioInBothFrames) {
  const NoetherProblem pb = s1_problem();
  const PairingEngine e = PairingEngine::gauss_hermite(40);
  const TestFunction phi = phi_poly();
  EXPECT_NEAR(family_weak_derivative_fd(pb, v1(1.0), phi, e, 1e-4, FamilyFrame::pushforward).real(),
              -0.2064573963977967, 1e-9);
  EXPECT_NEAR(family_weak_derivative_fd(pb, v1(1.0), phi, e, 1e-4, FamilyFrame::pullback).real(),
              -0.7234413445661447, 1e-9);
  EXPECT_NEAR(theorem1_pairing(pb, v1(1.0), phi, e, Theorem1Variant::transport_corrected).real(),
              -0.7234413450586734, 1e-12);
  EXPECT_EQ(theorem1_pairing(pb, v1(1.0), phi, e, Theorem1Variant::paper_literal), Complex(0.0));
}

TEST(FamilyOracle, BumpProbeMatchesCorrectedVariant) {
  const NoetherProblem pb = s1_problem();
  const PairingEngine e = PairingEngine::gauss_hermite(40);
  const TestFunction bump = TestFunction::compact_bump(v1(0.2), 1.5);
  const Complex fd = family_weak_derivative_fd(pb, v1(1.0), bump, e, 1e-4);
  EXPECT_LT(std::abs(fd - theorem1_pairing(pb, v1(1.0), bump, e, Theorem1Variant::transport_corrected)), 1e-5);
}

TEST(FamilyOracle, GShiftOfLinearLagrangian) {
  const NoetherProblem pb{linear_lagrangian(1, 1), FieldConfiguration::zero(1, 1), g_shift_family(1, 1, 0),
                          DensityMeasure::standard_gaussian(1)};
  const PairingEngine e = PairingEngine::gauss_hermite(10);
  for (FamilyFrame frame : {FamilyFrame::pushforward, FamilyFrame::pullback}) {
    EXPECT_NEAR(family_weak_derivative_fd(pb, v1(1.0), TestFunction::one(1), e, 1e-4, frame).real(), 1.0, 1e-12);
  }
}

TEST(FamilyOracle, SecondOrderInStep) {
  const NoetherProblem pb{weighted_lagrangian(1, 1), sine_configuration(1), scaling_family(1, 1),
                          DensityMeasure::standard_gaussian(1)};
  const PairingEngine e = PairingEngine::gauss_hermite(30);
  const TestFunction phi = phi_poly();
  const Complex exact = theorem1_pairing(pb, v1(1.0), phi, e, Theorem1Variant::transport_corrected);
  const double e1 = std::abs(family_weak_derivative_fd(pb, v1(1.0), phi, e, 0.02) - exact);
  const double e2 = std::abs(family_weak_derivative_fd(pb, v1(1.0), phi, e, 0.01) - exact);
  EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.1);
}

TEST(Adjudication, TranslationScenarioIsDecisive) {
  const NoetherProblem pb = s1_problem();
  const std::vector<TestFunction> probes{phi_poly(), TestFunction::plane_wave(v1(0.7))};
  const std::vector<Vector> points{v1(-1.0), v1(0.5), v1(1.0)};
  const VariantAdjudication adj = adjudicate_variants(pb, v1(1.0), probes, points,
                                                      PairingEngine::gauss_hermite(40), 1e-4, 1e-5,
                                                      FamilyFrame::pullback);
  EXPECT_TRUE(adj.differ_analytically);
  EXPECT_EQ(adj.winner, "transport_corrected");
  EXPECT_TRUE(adj.decisive);
  EXPECT_GE(adj.paper_literal.max_rel_error, 1e-4);
}

TEST(NoetherResidual, RotationInvariantScenarioVanishes) {
  const NoetherProblem pb{radial_gaussian_lagrangian(2, 1, 1.0), FieldConfiguration::zero(2, 1),
                          rotation_family(1, false), DensityMeasure::standard_gaussian(2)};
  NoetherOptions opt;
  opt.certificate_probes = {gaussian_poly(Vector::LinSpaced(2, 0.3, -0.2), 1.0),
                            TestFunction::plane_wave(Vector::LinSpaced(2, 0.5, 0.9))};
  opt.engine = PairingEngine::gauss_hermite(20);
  proptest::Gen g(41);
  std::vector<Vector> points;
  for (int i = 0; i < 20; ++i) points.push_back(g.vector(2, -2.0, 2.0));
  const NoetherResidual r = noether_residual(pb, v1(1.0), points, Theorem1Variant::transport_corrected, opt);
  EXPECT_TRUE(r.certificate.invariant) << r.certificate.max_abs_derivative;
  EXPECT_EQ(r.status, NoetherStatus::vanishing);
  EXPECT_LE(r.max_abs, 1e-12);
}

TEST(NoetherResidual, BrokenTranslationIsFlagged) {
  const NoetherProblem pb{unit_lagrangian(2, 1), FieldConfiguration::zero(2, 1), translation_family(2, 1),
                          DensityMeasure::standard_gaussian(2)};
  NoetherOptions opt;
  opt.certificate_probes = {gaussian_poly(Vector::LinSpaced(2, 0.3, -0.2), 1.0)};
  opt.engine = PairingEngine::gauss_hermite(16);
  Vector delta(2);
  delta << 1.0, -0.5;
  const std::vector<Vector> points{Vector::LinSpaced(2, 0.4, 1.1), Vector::LinSpaced(2, -0.9, 0.2)};
  const NoetherResidual r = noether_residual(pb, delta, points, Theorem1Variant::transport_corrected, opt);
  EXPECT_EQ(r.status, NoetherStatus::not_invariant);
  EXPECT_EQ(to_string(r.status), "not invariant");
  for (std::size_t i = 0; i < points.size(); ++i) {
    EXPECT_NEAR(r.residuals[i].real(), -points[i].dot(delta), 1e-14);
  }
}

TEST(Validation, WrongLagrangianPartialIsRejected) {
  EXPECT_THROW(LagrangianDensity::create(
                   1, 1, [](const Vector&, const Vector& r, const Matrix&) { return Complex(r[0] * r[0]); },
                   [](const Vector&, const Vector&, const Matrix&) -> CVector { return CVector::Zero(1); },
                   [](const Vector&, const Vector& r, const Matrix&) -> CVector { return (3.0 * r).cast<Complex>(); },
                   [](const Vector&, const Vector&, const Matrix&) -> CMatrix { return CMatrix::Zero(1, 1); }),
               DomainError);
}

TEST(Validation, ShippedLagrangiansPassTheCheck) {
  for (const char* name : {"field-squared", "unit-lagrangian", "linear-lagrangian", "kinetic-potential",
                           "weighted-lagrangian", "radial-gaussian"}) {
    const LagrangianDensity l = make_lagrangian(name, Params({{"n", {2}}, {"m", {2}}}));
    EXPECT_NO_THROW(LagrangianDensity::create(
        2, 2, [l](auto&&... a) { return l.value(a...); }, [l](auto&&... a) { return l.d_x(a...); },
        [l](auto&&... a) { return l.d_r(a...); }, [l](auto&&... a) { return l.d_alpha(a...); }))
        << name;
  }
}

TEST(Validation, CheckFamilyFlagsWrongGenerator) {
  const auto bad = TransformationFamily::create(
      1, 1, 1,
      [](const Vector& z, const Vector& x, const Vector& r, const Matrix&) {
        return FamilyImage{x + 2.0 * z, r};
      },
      [](const Vector&, const Vector&, const Matrix&) {
        return FamilyGenerator{Matrix::Ones(1, 1), Matrix::Zero(1, 1)};
      },
      {}, {}, Validation::skip);
  const auto probes = default_probes(1);
  EXPECT_FALSE(check_family(bad, probes).passed());
  for (const TransformationFamily& f :
       {translation_family(2, 2), rotation_family(2, true), scaling_family(2, 1), shear_family(1),
        identity_family(2, 2), g_shift_family(2, 2, 2)}) {
    const auto p = default_probes(f.n());
    const FamilyCheck chk = check_family(f, p);
    EXPECT_TRUE(chk.passed()) << chk.generator_error << " " << chk.jacobian_error << " " << chk.partials_error;
  }
}

TEST(Validation, NonIdentityAtZeroIsRejected) {
  EXPECT_THROW(TransformationFamily::create(
                   1, 1, 1,
                   [](const Vector& z, const Vector& x, const Vector& r, const Matrix&) {
                     return FamilyImage{x + z + Vector::Constant(1, 1e-6), r};
                   },
                   [](const Vector&, const Vector&, const Matrix&) {
                     return FamilyGenerator{Matrix::Ones(1, 1), Matrix::Zero(1, 1)};
                   }),
               DomainError);
}
