#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "generators.hpp"
#include "noetherlab/builtins.hpp"
#include "noetherlab/error.hpp"
#include "noetherlab/finite_difference.hpp"

using namespace noetherlab;

namespace {

std::vector<std::string> names_of(BuiltinKind kind) {
  std::vector<std::string> out;
  for (const BuiltinInfo& b : builtin_catalog()) {
    if (b.kind == kind) out.push_back(b.name);
  }
  return out;
}

}  // namespace

TEST(Catalog, ContainsTheDocumentedNames) {
  for (const char* name : {"gaussian", "flat-box", "rotation-family", "translation-family", "scaling-family",
                           "xy-desk-action"}) {
    EXPECT_NE(find_builtin(name), nullptr) << name;
  }
  EXPECT_EQ(find_builtin("no-such-thing"), nullptr);
}

TEST(Catalog, NamesAreUniqueAndKindsRoundTrip) {
  std::set<std::string> seen;
  for (const BuiltinInfo& b : builtin_catalog()) {
    EXPECT_TRUE(seen.insert(b.name).second) << b.name;
    EXPECT_EQ(parse_builtin_kind(to_string(b.kind)), b.kind);
    for (const ParamSpec& p : b.params) {
      EXPECT_TRUE(p.type == "int" || p.type == "real" || p.type == "vector" || p.type == "matrix") << b.name;
    }
  }
  EXPECT_FALSE(parse_builtin_kind("widget").has_value());
  EXPECT_EQ(to_string(BuiltinKind::test_function), "test-function");
}

TEST(Params, ScalarsBroadcastAndMatricesAreRowMajor) {
  Params p;
  p.set("a", 2.5);
  p.set("m", std::vector<double>{1, 2, 3, 4});
  EXPECT_EQ(p.number("a", 0.0), 2.5);
  EXPECT_EQ(p.number("missing", 7.0), 7.0);
  EXPECT_EQ(p.vector("a", 3, 0.0), Vector::Constant(3, 2.5));
  const Matrix m = p.matrix("m", 2, 2, Matrix::Zero(2, 2));
  EXPECT_EQ(m(0, 1), 2.0);
  EXPECT_EQ(m(1, 0), 3.0);
  EXPECT_THROW(p.vector("m", 3, 0.0), DimensionError);
  p.set("k", 1.5);
  EXPECT_THROW(p.integer("k", 0), DomainError);
}

TEST(Dispatch, UnknownNamesRaise) {
  EXPECT_THROW(make_measure("triangle", {}), DomainError);
  EXPECT_THROW(make_family("gaussian", {}), DomainError);
  EXPECT_THROW(make_lagrangian("rotation-family", {}), DomainError);
}

TEST(Dispatch, EveryCatalogEntryBuildsWithDefaults) {
  const Params none;
  Params two;
  two.set("dim", 2);
  two.set("n", 2);
  two.set("m", 2);
  for (const BuiltinInfo& b : builtin_catalog()) {
    for (const Params* p : {&none, static_cast<const Params*>(&two)}) {
      switch (b.kind) {
        case BuiltinKind::measure: EXPECT_NO_THROW(make_measure(b.name, *p)) << b.name; break;
        case BuiltinKind::field:
          if (b.name != "rotation-field") EXPECT_NO_THROW(make_field(b.name, *p)) << b.name;
          break;
        case BuiltinKind::lagrangian: EXPECT_NO_THROW(make_lagrangian(b.name, *p)) << b.name; break;
        case BuiltinKind::hamiltonian: EXPECT_NO_THROW(make_hamiltonian(b.name, *p)) << b.name; break;
        case BuiltinKind::action: EXPECT_NO_THROW(make_action(b.name, *p)) << b.name; break;
        case BuiltinKind::test_function: EXPECT_NO_THROW(make_test_function(b.name, *p)) << b.name; break;
        default: break;
      }
    }
  }
}

TEST(AnalyticDerivatives, FamiliesAgreeWithFiniteDifferences) {
  Params p;
  p.set("n", 2);
  p.set("m", 2);
  p.set("d", 1);
  p.set("steps", 2);
  p.set("power", 2);
  for (const std::string& name : names_of(BuiltinKind::family)) {
    Params q = p;
    if (name == "rotation-family") q.set("rotate_field", 1);
    const TransformationFamily f = make_family(name, q);
    const auto probes = default_probes(f.n());
    const FamilyCheck c = check_family(f, probes);
    EXPECT_TRUE(c.passed()) << name << ": " << c.identity_error << " " << c.generator_error << " "
                            << c.jacobian_error << " " << c.partials_error;
  }
}

TEST(AnalyticDerivatives, LagrangiansAgreeWithFiniteDifferences) {
  for (const std::string& name : names_of(BuiltinKind::lagrangian)) {
    const LagrangianDensity l = make_lagrangian(name, Params({{"n", {2}}, {"m", {3}}}));
    EXPECT_NO_THROW(LagrangianDensity::create(
        2, 3, [l](auto&&... a) { return l.value(a...); }, [l](auto&&... a) { return l.d_x(a...); },
        [l](auto&&... a) { return l.d_r(a...); }, [l](auto&&... a) { return l.d_alpha(a...); }))
        << name;
  }
}

TEST(AnalyticDerivatives, FieldsConfigurationsAndTestFunctions) {
  const auto probes = default_probes(2);
  for (const std::string& name : names_of(BuiltinKind::field)) {
    const VectorField k = make_field(name, Params({{"dim", {2}}}));
    EXPECT_TRUE(check_jacobian([&](const Vector& x) { return k.value(x); },
                               [&](const Vector& x) { return k.jacobian(x); }, probes)
                    .passed())
        << name;
  }
  for (const std::string& name : names_of(BuiltinKind::configuration)) {
    const FieldConfiguration g = make_configuration(name, Params({{"n", {2}}, {"m", {2}}}));
    EXPECT_TRUE(check_jacobian([&](const Vector& x) { return g.value(x); },
                               [&](const Vector& x) { return g.derivative(x); }, probes)
                    .passed())
        << name;
  }
  for (const std::string& name : names_of(BuiltinKind::test_function)) {
    const TestFunction phi = make_test_function(name, Params({{"dim", {2}}, {"center", {0.1, -0.2}}}));
    EXPECT_TRUE(check_gradient(std::function<Complex(const Vector&)>([&](const Vector& x) { return phi.value(x); }),
                               std::function<CVector(const Vector&)>([&](const Vector& x) { return phi.gradient(x); }),
                               probes)
                    .passed())
        << name;
  }
}

TEST(AnalyticDerivatives, MeasuresAndActions) {
  const auto probes = default_probes(2);
  for (const std::string& name : names_of(BuiltinKind::measure)) {
    const DensityMeasure nu = make_measure(name, Params({{"dim", {2}}}));
    EXPECT_TRUE(check_gradient(std::function<double(const Vector&)>([&](const Vector& x) { return nu.log_density(x); }),
                               std::function<Vector(const Vector&)>([&](const Vector& x) { return nu.log_density_gradient(x); }),
                               probes)
                    .passed())
        << name;
  }
  for (const std::string& name : names_of(BuiltinKind::action)) {
    const PathAction s = make_action(name, Params({{"dim", {4}}, {"blocks", {2}}, {"steps", {2}}}));
    const auto p = default_probes(s.dim());
    EXPECT_TRUE(check_gradient(std::function<double(const Vector&)>([&](const Vector& x) { return s.value(x); }),
                               std::function<Vector(const Vector&)>([&](const Vector& x) { return s.gradient(x); }), p)
                    .passed())
        << name;
  }
}

TEST(Desk, GeneratorLeavesTheForwardKineticTermInvariant) {
  proptest::for_all(10, 3, [](proptest::Gen& g, int) {
    const LatticePathSpace space(2, 3, 1.0);
    const DiscreteAction s = discretize_action(space, Hamiltonian::zero(2), Vector::Zero(2));
    const TransformationFamily fam = desk_generator_family(space);
    const Vector x = g.vector(space.dim(), -2.0, 2.0);
    const Vector k = fam.generator(x, Vector(0), Matrix(0, space.dim())).e_part.col(0);
    EXPECT_LE(std::abs(s.gradient(x).dot(k)), 1e-12);
  });
}

TEST(Desk, ActionMatchesTheLatticeUpToSign) {
  const PathAction xy = xy_desk_action(1);
  const DiscreteAction lattice = discretize_action(LatticePathSpace(1, 1, 1.0), Hamiltonian::zero(1), Vector::Zero(1));
  Vector x(2);
  x << 0.7, -1.3;
  EXPECT_EQ(xy.value(x), -lattice.value(x));
}
