#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "noetherlab/measure.hpp"
#include "noetherlab/noether.hpp"
#include "noetherlab/pathspace.hpp"

namespace noetherlab {

// Named analytic objects with hand-written derivatives. Scenario files refer to
// these by name; there is no runtime expression language.

enum class BuiltinKind {
  measure,
  field,
  family,
  lagrangian,
  configuration,
  hamiltonian,
  action,
  test_function,
};

std::string to_string(BuiltinKind kind);
std::optional<BuiltinKind> parse_builtin_kind(std::string_view text);

struct ParamSpec {
  std::string name;
  std::string type;  // "int", "real", "vector", "matrix"
  std::string default_value;
  std::string description;
};

struct BuiltinInfo {
  std::string name;
  BuiltinKind kind;
  std::string summary;
  std::vector<ParamSpec> params;
};

const std::vector<BuiltinInfo>& builtin_catalog();
const BuiltinInfo* find_builtin(std::string_view name);

/// Numeric parameters by name. Scalars are stored as length-one lists;
/// matrices are row-major.
class Params {
 public:
  Params() = default;
  explicit Params(std::map<std::string, std::vector<double>> values) : values_(std::move(values)) {}

  void set(const std::string& name, std::vector<double> value) { values_[name] = std::move(value); }
  void set(const std::string& name, double value) { values_[name] = {value}; }
  bool has(const std::string& name) const { return values_.count(name) > 0; }

  double number(const std::string& name, double fallback) const;
  int integer(const std::string& name, int fallback) const;
  /// A vector of length `size`; a scalar is broadcast.
  Vector vector(const std::string& name, int size, double fallback) const;
  Matrix matrix(const std::string& name, int rows, int cols, const Matrix& fallback) const;
  const std::map<std::string, std::vector<double>>& values() const { return values_; }

 private:
  std::map<std::string, std::vector<double>> values_;
};

// Dispatch by catalog name. Unknown names raise DomainError; inconsistent
// parameters raise DimensionError or DomainError.
DensityMeasure make_measure(const std::string& name, const Params& params);
VectorField make_field(const std::string& name, const Params& params);
TransformationFamily make_family(const std::string& name, const Params& params);
LagrangianDensity make_lagrangian(const std::string& name, const Params& params);
FieldConfiguration make_configuration(const std::string& name, const Params& params);
Hamiltonian make_hamiltonian(const std::string& name, const Params& params);
PathAction make_action(const std::string& name, const Params& params);
TestFunction make_test_function(const std::string& name, const Params& params);
/// For lattice families: a builder that re-creates the family on refined
/// spaces.
FamilyBuilder make_lattice_family_builder(const std::string& name, const Params& params);

// Typed constructors.

/// N(0, I) reweighted by exp(-|x|^4 / 4); unnormalized, Gauss-Hermite frame N(0, I).
DensityMeasure quartic_density(int n);

/// k_i(x) = amp sin(x_i + x_{i+1 mod n}).
VectorField sine_field(int n, double amp);
/// k(x) = rate (-x_2, x_1).
VectorField rotation_field(double rate);

/// (x + z, r), p = n.
TransformationFamily translation_family(int n, int m);
/// Rotation of x in R^2 by angle z; also rotates r when rotate_field (m = 2).
TransformationFamily rotation_family(int m, bool rotate_field);
/// ((1 + z) x, r).
TransformationFamily scaling_family(int n, int m);
/// ((x_1 + z x_2, x_2), r).
TransformationFamily shear_family(int m);
/// F(z) = identity for every z.
TransformationFamily identity_family(int n, int m, int p = 1);
/// (x, r_i + z x_{i mod n}^power).
TransformationFamily g_shift_family(int n, int m, int power);
/// path -> (1 + z) path on R^M.
TransformationFamily lattice_scaling_family(int dim);
/// path -> path + z c on R^M.
TransformationFamily lattice_translation_family(const Vector& c);
/// path -> path + z k(path) with, in increments u_j = Q_j - Q_{j-1},
/// delta u_j = u_j^2 and delta P_j = -u_j P_j (componentwise). Leaves the
/// forward kinetic term invariant. On d = N = 1 this is k(x, y) = (x^2, -xy).
TransformationFamily desk_generator_family(const LatticePathSpace& space);

/// |r|^2
LagrangianDensity field_squared_lagrangian(int n, int m);
/// 1
LagrangianDensity unit_lagrangian(int n, int m);
/// sum_i r_i
LagrangianDensity linear_lagrangian(int n, int m);
/// |alpha|_F^2 / 2 + |r|^2 / 2
LagrangianDensity kinetic_potential_lagrangian(int n, int m);
/// exp(-|x|^2 / 2) (1 + |r|^2)
LagrangianDensity weighted_lagrangian(int n, int m);
/// exp(-c |x|^2), independent of r and alpha.
LagrangianDensity radial_gaussian_lagrangian(int n, int m, double c);

FieldConfiguration sine_configuration(int n);
/// g(x) = (x_1^2, x_2) on R^2.
FieldConfiguration quadratic_configuration();

/// S = sum_i x_i y_i on R^{2 blocks}, layout (x_1..x_b, y_1..y_b).
PathAction xy_desk_action(int blocks);

/// (1 + slope sum_i x_i) exp(-|x - center|^2 / (2 width^2)).
TestFunction gaussian_poly(const Vector& center, double width, double slope = 1.0);

}  // namespace noetherlab
