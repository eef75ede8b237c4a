#include "noetherlab/builtins.hpp"

#include <algorithm>
#include <cmath>

#include "noetherlab/error.hpp"

namespace noetherlab {
namespace {

Matrix rotation(double z) {
  Matrix r(2, 2);
  r << std::cos(z), -std::sin(z), std::sin(z), std::cos(z);
  return r;
}

Matrix quarter_turn() {
  Matrix j(2, 2);
  j << 0.0, -1.0, 1.0, 0.0;
  return j;
}

// [top; bottom] with the given row counts.
Matrix stacked(const Matrix& top, const Matrix& bottom) {
  Matrix out(top.rows() + bottom.rows(), top.cols());
  out << top, bottom;
  return out;
}

void require_positive(int v, const char* what) {
  if (v < 1) throw DomainError(std::string(what) + " must be >= 1");
}

std::vector<BuiltinInfo> make_catalog() {
  using K = BuiltinKind;
  const ParamSpec dim{"dim", "int", "1", "dimension n of E"};
  const ParamSpec n{"n", "int", "1", "dimension of E"};
  const ParamSpec m{"m", "int", "1", "dimension of G"};
  const ParamSpec d{"d", "int", "1", "degrees of freedom per time step"};
  const ParamSpec steps{"steps", "int", "1", "number of time steps N"};
  return {
      {"gaussian", K::measure, "normalized N(mean, covariance)",
       {dim, {"mean", "vector", "0", "mean"}, {"covariance", "matrix", "I", "covariance (row-major)"}}},
      {"standard-gaussian", K::measure, "N(0, I)", {dim}},
      {"flat-box", K::measure, "flat measure; pairings use the box [lo, hi]^n",
       {dim, {"lo", "vector", "-4", "lower corner"}, {"hi", "vector", "4", "upper corner"}}},
      {"quartic-density", K::measure, "exp(-|x|^2/2 - |x|^4/4), unnormalized", {dim}},

      {"constant-field", K::field, "k(x) = h", {dim, {"h", "vector", "1", "the constant vector"}}},
      {"linear-field", K::field, "k(x) = A x", {dim, {"a", "matrix", "I", "matrix A (row-major)"}}},
      {"rotation-field", K::field, "k(x) = rate (-x2, x1) on R^2", {{"rate", "real", "1", "angular rate"}}},
      {"sine-field", K::field, "k_i(x) = amp sin(x_i + x_{i+1})",
       {dim, {"amp", "real", "0.3", "amplitude"}}},

      {"translation-family", K::family, "(x + z, r), p = n", {n, m}},
      {"rotation-family", K::family, "rotation of x in R^2 by angle z (optionally of r)",
       {m, {"rotate_field", "int", "0", "1 to rotate r as well (needs m = 2)"}}},
      {"scaling-family", K::family, "((1 + z) x, r)", {n, m}},
      {"shear-family", K::family, "((x1 + z x2, x2), r) on R^2", {m}},
      {"identity-family", K::family, "F(z) = identity", {n, m, {"p", "int", "1", "parameter dimension"}}},
      {"g-shift-family", K::family, "(x, r_i + z x_{i mod n}^power)",
       {n, m, {"power", "int", "0", "0, 1 or 2"}}},
      {"lattice-scaling-family", K::family, "path -> (1 + z) path", {d, steps}},
      {"lattice-translation-family", K::family, "path -> path + z c",
       {d, steps, {"c", "vector", "1", "translation direction"}}},
      {"desk-generator-family", K::family,
       "path -> path + z k(path), delta u_j = u_j^2, delta P_j = -u_j P_j; k(x, y) = (x^2, -xy) on M = 2",
       {d, steps}},

      {"field-squared", K::lagrangian, "L = |r|^2", {n, m}},
      {"unit-lagrangian", K::lagrangian, "L = 1", {n, m}},
      {"linear-lagrangian", K::lagrangian, "L = sum_i r_i", {n, m}},
      {"kinetic-potential", K::lagrangian, "L = |alpha|^2/2 + |r|^2/2", {n, m}},
      {"weighted-lagrangian", K::lagrangian, "L = exp(-|x|^2/2) (1 + |r|^2)", {n, m}},
      {"radial-gaussian", K::lagrangian, "L = exp(-c |x|^2)", {n, m, {"c", "real", "1", "decay rate"}}},

      {"identity-config", K::configuration, "g(x) = x", {n}},
      {"zero-config", K::configuration, "g(x) = 0", {n, m}},
      {"sine-config", K::configuration, "g_i(x) = sin(x_i)", {n}},
      {"quadratic-config", K::configuration, "g(x) = (x1^2, x2) on R^2", {}},

      {"zero-hamiltonian", K::hamiltonian, "h = 0", {d}},
      {"free-particle", K::hamiltonian, "h = |p|^2 / (2 mass)", {d, {"mass", "real", "1", "mass"}}},
      {"harmonic", K::hamiltonian, "h = |p|^2/(2 mass) + mass omega^2 |q|^2 / 2",
       {d, {"mass", "real", "1", "mass"}, {"omega", "real", "1", "frequency"}}},
      {"quartic", K::hamiltonian, "h = |p|^2/2 + lambda |q|^4/4",
       {d, {"lambda", "real", "1", "coupling"}}},

      {"xy-desk-action", K::action, "S = sum_i x_i y_i on R^{2 blocks}",
       {{"blocks", "int", "1", "number of (x, y) pairs"}}},
      {"lattice-harmonic", K::action, "discretized harmonic-oscillator action",
       {d, steps, {"t", "real", "1", "horizon"}, {"mass", "real", "1", "mass"},
        {"omega", "real", "1", "frequency"}, {"q", "vector", "0", "offset"}}},
      {"lattice-free", K::action, "discretized free-particle action",
       {d, steps, {"t", "real", "1", "horizon"}, {"mass", "real", "1", "mass"}, {"q", "vector", "0", "offset"}}},
      {"quadratic-action", K::action, "S = x^T A x / 2 + b^T x + c",
       {dim, {"a", "matrix", "0", "matrix A"}, {"b", "vector", "0", "linear part"}, {"c", "real", "0", "constant"}}},

      {"gaussian-poly", K::test_function, "(1 + slope sum x_i) exp(-|x - center|^2 / (2 width^2))",
       {dim, {"center", "vector", "0", "center"}, {"width", "real", "1", "width"},
        {"slope", "real", "1", "linear coefficient"}}},
      {"plane-wave", K::test_function, "exp(i <omega, x>)", {dim, {"omega", "vector", "1", "frequency"}}},
      {"bump", K::test_function, "compactly supported bump",
       {dim, {"center", "vector", "0", "center"}, {"radius", "real", "1", "support radius"}}},
      {"one", K::test_function, "phi = 1", {dim}},
  };
}

}  // namespace

std::string to_string(BuiltinKind kind) {
  switch (kind) {
    case BuiltinKind::measure:
      return "measure";
    case BuiltinKind::field:
      return "field";
    case BuiltinKind::family:
      return "family";
    case BuiltinKind::lagrangian:
      return "lagrangian";
    case BuiltinKind::configuration:
      return "configuration";
    case BuiltinKind::hamiltonian:
      return "hamiltonian";
    case BuiltinKind::action:
      return "action";
    case BuiltinKind::test_function:
      return "test-function";
  }
  return "unknown";
}

std::optional<BuiltinKind> parse_builtin_kind(std::string_view text) {
  for (BuiltinKind k : {BuiltinKind::measure, BuiltinKind::field, BuiltinKind::family,
                        BuiltinKind::lagrangian, BuiltinKind::configuration,
                        BuiltinKind::hamiltonian, BuiltinKind::action,
                        BuiltinKind::test_function}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

const std::vector<BuiltinInfo>& builtin_catalog() {
  static const std::vector<BuiltinInfo> catalog = make_catalog();
  return catalog;
}

const BuiltinInfo* find_builtin(std::string_view name) {
  for (const BuiltinInfo& b : builtin_catalog()) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Params

double Params::number(const std::string& name, double fallback) const {
  auto it = values_.find(name);
  if (it == values_.end()) return fallback;
  if (it->second.size() != 1) throw DimensionError("parameter '" + name + "' must be a scalar");
  return it->second[0];
}

int Params::integer(const std::string& name, int fallback) const {
  const double v = number(name, fallback);
  if (v != std::round(v)) throw DomainError("parameter '" + name + "' must be an integer");
  return static_cast<int>(v);
}

Vector Params::vector(const std::string& name, int size, double fallback) const {
  auto it = values_.find(name);
  if (it == values_.end()) return Vector::Constant(size, fallback);
  const auto& v = it->second;
  if (v.size() == 1) return Vector::Constant(size, v[0]);
  if (static_cast<int>(v.size()) != size) {
    throw DimensionError("parameter '" + name + "' has length " + std::to_string(v.size()) +
                         ", expected " + std::to_string(size));
  }
  return Eigen::Map<const Vector>(v.data(), size);
}

Matrix Params::matrix(const std::string& name, int rows, int cols, const Matrix& fallback) const {
  auto it = values_.find(name);
  if (it == values_.end()) return fallback;
  const auto& v = it->second;
  if (static_cast<int>(v.size()) != rows * cols) {
    throw DimensionError("parameter '" + name + "' has " + std::to_string(v.size()) +
                         " entries, expected " + std::to_string(rows) + " x " +
                         std::to_string(cols));
  }
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      v.data(), rows, cols);
}

// ---------------------------------------------------------------------------
// Typed constructors

DensityMeasure quartic_density(int n) {
  require_positive(n, "quartic-density: dim");
  const GaussianFrame frame{Vector::Zero(n), Matrix::Identity(n, n)};
  return DensityMeasure::custom(
      n,
      [](const Vector& x) {
        const double r2 = x.squaredNorm();
        return -0.5 * r2 - 0.25 * r2 * r2;
      },
      [](const Vector& x) -> Vector { return -(1.0 + x.squaredNorm()) * x; },
      MeasureKind::unnormalized, frame, {}, Validation::skip);
}

VectorField sine_field(int n, double amp) {
  require_positive(n, "sine-field: dim");
  return VectorField::custom(
      n,
      [n, amp](const Vector& x) -> Vector {
        Vector k(n);
        for (int i = 0; i < n; ++i) k[i] = amp * std::sin(x[i] + x[(i + 1) % n]);
        return k;
      },
      [n, amp](const Vector& x) -> Matrix {
        Matrix j = Matrix::Zero(n, n);
        for (int i = 0; i < n; ++i) {
          const double c = amp * std::cos(x[i] + x[(i + 1) % n]);
          j(i, i) += c;
          j(i, (i + 1) % n) += c;
        }
        return j;
      },
      Validation::skip);
}

VectorField rotation_field(double rate) {
  return VectorField::linear(rate * quarter_turn());
}

TransformationFamily translation_family(int n, int m) {
  require_positive(n, "translation-family: n");
  return TransformationFamily::create(
      n, n, m,
      [](const Vector& z, const Vector& x, const Vector& r, const Matrix&) {
        return FamilyImage{x + z, r};
      },
      [n, m](const Vector&, const Vector&, const Matrix&) {
        return FamilyGenerator{Matrix::Identity(n, n), Matrix::Zero(m, n)};
      },
      [n, m](const Vector&, const Vector&, const Vector&, const Matrix&) {
        return FamilyJacobian{Matrix::Identity(n + m, n),
                              stacked(Matrix::Zero(n, m), Matrix::Identity(m, m))};
      },
      [n, m](const Vector&, const Vector&, const Matrix&, const Vector&) {
        return GeneratorPartials{Matrix::Zero(n, n), Matrix::Zero(n, m), Matrix::Zero(m, n),
                                 Matrix::Zero(m, m)};
      },
      Validation::skip);
}

TransformationFamily rotation_family(int m, bool rotate_field) {
  if (rotate_field && m != 2) throw DimensionError("rotation-family: rotate_field needs m = 2");
  const Matrix j = quarter_turn();
  return TransformationFamily::create(
      1, 2, m,
      [rotate_field](const Vector& z, const Vector& x, const Vector& r, const Matrix&) {
        const Matrix rot = rotation(z[0]);
        return FamilyImage{rot * x, rotate_field ? Vector(rot * r) : r};
      },
      [j, m, rotate_field](const Vector& x, const Vector& r, const Matrix&) {
        return FamilyGenerator{j * x, rotate_field ? Matrix(j * r) : Matrix::Zero(m, 1)};
      },
      [m, rotate_field](const Vector& z, const Vector&, const Vector&, const Matrix&) {
        const Matrix rot = rotation(z[0]);
        return FamilyJacobian{stacked(rot, Matrix::Zero(m, 2)),
                              stacked(Matrix::Zero(2, m),
                                      rotate_field ? rot : Matrix(Matrix::Identity(m, m)))};
      },
      [j, m, rotate_field](const Vector&, const Vector&, const Matrix&, const Vector& delta) {
        return GeneratorPartials{delta[0] * j, Matrix::Zero(2, m), Matrix::Zero(m, 2),
                                 rotate_field ? Matrix(delta[0] * j) : Matrix::Zero(m, m)};
      },
      Validation::skip);
}

TransformationFamily scaling_family(int n, int m) {
  require_positive(n, "scaling-family: n");
  return TransformationFamily::create(
      1, n, m,
      [](const Vector& z, const Vector& x, const Vector& r, const Matrix&) {
        return FamilyImage{(1.0 + z[0]) * x, r};
      },
      [m](const Vector& x, const Vector&, const Matrix&) {
        return FamilyGenerator{x, Matrix::Zero(m, 1)};
      },
      [n, m](const Vector& z, const Vector&, const Vector&, const Matrix&) {
        return FamilyJacobian{
            stacked((1.0 + z[0]) * Matrix::Identity(n, n), Matrix::Zero(m, n)),
            stacked(Matrix::Zero(n, m), Matrix::Identity(m, m))};
      },
      [n, m](const Vector&, const Vector&, const Matrix&, const Vector& delta) {
        return GeneratorPartials{delta[0] * Matrix::Identity(n, n), Matrix::Zero(n, m),
                                 Matrix::Zero(m, n), Matrix::Zero(m, m)};
      },
      Validation::skip);
}

TransformationFamily shear_family(int m) {
  Matrix e(2, 2);
  e << 0.0, 1.0, 0.0, 0.0;
  return TransformationFamily::create(
      1, 2, m,
      [e](const Vector& z, const Vector& x, const Vector& r, const Matrix&) {
        return FamilyImage{x + z[0] * e * x, r};
      },
      [e, m](const Vector& x, const Vector&, const Matrix&) {
        return FamilyGenerator{e * x, Matrix::Zero(m, 1)};
      },
      [e, m](const Vector& z, const Vector&, const Vector&, const Matrix&) {
        return FamilyJacobian{stacked(Matrix::Identity(2, 2) + z[0] * e, Matrix::Zero(m, 2)),
                              stacked(Matrix::Zero(2, m), Matrix::Identity(m, m))};
      },
      [e, m](const Vector&, const Vector&, const Matrix&, const Vector& delta) {
        return GeneratorPartials{delta[0] * e, Matrix::Zero(2, m), Matrix::Zero(m, 2),
                                 Matrix::Zero(m, m)};
      },
      Validation::skip);
}

TransformationFamily identity_family(int n, int m, int p) {
  require_positive(n, "identity-family: n");
  require_positive(p, "identity-family: p");
  return TransformationFamily::create(
      p, n, m,
      [](const Vector&, const Vector& x, const Vector& r, const Matrix&) {
        return FamilyImage{x, r};
      },
      [n, m, p](const Vector&, const Vector&, const Matrix&) {
        return FamilyGenerator{Matrix::Zero(n, p), Matrix::Zero(m, p)};
      },
      [n, m](const Vector&, const Vector&, const Vector&, const Matrix&) {
        return FamilyJacobian{Matrix::Identity(n + m, n),
                              stacked(Matrix::Zero(n, m), Matrix::Identity(m, m))};
      },
      [n, m](const Vector&, const Vector&, const Matrix&, const Vector&) {
        return GeneratorPartials{Matrix::Zero(n, n), Matrix::Zero(n, m), Matrix::Zero(m, n),
                                 Matrix::Zero(m, m)};
      },
      Validation::skip);
}

TransformationFamily g_shift_family(int n, int m, int power) {
  require_positive(n, "g-shift-family: n");
  require_positive(m, "g-shift-family: m");
  if (power < 0 || power > 2) throw DomainError("g-shift-family: power must be 0, 1 or 2");
  auto shift = [n, m, power](const Vector& x) {
    Vector s(m);
    for (int i = 0; i < m; ++i) s[i] = std::pow(x[i % n], power);
    return s;
  };
  auto shift_jacobian = [n, m, power](const Vector& x) {
    Matrix j = Matrix::Zero(m, n);
    if (power > 0) {
      for (int i = 0; i < m; ++i) j(i, i % n) = power * std::pow(x[i % n], power - 1);
    }
    return j;
  };
  return TransformationFamily::create(
      1, n, m,
      [shift](const Vector& z, const Vector& x, const Vector& r, const Matrix&) {
        return FamilyImage{x, r + z[0] * shift(x)};
      },
      [n, shift](const Vector& x, const Vector&, const Matrix&) {
        return FamilyGenerator{Matrix::Zero(n, 1), shift(x)};
      },
      [n, m, shift_jacobian](const Vector& z, const Vector& x, const Vector&, const Matrix&) {
        return FamilyJacobian{stacked(Matrix::Identity(n, n), z[0] * shift_jacobian(x)),
                              stacked(Matrix::Zero(n, m), Matrix::Identity(m, m))};
      },
      [n, m, shift_jacobian](const Vector& x, const Vector&, const Matrix&, const Vector& delta) {
        return GeneratorPartials{Matrix::Zero(n, n), Matrix::Zero(n, m),
                                 delta[0] * shift_jacobian(x), Matrix::Zero(m, m)};
      },
      Validation::skip);
}

namespace {

// Family path -> path + z k(path) with trivial G, for a generator k with
// Jacobian k'.
TransformationFamily additive_lattice_family(int dim, std::function<Vector(const Vector&)> k,
                                             std::function<Matrix(const Vector&)> dk) {
  return TransformationFamily::create(
      1, dim, 0,
      [k](const Vector& z, const Vector& x, const Vector&, const Matrix&) {
        return FamilyImage{x + z[0] * k(x), Vector(0)};
      },
      [k](const Vector& x, const Vector&, const Matrix&) {
        return FamilyGenerator{k(x), Matrix::Zero(0, 1)};
      },
      [dim, dk](const Vector& z, const Vector& x, const Vector&, const Matrix&) {
        return FamilyJacobian{Matrix::Identity(dim, dim) + z[0] * dk(x), Matrix::Zero(dim, 0)};
      },
      [dim, dk](const Vector& x, const Vector&, const Matrix&, const Vector& delta) {
        return GeneratorPartials{delta[0] * dk(x), Matrix::Zero(dim, 0), Matrix::Zero(0, dim),
                                 Matrix::Zero(0, 0)};
      },
      Validation::skip);
}

}  // namespace

TransformationFamily lattice_scaling_family(int dim) {
  require_positive(dim, "lattice-scaling-family: M");
  return additive_lattice_family(
      dim, [](const Vector& x) { return x; },
      [dim](const Vector&) -> Matrix { return Matrix::Identity(dim, dim); });
}

TransformationFamily lattice_translation_family(const Vector& c) {
  const int dim = static_cast<int>(c.size());
  require_positive(dim, "lattice-translation-family: M");
  return additive_lattice_family(
      dim, [c](const Vector&) { return c; },
      [dim](const Vector&) -> Matrix { return Matrix::Zero(dim, dim); });
}

TransformationFamily desk_generator_family(const LatticePathSpace& space) {
  const int d = space.d();
  const int n = space.steps();
  const int dim = space.dim();
  // Component a of Q_j sits at (j - 1) d + a, of P_j at d N + (j - 1) d + a.
  auto qi = [d](int j, int a) { return (j - 1) * d + a; };
  auto pi = [d, n](int j, int a) { return d * n + (j - 1) * d + a; };
  auto increment = [qi](const Vector& x, int j, int a) {
    return j == 1 ? x[qi(1, a)] : x[qi(j, a)] - x[qi(j - 1, a)];
  };
  auto k = [=](const Vector& x) {
    Vector out(dim);
    for (int a = 0; a < d; ++a) {
      double acc = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double u = increment(x, j, a);
        acc += u * u;
        out[qi(j, a)] = acc;
        out[pi(j, a)] = -u * x[pi(j, a)];
      }
    }
    return out;
  };
  auto dk = [=](const Vector& x) {
    Matrix jac = Matrix::Zero(dim, dim);
    for (int a = 0; a < d; ++a) {
      for (int j = 1; j <= n; ++j) {
        // delta Q_j = sum_{i <= j} u_i^2, u_i = Q_i - Q_{i-1}.
        for (int i = 1; i <= j; ++i) {
          const double u = increment(x, i, a);
          jac(qi(j, a), qi(i, a)) += 2.0 * u;
          if (i > 1) jac(qi(j, a), qi(i - 1, a)) -= 2.0 * u;
        }
        const double u = increment(x, j, a);
        const double p = x[pi(j, a)];
        jac(pi(j, a), qi(j, a)) -= p;
        if (j > 1) jac(pi(j, a), qi(j - 1, a)) += p;
        jac(pi(j, a), pi(j, a)) -= u;
      }
    }
    return jac;
  };
  return additive_lattice_family(dim, k, dk);
}

LagrangianDensity field_squared_lagrangian(int n, int m) {
  return LagrangianDensity::create(
      n, m, [](const Vector&, const Vector& r, const Matrix&) { return Complex(r.squaredNorm()); },
      [n](const Vector&, const Vector&, const Matrix&) -> CVector { return CVector::Zero(n); },
      [](const Vector&, const Vector& r, const Matrix&) -> CVector {
        return (2.0 * r).cast<Complex>();
      },
      [m, n](const Vector&, const Vector&, const Matrix&) -> CMatrix { return CMatrix::Zero(m, n); },
      Validation::skip);
}

LagrangianDensity unit_lagrangian(int n, int m) {
  return LagrangianDensity::create(
      n, m, [](const Vector&, const Vector&, const Matrix&) { return Complex(1.0); },
      [n](const Vector&, const Vector&, const Matrix&) -> CVector { return CVector::Zero(n); },
      [m](const Vector&, const Vector&, const Matrix&) -> CVector { return CVector::Zero(m); },
      [m, n](const Vector&, const Vector&, const Matrix&) -> CMatrix { return CMatrix::Zero(m, n); },
      Validation::skip);
}

LagrangianDensity linear_lagrangian(int n, int m) {
  return LagrangianDensity::create(
      n, m, [](const Vector&, const Vector& r, const Matrix&) { return Complex(r.sum()); },
      [n](const Vector&, const Vector&, const Matrix&) -> CVector { return CVector::Zero(n); },
      [m](const Vector&, const Vector&, const Matrix&) -> CVector {
        return CVector::Constant(m, 1.0);
      },
      [m, n](const Vector&, const Vector&, const Matrix&) -> CMatrix { return CMatrix::Zero(m, n); },
      Validation::skip);
}

LagrangianDensity kinetic_potential_lagrangian(int n, int m) {
  return LagrangianDensity::create(
      n, m,
      [](const Vector&, const Vector& r, const Matrix& a) {
        return Complex(0.5 * a.squaredNorm() + 0.5 * r.squaredNorm());
      },
      [n](const Vector&, const Vector&, const Matrix&) -> CVector { return CVector::Zero(n); },
      [](const Vector&, const Vector& r, const Matrix&) -> CVector { return r.cast<Complex>(); },
      [](const Vector&, const Vector&, const Matrix& a) -> CMatrix { return a.cast<Complex>(); },
      Validation::skip);
}

LagrangianDensity weighted_lagrangian(int n, int m) {
  return LagrangianDensity::create(
      n, m,
      [](const Vector& x, const Vector& r, const Matrix&) {
        return Complex(std::exp(-0.5 * x.squaredNorm()) * (1.0 + r.squaredNorm()));
      },
      [](const Vector& x, const Vector& r, const Matrix&) -> CVector {
        return (-std::exp(-0.5 * x.squaredNorm()) * (1.0 + r.squaredNorm()) * x).cast<Complex>();
      },
      [](const Vector& x, const Vector& r, const Matrix&) -> CVector {
        return (2.0 * std::exp(-0.5 * x.squaredNorm()) * r).cast<Complex>();
      },
      [m, n](const Vector&, const Vector&, const Matrix&) -> CMatrix { return CMatrix::Zero(m, n); },
      Validation::skip);
}

LagrangianDensity radial_gaussian_lagrangian(int n, int m, double c) {
  return LagrangianDensity::create(
      n, m,
      [c](const Vector& x, const Vector&, const Matrix&) {
        return Complex(std::exp(-c * x.squaredNorm()));
      },
      [c](const Vector& x, const Vector&, const Matrix&) -> CVector {
        return (-2.0 * c * std::exp(-c * x.squaredNorm()) * x).cast<Complex>();
      },
      [m](const Vector&, const Vector&, const Matrix&) -> CVector { return CVector::Zero(m); },
      [m, n](const Vector&, const Vector&, const Matrix&) -> CMatrix { return CMatrix::Zero(m, n); },
      Validation::skip);
}

FieldConfiguration sine_configuration(int n) {
  return FieldConfiguration::create(
      n, n, [](const Vector& x) -> Vector { return x.array().sin().matrix(); },
      [](const Vector& x) -> Matrix { return x.array().cos().matrix().asDiagonal(); },
      Validation::skip);
}

FieldConfiguration quadratic_configuration() {
  return FieldConfiguration::create(
      2, 2,
      [](const Vector& x) -> Vector {
        Vector g(2);
        g << x[0] * x[0], x[1];
        return g;
      },
      [](const Vector& x) -> Matrix {
        Matrix j(2, 2);
        j << 2.0 * x[0], 0.0, 0.0, 1.0;
        return j;
      },
      Validation::skip);
}

PathAction xy_desk_action(int blocks) {
  require_positive(blocks, "xy-desk-action: blocks");
  const int dim = 2 * blocks;
  QuadraticForm form;
  form.a = Matrix::Zero(dim, dim);
  form.a.topRightCorner(blocks, blocks).setIdentity();
  form.a.bottomLeftCorner(blocks, blocks).setIdentity();
  form.b = Vector::Zero(dim);
  return PathAction::quadratic(form);
}

TestFunction gaussian_poly(const Vector& center, double width, double slope) {
  const int n = static_cast<int>(center.size());
  std::vector<Monomial> terms{{1.0, std::vector<int>(n, 0)}};
  for (int i = 0; i < n; ++i) {
    std::vector<int> powers(n, 0);
    powers[i] = 1;
    terms.push_back({slope, powers});
  }
  return TestFunction::polynomial_times_gaussian(terms, center, width);
}

// ---------------------------------------------------------------------------
// Dispatch

namespace {

[[noreturn]] void unknown(const std::string& name, BuiltinKind kind) {
  const BuiltinInfo* info = find_builtin(name);
  if (info) {
    throw DomainError("builtin '" + name + "' is a " + to_string(info->kind) + ", not a " +
                      to_string(kind));
  }
  throw DomainError("unknown " + to_string(kind) + " builtin '" + name + "'");
}

LatticePathSpace space_from(const Params& p) {
  return LatticePathSpace(p.integer("d", 1), p.integer("steps", 1), p.number("t", 1.0));
}

}  // namespace

DensityMeasure make_measure(const std::string& name, const Params& p) {
  const int n = p.integer("dim", 1);
  require_positive(n, "measure: dim");
  if (name == "gaussian") {
    return DensityMeasure::gaussian(p.vector("mean", n, 0.0),
                                    p.matrix("covariance", n, n, Matrix::Identity(n, n)));
  }
  if (name == "standard-gaussian") return DensityMeasure::standard_gaussian(n);
  if (name == "flat-box") {
    const Vector lo = p.vector("lo", n, -4.0);
    const Vector hi = p.vector("hi", n, 4.0);
    if (!(lo.array() < hi.array()).all()) throw DomainError("flat-box: lo must be below hi");
    return DensityMeasure::flat(n);
  }
  if (name == "quartic-density") return quartic_density(n);
  unknown(name, BuiltinKind::measure);
}

VectorField make_field(const std::string& name, const Params& p) {
  const int n = p.integer("dim", name == "rotation-field" ? 2 : 1);
  if (name == "constant-field") return VectorField::constant(p.vector("h", n, 1.0));
  if (name == "linear-field") {
    return VectorField::linear(p.matrix("a", n, n, Matrix::Identity(n, n)));
  }
  if (name == "rotation-field") {
    if (n != 2) throw DimensionError("rotation-field acts on R^2");
    return rotation_field(p.number("rate", 1.0));
  }
  if (name == "sine-field") return sine_field(n, p.number("amp", 0.3));
  unknown(name, BuiltinKind::field);
}

TransformationFamily make_family(const std::string& name, const Params& p) {
  const int n = p.integer("n", 1);
  const int m = p.integer("m", 1);
  if (m < 0) throw DomainError("family: m must be >= 0");
  if (name == "translation-family") return translation_family(n, m);
  if (name == "rotation-family") {
    if (p.has("n") && n != 2) throw DimensionError("rotation-family acts on R^2 (n = 2)");
    return rotation_family(m, p.integer("rotate_field", 0) != 0);
  }
  if (name == "scaling-family") return scaling_family(n, m);
  if (name == "shear-family") {
    if (p.has("n") && n != 2) throw DimensionError("shear-family acts on R^2 (n = 2)");
    return shear_family(m);
  }
  if (name == "identity-family") return identity_family(n, m, p.integer("p", 1));
  if (name == "g-shift-family") return g_shift_family(n, m, p.integer("power", 0));
  if (name == "lattice-scaling-family" || name == "lattice-translation-family" ||
      name == "desk-generator-family") {
    return make_lattice_family_builder(name, p)(space_from(p));
  }
  unknown(name, BuiltinKind::family);
}

FamilyBuilder make_lattice_family_builder(const std::string& name, const Params& p) {
  if (name == "lattice-scaling-family") {
    return [](const LatticePathSpace& s) { return lattice_scaling_family(s.dim()); };
  }
  if (name == "lattice-translation-family") {
    const bool has_c = p.has("c");
    const Params copy = p;
    return [has_c, copy](const LatticePathSpace& s) {
      return lattice_translation_family(has_c ? copy.vector("c", s.dim(), 1.0)
                                              : Vector(Vector::Ones(s.dim())));
    };
  }
  if (name == "desk-generator-family") {
    return [](const LatticePathSpace& s) { return desk_generator_family(s); };
  }
  throw DomainError("'" + name + "' is not a lattice family builtin");
}

LagrangianDensity make_lagrangian(const std::string& name, const Params& p) {
  const int n = p.integer("n", 1);
  const int m = p.integer("m", 1);
  require_positive(n, "lagrangian: n");
  if (m < 0) throw DomainError("lagrangian: m must be >= 0");
  if (name == "field-squared") return field_squared_lagrangian(n, m);
  if (name == "unit-lagrangian") return unit_lagrangian(n, m);
  if (name == "linear-lagrangian") return linear_lagrangian(n, m);
  if (name == "kinetic-potential") return kinetic_potential_lagrangian(n, m);
  if (name == "weighted-lagrangian") return weighted_lagrangian(n, m);
  if (name == "radial-gaussian") return radial_gaussian_lagrangian(n, m, p.number("c", 1.0));
  unknown(name, BuiltinKind::lagrangian);
}

FieldConfiguration make_configuration(const std::string& name, const Params& p) {
  const int n = p.integer("n", name == "quadratic-config" ? 2 : 1);
  require_positive(n, "configuration: n");
  if (name == "identity-config") return FieldConfiguration::identity(n);
  if (name == "zero-config") {
    const int m = p.integer("m", 1);
    if (m < 0) throw DomainError("zero-config: m must be >= 0");
    return FieldConfiguration::zero(n, m);
  }
  if (name == "sine-config") return sine_configuration(n);
  if (name == "quadratic-config") {
    if (n != 2) throw DimensionError("quadratic-config is defined on R^2");
    return quadratic_configuration();
  }
  unknown(name, BuiltinKind::configuration);
}

Hamiltonian make_hamiltonian(const std::string& name, const Params& p) {
  const int d = p.integer("d", 1);
  require_positive(d, "hamiltonian: d");
  if (name == "zero-hamiltonian") return Hamiltonian::zero(d);
  if (name == "free-particle") return Hamiltonian::free_particle(d, p.number("mass", 1.0));
  if (name == "harmonic") {
    return Hamiltonian::harmonic(d, p.number("mass", 1.0), p.number("omega", 1.0));
  }
  if (name == "quartic") return Hamiltonian::quartic(d, p.number("lambda", 1.0));
  unknown(name, BuiltinKind::hamiltonian);
}

PathAction make_action(const std::string& name, const Params& p) {
  if (name == "xy-desk-action") return xy_desk_action(p.integer("blocks", 1));
  if (name == "lattice-harmonic" || name == "lattice-free") {
    const LatticePathSpace space = space_from(p);
    const Hamiltonian h = name == "lattice-harmonic"
                              ? Hamiltonian::harmonic(space.d(), p.number("mass", 1.0),
                                                      p.number("omega", 1.0))
                              : Hamiltonian::free_particle(space.d(), p.number("mass", 1.0));
    return PathAction::from(discretize_action(space, h, p.vector("q", space.d(), 0.0)));
  }
  if (name == "quadratic-action") {
    const int n = p.integer("dim", 1);
    require_positive(n, "quadratic-action: dim");
    return PathAction::quadratic(QuadraticForm{p.matrix("a", n, n, Matrix::Zero(n, n)),
                                               p.vector("b", n, 0.0), p.number("c", 0.0)});
  }
  unknown(name, BuiltinKind::action);
}

TestFunction make_test_function(const std::string& name, const Params& p) {
  const int n = p.integer("dim", 1);
  require_positive(n, "test function: dim");
  if (name == "gaussian-poly") {
    return gaussian_poly(p.vector("center", n, 0.0), p.number("width", 1.0),
                         p.number("slope", 1.0));
  }
  if (name == "plane-wave") return TestFunction::plane_wave(p.vector("omega", n, 1.0));
  if (name == "bump") {
    return TestFunction::compact_bump(p.vector("center", n, 0.0), p.number("radius", 1.0));
  }
  if (name == "one") return TestFunction::one(n);
  unknown(name, BuiltinKind::test_function);
}

}  // namespace noetherlab
