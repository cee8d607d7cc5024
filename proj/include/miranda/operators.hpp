#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "miranda/errors.hpp"
#include "miranda/geometry.hpp"
#include "miranda/linalg.hpp"

#include <json.hpp>

namespace miranda {

/// Constant coefficients of P[a,D] = sum a_lj d_l d_j + sum a_l d_l + a0,
/// split into the real symmetric principal matrix a2, the complex
/// first-order vector a1 and the complex scalar a0.
struct OperatorCoefficients {
  int n = 2;
  MatN a2 = MatN::identity(2);
  std::array<Complex, 3> a1{Complex(0), Complex(0), Complex(0)};
  Complex a0{0.0, 0.0};

  static OperatorCoefficients laplace(int n = 2) {
    OperatorCoefficients c;
    c.n = n;
    c.a2 = MatN::identity(n);
    return c;
  }

  static OperatorCoefficients make(int n, const MatN& a2,
                                   std::array<Complex, 3> a1 = {},
                                   Complex a0 = Complex(0)) {
    if (n != 2 && n != 3)
      throw ConstructionError("OperatorCoefficients: n must be 2 or 3");
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (a2(i, j) != a2(j, i))
          throw ConstructionError("OperatorCoefficients: a2 not symmetric");
    OperatorCoefficients c;
    c.n = n;
    c.a2 = a2;
    c.a2.n = n;
    c.a1 = a1;
    c.a0 = a0;
    return c;
  }

  /// Builds the aggregate from a general (not necessarily symmetric)
  /// second-order coefficient matrix; off-diagonal multi-index
  /// coefficients a_{e_l + e_j} are shared evenly, a_lj = a_jl.
  static OperatorCoefficients from_second_order(int n, const MatN& m,
                                                std::array<Complex, 3> a1 = {},
                                                Complex a0 = Complex(0)) {
    MatN s;
    s.n = n;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s(i, j) = 0.5 * (m(i, j) + m(j, i));
    return make(n, s, a1, a0);
  }

  static OperatorCoefficients from_json(const nlohmann::json& j);
};

/// a2 = T T^t with T lower triangular, plus det a2.
struct Factorization {
  int n = 2;
  MatN T = MatN::identity(2);
  double det_a2 = 1.0;
};

/// Minimum over sampled unit directions of xi^t a2 xi (equals
/// Re sum_{|gamma|=2} a_gamma xi^gamma since a2 is real). A closed-form
/// eigenvalue evaluation cross-checks the sampling.
inline double ellipticity_margin(const OperatorCoefficients& c, int M = 1024) {
  if (M < 64) throw ArgumentError("ellipticity_margin: M must be >= 64");
  double sampled = std::numeric_limits<double>::max();
  if (c.n == 2) {
    for (int i = 0; i < M; ++i) {
      const double th = kTwoPi * i / M;
      VecN xi = make_vec(std::cos(th), std::sin(th));
      sampled = std::min(sampled, quad_form(c.a2, xi));
    }
  } else {
    // Fibonacci sphere
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    for (int i = 0; i < M; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / M;
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = kTwoPi * i / golden;
      VecN xi = make_vec(rho * std::cos(phi), rho * std::sin(phi), z);
      sampled = std::min(sampled, quad_form(c.a2, xi));
    }
  }
  const auto eigs = symmetric_eigenvalues(c.a2);
  const double eig_min = eigs[0];
  const double spread = eigs[static_cast<std::size_t>(c.n - 1)] - eigs[0];
  if (sampled < eig_min - 1e-9 * std::abs(eig_min) - 1e-14 ||
      sampled > eig_min + 50.0 * spread / M + 1e-12)
    throw Error("ellipticity_margin: sampling and eigenvalue paths disagree");
  if (!(sampled > 0.0))
    throw ConstructionError("ellipticity_margin: ellipticity violated (min " +
                            format_double(sampled) + ")");
  return sampled;
}

/// Lower-triangular Cholesky factor of the symmetric positive definite
/// principal matrix, Prop-style a2 = T T^t.
inline Factorization factorize(const OperatorCoefficients& c) {
  Factorization f;
  f.n = c.n;
  f.T.n = c.n;
  for (int i = 0; i < c.n; ++i)
    for (int j = 0; j < c.n; ++j) f.T(i, j) = 0.0;
  for (int i = 0; i < c.n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = c.a2(i, j);
      for (int k = 0; k < j; ++k) s -= f.T(i, k) * f.T(j, k);
      if (i == j) {
        if (!(s > 0.0))
          throw ConstructionError("factorize: a2 not positive definite");
        f.T(i, i) = std::sqrt(s);
      } else {
        f.T(i, j) = s / f.T(j, j);
      }
    }
  }
  f.det_a2 = det(c.a2);
  // residual check T T^t = a2
  MatN r;
  r.n = c.n;
  double res = 0.0;
  for (int i = 0; i < c.n; ++i)
    for (int j = 0; j < c.n; ++j) {
      double s = 0.0;
      for (int k = 0; k < c.n; ++k) s += f.T(i, k) * f.T(j, k);
      res = std::max(res, std::abs(s - c.a2(i, j)));
    }
  if (res > 1e-12 * frobenius_norm(c.a2))
    throw Error("factorize: T T^t does not reproduce a2");
  return f;
}

/// Pointwise application of P[a,D] to a field with known value,
/// gradient and Hessian at one point. Constant coefficients, so the
/// divergence form coincides with the nondivergence form.
inline Complex apply_P(const OperatorCoefficients& c, Complex value,
                       const std::array<Complex, 3>& gradient,
                       const std::array<std::array<Complex, 3>, 3>& hessian) {
  Complex r = c.a0 * value;
  for (int l = 0; l < c.n; ++l) {
    r += c.a1[static_cast<std::size_t>(l)] *
         gradient[static_cast<std::size_t>(l)];
    for (int j = 0; j < c.n; ++j)
      r += c.a2(l, j) * hessian[static_cast<std::size_t>(l)]
                               [static_cast<std::size_t>(j)];
  }
  return r;
}

/// Conormal boundary operator B* v = sum conj(a_jl) nu_l d_j v
/// - sum nu_l conj(a_l) v at the frame nodes. a2 is real, so the
/// conjugation only touches a1.
inline std::vector<Complex> conormal_B_star(
    const OperatorCoefficients& c, const BoundaryFrame& frame,
    const std::vector<Complex>& v, const std::vector<CVec2>& grad_v) {
  if (v.size() != frame.point.size() || grad_v.size() != v.size())
    throw ArgumentError("conormal_B_star: node count mismatch");
  std::vector<Complex> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 nu = frame.normal[i];
    const std::array<Complex, 2> g{grad_v[i].x, grad_v[i].y};
    const std::array<double, 2> nn{nu.x, nu.y};
    Complex s(0.0, 0.0);
    for (int l = 0; l < 2; ++l)
      for (int j = 0; j < 2; ++j)
        s += c.a2(j, l) * nn[static_cast<std::size_t>(l)] *
             g[static_cast<std::size_t>(j)];
    for (int l = 0; l < 2; ++l)
      s -= nn[static_cast<std::size_t>(l)] *
           std::conj(c.a1[static_cast<std::size_t>(l)]) * v[i];
    out[i] = s;
  }
  return out;
}

namespace detail {

inline Complex parse_complex(const nlohmann::json& j) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2)
    return Complex(j[0].get<double>(), j[1].get<double>());
  throw ConfigError("expected a number or [re, im] pair");
}

}  // namespace detail

inline OperatorCoefficients OperatorCoefficients::from_json(
    const nlohmann::json& j) {
  if (!j.contains("a2") || !j["a2"].is_array())
    throw ConfigError("operator: missing \"a2\" matrix");
  const auto& rows = j["a2"];
  const int n = static_cast<int>(rows.size());
  if (n != 2 && n != 3) throw ConfigError("operator: a2 must be 2x2 or 3x3");
  MatN a2;
  a2.n = n;
  for (int i = 0; i < n; ++i) {
    if (!rows[static_cast<std::size_t>(i)].is_array() ||
        static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != n)
      throw ConfigError("operator: a2 rows must have length n");
    for (int k = 0; k < n; ++k)
      a2(i, k) =
          rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]
              .get<double>();
  }
  std::array<Complex, 3> a1{Complex(0), Complex(0), Complex(0)};
  if (j.contains("a1")) {
    const auto& v = j["a1"];
    if (!v.is_array() || static_cast<int>(v.size()) != n)
      throw ConfigError("operator: a1 must have length n");
    for (int i = 0; i < n; ++i)
      a1[static_cast<std::size_t>(i)] =
          detail::parse_complex(v[static_cast<std::size_t>(i)]);
  }
  Complex a0(0.0, 0.0);
  if (j.contains("a0")) a0 = detail::parse_complex(j["a0"]);
  return from_second_order(n, a2, a1, a0);
}

}  // namespace miranda
