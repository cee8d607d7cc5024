#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "miranda/bessel.hpp"
#include "miranda/errors.hpp"
#include "miranda/linalg.hpp"
#include "miranda/operators.hpp"

namespace miranda {

enum class KernelFamily { laplace, anisotropic_principal, yukawa, helmholtz };

inline std::string family_name(KernelFamily f) {
  switch (f) {
    case KernelFamily::laplace:
      return "laplace";
    case KernelFamily::anisotropic_principal:
      return "anisotropic_principal";
    case KernelFamily::yukawa:
      return "yukawa";
    case KernelFamily::helmholtz:
      return "helmholtz";
  }
  return "?";
}

/// Surface measure of the unit sphere in R^n.
inline double sphere_measure(int n) {
  return n == 2 ? kTwoPi : 2.0 * kTwoPi;
}

/// Fundamental solution S_n of the Laplacian: ln|x|/(2 pi) in the
/// plane, -1/(4 pi |x|) in space.
inline double laplace_value(int n, const VecN& x) {
  const double r = norm(x);
  if (r == 0.0) throw DomainError("laplace_value: evaluation at the origin");
  if (n == 2) return std::log(r) / kTwoPi;
  return -1.0 / (2.0 * kTwoPi * r);
}

/// Closed-form fundamental solution of one of the supported operator
/// families, with the structural decomposition into the principal term
/// S_n(T^{-1} x) / sqrt(det a2), its gradient row J, and the remainder
/// k_j = d_j S - J_j.
class FundamentalSolution {
 public:
  static FundamentalSolution laplace(int n = 2) {
    FundamentalSolution f;
    f.family_ = KernelFamily::laplace;
    f.op_ = OperatorCoefficients::laplace(n);
    f.fac_ = factorize(f.op_);
    return f;
  }

  /// Principal part only: a1 = 0, a0 = 0, general SPD a2.
  static FundamentalSolution anisotropic(const MatN& a2, int n = 2) {
    FundamentalSolution f;
    f.family_ = KernelFamily::anisotropic_principal;
    f.op_ = OperatorCoefficients::make(n, a2);
    ellipticity_margin(f.op_);
    f.fac_ = factorize(f.op_);
    return f;
  }

  /// Laplace - k^2.
  static FundamentalSolution yukawa(double k, int n = 2) {
    if (!(k > 0.0)) throw ArgumentError("yukawa: k must be positive");
    FundamentalSolution f;
    f.family_ = KernelFamily::yukawa;
    f.op_ = OperatorCoefficients::laplace(n);
    f.op_.a0 = Complex(-k * k, 0.0);
    f.fac_ = factorize(f.op_);
    f.k_ = k;
    return f;
  }

  /// Laplace + k^2, complex-valued kernel.
  static FundamentalSolution helmholtz(double k, int n = 2) {
    if (!(k > 0.0)) throw ArgumentError("helmholtz: k must be positive");
    FundamentalSolution f;
    f.family_ = KernelFamily::helmholtz;
    f.op_ = OperatorCoefficients::laplace(n);
    f.op_.a0 = Complex(k * k, 0.0);
    f.fac_ = factorize(f.op_);
    f.k_ = k;
    return f;
  }

  KernelFamily family() const { return family_; }
  const OperatorCoefficients& op() const { return op_; }
  const Factorization& factorization() const { return fac_; }
  double wavenumber() const { return k_; }
  int dim() const { return op_.n; }

  Complex value(const VecN& x) const {
    const double r = norm(x);
    if (r == 0.0)
      throw DomainError("FundamentalSolution: evaluation at the singularity");
    switch (family_) {
      case KernelFamily::laplace:
        return Complex(laplace_value(op_.n, x), 0.0);
      case KernelFamily::anisotropic_principal:
        return Complex(principal_value(x), 0.0);
      case KernelFamily::yukawa:
        if (op_.n == 2) return Complex(-bessel_k0(k_ * r) / kTwoPi, 0.0);
        return Complex(-std::exp(-k_ * r) / (2.0 * kTwoPi * r), 0.0);
      case KernelFamily::helmholtz:
        if (op_.n == 2) {
          const double z = k_ * r;
          return Complex(0.25 * std::cyl_neumann(0, z),
                         -0.25 * std::cyl_bessel_j(0, z));
        }
        return -std::exp(Complex(0.0, k_ * r)) / (2.0 * kTwoPi * r);
    }
    return Complex(0.0, 0.0);
  }

  std::array<Complex, 3> gradient(const VecN& x) const {
    const double r = norm(x);
    if (r == 0.0)
      throw DomainError("FundamentalSolution: evaluation at the singularity");
    std::array<Complex, 3> g{Complex(0), Complex(0), Complex(0)};
    switch (family_) {
      case KernelFamily::laplace: {
        const double c =
            op_.n == 2 ? 1.0 / (kTwoPi * r * r) : 1.0 / (2.0 * kTwoPi * r * r * r);
        for (int j = 0; j < op_.n; ++j)
          g[static_cast<std::size_t>(j)] = Complex(c * x[j], 0.0);
        return g;
      }
      case KernelFamily::anisotropic_principal: {
        const auto row = principal_gradient_row(x);
        for (int j = 0; j < op_.n; ++j)
          g[static_cast<std::size_t>(j)] =
              Complex(row[static_cast<std::size_t>(j)], 0.0);
        return g;
      }
      case KernelFamily::yukawa: {
        double c;
        if (op_.n == 2) {
          c = k_ * bessel_k1(k_ * r) / (kTwoPi * r);
        } else {
          c = std::exp(-k_ * r) * (1.0 + k_ * r) /
              (2.0 * kTwoPi * r * r * r);
        }
        for (int j = 0; j < op_.n; ++j)
          g[static_cast<std::size_t>(j)] = Complex(c * x[j], 0.0);
        return g;
      }
      case KernelFamily::helmholtz: {
        Complex c;
        if (op_.n == 2) {
          const double z = k_ * r;
          c = 0.25 * k_ / r *
              Complex(-std::cyl_neumann(1, z), std::cyl_bessel_j(1, z));
        } else {
          c = std::exp(Complex(0.0, k_ * r)) * Complex(1.0, -k_ * r) /
              (2.0 * kTwoPi * r * r * r);
        }
        for (int j = 0; j < op_.n; ++j)
          g[static_cast<std::size_t>(j)] = c * x[j];
        return g;
      }
    }
    return g;
  }

  /// S_n(T^{-1} x) / sqrt(det a2), the fundamental solution of the
  /// principal part.
  double principal_value(const VecN& x) const {
    const VecN y = t_inverse(x);
    return laplace_value(op_.n, y) / std::sqrt(fac_.det_a2);
  }

  /// J_j(x) = |T^{-1}x|^{-n} (x^t a2^{-1})_j / (s_n sqrt(det a2));
  /// equals the exact gradient of principal_value.
  std::array<double, 3> principal_gradient_row(const VecN& x) const {
    const double r = norm(t_inverse(x));
    if (r == 0.0)
      throw DomainError("principal_gradient_row: evaluation at the origin");
    const MatN a2inv = inverse(op_.a2);
    const VecN w = mat_vec(a2inv, x);
    const double c = 1.0 / (sphere_measure(op_.n) * std::sqrt(fac_.det_a2) *
                            std::pow(r, op_.n));
    std::array<double, 3> row{0.0, 0.0, 0.0};
    for (int j = 0; j < op_.n; ++j)
      row[static_cast<std::size_t>(j)] = c * w[j];
    return row;
  }

  /// k_j(x) = d_j S(x) - J_j(x). Identically zero for the homogeneous
  /// families; evaluated without cancellation for the Yukawa family.
  std::array<Complex, 3> gradient_remainder(const VecN& x) const {
    std::array<Complex, 3> rem{Complex(0), Complex(0), Complex(0)};
    if (family_ == KernelFamily::laplace ||
        family_ == KernelFamily::anisotropic_principal)
      return rem;
    const double r = norm(x);
    if (r == 0.0)
      throw DomainError("gradient_remainder: evaluation at the singularity");
    if (family_ == KernelFamily::yukawa) {
      double c;
      if (op_.n == 2) {
        c = k_ * bessel_k1_minus_recip(k_ * r) / (kTwoPi * r);
      } else {
        const double z = k_ * r;
        // (1 + z) e^{-z} - 1, stable for small z
        const double num = std::expm1(-z) + z * std::exp(-z);
        c = num / (2.0 * kTwoPi * r * r * r);
      }
      for (int j = 0; j < op_.n; ++j)
        rem[static_cast<std::size_t>(j)] = Complex(c * x[j], 0.0);
      return rem;
    }
    const auto g = gradient(x);
    const auto j = principal_gradient_row(x);
    for (int i = 0; i < op_.n; ++i)
      rem[static_cast<std::size_t>(i)] =
          g[static_cast<std::size_t>(i)] -
          Complex(j[static_cast<std::size_t>(i)], 0.0);
    return rem;
  }

  /// Coefficient A(t,tau) of ln(4 sin^2((t-tau)/2)) in the kernel
  /// splitting S(x(t) - y(tau)) = A ln(4 sin^2) + B on a planar curve,
  /// as a function of the chord length |x - y|.
  Complex log_coefficient(double chord) const {
    switch (family_) {
      case KernelFamily::laplace:
        return Complex(1.0 / (2.0 * kTwoPi), 0.0);
      case KernelFamily::anisotropic_principal:
        return Complex(1.0 / (2.0 * kTwoPi * std::sqrt(fac_.det_a2)), 0.0);
      case KernelFamily::yukawa:
        return Complex(bessel_i0(k_ * chord) / (2.0 * kTwoPi), 0.0);
      case KernelFamily::helmholtz:
        return Complex(std::cyl_bessel_j(0, k_ * chord) / (2.0 * kTwoPi),
                       0.0);
    }
    return Complex(0.0, 0.0);
  }

  /// Diagonal value B(t,t) of the smooth part, given the curve tangent
  /// gamma'(t) at the node.
  Complex smooth_diagonal(Vec2 tangent) const {
    const double speed = norm(tangent);
    switch (family_) {
      case KernelFamily::laplace:
        return Complex(std::log(speed) / kTwoPi, 0.0);
      case KernelFamily::anisotropic_principal: {
        const VecN w = t_inverse(make_vec(tangent));
        return Complex(std::log(norm(w)) / (kTwoPi * std::sqrt(fac_.det_a2)),
                       0.0);
      }
      case KernelFamily::yukawa:
        return Complex(
            (std::log(k_ * speed / 2.0) + kEulerGamma) / kTwoPi, 0.0);
      case KernelFamily::helmholtz:
        return Complex((std::log(k_ * speed / 2.0) + kEulerGamma) / kTwoPi,
                       -0.25);
    }
    return Complex(0.0, 0.0);
  }

 private:
  VecN t_inverse(const VecN& x) const {
    // forward substitution with the lower-triangular factor
    VecN y;
    y.n = op_.n;
    for (int i = 0; i < op_.n; ++i) {
      double s = x[i];
      for (int j = 0; j < i; ++j) s -= fac_.T(i, j) * y[j];
      y[i] = s / fac_.T(i, i);
    }
    return y;
  }

  KernelFamily family_ = KernelFamily::laplace;
  OperatorCoefficients op_;
  Factorization fac_;
  double k_ = 0.0;
};

enum class KernelParity { odd, even_mean_zero, general };

/// Positively homogeneous kernel with a parity tag, as sampled data for
/// the class membership checks.
struct HomogeneousKernel {
  double degree = 0.0;
  KernelParity parity = KernelParity::general;
  std::function<Complex(const VecN&)> value;
  int n = 2;
  int m = 1;
  double alpha = 1.0;
};

struct HomogeneityReport {
  double homogeneity_defect = 0.0;
  double parity_defect = 0.0;
  double sphere_mean_abs = 0.0;
  bool parity_ok = true;
};

/// Samples value(lambda x) against lambda^h value(x) on the unit
/// sphere, the tagged parity under x -> -x, and (n = 2) the sphere mean
/// by the trapezoidal rule.
inline HomogeneityReport homogeneity_parity_check(
    const HomogeneousKernel& k, int sphere_samples = 256,
    const std::vector<double>& scales = {0.1, 0.3, 1.0, 3.0, 10.0}) {
  HomogeneityReport rep;
  if (k.n != 2 && k.n != 3)
    throw ArgumentError("homogeneity_parity_check: n must be 2 or 3");
  std::vector<VecN> sphere;
  if (k.n == 2) {
    for (int i = 0; i < sphere_samples; ++i) {
      const double th = kTwoPi * i / sphere_samples;
      sphere.push_back(make_vec(std::cos(th), std::sin(th)));
    }
  } else {
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    for (int i = 0; i < sphere_samples; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / sphere_samples;
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = kTwoPi * i / golden;
      sphere.push_back(make_vec(rho * std::cos(phi), rho * std::sin(phi), z));
    }
  }
  Complex mean(0.0, 0.0);
  for (const VecN& u : sphere) {
    const Complex ku = k.value(u);
    mean += ku;
    const Complex kneg = k.value(-u);
    const double denom = std::max(std::abs(ku), 1e-300);
    if (k.parity == KernelParity::odd)
      rep.parity_defect =
          std::max(rep.parity_defect, std::abs(kneg + ku) / denom);
    else if (k.parity == KernelParity::even_mean_zero)
      rep.parity_defect =
          std::max(rep.parity_defect, std::abs(kneg - ku) / denom);
    for (double lam : scales) {
      const Complex scaled = k.value(lam * u);
      const Complex expect = std::pow(lam, k.degree) * ku;
      rep.homogeneity_defect =
          std::max(rep.homogeneity_defect,
                   std::abs(scaled - expect) /
                       std::max(std::abs(expect), 1e-300));
    }
  }
  rep.sphere_mean_abs =
      std::abs(mean) * sphere_measure(k.n) / sphere.size();
  if (k.parity != KernelParity::general && rep.parity_defect > 1e-10)
    rep.parity_ok = false;
  if (k.parity == KernelParity::even_mean_zero &&
      rep.sphere_mean_abs > 1e-8)
    rep.parity_ok = false;
  return rep;
}

struct KernelClassNormEstimate {
  double s1 = 0.0, s2 = 0.0, s3 = 0.0;
  double term1 = 0.0;  // sup |x-y|^{s1} |K(x,y)|
  double term2 = 0.0;  // sup of the excluded-ball difference quotient
  std::size_t pairs = 0;
  std::size_t triples = 0;
  std::string note = "estimate (lower bound of the supremum)";
};

using TwoPointKernel = std::function<Complex(const VecN&, const VecN&)>;

/// Sampled lower bound of the potential-type class norm
/// ||K||_{s1,s2,s3}: the first supremum runs over all sampled pairs
/// x != y, the second over triples (x', x'', y) with y outside the
/// ball B(x', 2|x' - x''|).
inline KernelClassNormEstimate kernel_class_norm(const TwoPointKernel& K,
                                                 const std::vector<VecN>& X,
                                                 const std::vector<VecN>& Y,
                                                 double s1, double s2,
                                                 double s3) {
  KernelClassNormEstimate e;
  e.s1 = s1;
  e.s2 = s2;
  e.s3 = s3;
  for (const VecN& x : X)
    for (const VecN& y : Y) {
      const double d = norm(x - y);
      if (d == 0.0) continue;
      ++e.pairs;
      e.term1 = std::max(e.term1, std::pow(d, s1) * std::abs(K(x, y)));
    }
  if (e.pairs == 0)
    throw ArgumentError("kernel_class_norm: no admissible pairs");
  for (std::size_t i = 0; i < X.size(); ++i)
    for (std::size_t j = 0; j < X.size(); ++j) {
      if (i == j) continue;
      const double dxx = norm(X[i] - X[j]);
      if (dxx == 0.0) continue;
      for (const VecN& y : Y) {
        const double dy = norm(X[i] - y);
        if (dy < 2.0 * dxx) continue;
        ++e.triples;
        const double q = std::pow(dy, s2) / std::pow(dxx, s3) *
                         std::abs(K(X[i], y) - K(X[j], y));
        e.term2 = std::max(e.term2, q);
      }
    }
  if (e.triples == 0)
    throw ArgumentError("kernel_class_norm: no admissible triples");
  return e;
}

}  // namespace miranda
