#pragma once

#include <array>
#include <functional>

#include "miranda/linalg.hpp"
#include "miranda/operators.hpp"

// Fourth-order central finite differences with one Richardson step
// (h, h/2 combined with weight 16/15), used for PDE-residual sweeps and
// as an independent oracle against analytic gradients.

namespace miranda {

using FieldFn = std::function<Complex(const VecN&)>;

struct FdDerivatives {
  Complex value{0.0, 0.0};
  std::array<Complex, 3> gradient{};
  std::array<std::array<Complex, 3>, 3> hessian{};
};

namespace detail {

inline VecN shifted(VecN x, int j, double d) {
  x[j] += d;
  return x;
}

inline FdDerivatives fd_pass(const FieldFn& f, const VecN& x, double h) {
  FdDerivatives r;
  r.value = f(x);
  for (int j = 0; j < x.n; ++j) {
    const Complex fm2 = f(shifted(x, j, -2.0 * h));
    const Complex fm1 = f(shifted(x, j, -h));
    const Complex fp1 = f(shifted(x, j, h));
    const Complex fp2 = f(shifted(x, j, 2.0 * h));
    r.gradient[static_cast<std::size_t>(j)] =
        (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
    r.hessian[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)] =
        (-fm2 + 16.0 * fm1 - 30.0 * r.value + 16.0 * fp1 - fp2) /
        (12.0 * h * h);
  }
  for (int j = 0; j < x.n; ++j)
    for (int l = j + 1; l < x.n; ++l) {
      auto cross4 = [&](double s) {
        const Complex a = f(shifted(shifted(x, j, s), l, s));
        const Complex b = f(shifted(shifted(x, j, -s), l, -s));
        const Complex c = f(shifted(shifted(x, j, s), l, -s));
        const Complex d = f(shifted(shifted(x, j, -s), l, s));
        return (a + b - c - d) / (4.0 * s * s);
      };
      const Complex d1 = cross4(h);
      const Complex d2 = cross4(2.0 * h);
      const Complex m = (4.0 * d1 - d2) / 3.0;
      r.hessian[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)] = m;
      r.hessian[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)] = m;
    }
  return r;
}

}  // namespace detail

/// Derivatives at x with step h; `richardson` combines passes at h and
/// h/2 for two extra orders.
inline FdDerivatives fd_derivatives(const FieldFn& f, const VecN& x, double h,
                                    bool richardson = true) {
  FdDerivatives a = detail::fd_pass(f, x, h);
  if (!richardson) return a;
  FdDerivatives b = detail::fd_pass(f, x, h / 2.0);
  FdDerivatives r;
  r.value = b.value;
  for (int j = 0; j < x.n; ++j) {
    r.gradient[static_cast<std::size_t>(j)] =
        (16.0 * b.gradient[static_cast<std::size_t>(j)] -
         a.gradient[static_cast<std::size_t>(j)]) /
        15.0;
    for (int l = 0; l < x.n; ++l)
      r.hessian[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)] =
          (16.0 * b.hessian[static_cast<std::size_t>(j)]
                           [static_cast<std::size_t>(l)] -
           a.hessian[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)]) /
          15.0;
  }
  return r;
}

/// Step scaling eps^(1/6) |x| balancing truncation against rounding
/// near a kernel singularity at the origin.
inline double fd_step_for(const VecN& x) {
  const double eps = std::numeric_limits<double>::epsilon();
  return std::pow(eps, 1.0 / 6.0) * std::max(norm(x), 1e-3);
}

struct PdeResidual {
  double residual = 0.0;  // |P[a,D] f(x)|
  double scale = 0.0;     // sum of term magnitudes before cancellation
};

/// Finite-difference application of P[a,D] to a field, returning the
/// residual together with the local field scale (the size of the
/// individual terms, so callers can judge relative cancellation).
inline PdeResidual pde_residual(const OperatorCoefficients& c,
                                const FieldFn& f, const VecN& x, double h) {
  const FdDerivatives d = fd_derivatives(f, x, h);
  const Complex r = apply_P(c, d.value, d.gradient, d.hessian);
  PdeResidual out;
  out.residual = std::abs(r);
  out.scale = std::abs(c.a0) * std::abs(d.value);
  for (int l = 0; l < c.n; ++l) {
    out.scale += std::abs(c.a1[static_cast<std::size_t>(l)]) *
                 std::abs(d.gradient[static_cast<std::size_t>(l)]);
    for (int j = 0; j < c.n; ++j)
      out.scale += std::abs(c.a2(l, j)) *
                   std::abs(d.hessian[static_cast<std::size_t>(l)]
                                     [static_cast<std::size_t>(j)]);
  }
  return out;
}

/// Residual with step optimization: sweeps a sqrt(2)-spaced ladder
/// around h0 and keeps the step with the smallest
/// truncation-plus-rounding error.
inline PdeResidual pde_residual_optimized(const OperatorCoefficients& c,
                                          const FieldFn& f, const VecN& x,
                                          double h0, int levels = 15) {
  PdeResidual best;
  best.residual = std::numeric_limits<double>::max();
  for (int k = 0; k < levels; ++k) {
    const double h = h0 * 8.0 * std::pow(std::sqrt(0.5), k);
    const PdeResidual r = pde_residual(c, f, x, h);
    if (r.residual < best.residual) best = r;
  }
  return best;
}

}  // namespace miranda
