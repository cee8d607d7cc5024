#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "miranda/errors.hpp"
#include "miranda/geometry.hpp"
#include "miranda/kernels.hpp"
#include "miranda/operators.hpp"
#include "miranda/quadrature.hpp"

// Layer potentials over closed planar curves.
//
// Sign convention: the double layer is evaluated with the gradient
// kernel taken at (y - x),
//   w[mu](x) = int (a2 nu(y)) . (grad S)(x-y) mu(y) dsigma
//            - int (nu(y) . a1) S(x-y) mu(y) dsigma,
// which makes w[1] = -1 inside and 0 outside for the Laplacian. The
// derivative-reduction identities below carry the matching signs:
//   d_j v[mu]  =  v[rho_j] + w[sigma_j] + v[tau_j],
//     rho_j   = sum_r M_{rj}[(a2 nu)_r mu / q],   q = nu^t a2 nu,
//     sigma_j = nu_j mu / q,
//     tau_j   = (a1 . nu) nu_j mu / q,
//   d_j w[mu]  = -sum_{s,l} a_{ls} d_l v[M_{js}[mu]]
//                - (grad v[nu_j mu] . a1 + a0 v[nu_j mu])
//                - d_j v[(nu^t a1) mu].
// Both identities are exercised against independent computations of the
// left-hand sides in the test suites.

namespace miranda {

enum class QuadPolicy { automatic, plain };
enum class TraceSide { interior, exterior };

inline BoundaryKernel single_layer_kernel(const FundamentalSolution& fs) {
  return [&fs](Vec2 x, Vec2 y, Vec2) { return fs.value(make_vec(x - y)); };
}

inline BoundaryKernel grad_single_layer_kernel(const FundamentalSolution& fs,
                                               int j) {
  return [&fs, j](Vec2 x, Vec2 y, Vec2) {
    return fs.gradient(make_vec(x - y))[static_cast<std::size_t>(j)];
  };
}

inline BoundaryKernel double_layer_kernel(const OperatorCoefficients& c,
                                          const FundamentalSolution& fs) {
  return [&c, &fs](Vec2 x, Vec2 y, Vec2 nu) {
    const auto g = fs.gradient(make_vec(x - y));
    const Complex gradient_part =
        (c.a2(0, 0) * nu.x + c.a2(0, 1) * nu.y) * g[0] +
        (c.a2(1, 0) * nu.x + c.a2(1, 1) * nu.y) * g[1];
    Complex s = gradient_part;
    if (c.a1[0] != Complex(0) || c.a1[1] != Complex(0))
      s -= (nu.x * c.a1[0] + nu.y * c.a1[1]) * fs.value(make_vec(x - y));
    return s;
  };
}

/// A single or double layer potential with one fixed density; owns the
/// near-field resampling cache. The frame must outlive the object.
class LayerPotential {
 public:
  enum class Kind { single, double_layer };

  LayerPotential(Kind kind, const OperatorCoefficients& c,
                 const FundamentalSolution& fs, const BoundaryFrame& frame,
                 BoundaryDensity density)
      : kind_(kind),
        c_(c),
        fs_(fs),
        frame_(&frame),
        density_(std::make_shared<const BoundaryDensity>(std::move(density))),
        cache_(frame, density_),
        diameter_(frame.diameter()) {
    if (density_->values.size() != frame.point.size())
      throw ArgumentError("LayerPotential: density node count mismatch");
  }

  static LayerPotential single(const FundamentalSolution& fs,
                               const BoundaryFrame& frame,
                               BoundaryDensity density) {
    return LayerPotential(Kind::single, fs.op(), fs, frame,
                          std::move(density));
  }

  static LayerPotential double_layer(const OperatorCoefficients& c,
                                     const FundamentalSolution& fs,
                                     const BoundaryFrame& frame,
                                     BoundaryDensity density) {
    return LayerPotential(Kind::double_layer, c, fs, frame,
                          std::move(density));
  }

  const BoundaryDensity& density() const { return *density_; }
  const BoundaryFrame& frame() const { return *frame_; }
  const FundamentalSolution& fundamental_solution() const { return fs_; }
  const NearFieldCache& cache() const { return cache_; }

  Complex value(Vec2 x, QuadPolicy policy = QuadPolicy::automatic,
                const Classification* known = nullptr) const {
    const BoundaryKernel k = kind_ == Kind::single
                                 ? single_layer_kernel(fs_)
                                 : double_layer_kernel(c_, fs_);
    return integrate(k, x, policy, known);
  }

  /// Componentwise quadrature of the differentiated kernel; single
  /// layer only (the double-layer gradient goes through the reduction
  /// formula or finite differences).
  CVec2 gradient(Vec2 x, QuadPolicy policy = QuadPolicy::automatic,
                 const Classification* known = nullptr) const {
    if (kind_ != Kind::single)
      throw CapabilityError(
          "LayerPotential::gradient: direct kernel gradients are only "
          "implemented for the single layer");
    return CVec2{integrate(grad_single_layer_kernel(fs_, 0), x, policy, known),
                 integrate(grad_single_layer_kernel(fs_, 1), x, policy, known)};
  }

  Complex integrate(const BoundaryKernel& kernel, Vec2 x, QuadPolicy policy,
                    const Classification* known = nullptr) const {
    for (const Vec2& p : frame_->point)
      if (p.x == x.x && p.y == x.y)
        throw DomainError(
            "LayerPotential: evaluation on a boundary node (use the "
            "boundary_* operations)");
    if (policy == QuadPolicy::plain)
      return integrate_kernel_plain(*frame_, kernel, *density_, x);
    Classification cls = known ? *known : classify_point(*frame_, x);
    if (cls.cls != PointClass::near_boundary)
      return integrate_kernel_plain(*frame_, kernel, *density_, x);
    return near_singular_upsample(*frame_, *density_, kernel, x, cls.distance,
                                  0, &cache_, diameter_);
  }

 private:
  Kind kind_;
  OperatorCoefficients c_;
  FundamentalSolution fs_;
  const BoundaryFrame* frame_;
  std::shared_ptr<const BoundaryDensity> density_;
  NearFieldCache cache_;
  double diameter_;
};

inline Complex single_layer(const FundamentalSolution& fs,
                            const BoundaryFrame& frame,
                            const BoundaryDensity& mu, Vec2 x,
                            QuadPolicy policy = QuadPolicy::automatic) {
  return LayerPotential::single(fs, frame, mu).value(x, policy);
}

inline Complex double_layer(const OperatorCoefficients& c,
                            const FundamentalSolution& fs,
                            const BoundaryFrame& frame,
                            const BoundaryDensity& mu, Vec2 x,
                            QuadPolicy policy = QuadPolicy::automatic) {
  return LayerPotential::double_layer(c, fs, frame, mu).value(x, policy);
}

inline CVec2 grad_single_layer_direct(
    const FundamentalSolution& fs, const BoundaryFrame& frame,
    const BoundaryDensity& mu, Vec2 x,
    QuadPolicy policy = QuadPolicy::automatic) {
  return LayerPotential::single(fs, frame, mu).gradient(x, policy);
}

namespace detail {

/// nu^t a2 nu as an exact parameter callable; positive by ellipticity.
inline std::function<double(double)> conormal_quadratic(
    const OperatorCoefficients& c, const BoundaryCurve& curve) {
  // captured by value: the closure outlives the constructor arguments
  return [c, curve](double t) {
    const Vec2 nu = curve.outward_normal(t);
    return c.a2(0, 0) * nu.x * nu.x + 2.0 * c.a2(0, 1) * nu.x * nu.y +
           c.a2(1, 1) * nu.y * nu.y;
  };
}

inline std::function<Complex(double)> normal_component(
    const BoundaryCurve& curve, int j) {
  return [curve, j](double t) {
    const Vec2 nu = curve.outward_normal(t);
    return Complex(j == 0 ? nu.x : nu.y, 0.0);
  };
}

}  // namespace detail

/// Gradient of the single layer through the tangential-derivative
/// reduction; the density must be differentiable (tag c11 or cm1).
class ReducedSingleGradient {
 public:
  ReducedSingleGradient(const OperatorCoefficients& c,
                        const FundamentalSolution& fs,
                        const BoundaryFrame& frame, const BoundaryDensity& mu)
      : has_tau_(c.a1[0] != Complex(0) || c.a1[1] != Complex(0)) {
    if (mu.tag != Regularity::c11 && mu.tag != Regularity::cm1)
      throw CapabilityError(
          "ReducedSingleGradient: density must be C^1 (tag c11 or cm1)");
    const BoundaryCurve& curve = frame.curve;
    auto q = detail::conormal_quadratic(c, curve);

    // g_r = (a2 nu)_r mu / q
    std::array<BoundaryDensity, 2> g;
    for (int r = 0; r < 2; ++r) {
      g[static_cast<std::size_t>(r)] = density_scale(
          frame, mu, [c, curve, q, r](double t) {
            const Vec2 nu = curve.outward_normal(t);
            const double a2nu_r =
                c.a2(r, 0) * nu.x + c.a2(r, 1) * nu.y;
            return Complex(a2nu_r / q(t), 0.0);
          });
    }
    // rho_1 = M_21[g_2], rho_2 = M_12[g_1]
    BoundaryDensity rho1 = tangential_derivative(frame, g[1], 2, 1);
    BoundaryDensity rho2 = tangential_derivative(frame, g[0], 1, 2);
    v_rho_.emplace_back(LayerPotential::single(fs, frame, std::move(rho1)));
    v_rho_.emplace_back(LayerPotential::single(fs, frame, std::move(rho2)));

    for (int j = 0; j < 2; ++j) {
      BoundaryDensity sigma = density_scale(
          frame, mu, [curve, q, j](double t) {
            const Vec2 nu = curve.outward_normal(t);
            return Complex((j == 0 ? nu.x : nu.y) / q(t), 0.0);
          });
      w_sigma_.emplace_back(
          LayerPotential::double_layer(c, fs, frame, std::move(sigma)));
      if (has_tau_) {
        BoundaryDensity tau = density_scale(
            frame, mu, [c, curve, q, j](double t) {
              const Vec2 nu = curve.outward_normal(t);
              const Complex a1nu = c.a1[0] * nu.x + c.a1[1] * nu.y;
              return a1nu * (j == 0 ? nu.x : nu.y) / q(t);
            });
        v_tau_.emplace_back(
            LayerPotential::single(fs, frame, std::move(tau)));
      }
    }
  }

  CVec2 eval(Vec2 x, QuadPolicy policy = QuadPolicy::automatic,
             const Classification* known = nullptr) const {
    CVec2 out;
    std::array<Complex, 2> comp;
    for (int j = 0; j < 2; ++j) {
      Complex s = v_rho_[static_cast<std::size_t>(j)].value(x, policy, known);
      s += w_sigma_[static_cast<std::size_t>(j)].value(x, policy, known);
      if (has_tau_)
        s += v_tau_[static_cast<std::size_t>(j)].value(x, policy, known);
      comp[static_cast<std::size_t>(j)] = s;
    }
    out.x = comp[0];
    out.y = comp[1];
    return out;
  }

 private:
  bool has_tau_;
  std::vector<LayerPotential> v_rho_;
  std::vector<LayerPotential> w_sigma_;
  std::vector<LayerPotential> v_tau_;
};

inline CVec2 grad_single_layer_reduced(
    const OperatorCoefficients& c, const FundamentalSolution& fs,
    const BoundaryFrame& frame, const BoundaryDensity& mu, Vec2 x,
    QuadPolicy policy = QuadPolicy::automatic) {
  return ReducedSingleGradient(c, fs, frame, mu).eval(x, policy);
}

/// Gradient of the double layer through the reduction formula; the
/// density must be C^{1,1} (tag c11 or cm1).
class ReducedDoubleGradient {
 public:
  ReducedDoubleGradient(const OperatorCoefficients& c,
                        const FundamentalSolution& fs,
                        const BoundaryFrame& frame, const BoundaryDensity& mu)
      : c_(c),
        has_a1_(c.a1[0] != Complex(0) || c.a1[1] != Complex(0)),
        has_a0_(c.a0 != Complex(0)) {
    if (mu.tag != Regularity::c11 && mu.tag != Regularity::cm1)
      throw CapabilityError(
          "ReducedDoubleGradient: density must be C^{1,1} (tag c11 or cm1)");
    const BoundaryCurve& curve = frame.curve;
    BoundaryDensity m = tangential_derivative(frame, mu, 1, 2);
    v_m_ = std::make_unique<LayerPotential>(
        LayerPotential::single(fs, frame, std::move(m)));
    if (has_a1_ || has_a0_) {
      for (int j = 0; j < 2; ++j) {
        BoundaryDensity nuj_mu =
            density_scale(frame, mu, detail::normal_component(curve, j));
        v_nu_.emplace_back(
            LayerPotential::single(fs, frame, std::move(nuj_mu)));
      }
    }
    if (has_a1_) {
      BoundaryDensity nua1_mu = density_scale(
          frame, mu, [c, curve](double t) {
            const Vec2 nu = curve.outward_normal(t);
            return c.a1[0] * nu.x + c.a1[1] * nu.y;
          });
      v_nua1_ = std::make_unique<LayerPotential>(
          LayerPotential::single(fs, frame, std::move(nua1_mu)));
    }
  }

  CVec2 eval(Vec2 x, QuadPolicy policy = QuadPolicy::automatic,
             const Classification* known = nullptr) const {
    const CVec2 G = v_m_->gradient(x, policy, known);
    const Complex a2G_1 = c_.a2(0, 0) * G.x + c_.a2(0, 1) * G.y;
    const Complex a2G_2 = c_.a2(1, 0) * G.x + c_.a2(1, 1) * G.y;
    std::array<Complex, 2> comp{-a2G_2, a2G_1};
    if (has_a1_ || has_a0_) {
      for (int j = 0; j < 2; ++j) {
        Complex t(0.0, 0.0);
        if (has_a1_) {
          const CVec2 Gn =
              v_nu_[static_cast<std::size_t>(j)].gradient(x, policy, known);
          t += Gn.x * c_.a1[0] + Gn.y * c_.a1[1];
        }
        if (has_a0_)
          t += c_.a0 *
               v_nu_[static_cast<std::size_t>(j)].value(x, policy, known);
        comp[static_cast<std::size_t>(j)] -= t;
      }
    }
    if (has_a1_) {
      const CVec2 Gq = v_nua1_->gradient(x, policy, known);
      comp[0] -= Gq.x;
      comp[1] -= Gq.y;
    }
    return CVec2{comp[0], comp[1]};
  }

 private:
  OperatorCoefficients c_;
  bool has_a1_;
  bool has_a0_;
  std::unique_ptr<LayerPotential> v_m_;
  std::vector<LayerPotential> v_nu_;
  std::unique_ptr<LayerPotential> v_nua1_;
};

inline CVec2 grad_double_layer_reduced(
    const OperatorCoefficients& c, const FundamentalSolution& fs,
    const BoundaryFrame& frame, const BoundaryDensity& mu, Vec2 x,
    QuadPolicy policy = QuadPolicy::automatic) {
  return ReducedDoubleGradient(c, fs, frame, mu).eval(x, policy);
}

/// Single layer evaluated at a boundary node through the logarithmic
/// product rule: the kernel is split per family as
/// S = A ln(4 sin^2((t - tau)/2)) + B with smooth A, B.
inline Complex boundary_single_layer(const FundamentalSolution& fs,
                                     const BoundaryFrame& frame,
                                     const BoundaryDensity& mu, int node) {
  const int N = frame.N;
  if (node < 0 || node >= N)
    throw ArgumentError("boundary_single_layer: node out of range");
  std::vector<Complex> A(static_cast<std::size_t>(N)), B(A.size());
  const Vec2 x = frame.point[static_cast<std::size_t>(node)];
  for (int j = 0; j < N; ++j) {
    const Complex muw = mu.values[static_cast<std::size_t>(j)] *
                        frame.speed[static_cast<std::size_t>(j)];
    if (j == node) {
      A[static_cast<std::size_t>(j)] =
          fs.log_coefficient(0.0) * muw;
      B[static_cast<std::size_t>(j)] =
          fs.smooth_diagonal(frame.curve.derivative(frame.t[j])) * muw;
      continue;
    }
    const Vec2 y = frame.point[static_cast<std::size_t>(j)];
    const double chord = norm(x - y);
    const double dt = frame.t[static_cast<std::size_t>(node)] -
                      frame.t[static_cast<std::size_t>(j)];
    const double log4sin2 =
        std::log(4.0 * std::sin(dt / 2.0) * std::sin(dt / 2.0));
    const Complex a = fs.log_coefficient(chord);
    A[static_cast<std::size_t>(j)] = a * muw;
    B[static_cast<std::size_t>(j)] =
        (fs.value(make_vec(x - y)) - a * log4sin2) * muw;
  }
  return integrate_log_singular(frame, A, B, node);
}

/// Double layer evaluated at a boundary node (principal value). The
/// gradient part of the kernel is bounded on C^{1,1} curves and is
/// integrated by the trapezoid with the curvature limit
/// -kappa sqrt(det a2) / (4 pi nu^t a2 nu) on the diagonal; a nonzero
/// a1 adds a log-singular single-layer part handled by the product
/// rule.
inline Complex boundary_double_layer(const OperatorCoefficients& c,
                                     const FundamentalSolution& fs,
                                     const BoundaryFrame& frame,
                                     const BoundaryDensity& mu, int node) {
  const int N = frame.N;
  if (node < 0 || node >= N)
    throw ArgumentError("boundary_double_layer: node out of range");
  const Vec2 x = frame.point[static_cast<std::size_t>(node)];
  Complex s(0.0, 0.0);
  for (int j = 0; j < N; ++j) {
    Complex kval;
    if (j == node) {
      const Vec2 nu = frame.normal[static_cast<std::size_t>(j)];
      const double q = c.a2(0, 0) * nu.x * nu.x +
                       2.0 * c.a2(0, 1) * nu.x * nu.y +
                       c.a2(1, 1) * nu.y * nu.y;
      kval = Complex(-frame.curvature[static_cast<std::size_t>(j)] *
                         std::sqrt(det(c.a2)) / (2.0 * kTwoPi * q),
                     0.0);
    } else {
      const Vec2 y = frame.point[static_cast<std::size_t>(j)];
      const Vec2 nu = frame.normal[static_cast<std::size_t>(j)];
      const auto g = fs.gradient(make_vec(x - y));
      kval = (c.a2(0, 0) * nu.x + c.a2(0, 1) * nu.y) * g[0] +
             (c.a2(1, 0) * nu.x + c.a2(1, 1) * nu.y) * g[1];
    }
    s += kval * mu.values[static_cast<std::size_t>(j)] *
         frame.weight[static_cast<std::size_t>(j)];
  }
  if (c.a1[0] != Complex(0) || c.a1[1] != Complex(0)) {
    std::vector<Complex> A(static_cast<std::size_t>(N)), B(A.size());
    for (int j = 0; j < N; ++j) {
      const Vec2 nu = frame.normal[static_cast<std::size_t>(j)];
      const Complex nua1 = nu.x * c.a1[0] + nu.y * c.a1[1];
      const Complex f = -nua1 * mu.values[static_cast<std::size_t>(j)] *
                        frame.speed[static_cast<std::size_t>(j)];
      if (j == node) {
        A[static_cast<std::size_t>(j)] = fs.log_coefficient(0.0) * f;
        B[static_cast<std::size_t>(j)] =
            fs.smooth_diagonal(frame.curve.derivative(frame.t[j])) * f;
        continue;
      }
      const Vec2 y = frame.point[static_cast<std::size_t>(j)];
      const double chord = norm(x - y);
      const double dt = frame.t[static_cast<std::size_t>(node)] -
                        frame.t[static_cast<std::size_t>(j)];
      const double log4sin2 =
          std::log(4.0 * std::sin(dt / 2.0) * std::sin(dt / 2.0));
      const Complex a = fs.log_coefficient(chord);
      A[static_cast<std::size_t>(j)] = a * f;
      B[static_cast<std::size_t>(j)] =
          (fs.value(make_vec(x - y)) - a * log4sin2) * f;
    }
    s += integrate_log_singular(frame, A, B, node);
  }
  return s;
}

struct TraceResult {
  Complex limit{0.0, 0.0};
  double error_estimate = 0.0;
  double est_order = 0.0;
  bool converged = false;
};

/// One-sided boundary value by Richardson/Aitken extrapolation of the
/// field along inward (side interior) or outward offsets
/// h = h0 2^{-j}. Default h0 = 10 (2 pi / N) max|gamma'|.
inline TraceResult boundary_trace(const std::function<Complex(Vec2)>& field,
                                  const BoundaryFrame& frame, int node,
                                  TraceSide side, double h0 = -1.0,
                                  int levels = 9) {
  if (node < 0 || node >= frame.N)
    throw ArgumentError("boundary_trace: node out of range");
  if (levels < 4) throw ArgumentError("boundary_trace: need >= 4 levels");
  if (h0 <= 0.0) h0 = 10.0 * kTwoPi / frame.N * frame.max_speed();
  const Vec2 p = frame.point[static_cast<std::size_t>(node)];
  const Vec2 nu = frame.normal[static_cast<std::size_t>(node)];
  const double sgn = side == TraceSide::interior ? -1.0 : 1.0;
  std::vector<Complex> f(static_cast<std::size_t>(levels));
  for (int j = 0; j < levels; ++j) {
    const double h = h0 * std::pow(2.0, -j);
    f[static_cast<std::size_t>(j)] = field(p + sgn * h * nu);
  }
  const double first_delta = std::abs(f[1] - f[0]);
  const double last_delta =
      std::abs(f[static_cast<std::size_t>(levels - 1)] -
               f[static_cast<std::size_t>(levels - 2)]);
  TraceResult r;
  {
    // Near-constant fields (or a quiet interior stretch followed by
    // evaluation noise at the smallest offsets): the differences carry
    // no trend. Return the value at the quietest ladder position.
    double scale = 0.0, variation = 0.0;
    for (const Complex& v : f) scale = std::max(scale, std::abs(v));
    for (int j = 1; j < levels; ++j)
      variation += std::abs(f[static_cast<std::size_t>(j)] -
                            f[static_cast<std::size_t>(j - 1)]);
    std::size_t best = 1;
    double best_local = std::numeric_limits<double>::max();
    for (std::size_t j = 1; j + 1 < f.size(); ++j) {
      const double local =
          std::abs(f[j + 1] - f[j]) + std::abs(f[j] - f[j - 1]);
      if (local < best_local) {
        best_local = local;
        best = j;
      }
    }
    if (variation <= 1e-6 * scale + 1e-13 ||
        best_local <= 1e-4 * variation) {
      r.limit = f[best];
      r.error_estimate = best_local;
      r.est_order = 0.0;
      r.converged = true;
      return r;
    }
  }
  {
    // order estimate from the tail of the raw sequence
    double num = std::abs(f[static_cast<std::size_t>(levels - 2)] -
                          f[static_cast<std::size_t>(levels - 3)]);
    if (last_delta > 0.0 && num > 0.0)
      r.est_order = std::log2(num / last_delta);
  }
  // two Aitken passes
  std::vector<Complex> cur = f;
  for (int pass = 0; pass < 2 && cur.size() >= 3; ++pass) {
    std::vector<Complex> next;
    for (std::size_t i = 0; i + 2 < cur.size(); ++i) {
      const Complex d1 = cur[i + 1] - cur[i];
      const Complex d2 = cur[i + 2] - cur[i + 1];
      const Complex den = d2 - d1;
      if (std::abs(den) < 1e-300) {
        next.push_back(cur[i + 2]);
      } else {
        next.push_back(cur[i + 2] - d2 * d2 / den);
      }
    }
    cur = std::move(next);
  }
  r.limit = cur.back();
  r.error_estimate =
      cur.size() >= 2 ? std::abs(cur.back() - cur[cur.size() - 2]) : last_delta;
  r.converged = last_delta < first_delta || last_delta == 0.0;
  if (!r.converged)
    throw TraceError(
        "boundary_trace: extrapolation not converging (|delta| first " +
        format_double(first_delta) + ", last " + format_double(last_delta) +
        ", est order " + format_double(r.est_order) + ")");
  return r;
}

/// Density padded by zero on the auxiliary circle containing the
/// domain.
struct PaddedDensity {
  BoundaryDensity inner;  // on the curve
  BoundaryDensity outer;  // identically zero on the circle of radius r
  double radius = 0.0;

  static PaddedDensity make(const BoundaryFrame& frame,
                            const BoundaryDensity& mu, double radius,
                            const BoundaryFrame& outer_frame) {
    double max_r = 0.0;
    for (const Vec2& p : frame.point) max_r = std::max(max_r, norm(p));
    if (max_r >= radius)
      throw ArgumentError(
          "PaddedDensity: domain closure not contained in the ball");
    PaddedDensity pd;
    pd.inner = mu;
    pd.outer.values.assign(outer_frame.point.size(), Complex(0.0, 0.0));
    pd.outer.fn = [](double) { return Complex(0.0, 0.0); };
    pd.outer.tag = Regularity::cm1;
    pd.radius = radius;
    return pd;
  }
};

struct ExteriorReductionResult {
  double max_defect = 0.0;
  double max_outer_contribution = 0.0;
};

/// Checks w_Omega^- restricted to the annulus B(0,r) \ closure(Omega)
/// against the annulus double layer with the padded density: the
/// annulus outward normal is -nu on the curve, and the circle
/// component carries the zero density. Reports the worst
/// |w_Omega(x) + w_annulus(x)| over the supplied points.
inline ExteriorReductionResult exterior_reduction_check(
    const OperatorCoefficients& c, const FundamentalSolution& fs,
    const BoundaryFrame& frame, const BoundaryDensity& mu, double radius,
    const std::vector<Vec2>& points) {
  BoundaryFrame outer = make_frame(BoundaryCurve::ellipse(radius, radius),
                                   frame.N);
  const PaddedDensity pd = PaddedDensity::make(frame, mu, radius, outer);
  const BoundaryKernel kw = double_layer_kernel(c, fs);
  ExteriorReductionResult r;
  for (const Vec2& x : points) {
    const Classification cl = classify_point(frame, x);
    if (cl.cls == PointClass::inside || norm(x) >= radius)
      throw ArgumentError(
          "exterior_reduction_check: point not inside the annulus");
    const Complex w_omega =
        integrate_kernel_plain(frame, kw, pd.inner, x);
    // annulus component on the curve: outward normal flipped
    Complex w_ann(0.0, 0.0);
    for (int i = 0; i < frame.N; ++i)
      w_ann += kw(x, frame.point[static_cast<std::size_t>(i)],
                  -frame.normal[static_cast<std::size_t>(i)]) *
               pd.inner.values[static_cast<std::size_t>(i)] *
               frame.weight[static_cast<std::size_t>(i)];
    const Complex w_outer =
        integrate_kernel_plain(outer, kw, pd.outer, x);
    w_ann += w_outer;
    r.max_outer_contribution =
        std::max(r.max_outer_contribution, std::abs(w_outer));
    r.max_defect = std::max(r.max_defect, std::abs(w_omega + w_ann));
  }
  return r;
}

}  // namespace miranda
