#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "miranda/errors.hpp"
#include "miranda/geometry.hpp"
#include "miranda/linalg.hpp"

namespace miranda {

/// Periodic trapezoid against the arc weights: sum f_i dsigma_i.
/// Spectrally accurate for analytic integrands on analytic curves.
inline Complex integrate_smooth(const BoundaryFrame& frame,
                                const std::vector<Complex>& values) {
  if (values.size() != frame.weight.size())
    throw ArgumentError("integrate_smooth: node count mismatch");
  Complex s(0.0, 0.0);
  for (std::size_t i = 0; i < values.size(); ++i)
    s += values[i] * frame.weight[i];
  return s;
}

/// Weights R_d of the Kress quadrature for
///   int_0^{2pi} ln(4 sin^2((t - t_star)/2)) A(t) dt,
/// indexed by the node offset d = (i_star - j) mod N. Exact for
/// trigonometric polynomials of degree <= N/2; built from the Fourier
/// expansion ln(4 sin^2(s/2)) = -sum_m 2 cos(m s)/m.
inline std::vector<double> kress_log_weights(int N) {
  if (N < 4 || N % 2 != 0)
    throw ArgumentError("kress_log_weights: N must be even, >= 4");
  const int half = N / 2;
  std::vector<double> R(static_cast<std::size_t>(N), 0.0);
  for (int d = 0; d < N; ++d) {
    double s = 0.0;
    for (int m = 1; m < half; ++m)
      s += std::cos(kTwoPi * m * d / N) / m;
    const double sign = (d % 2 == 0) ? 1.0 : -1.0;
    // the Nyquist coefficient makes the rule exact at degree N/2 as well
    R[static_cast<std::size_t>(d)] =
        -2.0 * kTwoPi / N * s - 2.0 * kTwoPi / (N * N) * sign;
  }
  return R;
}

/// Parameter-measure integral of A(t) ln(4 sin^2((t - t*)/2)) + B(t)
/// with t* a grid node: product rule on the logarithmic factor plus
/// periodic trapezoid on the smooth remainder.
inline Complex integrate_log_singular(const BoundaryFrame& frame,
                                      const std::vector<Complex>& A,
                                      const std::vector<Complex>& B,
                                      int target_index) {
  const int N = frame.N;
  if (static_cast<int>(A.size()) != N || static_cast<int>(B.size()) != N)
    throw ArgumentError("integrate_log_singular: node count mismatch");
  if (target_index < 0 || target_index >= N)
    throw ArgumentError("integrate_log_singular: target node out of range");
  static std::mutex mu;
  static std::map<int, std::vector<double>> table;
  const std::vector<double>* R = nullptr;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = table.find(N);
    if (it == table.end()) it = table.emplace(N, kress_log_weights(N)).first;
    R = &it->second;
  }
  Complex s(0.0, 0.0);
  for (int j = 0; j < N; ++j) {
    const int d = (target_index - j + N) % N;
    s += (*R)[static_cast<std::size_t>(d)] * A[static_cast<std::size_t>(j)];
    s += kTwoPi / N * B[static_cast<std::size_t>(j)];
  }
  return s;
}

/// Trigonometric interpolation of 2pi-periodic samples onto a finer
/// equispaced grid of size M (zero-padded discrete Fourier series).
inline std::vector<Complex> trig_resample(const std::vector<Complex>& values,
                                          int M) {
  const int N = static_cast<int>(values.size());
  if (N % 2 != 0) throw ArgumentError("trig_resample: N must be even");
  if (M % N != 0) throw ArgumentError("trig_resample: M must be multiple of N");
  if (M == N) return values;
  const int half = N / 2;
  std::vector<Complex> coeff(static_cast<std::size_t>(N));
  for (int m = -half; m < half; ++m) {
    Complex c(0.0, 0.0);
    for (int j = 0; j < N; ++j) {
      const double ang = -kTwoPi * m * j / N;
      c += values[static_cast<std::size_t>(j)] *
           Complex(std::cos(ang), std::sin(ang));
    }
    coeff[static_cast<std::size_t>(m + half)] = c / static_cast<double>(N);
  }
  std::vector<Complex> out(static_cast<std::size_t>(M));
  for (int i = 0; i < M; ++i) {
    const double t = kTwoPi * i / M;
    Complex s(0.0, 0.0);
    for (int m = -half; m < half; ++m) {
      if (m == -half) {
        // Nyquist mode interpolated symmetrically
        s += coeff[0] * std::cos(half * t);
        continue;
      }
      s += coeff[static_cast<std::size_t>(m + half)] *
           Complex(std::cos(m * t), std::sin(m * t));
    }
    out[static_cast<std::size_t>(i)] = s;
  }
  return out;
}

/// Refined sampling of curve and density used by the near-singular
/// path. Geometry is re-evaluated from the exact curve callables; the
/// density uses its exact callable when available and trigonometric
/// interpolation otherwise.
struct FineGrid {
  int M = 0;
  std::vector<Vec2> point;
  std::vector<Vec2> normal;
  std::vector<double> weight;
  std::vector<Complex> density;
};

inline FineGrid resample(const BoundaryFrame& frame,
                         const BoundaryDensity& density, int factor) {
  if (factor < 1 || (factor & (factor - 1)) != 0)
    throw ArgumentError("resample: factor must be a power of two");
  FineGrid g;
  g.M = frame.N * factor;
  g.point.resize(static_cast<std::size_t>(g.M));
  g.normal.resize(static_cast<std::size_t>(g.M));
  g.weight.resize(static_cast<std::size_t>(g.M));
  for (int i = 0; i < g.M; ++i) {
    const double t = kTwoPi * i / g.M;
    g.point[static_cast<std::size_t>(i)] = frame.curve.position(t);
    const Vec2 d = frame.curve.derivative(t);
    const double sp = norm(d);
    g.normal[static_cast<std::size_t>(i)] = Vec2{d.y, -d.x} / sp;
    g.weight[static_cast<std::size_t>(i)] = kTwoPi / g.M * sp;
  }
  if (density.has_fn()) {
    g.density.resize(static_cast<std::size_t>(g.M));
    for (int i = 0; i < g.M; ++i)
      g.density[static_cast<std::size_t>(i)] = density.fn(kTwoPi * i / g.M);
  } else {
    g.density = trig_resample(density.values, g.M);
  }
  return g;
}

/// Kernel of a boundary integral as seen by the quadrature engine.
using BoundaryKernel = std::function<Complex(Vec2 x, Vec2 y, Vec2 nu_y)>;

inline Complex integrate_kernel_plain(const BoundaryFrame& frame,
                                      const BoundaryKernel& kernel,
                                      const BoundaryDensity& density,
                                      Vec2 x) {
  Complex s(0.0, 0.0);
  for (int i = 0; i < frame.N; ++i)
    s += kernel(x, frame.point[static_cast<std::size_t>(i)],
                frame.normal[static_cast<std::size_t>(i)]) *
         density.values[static_cast<std::size_t>(i)] *
         frame.weight[static_cast<std::size_t>(i)];
  return s;
}

inline Complex integrate_kernel_fine(const FineGrid& g,
                                     const BoundaryKernel& kernel, Vec2 x) {
  Complex s(0.0, 0.0);
  for (int i = 0; i < g.M; ++i)
    s += kernel(x, g.point[static_cast<std::size_t>(i)],
                g.normal[static_cast<std::size_t>(i)]) *
         g.density[static_cast<std::size_t>(i)] *
         g.weight[static_cast<std::size_t>(i)];
  return s;
}

inline constexpr int kUpsampleCap = 64;

/// Run-wide quadrature knobs: the upsampling cap may be lowered below
/// the fixed maximum of 64, and d_min is d_min_rel x diameter.
struct QuadratureSettings {
  int upsample_cap = kUpsampleCap;
  double d_min_rel = 1e-6;
};

inline QuadratureSettings& quadrature_settings() {
  static QuadratureSettings s;
  return s;
}

/// Smallest power-of-two factor putting the fine arc spacing below
/// dist/3.5, capped at 64. Beyond the cap the boundary-trace path must
/// be used instead.
inline int choose_upsample_factor(const BoundaryFrame& frame, double dist,
                                  int cap = 0) {
  if (cap <= 0) cap = quadrature_settings().upsample_cap;
  const double target = dist / 3.5;
  int f = 1;
  while (f < cap && frame.max_spacing() / f > target) f *= 2;
  return f;
}

/// Heuristic error of the fine-grid trapezoid at distance `dist`:
/// geometric decay in (grid size) x (parameter-plane distance).
inline double near_error_estimate(const BoundaryFrame& frame, int factor,
                                  double dist) {
  const double m = static_cast<double>(frame.N) * factor;
  return std::exp(-m * dist / frame.max_speed());
}

/// Owns the per-factor fine grids of one (frame, density) pair so that
/// sweeps over many near-boundary targets resample only once.
/// Thread-safe; grids are immutable once built.
class NearFieldCache {
 public:
  NearFieldCache(const BoundaryFrame& frame,
                 std::shared_ptr<const BoundaryDensity> density)
      : frame_(&frame),
        density_(std::move(density)),
        mutex_(std::make_unique<std::mutex>()) {}

  const FineGrid& grid(int factor) const {
    std::lock_guard<std::mutex> lock(*mutex_);
    auto it = grids_.find(factor);
    if (it == grids_.end())
      it = grids_.emplace(factor, resample(*frame_, *density_, factor)).first;
    return it->second;
  }

 private:
  const BoundaryFrame* frame_;
  std::shared_ptr<const BoundaryDensity> density_;
  std::unique_ptr<std::mutex> mutex_;
  mutable std::map<int, FineGrid> grids_;
};

/// Near-singular evaluation of a boundary integral at distance `dist`
/// from the curve, by upsampling to `factor` x N nodes (0 = automatic
/// choice). Throws PrecisionError below d_min = 1e-6 x diameter.
inline Complex near_singular_upsample(const BoundaryFrame& frame,
                                      const BoundaryDensity& density,
                                      const BoundaryKernel& kernel, Vec2 x,
                                      double dist, int factor,
                                      const NearFieldCache* cache = nullptr,
                                      double diameter_hint = -1.0) {
  const double diameter =
      diameter_hint > 0.0 ? diameter_hint : frame.diameter();
  const double d_min = quadrature_settings().d_min_rel * diameter;
  if (dist < d_min)
    throw PrecisionError(
        "near_singular_upsample: target closer than d_min; achieved error "
        "estimate " +
            format_double(near_error_estimate(frame, kUpsampleCap, dist)),
        near_error_estimate(frame, kUpsampleCap, dist));
  if (factor == 0) factor = choose_upsample_factor(frame, dist);
  if (factor < 1 || (factor & (factor - 1)) != 0 || factor > kUpsampleCap)
    throw ArgumentError(
        "near_singular_upsample: factor must be a power of two <= 64");
  if (cache) return integrate_kernel_fine(cache->grid(factor), kernel, x);
  const FineGrid g = resample(frame, density, factor);
  return integrate_kernel_fine(g, kernel, x);
}

/// Inspectable quadrature rule (nodes and weights), mirroring the
/// three integration paths.
struct QuadratureRule {
  enum class Kind { trapezoid, log_product, near_singular };
  Kind kind = Kind::trapezoid;
  std::vector<double> nodes;
  std::vector<double> weights;
  int target_index = -1;  // log_product
  int factor = 1;         // near_singular
};

inline QuadratureRule make_trapezoid_rule(const BoundaryFrame& frame) {
  QuadratureRule r;
  r.kind = QuadratureRule::Kind::trapezoid;
  r.nodes = frame.t;
  r.weights = frame.weight;
  return r;
}

inline QuadratureRule make_log_product_rule(const BoundaryFrame& frame,
                                            int target_index) {
  QuadratureRule r;
  r.kind = QuadratureRule::Kind::log_product;
  r.nodes = frame.t;
  r.target_index = target_index;
  const auto R = kress_log_weights(frame.N);
  r.weights.resize(static_cast<std::size_t>(frame.N));
  for (int j = 0; j < frame.N; ++j)
    r.weights[static_cast<std::size_t>(j)] =
        R[static_cast<std::size_t>((target_index - j + frame.N) % frame.N)];
  return r;
}

}  // namespace miranda
