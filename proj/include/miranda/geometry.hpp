#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "miranda/errors.hpp"
#include "miranda/io.hpp"
#include "miranda/linalg.hpp"

namespace miranda {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps a parameter difference into [-pi, pi).
inline double wrap_angle(double t) {
  t = std::fmod(t, kTwoPi);
  if (t < -std::numbers::pi) t += kTwoPi;
  if (t >= std::numbers::pi) t -= kTwoPi;
  return t;
}

enum class Smoothness { analytic, c11, c21 };

/// Closed planar curve t in [0, 2pi) -> R^2, counterclockwise, with
/// analytic position/derivative/second-derivative callables.
class BoundaryCurve {
 public:
  std::function<Vec2(double)> position;
  std::function<Vec2(double)> derivative;
  std::function<Vec2(double)> second_derivative;
  Smoothness smoothness = Smoothness::analytic;
  std::string description;

  double speed(double t) const { return norm(derivative(t)); }

  Vec2 outward_normal(double t) const {
    const Vec2 d = derivative(t);
    return Vec2{d.y, -d.x} / norm(d);
  }

  /// Signed curvature; positive on convex arcs of a counterclockwise
  /// curve. At parameters where the second derivative jumps
  /// (c11 curves) this evaluates the two-sided average.
  double curvature(double t) const {
    const Vec2 d = derivative(t);
    const Vec2 dd = second_derivative(t);
    return cross(d, dd) / std::pow(norm(d), 3.0);
  }

  static BoundaryCurve ellipse(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
      throw ConstructionError("ellipse: semi-axes must be positive");
    BoundaryCurve c;
    c.position = [a, b](double t) {
      return Vec2{a * std::cos(t), b * std::sin(t)};
    };
    c.derivative = [a, b](double t) {
      return Vec2{-a * std::sin(t), b * std::cos(t)};
    };
    c.second_derivative = [a, b](double t) {
      return Vec2{-a * std::cos(t), -b * std::sin(t)};
    };
    c.smoothness = Smoothness::analytic;
    c.description =
        "ellipse(" + format_double(a) + "," + format_double(b) + ")";
    return c;
  }

  /// r(t) = r0 + eps cos(k t) in polar form.
  static BoundaryCurve star(double r0, double eps, int k) {
    if (!(r0 > 0.0) || eps < 0.0 || k < 1 || !(r0 - eps > 0.0))
      throw ConstructionError("star: need r0 > eps >= 0, k >= 1");
    BoundaryCurve c;
    auto radial = [r0, eps, k](double t) { return r0 + eps * std::cos(k * t); };
    auto radial_d = [eps, k](double t) { return -eps * k * std::sin(k * t); };
    auto radial_dd = [eps, k](double t) {
      return -eps * k * k * std::cos(k * t);
    };
    c.position = [radial](double t) {
      const double r = radial(t);
      return Vec2{r * std::cos(t), r * std::sin(t)};
    };
    c.derivative = [radial, radial_d](double t) {
      const double r = radial(t), rd = radial_d(t);
      return Vec2{rd * std::cos(t) - r * std::sin(t),
                  rd * std::sin(t) + r * std::cos(t)};
    };
    c.second_derivative = [radial, radial_d, radial_dd](double t) {
      const double r = radial(t), rd = radial_d(t), rdd = radial_dd(t);
      return Vec2{(rdd - r) * std::cos(t) - 2.0 * rd * std::sin(t),
                  (rdd - r) * std::sin(t) + 2.0 * rd * std::cos(t)};
    };
    c.smoothness = Smoothness::analytic;
    c.description = "star(" + format_double(r0) + "," + format_double(eps) +
                    "," + std::to_string(k) + ")";
    return c;
  }

  /// C^{1,1} but not C^2 boundary: radius r(t) = r0 + (c/2) q(t) with
  /// q piecewise quadratic, so r'' is a square wave (jumps at t = 0
  /// and t = pi) and the normal has Lipschitz first derivatives.
  static BoundaryCurve c11_blend(double r0, double c) {
    const double pi = std::numbers::pi;
    if (!(r0 > 0.0) || c < 0.0 || !(r0 - c * pi * pi / 8.0 > 0.0))
      throw ConstructionError("c11_blend: radius not positive");
    auto q = [pi](double t) {
      t = std::fmod(t, kTwoPi);
      if (t < 0.0) t += kTwoPi;
      return t <= pi ? t * (t - pi) : -(t - pi) * (t - kTwoPi);
    };
    auto qd = [pi](double t) {
      t = std::fmod(t, kTwoPi);
      if (t < 0.0) t += kTwoPi;
      return t <= pi ? 2.0 * t - pi : 3.0 * pi - 2.0 * t;
    };
    auto qdd = [pi](double t) {
      t = std::fmod(t, kTwoPi);
      if (t < 0.0) t += kTwoPi;
      if (t == 0.0 || t == pi) return 0.0;  // two-sided average at the jumps
      return t < pi ? 2.0 : -2.0;
    };
    BoundaryCurve cu;
    auto radial = [r0, c, q](double t) { return r0 + 0.5 * c * q(t); };
    auto radial_d = [c, qd](double t) { return 0.5 * c * qd(t); };
    auto radial_dd = [c, qdd](double t) { return 0.5 * c * qdd(t); };
    cu.position = [radial](double t) {
      const double r = radial(t);
      return Vec2{r * std::cos(t), r * std::sin(t)};
    };
    cu.derivative = [radial, radial_d](double t) {
      const double r = radial(t), rd = radial_d(t);
      return Vec2{rd * std::cos(t) - r * std::sin(t),
                  rd * std::sin(t) + r * std::cos(t)};
    };
    cu.second_derivative = [radial, radial_d, radial_dd](double t) {
      const double r = radial(t), rd = radial_d(t), rdd = radial_dd(t);
      return Vec2{(rdd - r) * std::cos(t) - 2.0 * rd * std::sin(t),
                  (rdd - r) * std::sin(t) + 2.0 * rd * std::cos(t)};
    };
    cu.smoothness = Smoothness::c11;
    cu.description =
        "c11_blend(" + format_double(r0) + "," + format_double(c) + ")";
    return cu;
  }
};

/// Trigonometric differentiation of 2pi-periodic samples at N
/// equispaced parameters (N even). Exact for trigonometric
/// polynomials of degree < N/2.
template <typename T>
std::vector<T> spectral_param_derivative(const std::vector<T>& values) {
  const std::size_t n = values.size();
  if (n < 2 || n % 2 != 0)
    throw ArgumentError("spectral_param_derivative: N must be even, >= 2");
  std::vector<T> out(n);
  // d_ij = (1/2) (-1)^(i-j) cot((t_i - t_j)/2); for even N this depends
  // only on (i-j) mod N since cot has period pi
  std::vector<double> row(n, 0.0);
  for (std::size_t d = 1; d < n; ++d) {
    const double sign = (d % 2 == 0) ? 1.0 : -1.0;
    row[d] = 0.5 * sign / std::tan(std::numbers::pi * static_cast<double>(d) /
                                   static_cast<double>(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    T acc{};
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      acc += row[(i + n - j) % n] * values[j];
    }
    out[i] = acc;
  }
  return out;
}

/// Equispaced sampling of a curve: nodes, outward normals, speeds,
/// arc weights and curvature. Immutable after construction.
struct BoundaryFrame {
  BoundaryCurve curve;
  int N = 0;
  std::vector<double> t;
  std::vector<Vec2> point;
  std::vector<Vec2> normal;
  std::vector<double> speed;
  std::vector<double> weight;  // dsigma_i = (2pi/N) |gamma'(t_i)|
  std::vector<double> curvature;

  double length() const {
    double s = 0.0;
    for (double w : weight) s += w;
    return s;
  }

  double max_speed() const {
    double s = 0.0;
    for (double v : speed) s = std::max(s, v);
    return s;
  }

  /// Maximum internode arc spacing.
  double max_spacing() const { return kTwoPi / N * max_speed(); }

  double diameter() const {
    double d = 0.0;
    for (std::size_t i = 0; i < point.size(); ++i)
      for (std::size_t j = i + 1; j < point.size(); ++j)
        d = std::max(d, norm(point[i] - point[j]));
    return d;
  }

  void write_csv(const std::filesystem::path& path) const {
    auto out = open_output(path);
    out << "t,x1,x2,nu1,nu2,w\n";
    for (int i = 0; i < N; ++i) {
      out << format_double(t[i]) << ',' << format_double(point[i].x) << ','
          << format_double(point[i].y) << ',' << format_double(normal[i].x)
          << ',' << format_double(normal[i].y) << ','
          << format_double(weight[i]) << '\n';
    }
  }
};

namespace detail {

inline bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  auto orient = [](Vec2 p, Vec2 q, Vec2 r) {
    const double v = cross(q - p, r - p);
    return (v > 0.0) - (v < 0.0);
  };
  const int o1 = orient(a, b, c), o2 = orient(a, b, d);
  const int o3 = orient(c, d, a), o4 = orient(c, d, b);
  return o1 != o2 && o3 != o4;
}

}  // namespace detail

/// Samples a curve at N equispaced parameters and validates the frame:
/// regular parametrization, closedness, simplicity on the node set and
/// counterclockwise orientation.
inline BoundaryFrame make_frame(const BoundaryCurve& curve, int N) {
  if (N < 16 || N % 2 != 0)
    throw ArgumentError("make_frame: N must be even and >= 16");
  BoundaryFrame f;
  f.curve = curve;
  f.N = N;
  f.t.resize(N);
  f.point.resize(N);
  f.normal.resize(N);
  f.speed.resize(N);
  f.weight.resize(N);
  f.curvature.resize(N);
  for (int i = 0; i < N; ++i) {
    const double ti = kTwoPi * i / N;
    f.t[i] = ti;
    f.point[i] = curve.position(ti);
    const Vec2 d = curve.derivative(ti);
    f.speed[i] = norm(d);
    f.normal[i] = Vec2{d.y, -d.x} / f.speed[i];
    f.weight[i] = kTwoPi / N * f.speed[i];
    f.curvature[i] = curve.curvature(ti);
  }

  const double s_min = 1e-6 * f.max_speed();
  for (int i = 0; i < N; ++i)
    if (f.speed[i] < s_min)
      throw ConstructionError("make_frame: irregular parametrization (speed " +
                              format_double(f.speed[i]) + " at node " +
                              std::to_string(i) + ")");

  const Vec2 gap = curve.position(0.0) - curve.position(kTwoPi);
  if (norm(gap) > 1e-12 * (1.0 + norm(curve.position(0.0))))
    throw ConstructionError("make_frame: curve is not closed");

  // Simple on the sample set: distinct nodes, no crossing chords.
  for (int i = 0; i < N; ++i) {
    const int j = (i + 1) % N;
    for (int k = i + 1; k < N; ++k) {
      if (norm(f.point[i] - f.point[k]) == 0.0)
        throw ConstructionError("make_frame: duplicate nodes " +
                                std::to_string(i) + "," + std::to_string(k));
      const int l = (k + 1) % N;
      if (k == i || k == j || l == i) continue;
      if (detail::segments_intersect(f.point[i], f.point[j], f.point[k],
                                     f.point[l]))
        throw ConstructionError("make_frame: self-intersection on node set");
    }
  }

  double area2 = 0.0;
  for (int i = 0; i < N; ++i) {
    const int j = (i + 1) % N;
    area2 += cross(f.point[i], f.point[j]);
  }
  if (area2 <= 0.0)
    throw ConstructionError("make_frame: orientation is not counterclockwise");
  return f;
}

enum class Regularity { c0, c01, c11, cm1 };

/// Density on the boundary: node values, regularity tag, and an exact
/// parameter callable when available (used by the near-singular
/// resampling path).
struct BoundaryDensity {
  std::vector<Complex> values;
  std::function<Complex(double)> fn;  // may be empty
  Regularity tag = Regularity::c0;

  bool has_fn() const { return static_cast<bool>(fn); }
};

inline BoundaryDensity density_constant(const BoundaryFrame& frame,
                                        Complex value = 1.0) {
  BoundaryDensity d;
  d.values.assign(frame.point.size(), value);
  d.fn = [value](double) { return value; };
  d.tag = Regularity::cm1;
  return d;
}

/// cos(m t) or sin(m t); analytic in the parameter.
inline BoundaryDensity density_fourier(const BoundaryFrame& frame, int m,
                                       bool sine = false) {
  BoundaryDensity d;
  d.fn = [m, sine](double t) {
    return Complex(sine ? std::sin(m * t) : std::cos(m * t), 0.0);
  };
  d.values.resize(frame.t.size());
  for (std::size_t i = 0; i < frame.t.size(); ++i)
    d.values[i] = d.fn(frame.t[i]);
  d.tag = Regularity::cm1;
  return d;
}

/// Periodized parameter distance |t - t0|: Lipschitz, not C^1.
inline BoundaryDensity density_lipschitz_hat(const BoundaryFrame& frame,
                                             double t0 = 0.0) {
  BoundaryDensity d;
  d.fn = [t0](double t) {
    return Complex(std::abs(wrap_angle(t - t0)), 0.0);
  };
  d.values.resize(frame.t.size());
  for (std::size_t i = 0; i < frame.t.size(); ++i)
    d.values[i] = d.fn(frame.t[i]);
  d.tag = Regularity::c01;
  return d;
}

/// Periodic antiderivative of the mean-free hat: C^{1,1}, not C^2.
inline BoundaryDensity density_c11_hat(const BoundaryFrame& frame,
                                       double t0 = 0.0) {
  const double pi = std::numbers::pi;
  BoundaryDensity d;
  d.fn = [t0, pi](double t) {
    const double s = wrap_angle(t - t0);
    return Complex(0.5 * s * std::abs(s) - 0.5 * pi * s, 0.0);
  };
  d.values.resize(frame.t.size());
  for (std::size_t i = 0; i < frame.t.size(); ++i)
    d.values[i] = d.fn(frame.t[i]);
  d.tag = Regularity::c11;
  return d;
}

/// Pointwise product against a parameter function with known values.
inline BoundaryDensity density_scale(const BoundaryFrame& frame,
                                     const BoundaryDensity& d,
                                     const std::function<Complex(double)>& g) {
  BoundaryDensity out;
  out.values.resize(d.values.size());
  for (std::size_t i = 0; i < d.values.size(); ++i)
    out.values[i] = d.values[i] * g(frame.t[i]);
  if (d.has_fn()) {
    auto f = d.fn;
    out.fn = [f, g](double t) { return f(t) * g(t); };
  }
  out.tag = d.tag;
  return out;
}

/// Tangential derivative M_lr[f] = nu_l d f/dx_r - nu_r d f/dx_l,
/// computed intrinsically: in the plane M_12 is the arc-length
/// derivative of f along the curve, M_21 its negative, M_ll = 0.
/// The intrinsic value is what makes the operator independent of the
/// choice of extension.
inline BoundaryDensity tangential_derivative(const BoundaryFrame& frame,
                                             const BoundaryDensity& f, int l,
                                             int r) {
  if (l < 1 || l > 2 || r < 1 || r > 2)
    throw ArgumentError("tangential_derivative: axes must be 1 or 2");
  if (f.tag != Regularity::c11 && f.tag != Regularity::cm1)
    throw CapabilityError(
        "tangential_derivative: density lacks a differentiable "
        "representation (needs tag c11 or cm1)");
  BoundaryDensity out;
  out.tag = f.tag == Regularity::cm1 ? Regularity::c11 : Regularity::c01;
  if (l == r) {
    out.values.assign(f.values.size(), Complex(0.0, 0.0));
    out.fn = [](double) { return Complex(0.0, 0.0); };
    return out;
  }
  const double sign = (l == 1 && r == 2) ? 1.0 : -1.0;
  out.values = spectral_param_derivative(f.values);
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] *= sign / frame.speed[i];
  return out;
}

enum class PointClass { inside, outside, near_boundary };

struct Classification {
  PointClass cls = PointClass::outside;
  double distance = 0.0;
  int winding = 0;
};

/// Distance from x to the curve by coarse parameter scan plus golden
/// section refinement.
inline double distance_to_boundary(const BoundaryCurve& curve, Vec2 x,
                                   int coarse = 512) {
  double best_t = 0.0, best = std::numeric_limits<double>::max();
  for (int i = 0; i < coarse; ++i) {
    const double t = kTwoPi * i / coarse;
    const double d = norm(curve.position(t) - x);
    if (d < best) {
      best = d;
      best_t = t;
    }
  }
  double a = best_t - kTwoPi / coarse, b = best_t + kTwoPi / coarse;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = norm(curve.position(c) - x), fd = norm(curve.position(d) - x);
  for (int it = 0; it < 80; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = norm(curve.position(c) - x);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = norm(curve.position(d) - x);
    }
  }
  return std::min(fc, fd);
}

inline int winding_number(const std::vector<Vec2>& nodes, Vec2 x) {
  double total = 0.0;
  const std::size_t n = nodes.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 u = nodes[i] - x;
    const Vec2 v = nodes[(i + 1) % n] - x;
    total += std::atan2(cross(u, v), dot(u, v));
  }
  return static_cast<int>(std::lround(total / kTwoPi));
}

/// Winding-number classification; points within delta_near of the
/// boundary (default 4 * max node spacing) are flagged near_boundary
/// and routed to the near-singular quadrature path.
inline Classification classify_point(const BoundaryFrame& frame, Vec2 x,
                                     double delta_near = -1.0) {
  if (delta_near < 0.0) delta_near = 4.0 * frame.max_spacing();
  Classification c;
  c.winding = winding_number(frame.point, x);
  double coarse = std::numeric_limits<double>::max();
  for (const Vec2& p : frame.point) coarse = std::min(coarse, norm(p - x));
  if (coarse < delta_near + frame.max_spacing()) {
    c.distance = distance_to_boundary(frame.curve, x, 8 * frame.N);
  } else {
    c.distance = coarse;  // within half a spacing of the true distance
  }
  if (c.distance < delta_near) {
    c.cls = PointClass::near_boundary;
  } else {
    c.cls = c.winding != 0 ? PointClass::inside : PointClass::outside;
  }
  return c;
}

}  // namespace miranda
