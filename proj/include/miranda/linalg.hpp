#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>

namespace miranda {

using Complex = std::complex<double>;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double xx, double yy) : x(xx), y(yy) {}

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2 operator-() const { return {-x, -y}; }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double norm2(Vec2 a) { return a.x * a.x + a.y * a.y; }

struct CVec2 {
  Complex x{0.0, 0.0};
  Complex y{0.0, 0.0};

  CVec2() = default;
  CVec2(Complex xx, Complex yy) : x(xx), y(yy) {}

  CVec2 operator+(CVec2 o) const { return {x + o.x, y + o.y}; }
  CVec2 operator-(CVec2 o) const { return {x - o.x, y - o.y}; }
  CVec2 operator*(Complex s) const { return {x * s, y * s}; }
};

inline double norm(CVec2 a) {
  return std::sqrt(std::norm(a.x) + std::norm(a.y));
}

/// Point in R^n for n in {2,3}; geometry is planar, kernels also
/// evaluate free-space values in dimension 3.
struct VecN {
  int n = 2;
  std::array<double, 3> c{0.0, 0.0, 0.0};

  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
};

inline VecN make_vec(double x, double y) { return VecN{2, {x, y, 0.0}}; }
inline VecN make_vec(double x, double y, double z) {
  return VecN{3, {x, y, z}};
}
inline VecN make_vec(Vec2 v) { return VecN{2, {v.x, v.y, 0.0}}; }

inline double norm(const VecN& v) {
  double s = 0.0;
  for (int i = 0; i < v.n; ++i) s += v[i] * v[i];
  return std::sqrt(s);
}

inline VecN operator*(double s, const VecN& v) {
  VecN r = v;
  for (int i = 0; i < v.n; ++i) r[i] *= s;
  return r;
}

inline VecN operator-(const VecN& v) { return -1.0 * v; }

inline VecN operator-(const VecN& a, const VecN& b) {
  VecN r = a;
  for (int i = 0; i < a.n; ++i) r[i] -= b[i];
  return r;
}

inline VecN operator+(const VecN& a, const VecN& b) {
  VecN r = a;
  for (int i = 0; i < a.n; ++i) r[i] += b[i];
  return r;
}

inline double dot(const VecN& a, const VecN& b) {
  double s = 0.0;
  for (int i = 0; i < a.n; ++i) s += a[i] * b[i];
  return s;
}

/// Real n x n matrix, n <= 3.
struct MatN {
  int n = 2;
  std::array<std::array<double, 3>, 3> a{};

  double operator()(int i, int j) const {
    return a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  double& operator()(int i, int j) {
    return a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }

  static MatN identity(int n) {
    MatN m;
    m.n = n;
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
};

inline VecN mat_vec(const MatN& m, const VecN& v) {
  VecN r;
  r.n = m.n;
  for (int i = 0; i < m.n; ++i) {
    double s = 0.0;
    for (int j = 0; j < m.n; ++j) s += m(i, j) * v[j];
    r[i] = s;
  }
  return r;
}

inline double quad_form(const MatN& m, const VecN& v) {
  double s = 0.0;
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) s += v[i] * m(i, j) * v[j];
  return s;
}

inline double frobenius_norm(const MatN& m) {
  double s = 0.0;
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) s += m(i, j) * m(i, j);
  return std::sqrt(s);
}

inline double det(const MatN& m) {
  if (m.n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
         m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

/// Inverse of a small matrix by cofactors; caller guarantees invertibility.
inline MatN inverse(const MatN& m) {
  MatN r;
  r.n = m.n;
  const double d = det(m);
  if (m.n == 2) {
    r(0, 0) = m(1, 1) / d;
    r(0, 1) = -m(0, 1) / d;
    r(1, 0) = -m(1, 0) / d;
    r(1, 1) = m(0, 0) / d;
    return r;
  }
  r(0, 0) = (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) / d;
  r(0, 1) = (m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2)) / d;
  r(0, 2) = (m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1)) / d;
  r(1, 0) = (m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2)) / d;
  r(1, 1) = (m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0)) / d;
  r(1, 2) = (m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2)) / d;
  r(2, 0) = (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0)) / d;
  r(2, 1) = (m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1)) / d;
  r(2, 2) = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)) / d;
  return r;
}

/// Eigenvalues of a symmetric n x n matrix (n <= 3), ascending.
inline std::array<double, 3> symmetric_eigenvalues(const MatN& m) {
  if (m.n == 2) {
    const double tr = m(0, 0) + m(1, 1);
    const double dd = det(m);
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - dd));
    return {tr / 2.0 - disc, tr / 2.0 + disc, 0.0};
  }
  // Trigonometric solution of the characteristic cubic.
  const double q = (m(0, 0) + m(1, 1) + m(2, 2)) / 3.0;
  double p2 = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double v = m(i, j) - (i == j ? q : 0.0);
      p2 += v * v;
    }
  const double p = std::sqrt(p2 / 6.0);
  if (p < 1e-300) return {q, q, q};
  MatN b;
  b.n = 3;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b(i, j) = (m(i, j) - (i == j ? q : 0.0)) / p;
  double r = det(b) / 2.0;
  r = std::clamp(r, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
  const double e2 = 3.0 * q - e1 - e3;
  std::array<double, 3> e{e1, e2, e3};
  std::sort(e.begin(), e.end());
  return e;
}

}  // namespace miranda
