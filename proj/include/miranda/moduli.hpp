#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "miranda/errors.hpp"
#include "miranda/io.hpp"
#include "miranda/linalg.hpp"
#include "miranda/parallel.hpp"

#include <json.hpp>

namespace miranda {

/// omega_1(r): 0 at r = 0, r |ln r| on ]0, 1/e], constant 1/e beyond.
/// Continuous at the branch point, so the <= comparison there is
/// immaterial.
inline double omega1_eval(double r) {
  if (r < 0.0) throw DomainError("omega1_eval: negative length");
  if (r == 0.0) return 0.0;
  const double r1 = std::exp(-1.0);
  if (r <= r1) return r * std::abs(std::log(r));
  return r1;
}

/// A modulus of continuity: increasing, vanishing at 0, with
/// omega(a t) <= C a omega(t) for a >= 1.
class ModulusFunction {
 public:
  enum class Kind { power, omega1, custom };

  static ModulusFunction power(double alpha) {
    if (!(alpha > 0.0) || alpha > 1.0)
      throw ArgumentError("ModulusFunction::power: alpha must be in ]0,1]");
    ModulusFunction m;
    m.kind_ = Kind::power;
    m.alpha_ = alpha;
    return m;
  }

  static ModulusFunction omega1() {
    ModulusFunction m;
    m.kind_ = Kind::omega1;
    return m;
  }

  /// Tabulated modulus with monotone linear interpolation. Below the
  /// first node the graph is the segment from (0,0); beyond the last
  /// node the value is held constant.
  static ModulusFunction tabulated(std::vector<double> r,
                                   std::vector<double> w) {
    if (r.size() != w.size() || r.size() < 2)
      throw ArgumentError("ModulusFunction::tabulated: need >= 2 nodes");
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (!(r[i] > 0.0) || !(w[i] > 0.0))
        throw ArgumentError("ModulusFunction::tabulated: nodes must be > 0");
      if (i > 0 && (r[i] <= r[i - 1] || w[i] < w[i - 1]))
        throw ArgumentError(
            "ModulusFunction::tabulated: table must be increasing");
    }
    ModulusFunction m;
    m.kind_ = Kind::custom;
    m.table_r_ = std::move(r);
    m.table_w_ = std::move(w);
    return m;
  }

  double operator()(double r) const {
    if (r < 0.0) throw DomainError("ModulusFunction: negative length");
    switch (kind_) {
      case Kind::power:
        return std::pow(r, alpha_);
      case Kind::omega1:
        return omega1_eval(r);
      case Kind::custom: {
        if (r == 0.0) return 0.0;
        if (r <= table_r_.front())
          return table_w_.front() * r / table_r_.front();
        if (r >= table_r_.back()) return table_w_.back();
        const auto it =
            std::upper_bound(table_r_.begin(), table_r_.end(), r);
        const std::size_t j = static_cast<std::size_t>(it - table_r_.begin());
        const double t =
            (r - table_r_[j - 1]) / (table_r_[j] - table_r_[j - 1]);
        return table_w_[j - 1] + t * (table_w_[j] - table_w_[j - 1]);
      }
    }
    return 0.0;
  }

  Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }

  std::string name() const {
    switch (kind_) {
      case Kind::power:
        return "r^" + format_double(alpha_);
      case Kind::omega1:
        return "omega1";
      case Kind::custom:
        return "custom";
    }
    return "?";
  }

 private:
  Kind kind_ = Kind::omega1;
  double alpha_ = 1.0;
  std::vector<double> table_r_, table_w_;
};

/// Discrete stand-in for a bounded function on a subset of R^2 or R^3.
struct SampledFunction {
  enum class Domain { boundary, closed_region };

  int dim = 2;
  std::vector<std::array<double, 3>> points;
  std::vector<Complex> values;
  Domain domain = Domain::closed_region;

  std::size_t size() const { return points.size(); }

  double distance(std::size_t i, std::size_t j) const {
    double s = 0.0;
    for (int d = 0; d < dim; ++d) {
      const double v = points[i][static_cast<std::size_t>(d)] -
                       points[j][static_cast<std::size_t>(d)];
      s += v * v;
    }
    return std::sqrt(s);
  }

  void push_back(Vec2 p, Complex v) {
    points.push_back({p.x, p.y, 0.0});
    values.push_back(v);
  }

  void validate() const {
    if (points.size() != values.size())
      throw ArgumentError("SampledFunction: points/values size mismatch");
    for (const Complex& v : values)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw ArgumentError("SampledFunction: non-finite value");
    for (std::size_t i = 0; i < points.size(); ++i)
      for (std::size_t j = i + 1; j < points.size(); ++j)
        if (distance(i, j) == 0.0)
          throw ArgumentError("SampledFunction: duplicate points");
  }

  double sup_abs() const {
    double s = 0.0;
    for (const Complex& v : values) s = std::max(s, std::abs(v));
    return s;
  }

  /// CSV columns x1,x2[,x3],re,im.
  void write_csv(const std::filesystem::path& path) const {
    auto out = open_output(path);
    out << (dim == 3 ? "x1,x2,x3,re,im\n" : "x1,x2,re,im\n");
    for (std::size_t i = 0; i < points.size(); ++i) {
      out << format_double(points[i][0]) << ',' << format_double(points[i][1]);
      if (dim == 3) out << ',' << format_double(points[i][2]);
      out << ',' << format_double(values[i].real()) << ','
          << format_double(values[i].imag()) << '\n';
    }
  }

  static SampledFunction read_csv(const std::filesystem::path& path) {
    const CsvTable t = miranda::read_csv(path);
    SampledFunction f;
    if (t.header.size() == 5)
      f.dim = 3;
    else if (t.header.size() == 4)
      f.dim = 2;
    else
      throw ArgumentError("SampledFunction CSV: expected 4 or 5 columns");
    for (const auto& row : t.rows) {
      std::array<double, 3> p{0.0, 0.0, 0.0};
      for (int d = 0; d < f.dim; ++d)
        p[static_cast<std::size_t>(d)] =
            std::stod(row[static_cast<std::size_t>(d)]);
      f.points.push_back(p);
      f.values.emplace_back(std::stod(row[row.size() - 2]),
                            std::stod(row[row.size() - 1]));
    }
    return f;
  }
};

struct HolderEstimate {
  double seminorm = 0.0;
  double sup_norm = 0.0;
  std::pair<std::size_t, std::size_t> argmax_pair{0, 0};
  std::string modulus;

  double norm() const { return sup_norm + seminorm; }

  nlohmann::ordered_json to_json() const {
    return {{"seminorm", seminorm},
            {"sup_norm", sup_norm},
            {"pair", {argmax_pair.first, argmax_pair.second}},
            {"modulus", modulus}};
  }
};

/// Exact maximum of |f(x)-f(y)| / omega(|x-y|) over all sampled pairs.
/// The O(N^2) scan is intentional; N stays at desk scale.
inline HolderEstimate holder_seminorm(const SampledFunction& f,
                                      const ModulusFunction& omega) {
  const std::size_t n = f.size();
  if (n < 2) throw ArgumentError("holder_seminorm: need at least 2 points");
  std::vector<double> best(n, 0.0);
  std::vector<std::size_t> best_j(n, 0);
  parallel_for(n, [&](std::size_t i) {
    double b = 0.0;
    std::size_t bj = i;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double w = omega(f.distance(i, j));
      const double r = std::abs(f.values[i] - f.values[j]) / w;
      if (r > b) {
        b = r;
        bj = j;
      }
    }
    best[i] = b;
    best_j[i] = bj;
  });
  HolderEstimate e;
  e.modulus = omega.name();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (best[i] > e.seminorm) {
      e.seminorm = best[i];
      e.argmax_pair = {i, best_j[i]};
    }
  }
  e.sup_norm = f.sup_abs();
  return e;
}

struct ModulusAxiomReport {
  bool monotone = false;
  bool limit0 = false;
  double homogeneity_sup = 0.0;
};

/// Samples the axioms of a modulus: monotonicity over `grid`, decay at
/// the smallest grid point (tolerance 1e-8, diagnostic only), and
/// sup omega(a t) / (a omega(t)) over grid x scale_grid.
inline ModulusAxiomReport check_modulus_axioms(
    const ModulusFunction& omega, const std::vector<double>& grid,
    const std::vector<double>& scale_grid) {
  if (grid.empty() || scale_grid.empty())
    throw ArgumentError("check_modulus_axioms: empty grid");
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw ArgumentError("check_modulus_axioms: grid must be sorted");
  ModulusAxiomReport rep;
  rep.monotone = true;
  double prev = -1.0;
  for (double t : grid) {
    const double w = omega(t);
    if (w < prev) rep.monotone = false;
    prev = w;
  }
  rep.limit0 = omega(grid.front()) < 1e-8;
  for (double t : grid) {
    const double wt = omega(t);
    if (wt <= 0.0) continue;
    for (double a : scale_grid)
      rep.homogeneity_sup =
          std::max(rep.homogeneity_sup, omega(a * t) / (a * wt));
  }
  return rep;
}

struct Remark21Result {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// For pairs separated by at least `a`, the Holder quotient is bounded
/// by 2 sup|f| / omega(a).
inline Remark21Result remark21_check(const SampledFunction& f, double a,
                                     const ModulusFunction& omega) {
  if (!(a > 0.0)) throw ArgumentError("remark21_check: a must be positive");
  const std::size_t n = f.size();
  Remark21Result r;
  bool any = false;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = f.distance(i, j);
      if (d < a) continue;
      any = true;
      r.lhs = std::max(r.lhs, std::abs(f.values[i] - f.values[j]) / omega(d));
    }
  if (!any)
    throw ArgumentError("remark21_check: no pair with separation >= a");
  r.rhs = 2.0 / omega(a) * f.sup_abs();
  r.holds = r.lhs <= r.rhs * (1.0 + 1e-12);
  return r;
}

/// Discrete C^{1,omega} norm of a field on a closed-region grid:
/// sup|f| + sup|grad f| + sum over components of the omega-seminorm of
/// the gradient.
inline double discrete_c1_omega_norm(
    const SampledFunction& field,
    const std::vector<SampledFunction>& gradient_components,
    const ModulusFunction& omega) {
  if (gradient_components.empty())
    throw ArgumentError("discrete_c1_omega_norm: no gradient components");
  for (const auto& g : gradient_components)
    if (g.size() != field.size() || g.points != field.points)
      throw ArgumentError("discrete_c1_omega_norm: mismatched grids");
  double sup_grad = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    double s = 0.0;
    for (const auto& g : gradient_components) s += std::norm(g.values[i]);
    sup_grad = std::max(sup_grad, std::sqrt(s));
  }
  double semis = 0.0;
  for (const auto& g : gradient_components)
    semis += holder_seminorm(g, omega).seminorm;
  return field.sup_abs() + sup_grad + semis;
}

}  // namespace miranda
