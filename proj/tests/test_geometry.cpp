#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "miranda/geometry.hpp"
#include "oracles.hpp"

using namespace miranda;

TEST_CASE("circle frame: normals, weights, length") {
  const auto frame = make_frame(BoundaryCurve::ellipse(1.0, 1.0), 64);
  for (int i = 0; i < frame.N; ++i) {
    const double t = frame.t[static_cast<std::size_t>(i)];
    CHECK(frame.normal[static_cast<std::size_t>(i)].x ==
          Catch::Approx(std::cos(t)).margin(1e-14));
    CHECK(frame.normal[static_cast<std::size_t>(i)].y ==
          Catch::Approx(std::sin(t)).margin(1e-14));
    CHECK(frame.weight[static_cast<std::size_t>(i)] ==
          Catch::Approx(kTwoPi / 64.0).epsilon(1e-14));
    // unit normal, orthogonal to the tangent
    CHECK(norm(frame.normal[static_cast<std::size_t>(i)]) ==
          Catch::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(dot(frame.normal[static_cast<std::size_t>(i)],
                       frame.curve.derivative(t))) < 1e-14);
    CHECK(frame.curvature[static_cast<std::size_t>(i)] ==
          Catch::Approx(1.0).epsilon(1e-13));
  }
  CHECK(frame.length() == Catch::Approx(kTwoPi).epsilon(1e-14));
}

TEST_CASE("ellipse(2,1) length matches the adaptive oracle") {
  const auto curve = BoundaryCurve::ellipse(2.0, 1.0);
  const double oracle = oracles::adaptive_simpson(
      [&curve](double t) { return curve.speed(t); }, 0.0, kTwoPi, 1e-13);
  CHECK(oracle == Catch::Approx(9.68844822054768).epsilon(1e-11));
  const auto frame = make_frame(curve, 256);
  CHECK(frame.length() == Catch::Approx(oracle).margin(1e-10));
}

TEST_CASE("star(1, 0.2, 5): simple closed analytic curve, tangent winding 1") {
  const auto frame = make_frame(BoundaryCurve::star(1.0, 0.2, 5), 256);
  std::vector<Vec2> tangents;
  for (double t : frame.t) tangents.push_back(frame.curve.derivative(t));
  CHECK(winding_number(tangents, Vec2{0.0, 0.0}) == 1);
  CHECK(winding_number(frame.point, Vec2{0.0, 0.0}) == 1);
}

TEST_CASE("construction validation") {
  CHECK_THROWS_AS(make_frame(BoundaryCurve::ellipse(1.0, 1.0), 15),
                  ArgumentError);
  CHECK_THROWS_AS(make_frame(BoundaryCurve::ellipse(1.0, 1.0), 8),
                  ArgumentError);
  CHECK_THROWS_AS(BoundaryCurve::star(0.5, 0.6, 3), ConstructionError);
  CHECK_THROWS_AS(BoundaryCurve::ellipse(-1.0, 1.0), ConstructionError);
  CHECK_THROWS_AS(BoundaryCurve::c11_blend(0.1, 1.0), ConstructionError);
}

TEST_CASE("spectral parameter derivative") {
  const int N = 32;
  std::vector<double> s(N), c(N), s8(N);
  for (int i = 0; i < N; ++i) {
    const double t = kTwoPi * i / N;
    s[static_cast<std::size_t>(i)] = std::sin(t);
    c[static_cast<std::size_t>(i)] = 1.0;
    s8[static_cast<std::size_t>(i)] = std::sin(8.0 * t);
  }
  const auto ds = spectral_param_derivative(s);
  const auto dc = spectral_param_derivative(c);
  const auto ds8 = spectral_param_derivative(s8);
  for (int i = 0; i < N; ++i) {
    const double t = kTwoPi * i / N;
    CHECK(ds[static_cast<std::size_t>(i)] ==
          Catch::Approx(std::cos(t)).margin(1e-12));
    CHECK(dc[static_cast<std::size_t>(i)] == Catch::Approx(0.0).margin(1e-12));
    CHECK(ds8[static_cast<std::size_t>(i)] ==
          Catch::Approx(8.0 * std::cos(8.0 * t)).margin(1e-11));
  }
}

namespace {

BoundaryDensity ambient_trace(const BoundaryFrame& frame,
                              const std::function<double(Vec2)>& f) {
  BoundaryDensity d;
  d.values.resize(frame.point.size());
  for (std::size_t i = 0; i < frame.point.size(); ++i)
    d.values[i] = Complex(f(frame.point[i]), 0.0);
  d.tag = Regularity::cm1;
  return d;
}

}  // namespace

TEST_CASE("tangential derivative on the unit circle") {
  const auto frame = make_frame(BoundaryCurve::ellipse(1.0, 1.0), 64);
  SECTION("constant maps to zero") {
    const auto d = tangential_derivative(frame, density_constant(frame), 1, 2);
    for (const Complex& v : d.values) CHECK(std::abs(v) < 1e-13);
  }
  SECTION("M_12[x1] = -nu_2, M_12[x2] = nu_1") {
    const auto f1 = ambient_trace(frame, [](Vec2 p) { return p.x; });
    const auto f2 = ambient_trace(frame, [](Vec2 p) { return p.y; });
    const auto d1 = tangential_derivative(frame, f1, 1, 2);
    const auto d2 = tangential_derivative(frame, f2, 1, 2);
    for (int i = 0; i < frame.N; ++i) {
      CHECK(d1.values[static_cast<std::size_t>(i)].real() ==
            Catch::Approx(-std::sin(frame.t[static_cast<std::size_t>(i)]))
                .margin(1e-12));
      CHECK(d2.values[static_cast<std::size_t>(i)].real() ==
            Catch::Approx(std::cos(frame.t[static_cast<std::size_t>(i)]))
                .margin(1e-12));
    }
  }
  SECTION("c01 densities are rejected") {
    const auto hat = density_lipschitz_hat(frame);
    CHECK_THROWS_AS(tangential_derivative(frame, hat, 1, 2), CapabilityError);
  }
}

TEST_CASE("tangential derivative on ellipse(2,1): extension formula") {
  const auto frame = make_frame(BoundaryCurve::ellipse(2.0, 1.0), 128);
  const auto f = ambient_trace(frame, [](Vec2 p) { return p.x * p.y; });
  const auto d = tangential_derivative(frame, f, 1, 2);
  for (std::size_t i = 0; i < frame.point.size(); ++i) {
    const Vec2 p = frame.point[i];
    const Vec2 nu = frame.normal[i];
    // M_12[x1 x2] = nu_1 x1 - nu_2 x2 with the extension x1 x2
    CHECK(d.values[i].real() ==
          Catch::Approx(nu.x * p.x - nu.y * p.y).margin(1e-11));
  }
}

TEST_CASE("extension independence of M_12 within 1e-10") {
  // Extensions f and f (1 + F)^2 with F the implicit ellipse function
  // share the tangential derivative: their ambient gradients differ by
  // a multiple of grad F, which is normal to the curve.
  const double a = 2.0, b = 1.0;
  const auto frame = make_frame(BoundaryCurve::ellipse(a, b), 256);
  auto Ffun = [a, b](Vec2 p) {
    return p.x * p.x / (a * a) + p.y * p.y / (b * b) - 1.0;
  };
  auto gradF = [a, b](Vec2 p) {
    return Vec2{2.0 * p.x / (a * a), 2.0 * p.y / (b * b)};
  };
  for (std::size_t i = 0; i < frame.point.size(); ++i) {
    const Vec2 p = frame.point[i];
    const Vec2 nu = frame.normal[i];
    const Vec2 g1{p.y, p.x};  // grad (x1 x2)
    const double F = Ffun(p);
    const Vec2 gF = gradF(p);
    const Vec2 g2{g1.x * (1.0 + F) * (1.0 + F) +
                      p.x * p.y * 2.0 * (1.0 + F) * gF.x,
                  g1.y * (1.0 + F) * (1.0 + F) +
                      p.x * p.y * 2.0 * (1.0 + F) * gF.y};
    const double m1 = nu.x * g1.y - nu.y * g1.x;
    const double m2 = nu.x * g2.y - nu.y * g2.x;
    CHECK(std::abs(m1 - m2) < 1e-10);
  }
}

TEST_CASE("M antisymmetry, Leibniz rule, integration by parts") {
  const auto frame = make_frame(BoundaryCurve::ellipse(2.0, 1.0), 128);
  const auto f = ambient_trace(frame, [](Vec2 p) { return p.x; });
  const auto g = ambient_trace(frame, [](Vec2 p) { return p.y * p.y; });

  const auto m12f = tangential_derivative(frame, f, 1, 2);
  const auto m21f = tangential_derivative(frame, f, 2, 1);
  const auto m11f = tangential_derivative(frame, f, 1, 1);
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    CHECK(m12f.values[i] == -m21f.values[i]);  // exact as computed
    CHECK(m11f.values[i] == Complex(0.0, 0.0));
  }

  BoundaryDensity fg;
  fg.tag = Regularity::cm1;
  fg.values.resize(f.values.size());
  for (std::size_t i = 0; i < f.values.size(); ++i)
    fg.values[i] = f.values[i] * g.values[i];
  const auto mfg = tangential_derivative(frame, fg, 1, 2);
  const auto m12g = tangential_derivative(frame, g, 1, 2);
  double worst = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    worst = std::max(worst,
                     std::abs(mfg.values[i] - f.values[i] * m12g.values[i] -
                              g.values[i] * m12f.values[i]));
  CHECK(worst < 1e-10);

  Complex integral(0.0, 0.0);
  for (std::size_t i = 0; i < f.values.size(); ++i)
    integral += mfg.values[i] * frame.weight[i];
  CHECK(std::abs(integral) < 1e-10);
}

TEST_CASE("point classification on the unit circle") {
  const auto frame = make_frame(BoundaryCurve::ellipse(1.0, 1.0), 128);
  CHECK(classify_point(frame, Vec2{0.0, 0.0}).cls == PointClass::inside);
  CHECK(classify_point(frame, Vec2{2.0, 0.0}).cls == PointClass::outside);
  const auto near = classify_point(frame, Vec2{1.0 + 1e-6, 0.0});
  CHECK(near.cls == PointClass::near_boundary);
  CHECK(near.distance == Catch::Approx(1e-6).margin(1e-11));
  // threshold scales with the node spacing
  const auto off = classify_point(frame, Vec2{1.1, 0.0});
  CHECK(off.cls == PointClass::near_boundary);
  CHECK(classify_point(frame, Vec2{1.5, 0.0}).cls == PointClass::outside);
}

TEST_CASE("c11 blend curve: C^{1,1} with curvature jumps at 0 and pi") {
  const auto curve = BoundaryCurve::c11_blend(1.0, 0.1);
  const auto frame = make_frame(curve, 128);
  CHECK(curve.smoothness == Smoothness::c11);
  // one-sided curvature limits differ across t = pi
  const double eps = 1e-6;
  const double km = curve.curvature(std::numbers::pi - eps);
  const double kp = curve.curvature(std::numbers::pi + eps);
  CHECK(std::abs(km - kp) > 1e-3);
  // at the jump parameter the evaluation is the two-sided average
  const double kat = curve.curvature(std::numbers::pi);
  CHECK(kat == Catch::Approx(0.5 * (km + kp)).margin(1e-4));
  // derivative continuity across the junction
  const Vec2 dm = curve.derivative(std::numbers::pi - eps);
  const Vec2 dp = curve.derivative(std::numbers::pi + eps);
  CHECK(norm(dm - dp) < 1e-5);
  CHECK(frame.length() > 0.0);
}

TEST_CASE("density presets") {
  const auto frame = make_frame(BoundaryCurve::ellipse(1.0, 1.0), 64);
  const auto hat = density_lipschitz_hat(frame, 0.5);
  CHECK(hat.tag == Regularity::c01);
  CHECK(hat.fn(0.5) == Complex(0.0, 0.0));
  CHECK(hat.fn(0.5 + 1.0).real() == Catch::Approx(1.0));
  CHECK(hat.fn(0.5 - 1.0).real() == Catch::Approx(1.0));

  const auto smooth_hat = density_c11_hat(frame, 0.0);
  CHECK(smooth_hat.tag == Regularity::c11);
  // periodic and continuous at the wrap
  CHECK(smooth_hat.fn(std::numbers::pi - 1e-9).real() ==
        Catch::Approx(smooth_hat.fn(-std::numbers::pi + 1e-9).real())
            .margin(1e-7));
  // derivative is hat - pi/2 (Lipschitz): finite difference check
  const double h = 1e-6;
  const double fd =
      (smooth_hat.fn(1.0 + h).real() - smooth_hat.fn(1.0 - h).real()) /
      (2.0 * h);
  CHECK(fd == Catch::Approx(1.0 - 0.5 * std::numbers::pi).margin(1e-8));
}

TEST_CASE("frame CSV export columns") {
  const auto frame = make_frame(BoundaryCurve::ellipse(1.0, 1.0), 16);
  const auto path =
      std::filesystem::temp_directory_path() / "miranda_frame_test.csv";
  frame.write_csv(path);
  const auto table = read_csv(path);
  CHECK(table.header ==
        std::vector<std::string>{"t", "x1", "x2", "nu1", "nu2", "w"});
  CHECK(table.rows.size() == 16);
  std::filesystem::remove(path);
}
