#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "miranda/moduli.hpp"

using namespace miranda;

namespace {

SampledFunction grid_function(int side, double lo, double hi,
                              const std::function<Complex(Vec2)>& f) {
  SampledFunction s;
  s.domain = SampledFunction::Domain::closed_region;
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j) {
      const Vec2 p{lo + (hi - lo) * i / (side - 1),
                   lo + (hi - lo) * j / (side - 1)};
      s.push_back(p, f(p));
    }
  return s;
}

}  // namespace

TEST_CASE("omega1 branch values") {
  CHECK(omega1_eval(0.0) == 0.0);
  const double r1 = std::exp(-1.0);
  CHECK(omega1_eval(r1) == Catch::Approx(r1).epsilon(1e-15));
  CHECK(omega1_eval(10.0) == Catch::Approx(r1).epsilon(1e-15));
  CHECK(omega1_eval(0.1) == Catch::Approx(0.1 * std::log(10.0)).epsilon(1e-12));
  CHECK(omega1_eval(0.1) == Catch::Approx(0.230258509299).epsilon(1e-9));
  CHECK_THROWS_AS(omega1_eval(-1e-9), DomainError);
}

TEST_CASE("omega1 is concave on [0, 1/e] (midpoint test on a dense grid)") {
  const double r1 = std::exp(-1.0);
  for (int i = 0; i <= 400; ++i)
    for (int step = 1; step <= 40; step += 7) {
      const double a = r1 * i / 400.0;
      const double b = std::min(r1, a + r1 * step / 400.0);
      const double mid = omega1_eval(0.5 * (a + b));
      const double chord = 0.5 * (omega1_eval(a) + omega1_eval(b));
      CHECK(mid >= chord - 1e-14);
    }
}

TEST_CASE("modulus axiom report") {
  std::vector<double> grid;
  for (int k = -100; k <= 0; ++k) grid.push_back(std::pow(10.0, k / 10.0));
  const std::vector<double> scales{1.0, 1.5, 2.0, 4.0, 10.0, 100.0};

  SECTION("omega1: monotone, homogeneity sup <= 1") {
    const auto rep = check_modulus_axioms(ModulusFunction::omega1(), grid,
                                          scales);
    CHECK(rep.monotone);
    CHECK(rep.limit0);
    CHECK(rep.homogeneity_sup <= 1.0 + 1e-12);
  }
  SECTION("alpha = 1: exact homogeneity") {
    const auto rep =
        check_modulus_axioms(ModulusFunction::power(1.0), grid, scales);
    CHECK(rep.monotone);
    CHECK(rep.homogeneity_sup == Catch::Approx(1.0).epsilon(1e-13));
  }
  SECTION("r^2 (tabulated): monotone but the homogeneity axiom fails") {
    std::vector<double> r, w;
    for (int i = 1; i <= 4000; ++i) {
      const double t = 110.0 * i / 4000.0;
      r.push_back(t);
      w.push_back(t * t);
    }
    const auto m = ModulusFunction::tabulated(r, w);
    std::vector<double> g{0.1, 0.5, 1.0};
    const auto rep = check_modulus_axioms(m, g, scales);
    CHECK(rep.monotone);
    CHECK(rep.homogeneity_sup > 50.0);  // ~ max scale
  }
}

TEST_CASE("holder seminorm basic examples") {
  SECTION("constants have zero seminorm") {
    SampledFunction f;
    f.push_back({0.0, 0.0}, Complex(3.5, -1.0));
    f.push_back({0.3, 0.4}, Complex(3.5, -1.0));
    f.push_back({1.0, -0.2}, Complex(3.5, -1.0));
    const auto e = holder_seminorm(f, ModulusFunction::power(1.0));
    CHECK(e.seminorm == 0.0);
    CHECK(e.sup_norm == Catch::Approx(std::abs(Complex(3.5, -1.0))));
  }
  SECTION("f = x1 with omega = r: seminorm 1 on an axis-aligned pair") {
    SampledFunction f = grid_function(
        5, 0.0, 1.0, [](Vec2 p) { return Complex(p.x, 0.0); });
    const auto e = holder_seminorm(f, ModulusFunction::power(1.0));
    CHECK(e.seminorm == Catch::Approx(1.0).epsilon(1e-13));
  }
  SECTION("two points at t = e^{-2} against omega1: ratio 1/2") {
    const double t = std::exp(-2.0);
    SampledFunction f;
    f.push_back({0.0, 0.0}, Complex(0.0, 0.0));
    f.push_back({t, 0.0}, Complex(t, 0.0));
    const auto e = holder_seminorm(f, ModulusFunction::omega1());
    CHECK(e.seminorm == Catch::Approx(0.5).epsilon(1e-13));
    CHECK(e.argmax_pair == std::pair<std::size_t, std::size_t>{0, 1});
  }
  SECTION("fewer than two points is an error") {
    SampledFunction f;
    f.push_back({0.0, 0.0}, Complex(1.0, 0.0));
    CHECK_THROWS_AS(holder_seminorm(f, ModulusFunction::omega1()),
                    ArgumentError);
  }
}

TEST_CASE("seminorm never decreases under point-set refinement") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    SampledFunction f;
    for (int i = 0; i < 12; ++i)
      f.push_back({u(rng), u(rng)}, Complex(u(rng), u(rng)));
    const auto before = holder_seminorm(f, ModulusFunction::omega1());
    for (int i = 0; i < 6; ++i)
      f.push_back({u(rng), u(rng)}, Complex(u(rng), u(rng)));
    const auto after = holder_seminorm(f, ModulusFunction::omega1());
    CHECK(after.seminorm >= before.seminorm);
  }
}

TEST_CASE("remark 2.1 inequality") {
  SECTION("equality case: +-M at distance a") {
    const double M = 2.0, a = 0.37;
    SampledFunction f;
    f.push_back({0.0, 0.0}, Complex(M, 0.0));
    f.push_back({a, 0.0}, Complex(-M, 0.0));
    const auto r = remark21_check(f, a, ModulusFunction::omega1());
    CHECK(r.lhs == Catch::Approx(r.rhs).epsilon(1e-13));
    CHECK(r.holds);
  }
  SECTION("zero function") {
    SampledFunction f;
    f.push_back({0.0, 0.0}, Complex(0.0, 0.0));
    f.push_back({1.0, 0.0}, Complex(0.0, 0.0));
    const auto r = remark21_check(f, 0.5, ModulusFunction::omega1());
    CHECK(r.lhs == 0.0);
    CHECK(r.holds);
  }
  SECTION("no admissible pair is an error") {
    SampledFunction f;
    f.push_back({0.0, 0.0}, Complex(1.0, 0.0));
    f.push_back({0.1, 0.0}, Complex(2.0, 0.0));
    CHECK_THROWS_AS(remark21_check(f, 5.0, ModulusFunction::omega1()),
                    ArgumentError);
  }
  SECTION("randomized property: holds on every sample") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> ua(0.05, 0.8);
    const std::vector<ModulusFunction> moduli{
        ModulusFunction::omega1(), ModulusFunction::power(0.5),
        ModulusFunction::power(1.0)};
    int violations = 0;
    for (int trial = 0; trial < 200; ++trial) {
      SampledFunction f;
      const int n = 3 + static_cast<int>(trial % 9);
      for (int i = 0; i < n; ++i)
        f.push_back({2.0 * u(rng), 2.0 * u(rng)},
                    Complex(5.0 * u(rng), 5.0 * u(rng)));
      const auto& om = moduli[static_cast<std::size_t>(trial) % 3];
      try {
        if (!remark21_check(f, ua(rng), om).holds) ++violations;
      } catch (const ArgumentError&) {
      }
    }
    CHECK(violations == 0);
  }
}

TEST_CASE("embedding chain: Lipschitz controls the omega1 seminorm") {
  // |f(x)-f(y)| / omega1(r) <= L r / omega1(r); for r > 1/e Remark 2.1
  // bounds the quotient by 2 sup|f| / omega1(r1).
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  for (int trial = 0; trial < 25; ++trial) {
    SampledFunction f;
    for (int i = 0; i < 24; ++i) {
      const Vec2 p{u(rng), u(rng)};
      f.push_back(p, Complex(std::sin(2.0 * p.x) + 0.5 * p.y, 0.0));
    }
    const double lip =
        holder_seminorm(f, ModulusFunction::power(1.0)).seminorm;
    const double om1 = holder_seminorm(f, ModulusFunction::omega1()).seminorm;
    const double r1 = std::exp(-1.0);
    double ratio_cap = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
      for (std::size_t j = i + 1; j < f.size(); ++j) {
        const double r = f.distance(i, j);
        if (r <= r1) ratio_cap = std::max(ratio_cap, r / omega1_eval(r));
      }
    const double small_scale_bound = lip * ratio_cap;
    const double large_scale_bound = 2.0 * f.sup_abs() / omega1_eval(r1);
    CHECK(om1 <= std::max(small_scale_bound, large_scale_bound) * (1 + 1e-12));
  }
}

TEST_CASE("discrete C^1,omega norm") {
  SECTION("constant field") {
    SampledFunction f = grid_function(
        4, 0.0, 1.0, [](Vec2) { return Complex(-2.0, 0.0); });
    std::vector<SampledFunction> grad(2, f);
    for (auto& g : grad)
      for (auto& v : g.values) v = Complex(0.0, 0.0);
    CHECK(discrete_c1_omega_norm(f, grad, ModulusFunction::omega1()) ==
          Catch::Approx(2.0));
  }
  SECTION("f = x1 on the unit square") {
    SampledFunction f = grid_function(
        6, 0.0, 1.0, [](Vec2 p) { return Complex(p.x, 0.0); });
    SampledFunction gx = f, gy = f;
    for (auto& v : gx.values) v = Complex(1.0, 0.0);
    for (auto& v : gy.values) v = Complex(0.0, 0.0);
    const double n =
        discrete_c1_omega_norm(f, {gx, gy}, ModulusFunction::omega1());
    CHECK(n == Catch::Approx(1.0 + 1.0 + 0.0).epsilon(1e-13));
  }
  SECTION("f = |x|^2/2: gradient x, Lipschitz seminorm 1 per component") {
    SampledFunction f = grid_function(6, 0.0, 1.0, [](Vec2 p) {
      return Complex(0.5 * norm2(p), 0.0);
    });
    SampledFunction gx = f, gy = f;
    for (std::size_t i = 0; i < f.size(); ++i) {
      gx.values[i] = Complex(f.points[i][0], 0.0);
      gy.values[i] = Complex(f.points[i][1], 0.0);
    }
    // brute-force oracle over sampled pairs
    double lip_x = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
      for (std::size_t j = i + 1; j < f.size(); ++j)
        lip_x = std::max(lip_x, std::abs(gx.values[i] - gx.values[j]) /
                                    f.distance(i, j));
    CHECK(lip_x == Catch::Approx(1.0).epsilon(1e-13));
    const double n =
        discrete_c1_omega_norm(f, {gx, gy}, ModulusFunction::power(1.0));
    const double sup_f = 1.0, sup_g = std::sqrt(2.0);
    CHECK(n == Catch::Approx(sup_f + sup_g + 2.0).epsilon(1e-12));
  }
  SECTION("mismatched grids are an error") {
    SampledFunction f = grid_function(
        4, 0.0, 1.0, [](Vec2 p) { return Complex(p.x, 0.0); });
    SampledFunction g = grid_function(
        5, 0.0, 1.0, [](Vec2) { return Complex(1.0, 0.0); });
    CHECK_THROWS_AS(discrete_c1_omega_norm(f, {g, g},
                                           ModulusFunction::omega1()),
                    ArgumentError);
  }
}

TEST_CASE("tabulated modulus interpolation") {
  const auto m = ModulusFunction::tabulated({0.5, 1.0, 2.0}, {1.0, 1.5, 2.0});
  CHECK(m(0.0) == 0.0);
  CHECK(m(0.25) == Catch::Approx(0.5));   // segment from the origin
  CHECK(m(0.75) == Catch::Approx(1.25));  // linear between nodes
  CHECK(m(5.0) == Catch::Approx(2.0));    // constant continuation
  CHECK_THROWS_AS(ModulusFunction::tabulated({1.0, 0.5}, {1.0, 2.0}),
                  ArgumentError);
}

TEST_CASE("sampled function CSV round trip") {
  SampledFunction f;
  f.push_back({0.125, -3.0}, Complex(1.0 / 3.0, -0.25));
  f.push_back({2.5, 0.75}, Complex(0.0, 11.0));
  const auto path =
      std::filesystem::temp_directory_path() / "miranda_sf_test.csv";
  f.write_csv(path);
  const SampledFunction g = SampledFunction::read_csv(path);
  REQUIRE(g.size() == f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(g.points[i] == f.points[i]);
    CHECK(g.values[i] == f.values[i]);
  }
  std::filesystem::remove(path);
}

TEST_CASE("holder estimate JSON record") {
  SampledFunction f;
  f.push_back({0.0, 0.0}, Complex(0.0, 0.0));
  f.push_back({0.5, 0.0}, Complex(1.0, 0.0));
  const auto e = holder_seminorm(f, ModulusFunction::omega1());
  const auto j = e.to_json();
  CHECK(j.contains("seminorm"));
  CHECK(j.contains("sup_norm"));
  CHECK(j["pair"].size() == 2);
  CHECK(j["modulus"] == "omega1");
}
