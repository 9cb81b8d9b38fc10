#include "catch_amalgamated.hpp"
#include "pwhs/complex_field.hpp"

#include <random>

using namespace pwhs;
using Catch::Approx;

static double cdist(Complex a, Complex b) { return std::abs(a - b); }

TEST_CASE("validation rejects malformed fields") {
  CHECK_THROWS_AS(validate(FieldSpec{Power{1, {}, 0}}), InvalidFieldSpec);
  CHECK_THROWS_AS(validate(FieldSpec{Power{2, {}, 2}}), InvalidFieldSpec);
  CHECK_THROWS_AS(validate(FieldSpec{Pole{0, {}, 0}}), InvalidFieldSpec);
  CHECK_THROWS_AS(validate(FieldSpec{Rational{0.0, 2, {}}}), InvalidFieldSpec);
  CHECK_THROWS_AS(validate(FieldSpec{Rational{1.0, 1, {}}}), InvalidFieldSpec);
  CHECK_THROWS_AS(validate(FieldSpec{Laurent{{}, {}, {}}}), InvalidFieldSpec);
  CHECK_THROWS_AS(validate(FieldSpec{EssentialExp{1, 1}}), InvalidFieldSpec);
  CHECK_NOTHROW(validate(FieldSpec{EssentialExp{2, 1}}));
  CHECK_NOTHROW(validate(FieldSpec{Linear{{1, 2}, {0, 0}}}));
}

TEST_CASE("evaluation of the normal forms") {
  FieldSpec lin = Linear{{2, -1}, {1, 1}};
  CHECK(cdist(eval(lin, {1, 1}), {0, 0}) == 0.0);
  CHECK(cdist(eval(lin, {2, 1}), {2, -1}) < 1e-15);

  FieldSpec pw = Power{2, {0, 0}, 0};
  CHECK(cdist(eval(pw, {0, 1}), {-1, 0}) < 1e-15);

  FieldSpec pw_i = Power{3, {0, 0}, 1};  // i z^3
  CHECK(cdist(eval(pw_i, {0, 1}), Complex{0, 1} * Complex{0, -1}) < 1e-15);

  FieldSpec pole = Pole{1, {0, 0}, 0};
  CHECK_THROWS_AS(eval(pole, {0, 0}), EvaluationAtSingularity);
  CHECK(cdist(eval(pole, {0, 2}), {0, -0.5}) < 1e-15);

  FieldSpec rat = Rational{1.0, 2, {0, 0}};
  double w = 0.05;
  CHECK(cdist(eval(rat, {w, 0}), Complex{w * w / (1 + w), 0}) < 1e-15);

  // Rational denominator zero: n = 2 puts the bad point at center - 1.
  CHECK_THROWS_AS(eval(rat, {-1, 0}), EvaluationAtSingularity);
}

TEST_CASE("laurent evaluation matches its defining sum") {
  Laurent l;
  l.center = {0.5, -0.5};
  l.principal = {{1, 0}, {0, 2}};      // 1/w + 2i/w^2
  l.analytic = {{3, 0}, {0, 0}, {1, 1}};  // 3 + (1+i) w^2
  Complex z{2, 1};
  Complex ww = z - l.center;
  Complex want = 1.0 / ww + Complex{0, 2} / (ww * ww) + 3.0 + Complex{1, 1} * ww * ww;
  CHECK(cdist(eval(FieldSpec{l}, z), want) < 1e-14);
  CHECK_THROWS_AS(eval(FieldSpec{l}, l.center), EvaluationAtSingularity);
}

TEST_CASE("essential singularity field") {
  FieldSpec f = EssentialExp{2, 1};  // z^2 exp(1/z)
  Complex z{0, 0.5};
  Complex want = z * z * std::exp(1.0 / z);
  CHECK(cdist(eval(f, z), want) < 1e-14);
  CHECK_THROWS_AS(eval(f, {0, 0}), EvaluationAtSingularity);
  CHECK(singular_points(f).size() == 1);
}

TEST_CASE("singular point inventory") {
  CHECK(singular_points(FieldSpec{Linear{{1, 1}, {}}}).empty());
  auto pole_pts = singular_points(FieldSpec{Pole{3, {2, 1}, 0}});
  REQUIRE(pole_pts.size() == 1);
  CHECK(cdist(pole_pts[0], {2, 1}) == 0.0);

  // Rational n: denominator zeros are the (n-1)-th roots of -1 about the center.
  auto rat_pts = singular_points(FieldSpec{Rational{1.0, 2, {1, 0}}});
  REQUIRE(rat_pts.size() == 1);
  CHECK(cdist(rat_pts[0], {0, 0}) < 1e-12);
  auto rat3 = singular_points(FieldSpec{Rational{1.0, 3, {0, 0}}});
  REQUIRE(rat3.size() == 2);
  for (Complex p : rat3) CHECK(std::abs(std::abs(p) - 1.0) < 1e-12);
}

TEST_CASE("closed-form derivative") {
  CHECK(cdist(eval_derivative(FieldSpec{Linear{{2, -1}, {5, 5}}}, {0, 0}), {2, -1}) <
        1e-15);
  Complex z{1.5, -0.5};
  CHECK(cdist(eval_derivative(FieldSpec{Power{3, {0, 0}, 0}}, z), 3.0 * z * z) < 1e-13);
  // d/dz 1/z = -1/z^2; at z = i this equals 1.
  CHECK(cdist(eval_derivative(FieldSpec{Pole{1, {0, 0}, 0}}, {0, 1}), {1, 0}) < 1e-14);
}

TEST_CASE("derivative agrees with central differences") {
  std::vector<FieldSpec> fields = {
      Linear{{1, 2}, {0.5, 0}}, Power{4, {0, -1}, 1}, Pole{2, {1, 1}, 0},
      Rational{2.0, 3, {0, 0}}, EssentialExp{3, 2}};
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (const FieldSpec& f : fields) {
    for (int trial = 0; trial < 20; ++trial) {
      Complex z{U(rng), U(rng)};
      if (exclusion_distance(f, z) < 0.3) continue;
      double h = 1e-6;
      Complex num = (eval(f, z + Complex{h, 0}) - eval(f, z - Complex{h, 0})) / (2 * h);
      Complex der = eval_derivative(f, z);
      CHECK(cdist(num, der) < 1e-6 * std::max(1.0, std::abs(der)));
    }
  }
}

TEST_CASE("taylor series reproduces the field near the base point") {
  std::vector<FieldSpec> fields = {Rational{1.0, 2, {0, 0}}, Pole{2, {0, 0}, 1},
                                   Laurent{{0, 0}, {{1, 0}}, {{0, 1}, {2, 0}}},
                                   EssentialExp{2, 1}};
  for (const FieldSpec& f : fields) {
    Complex q{0.8, 0.6};
    int K = 10;
    auto A = taylor(f, q, K);
    Complex dz{0.05, -0.03};
    Complex acc{};
    Complex p{1, 0};
    for (int k = 0; k <= K; ++k) {
      acc += A[k] * p;
      p *= dz;
    }
    CHECK(cdist(acc, eval(f, q + dz)) < 1e-9 * std::max(1.0, std::abs(acc)));
  }
}

TEST_CASE("orbit series of the linear field is the exponential flow") {
  Linear lf{{0.7, -1.3}, {0.2, 0.4}};
  Complex q{1, 1};
  auto c = orbit_series(FieldSpec{lf}, q, 8);
  Complex w = q - lf.center;
  double fact = 1.0;
  for (int j = 1; j <= 8; ++j) {
    fact *= j;
    Complex want = w * detail::ipow(lf.coeff, j) / fact;
    CHECK(cdist(c[j], want) < 1e-12 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("orbit series matches a short numeric flow") {
  FieldSpec f = Rational{1.0, 2, {0, -0.2}};
  Complex q{0.05, 0.0};
  auto c = orbit_series(f, q, 12);
  double t = 0.01;
  Complex series_val = q;
  double tp = 1.0;
  for (int j = 1; j <= 12; ++j) {
    tp *= t;
    series_val += c[j] * tp;
  }
  // Classical RK4 with tiny steps as the independent check.
  Complex z = q;
  int N = 1000;
  double h = t / N;
  for (int i = 0; i < N; ++i) {
    Complex k1 = eval(f, z);
    Complex k2 = eval(f, z + 0.5 * h * k1);
    Complex k3 = eval(f, z + 0.5 * h * k2);
    Complex k4 = eval(f, z + h * k3);
    z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  CHECK(cdist(series_val, z) < 1e-12);
}

TEST_CASE("planar view agrees with complex evaluation") {
  FieldSpec f = Power{2, {1, 0.5}, 0};
  PlanarField pf = to_planar(f);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    Complex z{U(rng), U(rng)};
    Complex v = eval(f, z);
    CHECK(std::abs(pf.u(z) - v.real()) < 1e-12);
    CHECK(std::abs(pf.v(z) - v.imag()) < 1e-12);
    // (z - z0)^2 in coordinates: u = dx^2 - dy^2, v = 2 dx dy.
    double dx = z.real() - 1.0, dy = z.imag() - 0.5;
    CHECK(pf.u(z) == Approx(dx * dx - dy * dy).margin(1e-12));
    CHECK(pf.v(z) == Approx(2 * dx * dy).margin(1e-12));
  }
}

TEST_CASE("cauchy-riemann residual") {
  PlanarField holo = to_planar(FieldSpec{Rational{1.0, 2, {0, 0}}});
  CHECK(cr_residual(holo, {0.5, 0.5}, 1e-6) < 1e-6);
  // Rounding floor of the central-difference stencil is |f| eps / h ~ 1e-9.
  CHECK(cr_residual(to_planar(FieldSpec{Linear{{3, -2}, {}}}), {1, 1}, 1e-6) < 1e-8);

  // Non-holomorphic planar field (u, v) = (2y, 1): residual |u_y + v_x| = 2.
  auto shear = [](Complex z) { return Complex{2 * z.imag(), 1.0}; };
  CHECK(cr_residual_of(shear, {0.3, 0.7}, 1e-6) > 2 - 1e-6);

  // Stencil touching a pole is refused.
  PlanarField pole = to_planar(FieldSpec{Pole{1, {0, 0}, 0}});
  CHECK_THROWS_AS(cr_residual(pole, {1e-6, 0}, 1e-6), StencilHitsSingularity);
}
