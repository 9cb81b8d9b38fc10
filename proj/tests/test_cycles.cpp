#include "catch_amalgamated.hpp"
#include "pwhs/cycles.hpp"

#include <random>

using namespace pwhs;
using Catch::Approx;

namespace {

PWSystem two_linear(double a, double b, double c, double d, double x0) {
  PWSystem sys;
  sys.plus = Linear{{a, b}, {x0, 0}};
  sys.minus = Linear{{c, d}, {0, 0}};
  sys.line = SwitchingLine{LineOrientation::Horizontal, 0.0};
  return sys;
}

}  // namespace

TEST_CASE("linear return map closed form") {
  SECTION("contracting example") {
    auto pr = linear_poincare(-1, 1, -1, 1, -1);
    double Ea = std::exp(-kPi);
    CHECK(pr.A == Approx(std::exp(-2 * kPi)).epsilon(1e-12));
    CHECK(pr.B == Approx(Ea * (1 + Ea)).epsilon(1e-12));
    REQUIRE(pr.fixed_point);
    CHECK(*pr.fixed_point == Approx(pr.B / (1 - pr.A)).epsilon(1e-14));
    CHECK(pr.stability == Stability::Stable);
    CHECK(pr.derivative == Approx(pr.A));
  }
  SECTION("balanced rotation: translation, no fixed point") {
    auto pr = linear_poincare(1, 1, -1, 1, 1);
    CHECK(pr.A == Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(pr.fixed_point.has_value());
    CHECK(pr.stability == Stability::None);
  }
  SECTION("degenerate parameters") {
    CHECK_THROWS_AS(linear_poincare(1, 0, 1, 1, 1), DegenerateParameters);
    CHECK_THROWS_AS(linear_poincare(1, 1, 1, 1, 0), DegenerateParameters);
    CHECK_THROWS_AS(linear_poincare(1, 1, 1, -1, 1), ConditionViolated);
  }
  SECTION("unstable example") {
    auto pr = linear_poincare(1, 1, 0.5, 1, 1);
    CHECK(pr.stability == Stability::Unstable);
    REQUIRE(pr.fixed_point);
  }
}

TEST_CASE("linear cycle sign-pattern table") {
  // One representative per tabulated row.
  CHECK(corollary_table_check(1, 1, 1, 1, 1));
  CHECK(corollary_table_check(-1, 1, -1, 1, -1));
  CHECK(corollary_table_check(-1, -1, -1, -1, 1));
  CHECK(corollary_table_check(1, -1, 1, -1, -1));
  CHECK(corollary_table_check(0, 1, 1, 1, 1));
  CHECK(corollary_table_check(0, 1, -1, 1, -1));
  CHECK(corollary_table_check(0, -1, 1, -1, -1));
  CHECK(corollary_table_check(0, -1, -1, -1, 1));
  CHECK(corollary_table_check(1, 1, 0, 1, 1));
  CHECK(corollary_table_check(-1, 1, 0, 1, -1));
  CHECK(corollary_table_check(-1, -1, 0, -1, 1));
  CHECK(corollary_table_check(1, -1, 0, -1, -1));
  // Mixed focus types need x0 aligned with the rotation-free sum.
  CHECK(corollary_table_check(2, 1, -1, 1, 1));
  CHECK_FALSE(corollary_table_check(2, 1, -1, 1, -1));
  // Inadmissible inputs.
  CHECK_FALSE(corollary_table_check(1, 0, 1, 1, 1));
  CHECK_FALSE(corollary_table_check(1, 1, -1, 1, 1));   // sum zero
  CHECK_FALSE(corollary_table_check(1, 1, 1, -1, 1));   // mixed rotation
  CHECK_FALSE(corollary_table_check(1, 1, 1, 1, -1));   // wrong x0 sign
}

TEST_CASE("linear fixed point verified by shooting") {
  auto pr = linear_poincare(-1, 1, -1, 1, -1);
  auto sys = two_linear(-1, 1, -1, 1, -1);
  double w0 = *pr.fixed_point;

  // The integrated full return agrees with the affine map.
  for (double s : {w0 * 0.7, w0, w0 * 1.4}) {
    double ret = full_return(sys, s);
    CHECK(std::abs(ret - (pr.A * s + pr.B)) < 1e-7);
  }

  auto sr = shooting_fixed_point(sys, 0.5 * w0, 2.0 * w0);
  CHECK(std::abs(sr.w0 - w0) < 1e-7);
  CHECK(sr.stability == Stability::Stable);
  CHECK(std::abs(sr.derivative - pr.A) < 1e-4);
}

TEST_CASE("random admissible linear rows match shooting") {
  std::mt19937 rng(97);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  int done = 0;
  for (int attempt = 0; attempt < 2000 && done < 12; ++attempt) {
    double a = U(rng), b = U(rng), c = U(rng), d = U(rng), x0 = U(rng);
    if (!corollary_table_check(a, b, c, d, x0)) continue;
    auto pr = linear_poincare(a, b, c, d, x0);
    if (!pr.fixed_point) continue;
    double w0 = *pr.fixed_point;
    if (std::abs(w0) < 0.05 || std::abs(w0) > 20) continue;
    auto sys = two_linear(a, b, c, d, x0);
    INFO("a=" << a << " b=" << b << " c=" << c << " d=" << d << " x0=" << x0);
    double lo = w0 > 0 ? 0.5 * w0 : 1.5 * w0;
    double hi = w0 > 0 ? 1.5 * w0 : 0.5 * w0;
    try {
      auto sr = shooting_fixed_point(sys, lo, hi);
      CHECK(std::abs(sr.w0 - w0) < 1e-7);
      ++done;
    } catch (const NoReturn&) {
      // Bracket endpoint fell outside the return domain; resample.
    }
  }
  CHECK(done == 12);
}

TEST_CASE("quadratic-upper cycles") {
  SECTION("reference parameters, center i") {
    auto cyc = zn_cycle(2, 0, -1, 1, 1, 0, 1);
    double E = std::exp(-kPi);
    CHECK(cyc.w0 == Approx((1 + E) / (1 - E)).epsilon(1e-12));
    CHECK(cyc.other_crossing == Approx(-cyc.w0));
    CHECK(cyc.closure <= kClosureTol);
    CHECK(cyc.map.derivative < 1.0);
    CHECK(cyc.map.stability == Stability::Stable);
    REQUIRE(cyc.map.fixed_point);
    CHECK(*cyc.map.fixed_point == Approx(cyc.map.B / (1 - cyc.map.A)));
  }
  SECTION("time-scaled coefficients leave the crossing unchanged") {
    auto c1 = zn_cycle(2, 0, -1, 1, 1, 0, 1);
    auto c2 = zn_cycle(2, 0, -2, 2, 1, 0, 1);
    CHECK(c1.w0 == Approx(c2.w0).epsilon(1e-12));
  }
  SECTION("higher even power, n = 6") {
    auto cyc = zn_cycle(6, 0, -1, 1, 0.2, 0, 1);
    CHECK(cyc.closure <= kClosureTol);
    CHECK(cyc.map.A < 1.0);
  }
  SECTION("n = 4 with reversed rotation") {
    auto cyc = zn_cycle(4, 0, -1, -1, -0.5, 0, 1);
    CHECK(cyc.closure <= kClosureTol);
    CHECK(cyc.map.derivative < 1.0);
  }
  SECTION("odd powers carry the i premultiplier") {
    auto c3 = zn_cycle(3, 1, -1, -1, -0.5, 0, 1);
    CHECK(c3.closure <= kClosureTol);
    auto c5 = zn_cycle(5, 1, -1, 1, 0.3, 0, 1);
    CHECK(c5.closure <= kClosureTol);
  }
  SECTION("row violations are rejected") {
    CHECK_THROWS_AS(zn_cycle(2, 0, 1, 1, 1, 0, 1), ConditionViolated);
    CHECK_THROWS_AS(zn_cycle(3, 0, -1, -1, -0.5, 0, 1), ConditionViolated);  // m parity
    CHECK_THROWS_AS(zn_cycle(4, 0, -1, -1, 0.5, 0, 1), ConditionViolated);   // d sign
    CHECK_THROWS_AS(zn_cycle(2, 0, -1, 1, 1, 0, -1), ConditionViolated);     // y0
  }
}

TEST_CASE("pole-lower cycles") {
  SECTION("n = 2 reference parameters") {
    auto cyc = pole_cycle(2, 0, -1, -1, 0.5, 1);
    double E = std::exp(kPi);  // exp(a pi / b) with a = b = -1
    double w0 = 0.5 * (1 + E) / (-1 + E);
    CHECK(cyc.w0 == Approx(std::abs(w0)).epsilon(1e-12));
    CHECK(cyc.closure <= kClosureTol);
    CHECK(cyc.map.derivative < 1.0);
    REQUIRE(cyc.map.fixed_point);
    CHECK(*cyc.map.fixed_point == Approx(cyc.map.B / (1 - cyc.map.A)));
  }
  SECTION("n = 4") {
    auto cyc = pole_cycle(4, 0, -1, 1, -0.2, 1);
    CHECK(cyc.closure <= kClosureTol);
  }
  SECTION("odd orders with the i premultiplier") {
    auto c1 = pole_cycle(1, 1, -1, 1, -0.5, 1);
    CHECK(c1.closure <= kClosureTol);
    auto c3 = pole_cycle(3, 1, -1, -1, 0.3, 1);
    CHECK(c3.closure <= kClosureTol);
  }
  SECTION("row violations are rejected") {
    CHECK_THROWS_AS(pole_cycle(1, 0, -1, 1, -0.5, 1), ConditionViolated);  // m parity
    CHECK_THROWS_AS(pole_cycle(2, 0, -1, -1, -0.5, 1), ConditionViolated);
    CHECK_THROWS_AS(pole_cycle(2, 0, -1, -1, 0.5, -1), ConditionViolated);
  }
}

TEST_CASE("rational-upper shooting reproduces the reference landings") {
  PWSystem sys;
  sys.plus = Rational{1.0, 2, {0, -0.2}};
  sys.minus = Linear{{0, 1}, {-0.0381415, 0}};
  sys.line = SwitchingLine{LineOrientation::Horizontal, 0.0};

  double w1 = 0.05, w2 = 0.13;
  HalfReturn h1 = half_return(sys, Side::Plus, w1);
  HalfReturn h2 = half_return(sys, Side::Plus, w2);
  CHECK(std::abs(h1.s_land - (-0.100229)) < 1e-4);
  CHECK(std::abs(h2.s_land - (-0.238348)) < 1e-4);

  double r1 = full_return(sys, w1);
  double r2 = full_return(sys, w2);
  CHECK(std::abs(r1 - 0.0239455) < 1e-4);
  CHECK(std::abs(r2 - 0.162065) < 1e-4);
  CHECK((r1 - w1) < 0.0);
  CHECK((r2 - w2) > 0.0);

  auto sr = shooting_fixed_point(sys, w1, w2);
  CHECK(sr.w0 > w1);
  CHECK(sr.w0 < w2);
  CHECK(sr.derivative > 1.0);
  CHECK(sr.stability == Stability::Unstable);
}

TEST_CASE("shooting without a displacement sign change is refused") {
  auto sys = two_linear(-1, 1, -1, 1, -1);
  // Far to the right of the fixed point the displacement keeps one sign.
  double w0 = *linear_poincare(-1, 1, -1, 1, -1).fixed_point;
  CHECK_THROWS_AS(shooting_fixed_point(sys, w0 * 3, w0 * 5), NoSignChange);
}

TEST_CASE("homoclinic loops") {
  SECTION("simple pole, reference endpoints") {
    auto res = homoclinic(1, 1, 1, 1, HomoclinicFamily::PoleFamily);
    CHECK(res.s_right == Approx(1.0).epsilon(1e-12));
    CHECK(res.s_left == Approx(-1.0).epsilon(1e-12));
    CHECK(res.theta_right == Approx(kPi / 4));
    CHECK(res.closure <= kClosureTol);
    CHECK(res.half_period == Approx(kPi));
    CHECK(res.leaves_through_right);
    // Endpoint sits on the invariant ray from the center -i y0.
    Complex center{0, -1};
    Complex endp{res.s_right, 0};
    CHECK(std::arg(endp - center) == Approx(res.theta_right).margin(1e-12));
  }
  SECTION("fourth power, reference endpoints") {
    auto res = homoclinic(4, 0, -1, 1, HomoclinicFamily::PowerFamily);
    CHECK(res.s_right == Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
    CHECK(res.closure <= kClosureTol);
    CHECK_FALSE(res.leaves_through_right);
  }
  SECTION("rotation sense must match the family row") {
    CHECK_THROWS_AS(homoclinic(1, 1, -1, 1, HomoclinicFamily::PoleFamily),
                    TableRowMismatch);
    CHECK_THROWS_AS(homoclinic(4, 0, 1, 1, HomoclinicFamily::PowerFamily),
                    TableRowMismatch);
  }
  SECTION("admissible rotation senses by residue") {
    CHECK(homoclinic_b_positive(HomoclinicFamily::PoleFamily, 1));
    CHECK(homoclinic_b_positive(HomoclinicFamily::PoleFamily, 4));
    CHECK_FALSE(homoclinic_b_positive(HomoclinicFamily::PoleFamily, 2));
    CHECK_FALSE(homoclinic_b_positive(HomoclinicFamily::PoleFamily, 3));
    CHECK(homoclinic_b_positive(HomoclinicFamily::PowerFamily, 5));
    CHECK(homoclinic_b_positive(HomoclinicFamily::PowerFamily, 6));
    CHECK_FALSE(homoclinic_b_positive(HomoclinicFamily::PowerFamily, 4));
    CHECK_FALSE(homoclinic_b_positive(HomoclinicFamily::PowerFamily, 7));
  }
  SECTION("parameter validation") {
    CHECK_THROWS_AS(homoclinic(2, 0, 1, 1, HomoclinicFamily::PowerFamily),
                    InvalidFieldSpec);
    CHECK_THROWS_AS(homoclinic(1, 0, 1, 1, HomoclinicFamily::PoleFamily),
                    ConditionViolated);  // m parity
    CHECK_THROWS_AS(homoclinic(1, 1, 1, -1, HomoclinicFamily::PoleFamily),
                    ConditionViolated);
    CHECK_THROWS_AS(homoclinic(1, 1, 0, 1, HomoclinicFamily::PoleFamily),
                    DegenerateParameters);
  }
}
