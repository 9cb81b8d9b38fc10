#include "catch_amalgamated.hpp"
#include "pwhs/regularize.hpp"
#include "pwhs/switching.hpp"

using namespace pwhs;
using Catch::Approx;

namespace {

PWSystem case1() {
  PWSystem sys;
  sys.plus = Linear{{1, 2}, {1, 0.5}};
  sys.minus = Constant{{1, 0}};
  sys.line = SwitchingLine{LineOrientation::Vertical, 0.0};
  return sys;
}

}  // namespace

TEST_CASE("transition functions") {
  for (TransitionKind k : {TransitionKind::PolyCubic, TransitionKind::PolyQuintic,
                           TransitionKind::Tanh, TransitionKind::ArctanScaled}) {
    TransitionFunction phi{k};
    CHECK(phi(0.0) == Approx(0.0).margin(1e-15));
    CHECK(phi(-0.4) == Approx(-phi(0.4)).margin(1e-15));
    // Monotone on a sample grid.
    double prev = phi(-1.0);
    for (double t = -0.9; t <= 0.95; t += 0.1) {
      CHECK(phi(t) >= prev);
      prev = phi(t);
    }
    // Derivative consistent with finite differences.
    CHECK(phi.derivative(0.3) ==
          Approx((phi(0.3 + 1e-6) - phi(0.3 - 1e-6)) / 2e-6).margin(1e-6));
  }
  TransitionFunction cub{TransitionKind::PolyCubic};
  CHECK(cub(1.0) == 1.0);
  CHECK(cub(5.0) == 1.0);
  CHECK(cub.derivative(1.0) == 0.0);
  CHECK(cub.smoothness_order() == 1);

  TransitionFunction qui{TransitionKind::PolyQuintic};
  CHECK(qui(-2.0) == -1.0);
  CHECK(qui.smoothness_order() == 2);
  // Second derivative also vanishes at the edge (C^2 glue).
  double h = 1e-4;
  double second = (qui.derivative(1.0) - qui.derivative(1.0 - h)) / h;
  CHECK(std::abs(second) < 1e-2);
}

TEST_CASE("blend is exact outside the transition strip") {
  RegularizedSystem R{case1(), TransitionFunction{TransitionKind::PolyCubic}, 0.1};
  Complex zr{0.2, 0.3};
  CHECK(reg_field(R, zr) == eval(R.base.plus, zr));  // bitwise
  Complex zl{-0.2, 0.3};
  CHECK(reg_field(R, zl) == eval(R.base.minus, zl));
  // On the line the blend is the arithmetic mean.
  Complex zm{0.0, 0.3};
  Complex mean = 0.5 * (eval(R.base.plus, zm) + eval(R.base.minus, zm));
  CHECK(std::abs(reg_field(R, zm) - mean) < 1e-15);
  // eps must be positive.
  R.eps = 0.0;
  CHECK_THROWS_AS(reg_field(R, zm), DegenerateParameters);
}

TEST_CASE("holomorphy defect separates blended from one-sided regions") {
  RegularizedSystem R{case1(), TransitionFunction{TransitionKind::PolyCubic}, 0.1};
  // Inside the strip the blend breaks the Cauchy-Riemann equations.
  double inside = holomorphy_defect(R, -0.09, 0.09, 0.0, 1.0, 21, 21);
  // Gap |f+ - f-| on the line is order 1 here.
  double gap = 0.0;
  for (double y = 0.0; y <= 1.0; y += 0.05)
    gap = std::max(gap, std::abs(eval(R.base.plus, {0, y}) - eval(R.base.minus, {0, y})));
  CHECK(inside > 0.05 * gap);
  // Outside the strip both sides are honestly holomorphic.
  CHECK(holomorphy_defect(R, 0.2, 1.0, 0.0, 1.0, 11, 11) < 1e-6);
  CHECK(holomorphy_defect(R, -1.0, -0.2, 0.0, 1.0, 11, 11) < 1e-6);
  // Identical fields on both sides: no defect anywhere.
  RegularizedSystem Same{{Linear{{1, 2}, {1, 0.5}}, Linear{{1, 2}, {1, 0.5}},
                         SwitchingLine{LineOrientation::Vertical, 0.0}},
                        TransitionFunction{TransitionKind::PolyCubic},
                        0.1};
  CHECK(holomorphy_defect(Same, -0.5, 0.5, 0.0, 1.0, 21, 21) < 1e-6);
}

TEST_CASE("critical manifold reduction equals the sliding field") {
  RegularizedSystem R{case1(), TransitionFunction{TransitionKind::PolyCubic}, 0.05};
  // y > 0 is attracting sliding for this fixture.
  for (int i = 0; i < 20; ++i) {
    double s = 0.05 + i * (1.8 / 19);
    SlowFastPoint p = slow_fast(R, s);
    CHECK(p.x_bar > -1.0);
    CHECK(p.x_bar < 1.0);
    double want = sliding_velocity(R.base, R.base.line.point_at(s));
    CHECK(p.reduced == Approx(want).margin(1e-8));
  }
  // Equal and opposite normal pushes balance at the strip midline.
  // u1 = -2y equals -1 at y = 0.5 while u2 = 1.
  SlowFastPoint mid = slow_fast(R, 0.5);
  CHECK(mid.x_bar == Approx(0.0).margin(1e-12));
  CHECK(mid.phi_val == Approx(0.0).margin(1e-12));
  // Sewing points have no critical-manifold root.
  CHECK_THROWS_AS(slow_fast(R, -0.5), NoCriticalPoint);
}

TEST_CASE("transition setup validation and constants") {
  TransitionSetup lin{TransitionCase::LinearCase, 1.0, -2.0, 0.5, 0.0};
  CHECK(transition_alpha(lin) == Approx(4.0 / (5.0 * 0.5)));
  CHECK(transition_fold_y(lin) == Approx(0.0 - (1.0 / -2.0) * 0.5));
  TransitionSetup bad{TransitionCase::LinearCase, 1.0, 2.0, 0.5, 0.0};
  CHECK_THROWS_AS(transition_right_field(bad), ConditionViolated);

  TransitionSetup pw{TransitionCase::PowerCase, 0, 0, 2.0, 0.0};
  CHECK(transition_alpha(pw) == Approx(0.5));
  CHECK(transition_fold_y(pw) == Approx(-2.0));

  TransitionSetup pl{TransitionCase::PoleCase, 0, 0, -0.5, 0.0};
  CHECK(transition_alpha(pl) == Approx(2.0));
  CHECK(transition_fold_y(pl) == Approx(-0.5));
  TransitionSetup plbad{TransitionCase::PoleCase, 0, 0, 0.5, 0.0};
  CHECK_THROWS_AS(transition_right_field(plbad), ConditionViolated);

  TransitionSetup ra{TransitionCase::RationalCase, 0, 0, 0.5, 0.0};
  CHECK(transition_alpha(ra) == Approx(4.5));
  TransitionSetup rabad{TransitionCase::RationalCase, 0, 0, 1.5, 0.0};
  CHECK_THROWS_AS(transition_right_field(rabad), ConditionViolated);
}

TEST_CASE("fold transition map recovers the quadratic coefficient") {
  // Quadratic right-hand field with x0 = 1: expected coefficient 1.
  TransitionSetup S{TransitionCase::PowerCase, 0, 0, 1.0, 0.0};
  TransitionFunction phi{TransitionKind::PolyCubic};
  std::vector<double> eps_grid = {1e-2, 1e-3};
  std::vector<double> thetas = {0.02, 0.04, 0.06, 0.08, 0.10};
  auto res = transition_map_experiment(S, phi, eps_grid, thetas);
  REQUIRE(res.alpha_fit.size() == 2);
  CHECK(res.rel_error[1] <= res.rel_error[0] + 1e-6);
  CHECK(res.rel_error_final < 0.15);
  CHECK(res.p_star == Approx(-1.0));
  // Landings sit just right of the strip and grow with theta.
  double prev = 0.0;
  for (const auto& m : res.table) {
    if (m.eps != eps_grid[1]) continue;
    CHECK(m.landing_x > 0.0);
    CHECK(m.landing_x >= prev);
    prev = m.landing_x;
  }
}
