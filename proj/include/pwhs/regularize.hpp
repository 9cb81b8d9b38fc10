#pragma once

// Regularization of a piecewise holomorphic system: monotone transition
// blends, the holomorphy defect of the blended field, the slow-fast reduction
// on the switching line, and the fold transition-map experiment.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <vector>

#include "pwhs/complex_field.hpp"
#include "pwhs/errors.hpp"
#include "pwhs/flow.hpp"
#include "pwhs/switching.hpp"

namespace pwhs {

enum class TransitionKind { PolyCubic, PolyQuintic, Tanh, ArctanScaled };

/// Monotone transition function with range [-1, 1].  The polynomial kinds
/// saturate exactly outside [-1, 1]; Tanh and ArctanScaled only approach the
/// limits.  smoothness_order is the number of vanishing derivatives at +-1.
struct TransitionFunction {
  TransitionKind kind = TransitionKind::PolyCubic;

  double operator()(double t) const {
    switch (kind) {
      case TransitionKind::PolyCubic:
        if (t >= 1) return 1;
        if (t <= -1) return -1;
        return t * (3 - t * t) / 2;
      case TransitionKind::PolyQuintic:
        if (t >= 1) return 1;
        if (t <= -1) return -1;
        return (15 * t - 10 * t * t * t + 3 * t * t * t * t * t) / 8;
      case TransitionKind::Tanh:
        return std::tanh(t);
      case TransitionKind::ArctanScaled:
        return 2.0 / kPi * std::atan(t);
    }
    return 0;
  }

  double derivative(double t) const {
    switch (kind) {
      case TransitionKind::PolyCubic:
        if (t >= 1 || t <= -1) return 0;
        return 3 * (1 - t * t) / 2;
      case TransitionKind::PolyQuintic:
        if (t >= 1 || t <= -1) return 0;
        return 15.0 / 8 * (1 - t * t) * (1 - t * t);
      case TransitionKind::Tanh: {
        double c = std::cosh(t);
        return 1.0 / (c * c);
      }
      case TransitionKind::ArctanScaled:
        return 2.0 / (kPi * (1 + t * t));
    }
    return 0;
  }

  int smoothness_order() const {
    switch (kind) {
      case TransitionKind::PolyCubic: return 1;
      case TransitionKind::PolyQuintic: return 2;
      default: return 1000;  // analytic kinds: all derivatives vanish in the limit
    }
  }
};

struct RegularizedSystem {
  PWSystem base;
  TransitionFunction phi;
  double eps = 0.1;
};

/// The convex blend ((1+phi(g/eps))/2) f+ + ((1-phi(g/eps))/2) f-, where g is
/// the signed line-normal coordinate.
inline Complex reg_field(const RegularizedSystem& R, Complex z) {
  if (R.eps <= 0) throw DegenerateParameters("reg_field: eps must be positive");
  double t = R.base.line.normal_coordinate(z) / R.eps;
  // Outside the strip the blend is exactly one field; skip the other side's
  // evaluation so its singularities are not spuriously hit.
  if (t >= 1) {
    TransitionFunction f = R.phi;
    if (f(t) == 1) return eval(R.base.plus, z);
  }
  if (t <= -1) {
    TransitionFunction f = R.phi;
    if (f(t) == -1) return eval(R.base.minus, z);
  }
  double w = R.phi(t);
  return 0.5 * (1 + w) * eval(R.base.plus, z) + 0.5 * (1 - w) * eval(R.base.minus, z);
}

/// Maximum Cauchy-Riemann residual of the blended field over a uniform grid on
/// [x_lo, x_hi] x [y_lo, y_hi].
inline double holomorphy_defect(const RegularizedSystem& R, double x_lo, double x_hi,
                                double y_lo, double y_hi, int nx, int ny,
                                double h = 1e-6) {
  if (nx < 2 || ny < 2) throw Error("holomorphy_defect: grid must be at least 2x2");
  auto F = [&](Complex z) { return reg_field(R, z); };
  double worst = 0.0;
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      Complex z{x_lo + (x_hi - x_lo) * i / (nx - 1), y_lo + (y_hi - y_lo) * j / (ny - 1)};
      bool skip = false;
      for (const FieldSpec* f : {&R.base.plus, &R.base.minus})
        for (Complex s : singular_points(*f))
          if (std::abs(z - s) < 10 * h + 1e-6) skip = true;
      if (skip) continue;
      worst = std::max(worst, cr_residual_of(F, z, h));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Slow-fast reduction on the switching line.

struct SlowFastPoint {
  double x_bar = 0.0;   // critical-manifold coordinate in [-1, 1]
  double phi_val = 0.0;
  double reduced = 0.0;  // slow (tangential) velocity at the critical point
};

/// Solve (1+phi(x_bar)) u1 + (1-phi(x_bar)) u2 = 0 for x_bar in [-1, 1] at the
/// line point with parameter s; u1, u2 are the normal components of the two
/// fields on the line.  The reduced slow velocity is the matching blend of the
/// tangential components.
inline SlowFastPoint slow_fast(const RegularizedSystem& R, double s) {
  Complex p = R.base.line.point_at(s);
  Complex f1 = eval(R.base.plus, p);
  Complex f2 = eval(R.base.minus, p);
  double u1 = R.base.line.normal_component(f1);
  double u2 = R.base.line.normal_component(f2);
  auto g = [&](double xb) { return (1 + R.phi(xb)) * u1 + (1 - R.phi(xb)) * u2; };

  // Bracket a root; subdivide before giving up (the blend is monotone in
  // x_bar on sliding segments but sampling cheap insurance costs nothing).
  const int cells = 32;
  double lo = 0, hi = 0;
  bool found = false;
  double prev = g(-1.0);
  for (int i = 1; i <= cells && !found; ++i) {
    double x = -1.0 + 2.0 * i / cells;
    double cur = g(x);
    if (prev == 0 || (prev > 0) != (cur > 0)) {
      lo = -1.0 + 2.0 * (i - 1) / cells;
      hi = x;
      found = true;
    }
    prev = cur;
  }
  if (!found)
    throw NoCriticalPoint("slow_fast: no critical-manifold point over x_bar in [-1, 1]");
  double g_lo = g(lo);
  for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
    double mid = 0.5 * (lo + hi);
    double gm = g(mid);
    if (gm == 0 || (g_lo > 0) != (gm > 0))
      hi = mid;
    else {
      lo = mid;
      g_lo = gm;
    }
  }
  SlowFastPoint out;
  out.x_bar = 0.5 * (lo + hi);
  out.phi_val = R.phi(out.x_bar);
  double v1 = R.base.line.tangential_component(f1);
  double v2 = R.base.line.tangential_component(f2);
  out.reduced = 0.5 * ((1 + out.phi_val) * v1 + (1 - out.phi_val) * v2);
  return out;
}

// ---------------------------------------------------------------------------
// Fold transition-map experiment: lower/left field 1, right field G with a
// visible regular-fold at p = (0, p_star) on the vertical line x = 0.

enum class TransitionCase { LinearCase, PowerCase, PoleCase, RationalCase };

struct TransitionSetup {
  TransitionCase kind = TransitionCase::PowerCase;
  double a = 0, b = 0;   // LinearCase only
  double x0 = 1, y0 = 0;
};

inline FieldSpec transition_right_field(const TransitionSetup& S) {
  Complex z0{S.x0, S.y0};
  switch (S.kind) {
    case TransitionCase::LinearCase:
      if (!(S.b < 0) || !(S.x0 > 0))
        throw ConditionViolated("transition linear case: requires b < 0 and x0 > 0");
      return Linear{Complex{S.a, S.b}, z0};
    case TransitionCase::PowerCase:
      if (!(S.x0 > 0)) throw ConditionViolated("transition power case: requires x0 > 0");
      return Power{2, z0, 0};
    case TransitionCase::PoleCase:
      if (!(S.x0 < 0)) throw ConditionViolated("transition pole case: requires x0 < 0");
      return Pole{2, z0, 0};
    case TransitionCase::RationalCase:
      if (!(0 < S.x0 && S.x0 < 1))
        throw ConditionViolated("transition rational case: requires 0 < x0 < 1");
      return Rational{1.0, 2, z0};
  }
  throw UnsupportedVariant("transition_right_field");
}

inline double transition_alpha(const TransitionSetup& S) {
  switch (S.kind) {
    case TransitionCase::LinearCase: return S.b * S.b / ((S.a * S.a + S.b * S.b) * S.x0);
    case TransitionCase::PowerCase: return 1.0 / S.x0;
    case TransitionCase::PoleCase: return -1.0 / S.x0;
    case TransitionCase::RationalCase: return (1 + S.x0) * (1 + S.x0) / S.x0;
  }
  return 0;
}

inline double transition_fold_y(const TransitionSetup& S) {
  switch (S.kind) {
    case TransitionCase::LinearCase: return S.y0 - S.a / S.b * S.x0;
    case TransitionCase::PowerCase: return S.y0 - S.x0;
    case TransitionCase::PoleCase: return S.y0 + S.x0;
    case TransitionCase::RationalCase:
      return (-std::sqrt(S.x0 * S.x0 - std::pow(S.x0, 4)) + S.y0 + S.x0 * S.y0) /
             (1 + S.x0);
  }
  return 0;
}

struct TransitionMeasurement {
  double eps = 0;
  double theta = 0;
  double landing_x = 0;  // x at the upward crossing of y = theta + p_star
};

struct TransitionExperimentResult {
  double p_star = 0;
  double alpha_expected = 0;
  std::vector<TransitionMeasurement> table;
  std::vector<double> alpha_fit;  // one fit per eps, same order as eps grid
  std::vector<double> rel_error;
  double alpha_fit_final = 0;     // fit at the smallest eps
  double rel_error_final = 0;
};

/// Integrate the regularized blend from the entry section (eps, p_star - rho)
/// upward past the fold and record the x coordinate at each crossing of
/// y = theta + p_star.
inline TransitionExperimentResult transition_map_experiment(
    const TransitionSetup& S, const TransitionFunction& phi,
    std::vector<double> eps_grid, std::vector<double> theta_grid, double rho = 0.2) {
  if (eps_grid.empty() || theta_grid.empty())
    throw Error("transition_map_experiment: empty grid");
  std::sort(eps_grid.begin(), eps_grid.end(), std::greater<double>());
  std::sort(theta_grid.begin(), theta_grid.end());

  TransitionExperimentResult res;
  res.p_star = transition_fold_y(S);
  res.alpha_expected = transition_alpha(S);

  RegularizedSystem R;
  R.base.plus = transition_right_field(S);
  R.base.minus = Constant{Complex{1.0, 0.0}};
  R.base.line = SwitchingLine{LineOrientation::Vertical, 0.0};
  R.phi = phi;

  for (double eps : eps_grid) {
    R.eps = eps;
    auto rhs = [&](Complex z) { return reg_field(R, z); };
    Complex z{eps, res.p_star - rho};
    double t = 0.0;
    double h = 1e-4;
    size_t next_theta = 0;
    std::vector<double> landings(theta_grid.size(),
                                 std::numeric_limits<double>::quiet_NaN());
    const double t_max = 1e4;
    const double rel_tol = 1e-10, abs_tol = 1e-13;
    while (next_theta < theta_grid.size() && t < t_max) {
      Complex z_new;
      double err;
      detail::dopri_step(rhs, z, h, z_new, err);
      double sc = abs_tol + rel_tol * std::max(std::abs(z), std::abs(z_new));
      if (err > sc) {
        h *= detail::step_factor(err, sc);
        if (h < 1e-15) throw IntegrationFailure("transition experiment: step underflow");
        continue;
      }
      while (next_theta < theta_grid.size()) {
        double target = res.p_star + theta_grid[next_theta];
        if (!(z.imag() < target && z_new.imag() >= target)) break;
        // Bisect the crossing inside the step.
        double lo = 0, hi = h;
        Complex z_hit = z_new;
        for (int it = 0; it < 60 && hi - lo > 1e-16 * (1 + h); ++it) {
          double mid = 0.5 * (lo + hi);
          Complex zm;
          double em;
          detail::dopri_step(rhs, z, mid, zm, em);
          if (zm.imag() >= target) {
            hi = mid;
            z_hit = zm;
          } else {
            lo = mid;
          }
        }
        landings[next_theta] = z_hit.real();
        ++next_theta;
      }
      t += h;
      z = z_new;
      h *= detail::step_factor(err, sc);
      if (std::abs(z) > 1e6) break;
    }
    if (next_theta < theta_grid.size())
      throw IntegrationFailure("transition experiment: exit section not reached");

    double num = 0, den = 0;
    for (size_t i = 0; i < theta_grid.size(); ++i) {
      double w = theta_grid[i] * theta_grid[i] / 2;
      num += w * (landings[i] - eps);
      den += w * w;
      res.table.push_back({eps, theta_grid[i], landings[i]});
    }
    double alpha = num / den;
    res.alpha_fit.push_back(alpha);
    res.rel_error.push_back(std::abs(alpha - res.alpha_expected) /
                            std::abs(res.alpha_expected));
  }
  res.alpha_fit_final = res.alpha_fit.back();
  res.rel_error_final = res.rel_error.back();
  return res;
}

}  // namespace pwhs
