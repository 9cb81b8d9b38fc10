#pragma once

// Limit cycles of piecewise holomorphic systems glued along the horizontal
// axis: closed-form Poincare maps for the linear / power / pole families,
// numeric shooting for systems without closed forms, and homoclinic orbits
// built from invariant rays and a linear half-turn.

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pwhs/complex_field.hpp"
#include "pwhs/errors.hpp"
#include "pwhs/flow.hpp"
#include "pwhs/switching.hpp"

namespace pwhs {

inline constexpr double kClosureTol = 1e-6;

enum class Stability { Stable, Unstable, None };

inline const char* to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::None: return "none";
  }
  return "?";
}

/// Affine return map Pi(s) = A*s + B on the switching axis, with its fixed
/// point (when A != 1), derivative there, and the stability verdict.
struct PoincareResult {
  double A = 0.0;
  double B = 0.0;
  std::optional<double> fixed_point;
  double derivative = 0.0;
  Stability stability = Stability::None;
};

struct CycleResult {
  PoincareResult map;
  double w0 = 0.0;              // right crossing abscissa
  double other_crossing = 0.0;  // second crossing abscissa
  std::vector<Complex> orbit;   // closed polyline
  double period = 0.0;
  double closure = 0.0;  // |orbit end - orbit start|
};

// ---------------------------------------------------------------------------
// Linear / linear: upper (a+ib)(z - x0), lower (c+id) z.

inline PoincareResult linear_poincare(double a, double b, double c, double d,
                                      double x0) {
  if (b == 0 || d == 0 || x0 == 0)
    throw DegenerateParameters("linear_poincare: b, d, x0 must all be nonzero");
  if ((b > 0) != (d > 0))
    throw ConditionViolated(
        "linear_poincare: b and d must rotate the same way (sign(b) = sign(d))");
  double s = a / b + c / d;
  PoincareResult res;
  if (b > 0) {
    double Ea = std::exp(a * kPi / b);
    double Ec = std::exp(c * kPi / d);
    res.A = Ea * Ec;
    res.B = -Ec * (1 + Ea) * x0;
  } else {
    double Ea = std::exp(-a * kPi / b);
    double Ec = std::exp(-c * kPi / d);
    res.A = Ea * Ec;
    res.B = -Ec * (1 + Ea) * x0;
  }
  if (s == 0) {
    res.stability = Stability::None;
    return res;  // A = 1: the return map is a translation, no fixed point
  }
  res.fixed_point = res.B / (1.0 - res.A);
  res.derivative = res.A;
  res.stability = ((b > 0) != (s > 0)) ? Stability::Stable : Stability::Unstable;
  return res;
}

/// True iff the sign pattern (a,b,c,d,x0) is an admissible row of the linear
/// cycle tables and a/b + c/d != 0.
inline bool corollary_table_check(double a, double b, double c, double d, double x0) {
  if (b == 0 || d == 0 || x0 == 0) return false;
  if ((b > 0) != (d > 0)) return false;
  double s = a / b + c / d;
  if (s == 0) return false;
  auto sgn = [](double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); };
  int sa = sgn(a), sb = sgn(b), sc = sgn(c), sx = sgn(x0), ss = sgn(s);
  // Rows with one vanishing rotation-free coefficient.
  if (sa == 0) return sb > 0 ? (sc > 0 ? sx > 0 : sx < 0) : (sc > 0 ? sx < 0 : sx > 0);
  if (sc == 0) return sb > 0 ? (sa > 0 ? sx > 0 : sx < 0) : (sa > 0 ? sx < 0 : sx > 0);
  // Equal focus types: fixed sign of x0.
  if (sa == sc) {
    if (sb > 0) return sa > 0 ? sx > 0 : sx < 0;
    return sa > 0 ? sx < 0 : sx > 0;
  }
  // Opposite focus types: x0 must align with the trace sum.
  return sx == ss;
}

namespace detail {

inline void append_points(std::vector<Complex>& out, const Trajectory& arc) {
  for (const auto& pt : arc.points) {
    if (!out.empty() && std::abs(out.back() - pt.z) < 1e-15) continue;
    out.push_back(pt.z);
  }
}

// Two glued half-returns from the right crossing: symmetric side first, then
// the linear side.  Fills orbit, period, closure.
inline void stitch_cycle(const PWSystem& sys, Side symmetric_side, double w0,
                         double expected_other, CycleResult& cyc,
                         const IntegratorOptions& opt) {
  double start = w0;
  int want = symmetric_side == Side::Plus ? 1 : -1;
  if (detail::forward_normal_sign(symmetric_side == Side::Plus ? sys.plus : sys.minus,
                                  sys.line.point_at(start), sys.line) != want)
    start = expected_other;  // orbit traverses the symmetric side the other way
  HalfReturn h1 = half_return(sys, symmetric_side, start, opt);
  Side linear_side = symmetric_side == Side::Plus ? Side::Minus : Side::Plus;
  HalfReturn h2 = half_return(sys, linear_side, h1.s_land, opt);
  cyc.orbit.clear();
  append_points(cyc.orbit, h1.arc);
  append_points(cyc.orbit, h2.arc);
  cyc.period = h1.time + h2.time;
  cyc.closure = std::abs(cyc.orbit.back() - cyc.orbit.front());
  if (cyc.closure > kClosureTol)
    throw NoAdmissibleCycle("cycle orbit fails to close: residual " +
                            std::to_string(cyc.closure));
}

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ConditionViolated(what);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Power / linear: upper i^m (z + z0)^n, lower (a+ib)(z - d).

/// x0_or_y0 is x0 for n = 2 (z0 = x0 + i y0 with y0 > 0 fixed by `y0`) and is
/// ignored for n >= 3 where x0 = 0.  For simplicity the n = 2 row takes z0
/// explicitly through (x0_or_y0, y0).
inline CycleResult zn_cycle(int n, int m, double a, double b, double d,
                            double x0_or_y0, double y0,
                            const IntegratorOptions& opt = {}) {
  if (n < 2) throw InvalidFieldSpec("zn_cycle: n must be >= 2");
  int want_m = n % 2 == 0 ? 0 : 1;
  if (m != want_m)
    throw ConditionViolated("zn_cycle: premultiplier m must be " +
                            std::to_string(want_m) + " for n = " + std::to_string(n));
  detail::require(y0 > 0, "zn_cycle: y0 > 0 required");
  detail::require(a != 0 && b != 0, "zn_cycle: a and b must be nonzero");
  double E = std::exp(a * kPi / b);

  CycleResult cyc;
  double x0 = 0.0;
  if (n == 2) {
    x0 = x0_or_y0;
    detail::require(a < 0 && b > 0, "zn_cycle n=2: a < 0 < b required");
    detail::require(d > -x0, "zn_cycle n=2: d > -x0 required");
    cyc.w0 = (d + E * (d + 2 * x0)) / (1 - E);
    cyc.other_crossing = -2 * x0 - cyc.w0;
    detail::require(cyc.w0 > -x0, "zn_cycle n=2: fixed point w0 > -x0 violated");
  } else {
    detail::require(d != 0, "zn_cycle: d must be nonzero");
    double w0 = d * (1 + E) / (1 - E);
    int r = n % 4;
    if (r == 0 || r == 3) {
      detail::require(a < 0 && b < 0 && d < 0,
                      "zn_cycle: row requires a, b, d < 0 for n mod 4 in {0, 3}");
      double bound = std::cos(n * kPi / (2.0 * (n - 1))) /
                     std::sin(n * kPi / (2.0 * (n - 1))) * y0;
      std::ostringstream os;
      os << "zn_cycle: need cot(n*pi/(2(n-1)))*y0 < -w0 < 0, got w0 = " << w0
         << ", bound = " << bound;
      detail::require(bound < -w0 && -w0 < 0, os.str());
    } else {
      detail::require(a < 0 && b > 0 && d > 0,
                      "zn_cycle: row requires a < 0 < b, d > 0 for n mod 4 in {1, 2}");
      detail::require(!(r == 2 && n == 2), "unreachable");
      double bound = std::cos((n - 2) * kPi / (2.0 * (n - 1))) /
                     std::sin((n - 2) * kPi / (2.0 * (n - 1))) * y0;
      std::ostringstream os;
      os << "zn_cycle: need 0 < w0 < cot((n-2)*pi/(2(n-1)))*y0, got w0 = " << w0
         << ", bound = " << bound;
      detail::require(0 < w0 && w0 < bound, os.str());
    }
    cyc.w0 = std::abs(w0);
    cyc.other_crossing = -cyc.w0;
  }

  // Return map of the lower half-turn composed with the symmetric upper half:
  // Pi(s) = A*s + B, fixed at +w0 when b > 0 and at -w0 when b < 0.
  cyc.map.A = b > 0 ? E : 1.0 / E;
  cyc.map.B = n == 2 ? d + cyc.map.A * (d + 2 * x0) : d * (1 + cyc.map.A);
  cyc.map.fixed_point = cyc.map.B / (1.0 - cyc.map.A);
  cyc.map.derivative = cyc.map.A;
  cyc.map.stability = cyc.map.A < 1 ? Stability::Stable : Stability::Unstable;

  PWSystem sys;
  sys.plus = Power{n, Complex{-x0, -y0}, m};
  sys.minus = Linear{Complex{a, b}, Complex{d, 0.0}};
  sys.line = SwitchingLine{LineOrientation::Horizontal, 0.0};
  detail::stitch_cycle(sys, Side::Plus, cyc.w0, cyc.other_crossing, cyc, opt);
  return cyc;
}

// ---------------------------------------------------------------------------
// Linear / pole: upper (a+ib)(z - d), lower i^m / (z + i y0)^n.

inline CycleResult pole_cycle(int n, int m, double a, double b, double d, double y0,
                              const IntegratorOptions& opt = {}) {
  if (n < 1) throw InvalidFieldSpec("pole_cycle: n must be >= 1");
  int want_m = n % 2 == 0 ? 0 : 1;
  if (m != want_m)
    throw ConditionViolated("pole_cycle: premultiplier m must be " +
                            std::to_string(want_m) + " for n = " + std::to_string(n));
  detail::require(y0 > 0, "pole_cycle: y0 > 0 required");
  detail::require(a != 0 && b != 0 && d != 0, "pole_cycle: a, b, d must be nonzero");
  double E = std::exp(a * kPi / b);
  double w0 = d * (1 + E) / (-1 + E);

  int r = n % 4;
  if (r == 2 || r == 3) {
    detail::require(a < 0 && b < 0 && d > 0,
                    "pole_cycle: row requires a, b < 0 and d > 0 for n mod 4 in {2, 3}");
    double bound = std::cos(n * kPi / (2.0 * (n + 1))) /
                   std::sin(n * kPi / (2.0 * (n + 1))) * y0;
    std::ostringstream os;
    os << "pole_cycle: need 0 < w0 < cot(n*pi/(2(n+1)))*y0, got w0 = " << w0
       << ", bound = " << bound;
    detail::require(0 < w0 && w0 < bound, os.str());
  } else {
    detail::require(a < 0 && b > 0 && d < 0,
                    "pole_cycle: row requires a < 0 < b and d < 0 for n mod 4 in {0, 1}");
    double bound = std::cos((n + 2) * kPi / (2.0 * (n + 1))) /
                   std::sin((n + 2) * kPi / (2.0 * (n + 1))) * y0;
    std::ostringstream os;
    os << "pole_cycle: need cot((n+2)*pi/(2(n+1)))*y0 < -w0 < 0, got w0 = " << w0
       << ", bound = " << bound;
    detail::require(bound < -w0 && -w0 < 0, os.str());
  }

  CycleResult cyc;
  cyc.w0 = std::abs(w0);
  cyc.other_crossing = -cyc.w0;
  cyc.map.A = b > 0 ? E : 1.0 / E;
  cyc.map.B = d * (1 + cyc.map.A);
  cyc.map.fixed_point = cyc.map.B / (1.0 - cyc.map.A);
  cyc.map.derivative = cyc.map.A;
  cyc.map.stability = cyc.map.A < 1 ? Stability::Stable : Stability::Unstable;

  PWSystem sys;
  sys.plus = Linear{Complex{a, b}, Complex{d, 0.0}};
  sys.minus = Pole{n, Complex{0.0, -y0}, m};
  sys.line = SwitchingLine{LineOrientation::Horizontal, 0.0};
  detail::stitch_cycle(sys, Side::Minus, cyc.w0, cyc.other_crossing, cyc, opt);
  return cyc;
}

// ---------------------------------------------------------------------------
// Shooting.

struct ShootingResult {
  double w0 = 0.0;
  double derivative = 0.0;
  Stability stability = Stability::None;
};

/// Full return map on the switching axis by composing the two half-returns.
inline double full_return(const PWSystem& sys, double s, const IntegratorOptions& opt = {}) {
  Side first = detail::forward_normal_sign(sys.plus, sys.line.point_at(s), sys.line) > 0
                   ? Side::Plus
                   : Side::Minus;
  HalfReturn h1 = half_return(sys, first, s, opt);
  Side second = first == Side::Plus ? Side::Minus : Side::Plus;
  HalfReturn h2 = half_return(sys, second, h1.s_land, opt);
  return h2.s_land;
}

/// Bisection on the displacement Pi(s) - s over [s_lo, s_hi].
inline ShootingResult shooting_fixed_point(const PWSystem& sys, double s_lo, double s_hi,
                                           const IntegratorOptions& opt = {}) {
  auto delta = [&](double s) { return full_return(sys, s, opt) - s; };
  double d_lo = delta(s_lo);
  double d_hi = delta(s_hi);
  if ((d_lo > 0) == (d_hi > 0))
    throw NoSignChange("shooting_fixed_point: displacement has equal signs at bracket ends");
  double lo = s_lo, hi = s_hi;
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    double dm = delta(mid);
    if (std::abs(dm) <= 1e-9) break;
    if ((dm > 0) == (d_lo > 0)) {
      lo = mid;
      d_lo = dm;
    } else {
      hi = mid;
    }
  }
  ShootingResult res;
  res.w0 = mid;
  double h = 1e-6;
  res.derivative = (full_return(sys, mid + h, opt) - full_return(sys, mid - h, opt)) / (2 * h);
  res.stability = std::abs(res.derivative) < 1 ? Stability::Stable
                 : std::abs(res.derivative) > 1 ? Stability::Unstable
                                                : Stability::None;
  return res;
}

// ---------------------------------------------------------------------------
// Homoclinic orbits: upper i b z, lower i^m / (z + i y0)^n (pole family, n >= 1)
// or i^m (z + i y0)^n (power family, n > 2).

enum class HomoclinicFamily { PoleFamily, PowerFamily };

struct HomoclinicResult {
  double s_right = 0.0;  // axis intersection of the right invariant ray
  double s_left = 0.0;
  double theta_right = 0.0;  // ray angles at the center -i y0
  double theta_left = 0.0;
  double arc_radius = 0.0;  // upper semicircle radius about the origin
  double half_period = 0.0;  // time of the linear half-turn
  bool leaves_through_right = true;  // orbit exits the center along the right ray
  std::vector<Complex> orbit;
  double closure = 0.0;
};

/// Admissible rotation sense: the upper half-turn must start where the lower
/// field leaves the center and end where it returns.  The sign of the radial
/// velocity on the right invariant ray decides.
inline bool homoclinic_b_positive(HomoclinicFamily family, int n) {
  int r = n % 4;
  if (family == HomoclinicFamily::PoleFamily) return r == 0 || r == 1;
  return r == 1 || r == 2;
}

inline HomoclinicResult homoclinic(int n, int m, double b, double y0,
                                   HomoclinicFamily family) {
  if (family == HomoclinicFamily::PowerFamily && n <= 2)
    throw InvalidFieldSpec("homoclinic power family: n must be > 2");
  if (family == HomoclinicFamily::PoleFamily && n < 1)
    throw InvalidFieldSpec("homoclinic pole family: n must be >= 1");
  int want_m = n % 2 == 0 ? 0 : 1;
  if (m != want_m)
    throw ConditionViolated("homoclinic: premultiplier m must be " +
                            std::to_string(want_m) + " for n = " + std::to_string(n));
  if (y0 <= 0) throw ConditionViolated("homoclinic: y0 > 0 required");
  if (b == 0) throw DegenerateParameters("homoclinic: b must be nonzero");
  if ((b > 0) != homoclinic_b_positive(family, n))
    throw TableRowMismatch("homoclinic: sign of b does not match the admissible row for n = " +
                           std::to_string(n));

  int p = family == HomoclinicFamily::PoleFamily ? n + 1 : n - 1;
  HomoclinicResult res;
  res.theta_right = kPi / 2 - kPi / (2.0 * p);
  res.theta_left = kPi / 2 + kPi / (2.0 * p);
  res.s_right = std::cos(res.theta_right) / std::sin(res.theta_right) * y0;
  res.s_left = -res.s_right;
  res.arc_radius = res.s_right;
  res.half_period = kPi / std::abs(b);
  res.leaves_through_right = b > 0;

  // Stitch: outgoing ray from the center, upper half-circle, incoming ray.
  Complex center{0.0, -y0};
  double theta_out = b > 0 ? res.theta_right : res.theta_left;
  double theta_in = b > 0 ? res.theta_left : res.theta_right;
  double ray_len = std::hypot(res.s_right, y0);
  const int N = 200;
  for (int i = 0; i <= N; ++i) {
    double u = ray_len * i / N;
    res.orbit.push_back(center + u * Complex{std::cos(theta_out), std::sin(theta_out)});
  }
  double s_start = b > 0 ? res.s_right : res.s_left;
  for (int i = 1; i <= N; ++i) {
    double t = res.half_period * i / N;
    res.orbit.push_back(s_start * std::exp(Complex{0.0, b * t}));
  }
  for (int i = 1; i <= N; ++i) {
    double u = ray_len * (1.0 - double(i) / N);
    res.orbit.push_back(center + u * Complex{std::cos(theta_in), std::sin(theta_in)});
  }
  res.closure = std::abs(res.orbit.back() - res.orbit.front());
  return res;
}

}  // namespace pwhs
