#pragma once

// Orbit computation: adaptive Runge-Kutta integration of a piecewise system
// with line-crossing events and Filippov sliding, the closed-form linear flow,
// and polar first integrals of the homogeneous power / pole fields.

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "pwhs/complex_field.hpp"
#include "pwhs/errors.hpp"
#include "pwhs/switching.hpp"

namespace pwhs {

struct IntegratorOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double event_tol = 1e-11;
  double t_max = 1e3;
  double singularity_standoff = 1e-6;
  double escape_radius = 1e6;
  double h_init = 1e-3;
  double h_min = 1e-14;
};

enum class OrbitMode { RegularPlus, RegularMinus, Sliding };

enum class StopReason {
  TimeLimit,
  Escaped,
  HitSingularity,
  DoubleTangency,
  ReachedLine,     // half-return arcs only
  StepUnderflow,
  EventLimit
};

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::TimeLimit: return "time-limit";
    case StopReason::Escaped: return "escaped";
    case StopReason::HitSingularity: return "hit-singularity";
    case StopReason::DoubleTangency: return "double-tangency";
    case StopReason::ReachedLine: return "reached-line";
    case StopReason::StepUnderflow: return "step-underflow";
    case StopReason::EventLimit: return "event-limit";
  }
  return "?";
}

struct TrajectoryPoint {
  double t = 0.0;
  Complex z;
  OrbitMode mode = OrbitMode::RegularPlus;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  std::vector<double> crossing_times;  // times of line events (crossings, mode changes)
  StopReason stop = StopReason::TimeLimit;
};

/// Exact flow of the linear field (a+ib)(z - z0) through w after time t.
inline Complex solve_linear(const Linear& f, Complex w, double t) {
  return f.center + (w - f.center) * std::exp(f.coeff * t);
}

inline Complex solve_linear(double a, double b, Complex z0, Complex w, double t) {
  return solve_linear(Linear{Complex{a, b}, z0}, w, t);
}

namespace detail {

// Dormand-Prince 5(4) tableau.
struct Dopri {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

// One 5th order step of size h from y; writes the result and the embedded
// error estimate.  rhs must be callable as Complex(Complex).
template <class Rhs>
void dopri_step(Rhs&& rhs, Complex y, double h, Complex& y_out, double& err_out) {
  using D = Dopri;
  Complex k1 = rhs(y);
  Complex k2 = rhs(y + h * (D::a21 * k1));
  Complex k3 = rhs(y + h * (D::a31 * k1 + D::a32 * k2));
  Complex k4 = rhs(y + h * (D::a41 * k1 + D::a42 * k2 + D::a43 * k3));
  Complex k5 = rhs(y + h * (D::a51 * k1 + D::a52 * k2 + D::a53 * k3 + D::a54 * k4));
  Complex k6 = rhs(y + h * (D::a61 * k1 + D::a62 * k2 + D::a63 * k3 + D::a64 * k4 +
                            D::a65 * k5));
  y_out = y + h * (D::b1 * k1 + D::b3 * k3 + D::b4 * k4 + D::b5 * k5 + D::b6 * k6);
  Complex k7 = rhs(y_out);
  Complex e = h * (D::e1 * k1 + D::e3 * k3 + D::e4 * k4 + D::e5 * k5 + D::e6 * k6 +
                   D::e7 * k7);
  err_out = std::abs(e);
}

// Scalar version (sliding dynamics on the line parameter).
template <class Rhs>
void dopri_step_scalar(Rhs&& rhs, double y, double h, double& y_out, double& err_out) {
  using D = Dopri;
  double k1 = rhs(y);
  double k2 = rhs(y + h * (D::a21 * k1));
  double k3 = rhs(y + h * (D::a31 * k1 + D::a32 * k2));
  double k4 = rhs(y + h * (D::a41 * k1 + D::a42 * k2 + D::a43 * k3));
  double k5 = rhs(y + h * (D::a51 * k1 + D::a52 * k2 + D::a53 * k3 + D::a54 * k4));
  double k6 = rhs(y + h * (D::a61 * k1 + D::a62 * k2 + D::a63 * k3 + D::a64 * k4 +
                           D::a65 * k5));
  y_out = y + h * (D::b1 * k1 + D::b3 * k3 + D::b4 * k4 + D::b5 * k5 + D::b6 * k6);
  double k7 = rhs(y_out);
  err_out = std::abs(h * (D::e1 * k1 + D::e3 * k3 + D::e4 * k4 + D::e5 * k5 +
                          D::e6 * k6 + D::e7 * k7));
}

inline double step_factor(double err, double sc) {
  if (err <= 0) return 5.0;
  double f = 0.9 * std::pow(sc / err, 0.2);
  return std::min(5.0, std::max(0.2, f));
}

// Sign of the line-normal coordinate just downstream of q along the orbit of f.
// Returns 0 only if every orbit coefficient up to k_max has negligible normal
// part (the orbit stays on the line to that order).
inline int forward_normal_sign(const FieldSpec& f, Complex q, const SwitchingLine& line,
                               int k_max = 8) {
  std::vector<Complex> c = orbit_series(f, q, k_max);
  for (int k = 1; k <= k_max; ++k) {
    double comp = line.normal_component(c[k]);
    if (std::abs(comp) > 1e-9 * std::max(1.0, std::abs(c[k])))
      return comp > 0 ? 1 : -1;
  }
  return 0;
}

}  // namespace detail

/// One regular arc of a single field from z0, stopping when the orbit meets
/// the switching line (after having left it), escapes, or times out.  The
/// landing point is appended as the final trajectory point.
template <class Rhs>
Trajectory integrate_arc(Rhs&& rhs, Complex z0, const SwitchingLine& line,
                         const std::vector<Complex>& exclusions, OrbitMode mode,
                         const IntegratorOptions& opt = {}) {
  Trajectory traj;
  traj.points.push_back({0.0, z0, mode});
  double t = 0.0;
  Complex z = z0;
  double h = opt.h_init;
  bool armed = std::abs(line.normal_coordinate(z0)) > 10 * opt.event_tol;

  while (t < opt.t_max) {
    if (std::abs(z) > opt.escape_radius) {
      traj.stop = StopReason::Escaped;
      return traj;
    }
    for (Complex s : exclusions) {
      if (std::abs(z - s) < opt.singularity_standoff) {
        traj.stop = StopReason::HitSingularity;
        return traj;
      }
    }
    if (t + h > opt.t_max) h = opt.t_max - t;

    Complex z_new;
    double err;
    try {
      detail::dopri_step(rhs, z, h, z_new, err);
    } catch (const EvaluationAtSingularity&) {
      traj.stop = StopReason::HitSingularity;
      return traj;
    }
    double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(z), std::abs(z_new));
    if (err > sc) {
      h *= detail::step_factor(err, sc);
      if (h < opt.h_min) {
        traj.stop = StopReason::StepUnderflow;
        return traj;
      }
      continue;
    }

    double g0 = line.normal_coordinate(z);
    double g1 = line.normal_coordinate(z_new);
    if (armed && ((g0 > 0) != (g1 > 0) || std::abs(g1) <= opt.event_tol)) {
      // Localize the event time inside [0, h] by bisection on the step length.
      double lo = 0.0, hi = h;
      Complex z_hit = z_new;
      for (int it = 0; it < 60 && hi - lo > 1e-16 * (1.0 + h); ++it) {
        double mid = 0.5 * (lo + hi);
        Complex zm;
        double em;
        detail::dopri_step(rhs, z, mid, zm, em);
        double gm = line.normal_coordinate(zm);
        if ((g0 > 0) != (gm > 0) || std::abs(gm) <= opt.event_tol) {
          hi = mid;
          z_hit = zm;
        } else {
          lo = mid;
        }
      }
      double t_hit = t + hi;
      traj.points.push_back({t_hit, z_hit, mode});
      traj.crossing_times.push_back(t_hit);
      traj.stop = StopReason::ReachedLine;
      return traj;
    }
    if (!armed && std::abs(g1) > 10 * opt.event_tol) armed = true;

    t += h;
    z = z_new;
    traj.points.push_back({t, z, mode});
    h *= detail::step_factor(err, sc);
  }
  traj.stop = StopReason::TimeLimit;
  return traj;
}

/// Half-return of one side's field: start on the line at parameter s_start,
/// flow through the given side, land back on the line.  Returns the landing
/// parameter and flight time.
struct HalfReturn {
  double s_land = 0.0;
  double time = 0.0;
  Trajectory arc;
};

inline HalfReturn half_return(const PWSystem& sys, Side side, double s_start,
                              const IntegratorOptions& opt = {}) {
  const FieldSpec& f = side == Side::Plus ? sys.plus : sys.minus;
  Complex q = sys.line.point_at(s_start);
  int fs = detail::forward_normal_sign(f, q, sys.line);
  int want = side == Side::Plus ? 1 : -1;
  if (fs != want)
    throw NoReturn("half_return: orbit does not enter the requested side");
  PlanarField pf = to_planar(f);
  auto rhs = [&](Complex z) { return pf(z); };
  OrbitMode mode = side == Side::Plus ? OrbitMode::RegularPlus : OrbitMode::RegularMinus;
  Trajectory arc = integrate_arc(rhs, q, sys.line, pf.exclusions(), mode, opt);
  if (arc.stop != StopReason::ReachedLine)
    throw NoReturn(std::string("half_return: arc ended with ") + to_string(arc.stop));
  HalfReturn hr;
  hr.s_land = sys.line.parameter_of(arc.points.back().z);
  hr.time = arc.points.back().t;
  hr.arc = std::move(arc);
  return hr;
}

/// Full Filippov integration of the piecewise system from z0: regular arcs on
/// each side glued by the crossing rules, sliding segments on the line, exits
/// at tangency boundaries.
inline Trajectory integrate(const PWSystem& sys, Complex z0, const IntegratorOptions& opt = {},
                            int max_events = 200) {
  Trajectory traj;
  PlanarField fp = to_planar(sys.plus);
  PlanarField fm = to_planar(sys.minus);

  double t = 0.0;
  Complex z = z0;

  // Decide the next mode from a point on the line (|normal| <= tol).
  auto mode_on_line = [&](Complex p) -> std::optional<OrbitMode> {
    auto [np, nm] = normal_components(sys, p);
    bool tp = std::abs(np) <= kClassifyTol;
    bool tm = std::abs(nm) <= kClassifyTol;
    if (tp && tm) return std::nullopt;  // double tangency
    if (!tp && !tm) {
      if (np < 0 && nm > 0) return OrbitMode::Sliding;
      if (np > 0 && nm < 0) return OrbitMode::Sliding;  // repelling: slide (see report)
      return np > 0 ? OrbitMode::RegularPlus : OrbitMode::RegularMinus;
    }
    // Single tangency: use the orbit's bending direction on the tangent side.
    int sp = detail::forward_normal_sign(sys.plus, p, sys.line);
    int sm = detail::forward_normal_sign(sys.minus, p, sys.line);
    bool into_plus = sp > 0;
    bool into_minus = sm < 0;
    if (into_plus && !into_minus) return OrbitMode::RegularPlus;
    if (into_minus && !into_plus) return OrbitMode::RegularMinus;
    if (!into_plus && !into_minus) return OrbitMode::Sliding;
    return OrbitMode::RegularPlus;  // both leave: pick plus (non-unique forward orbit)
  };

  double g0 = sys.line.normal_coordinate(z);
  OrbitMode mode;
  if (std::abs(g0) <= kClassifyTol) {
    auto m = mode_on_line(z);
    if (!m)
      throw StartAtDoubleTangency("integrate: initial point is a two-sided tangency");
    mode = *m;
  } else {
    mode = g0 > 0 ? OrbitMode::RegularPlus : OrbitMode::RegularMinus;
  }

  for (int ev = 0; ev < max_events; ++ev) {
    if (t >= opt.t_max) {
      traj.stop = StopReason::TimeLimit;
      return traj;
    }
    IntegratorOptions local = opt;
    local.t_max = opt.t_max - t;

    if (mode == OrbitMode::Sliding) {
      // Scalar dynamics on the line parameter; exit when a normal component
      // reaches zero, then continue into the side whose component vanished.
      auto svel = [&](double s) { return sliding_velocity(sys, sys.line.point_at(s)); };
      auto comp_p = [&](double s) {
        return sys.line.normal_component(fp(sys.line.point_at(s)));
      };
      auto comp_m = [&](double s) {
        return sys.line.normal_component(fm(sys.line.point_at(s)));
      };
      double s = sys.line.parameter_of(z);
      double h = opt.h_init;
      double tl = 0.0;
      bool exited = false;
      while (tl < local.t_max) {
        if (std::abs(s) > opt.escape_radius) {
          traj.stop = StopReason::Escaped;
          return traj;
        }
        double s_new, err;
        try {
          detail::dopri_step_scalar(svel, s, h, s_new, err);
        } catch (const NotInSlidingRegion&) {
          h *= 0.5;
          if (h < opt.h_min) break;
          continue;
        } catch (const EvaluationAtSingularity&) {
          traj.stop = StopReason::HitSingularity;
          return traj;
        }
        double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(s), std::abs(s_new));
        if (err > sc) {
          h *= detail::step_factor(err, sc);
          if (h < opt.h_min) {
            traj.stop = StopReason::StepUnderflow;
            return traj;
          }
          continue;
        }
        // The exit band must cover the classification tolerance: inside it the
        // sliding field already refuses to evaluate, so the stepper can never
        // push the normal component below kClassifyTol.
        double exit_tol = std::max(opt.event_tol, 2 * kClassifyTol);
        double p0 = comp_p(s), p1 = comp_p(s_new);
        double m0 = comp_m(s), m1 = comp_m(s_new);
        bool ex_p = (p0 > 0) != (p1 > 0) || std::abs(p1) <= exit_tol;
        bool ex_m = (m0 > 0) != (m1 > 0) || std::abs(m1) <= exit_tol;
        if (ex_p || ex_m) {
          std::function<double(double)> comp = ex_p ? std::function<double(double)>(comp_p)
                                                    : std::function<double(double)>(comp_m);
          double lo = s, hi = s_new;
          double c_lo = ex_p ? p0 : m0;
          for (int it = 0; it < 80 && std::abs(hi - lo) > 1e-15 * (1.0 + std::abs(s)); ++it) {
            double mid = 0.5 * (lo + hi);
            double cm = comp(mid);
            if ((c_lo > 0) != (cm > 0) || std::abs(cm) <= exit_tol)
              hi = mid;
            else
              lo = mid;
          }
          s = hi;
          tl += h;  // time of the exit within the step is not refined further
          t += tl;
          z = sys.line.point_at(s);
          traj.points.push_back({t, z, OrbitMode::Sliding});
          traj.crossing_times.push_back(t);
          mode = ex_p ? OrbitMode::RegularPlus : OrbitMode::RegularMinus;
          exited = true;
          break;
        }
        tl += h;
        s = s_new;
        traj.points.push_back({t + tl, sys.line.point_at(s), OrbitMode::Sliding});
        h *= detail::step_factor(err, sc);
      }
      if (!exited) {
        t += tl;
        traj.stop = tl >= local.t_max ? StopReason::TimeLimit : StopReason::StepUnderflow;
        return traj;
      }
      continue;
    }

    // Regular arc on one side.
    PlanarField& pf = mode == OrbitMode::RegularPlus ? fp : fm;
    auto rhs = [&](Complex w) { return pf(w); };
    Trajectory arc = integrate_arc(rhs, z, sys.line, pf.exclusions(), mode, local);
    for (auto& pt : arc.points) {
      pt.t += t;
      traj.points.push_back(pt);
    }
    t = traj.points.back().t;
    z = traj.points.back().z;
    if (arc.stop != StopReason::ReachedLine) {
      traj.stop = arc.stop;
      return traj;
    }
    traj.crossing_times.push_back(t);
    auto m = mode_on_line(z);
    if (!m) {
      traj.stop = StopReason::DoubleTangency;
      return traj;
    }
    mode = *m;
  }
  traj.stop = StopReason::EventLimit;
  return traj;
}

// ---------------------------------------------------------------------------
// Polar first integrals of the homogeneous fields i^m (z - z0)^n and
// i^m / (z - z0)^n, in polar coordinates centered at z0.

enum class PolarKind { PowerEven, PowerOddTimesI, PoleEven, PoleOddTimesI };

/// Orbit radius at angle theta for the orbit constant C:
///   PowerEven       r = |sin((n-1) theta)|^{1/(n-1)} e^C
///   PowerOddTimesI  r = |cos((n-1) theta)|^{1/(n-1)} e^C
///   PoleEven        r = e^C / |sin((n+1) theta)|^{1/(n+1)}
///   PoleOddTimesI   r = e^C / |cos((n+1) theta)|^{1/(n+1)}
inline double polar_orbit_radius(PolarKind kind, int n, double theta, double C) {
  double g;
  int p;
  switch (kind) {
    case PolarKind::PowerEven: g = std::sin((n - 1) * theta); p = n - 1; break;
    case PolarKind::PowerOddTimesI: g = std::cos((n - 1) * theta); p = n - 1; break;
    case PolarKind::PoleEven: g = std::sin((n + 1) * theta); p = n + 1; break;
    case PolarKind::PoleOddTimesI: g = std::cos((n + 1) * theta); p = n + 1; break;
    default: throw UnsupportedVariant("polar_orbit_radius");
  }
  bool pole = kind == PolarKind::PoleEven || kind == PolarKind::PoleOddTimesI;
  double ag = std::abs(g);
  if (pole) {
    if (ag < 1e-14)
      throw OrbitUnboundedAtAngle("orbit radius diverges at an invariant ray angle");
    return std::exp(C) / std::pow(ag, 1.0 / p);
  }
  return std::pow(ag, 1.0 / p) * std::exp(C);
}

/// Radius along the orbit through (r0, theta0) at angle theta.
/// Power kinds:  r |sin/cos((n-1)theta)|^{-1/(n-1)} is constant on orbits.
/// Pole kinds:   r |sin/cos((n+1)theta)|^{ 1/(n+1)} is constant on orbits.
inline double polar_orbit_radius(PolarKind kind, int n, double r0, double theta0,
                                 double theta) {
  if (r0 <= 0) throw Error("polar_orbit_radius: r0 must be positive");
  auto trig = [&](double th) {
    switch (kind) {
      case PolarKind::PowerEven: return std::sin((n - 1) * th);
      case PolarKind::PowerOddTimesI: return std::cos((n - 1) * th);
      case PolarKind::PoleEven: return std::sin((n + 1) * th);
      case PolarKind::PoleOddTimesI: return std::cos((n + 1) * th);
    }
    return 0.0;
  };
  bool pole = kind == PolarKind::PoleEven || kind == PolarKind::PoleOddTimesI;
  int p = pole ? n + 1 : n - 1;
  double g0 = std::abs(trig(theta0));
  double g1 = std::abs(trig(theta));
  if (!pole) {
    if (g0 < 1e-14)
      throw OrbitUnboundedAtAngle("orbit through an invariant ray is the ray itself");
    return r0 * std::pow(g1 / g0, 1.0 / p);
  }
  if (g1 < 1e-14)
    throw OrbitUnboundedAtAngle("orbit radius diverges at an invariant ray angle");
  if (g0 < 1e-14)
    throw OrbitUnboundedAtAngle("orbit through an invariant ray is the ray itself");
  return r0 * std::pow(g0 / g1, 1.0 / p);
}

/// Angles in [0, 2*pi) of the straight-line orbits through the center of
/// i^m (z-z0)^n (power = true) or i^m / (z-z0)^n (power = false).
inline std::vector<double> invariant_rays(bool power, int m, int n) {
  if (m != 0 && m != 1) throw InvalidFieldSpec("invariant_rays: premultiplier must be 0 or 1");
  int p = power ? n - 1 : n + 1;
  if (p <= 0) throw InvalidFieldSpec("invariant_rays: need n >= 2 for powers");
  const double pi = 3.14159265358979323846;
  std::vector<double> rays;
  for (int j = 0; j < 2 * p; ++j) {
    double th = m == 0 ? j * pi / p : (2 * j + 1) * pi / (2.0 * p);
    if (th < 2 * pi) rays.push_back(th);
  }
  return rays;
}

inline std::vector<double> invariant_rays(const FieldSpec& f) {
  if (const auto* pw = std::get_if<Power>(&f))
    return invariant_rays(true, pw->premul, pw->n);
  if (const auto* pl = std::get_if<Pole>(&f))
    return invariant_rays(false, pl->premul, pl->n);
  throw UnsupportedVariant("invariant_rays: only power and pole fields have rays");
}

}  // namespace pwhs
