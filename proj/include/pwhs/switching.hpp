#pragma once

// Classification of the switching line: sewing / sliding / tangency regions,
// the Filippov sliding field, and tangential singularities (contact
// multiplicity, visibility, two-sided pairing).

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pwhs/complex_field.hpp"
#include "pwhs/errors.hpp"

namespace pwhs {

inline constexpr double kClassifyTol = 1e-9;

enum class LineOrientation { Vertical, Horizontal };

/// A straight switching line Re(z) = c (vertical) or Im(z) = c (horizontal).
/// The positive normal is +x for vertical and +y for horizontal; the line
/// parameter is y resp. x.
struct SwitchingLine {
  LineOrientation orientation = LineOrientation::Vertical;
  double offset = 0.0;

  Complex point_at(double s) const {
    return orientation == LineOrientation::Vertical ? Complex{offset, s}
                                                    : Complex{s, offset};
  }
  double parameter_of(Complex z) const {
    return orientation == LineOrientation::Vertical ? z.imag() : z.real();
  }
  /// Signed distance from the line along the positive normal.
  double normal_coordinate(Complex z) const {
    return orientation == LineOrientation::Vertical ? z.real() - offset
                                                    : z.imag() - offset;
  }
  double normal_component(Complex vec) const {
    return orientation == LineOrientation::Vertical ? vec.real() : vec.imag();
  }
  double tangential_component(Complex vec) const {
    return orientation == LineOrientation::Vertical ? vec.imag() : vec.real();
  }
  /// Vector along the line in the direction of increasing parameter.
  Complex tangent_vector(double magnitude) const {
    return orientation == LineOrientation::Vertical ? Complex{0.0, magnitude}
                                                    : Complex{magnitude, 0.0};
  }
};

struct PWSystem {
  FieldSpec plus;   // side with normal coordinate > 0
  FieldSpec minus;  // side with normal coordinate < 0
  SwitchingLine line;
};

enum class RegionClass { Sewing, SlidingAttract, SlidingRepel, Tangency };

inline const char* to_string(RegionClass c) {
  switch (c) {
    case RegionClass::Sewing: return "sewing";
    case RegionClass::SlidingAttract: return "sliding-attract";
    case RegionClass::SlidingRepel: return "sliding-repel";
    case RegionClass::Tangency: return "tangency";
  }
  return "?";
}

/// Normal components (plus side first) of the two fields at a point of the line.
inline std::pair<double, double> normal_components(const PWSystem& sys, Complex p) {
  double np = sys.line.normal_component(eval(sys.plus, p));
  double nm = sys.line.normal_component(eval(sys.minus, p));
  return {np, nm};
}

inline RegionClass classify_point(const PWSystem& sys, Complex p) {
  auto [np, nm] = normal_components(sys, p);
  if (std::abs(np) <= kClassifyTol || std::abs(nm) <= kClassifyTol)
    return RegionClass::Tangency;
  if (np < 0 && nm > 0) return RegionClass::SlidingAttract;
  if (np > 0 && nm < 0) return RegionClass::SlidingRepel;
  return RegionClass::Sewing;
}

/// Filippov sliding vector at p: tangent to the line, tangential component
/// (n+ t- - n- t+)/(n+ - n-) in the line-adapted frame.
inline Complex sliding_field(const PWSystem& sys, Complex p) {
  RegionClass c = classify_point(sys, p);
  if (c != RegionClass::SlidingAttract && c != RegionClass::SlidingRepel)
    throw NotInSlidingRegion("sliding_field: point is not in a sliding region");
  Complex fp = eval(sys.plus, p);
  Complex fm = eval(sys.minus, p);
  double np = sys.line.normal_component(fp);
  double nm = sys.line.normal_component(fm);
  if (std::abs(np - nm) < kClassifyTol)
    throw DegenerateDenominator("sliding_field: normal components coincide");
  double tp = sys.line.tangential_component(fp);
  double tm = sys.line.tangential_component(fm);
  return sys.line.tangent_vector((np * tm - nm * tp) / (np - nm));
}

/// Tangential velocity of the sliding field (scalar, in the line parameter).
inline double sliding_velocity(const PWSystem& sys, Complex p) {
  return sys.line.tangential_component(sliding_field(sys, p));
}

struct RegionSegment {
  double lo = 0.0;
  double hi = 0.0;
  RegionClass cls = RegionClass::Sewing;
};

struct RegionReport {
  std::vector<RegionSegment> segments;  // ordered, disjoint open intervals
  std::vector<double> tangency_points;  // isolated tangency parameters
  std::vector<double> singular_points;  // poles sitting on the line
};

namespace detail {

// Bisection root of f on [a, b] given opposite (or zero) endpoint signs.
template <class F>
double bisect_root(F&& f, double a, double b) {
  double fa = f(a);
  double fb = f(b);
  if (fa == 0) return a;
  if (fb == 0) return b;
  for (int it = 0; it < 200 && (b - a) > 1e-13 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    double m = 0.5 * (a + b);
    double fm = f(m);
    if (fm == 0) return m;
    if ((fa < 0) != (fm < 0)) {
      b = m;
      fb = fm;
    } else {
      a = m;
      fa = fm;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

/// Sweep [s_lo, s_hi] of the switching line: sample at `resolution` points,
/// refine every sign change of either normal component by bisection, and merge
/// the resulting subintervals into maximal constant-class segments.
inline RegionReport classify_regions(const PWSystem& sys, double s_lo, double s_hi,
                                     int resolution) {
  if (!(s_lo < s_hi)) throw Error("classify_regions: empty interval");
  if (resolution < 2) throw Error("classify_regions: resolution must be >= 2");

  RegionReport report;

  // Poles on the line split the report.
  std::vector<double> breaks;
  for (const FieldSpec* f : {&sys.plus, &sys.minus}) {
    for (Complex s : singular_points(*f)) {
      if (std::abs(sys.line.normal_coordinate(s)) < kClassifyTol) {
        double t = sys.line.parameter_of(s);
        if (t > s_lo && t < s_hi) {
          breaks.push_back(t);
          report.singular_points.push_back(t);
        }
      }
    }
  }

  auto comp_plus = [&](double s) {
    return sys.line.normal_component(eval(sys.plus, sys.line.point_at(s)));
  };
  auto comp_minus = [&](double s) {
    return sys.line.normal_component(eval(sys.minus, sys.line.point_at(s)));
  };

  auto safe = [&](auto&& f, double s) -> std::optional<double> {
    try {
      return f(s);
    } catch (const EvaluationAtSingularity&) {
      return std::nullopt;
    }
  };

  double step = (s_hi - s_lo) / (resolution - 1);
  for (int i = 0; i + 1 < resolution; ++i) {
    double a = s_lo + i * step;
    double b = s_lo + (i + 1) * step;
    for (auto&& comp : {std::function<double(double)>(comp_plus),
                        std::function<double(double)>(comp_minus)}) {
      auto fa = safe(comp, a);
      auto fb = safe(comp, b);
      if (!fa || !fb) continue;
      if ((*fa < 0) != (*fb < 0))
        breaks.push_back(detail::bisect_root(comp, a, b));
      else if (std::abs(*fa) <= kClassifyTol && i == 0)
        breaks.push_back(a);
    }
  }
  breaks.push_back(s_lo);
  breaks.push_back(s_hi);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(),
                           [](double x, double y) { return std::abs(x - y) < 1e-11; }),
               breaks.end());

  // Classify each open subinterval at its midpoint; merge equal neighbors.
  for (size_t i = 0; i + 1 < breaks.size(); ++i) {
    double mid = 0.5 * (breaks[i] + breaks[i + 1]);
    RegionClass cls;
    try {
      cls = classify_point(sys, sys.line.point_at(mid));
    } catch (const EvaluationAtSingularity&) {
      continue;
    }
    if (!report.segments.empty() && report.segments.back().cls == cls &&
        std::abs(report.segments.back().hi - breaks[i]) < 1e-11) {
      bool is_singular = false;
      for (double sp : report.singular_points)
        if (std::abs(sp - breaks[i]) < 1e-11) is_singular = true;
      bool is_tangency = false;
      try {
        is_tangency =
            classify_point(sys, sys.line.point_at(breaks[i])) == RegionClass::Tangency &&
            cls != RegionClass::Tangency;
      } catch (const EvaluationAtSingularity&) {
        is_singular = true;
      }
      if (!is_singular && !is_tangency) {
        report.segments.back().hi = breaks[i + 1];
        continue;
      }
    }
    report.segments.push_back({breaks[i], breaks[i + 1], cls});
  }

  // Isolated tangency parameters: interior breakpoints that classify Tangency
  // but do not continue a tangency segment, plus boundaries of tangency
  // segments adjacent to other classes.
  for (size_t i = 1; i + 1 < breaks.size() + 1 && i < breaks.size(); ++i) {
    double t = breaks[i];
    if (i + 1 == breaks.size()) break;
    bool is_singular = false;
    for (double sp : report.singular_points)
      if (std::abs(sp - t) < 1e-11) is_singular = true;
    if (is_singular) continue;
    try {
      if (classify_point(sys, sys.line.point_at(t)) == RegionClass::Tangency)
        report.tangency_points.push_back(t);
    } catch (const EvaluationAtSingularity&) {
    }
  }
  return report;
}

enum class Visibility { Visible, Invisible, NotApplicable };
enum class Side { Plus, Minus };

inline const char* to_string(Visibility v) {
  switch (v) {
    case Visibility::Visible: return "visible";
    case Visibility::Invisible: return "invisible";
    case Visibility::NotApplicable: return "n/a";
  }
  return "?";
}

struct ContactResult {
  bool regular = false;  // normal component nonzero at q
  int multiplicity = 0;  // defined when !regular
  Visibility visibility = Visibility::NotApplicable;
};

/// Contact multiplicity of a single field with the line at q: the vanishing
/// order of the normal coordinate along the orbit through q, computed from the
/// orbit's Taylor series.  Visibility (even multiplicity only) is the side of
/// the line the orbit locally stays on: for the plus field, visible means the
/// orbit bends into the plus side.
inline ContactResult contact_multiplicity(const FieldSpec& f, Complex q,
                                          const SwitchingLine& line, int k_max,
                                          Side side = Side::Plus) {
  if (k_max < 2) throw Error("contact_multiplicity: k_max must be >= 2");
  std::vector<Complex> c = orbit_series(f, q, k_max);
  for (int k = 1; k <= k_max; ++k) {
    double comp = line.normal_component(c[k]);
    double mag = std::abs(c[k]);
    if (std::abs(comp) > 1e-7 * mag && mag > 1e-14) {
      if (k == 1) return {true, 0, Visibility::NotApplicable};
      ContactResult r;
      r.regular = false;
      r.multiplicity = k;
      if (k % 2 == 0) {
        bool bends_plus = comp > 0;
        bool visible = (side == Side::Plus) ? bends_plus : !bends_plus;
        r.visibility = visible ? Visibility::Visible : Visibility::Invisible;
      }
      return r;
    }
  }
  throw MultiplicityExceedsKMax("contact multiplicity not certified up to k_max");
}

/// Fold test for a holomorphic field at q on the line: normal component zero,
/// tangential component nonzero, Im F'(q) != 0.  The last condition is frame
/// independent for both line orientations.
inline bool fold_predicate(const FieldSpec& f, Complex q, const SwitchingLine& line,
                           double tol = kClassifyTol) {
  Complex val = eval(f, q);
  Complex der = eval_derivative(f, q);
  double scale = std::max(1.0, std::abs(val));
  return std::abs(line.normal_component(val)) < tol * scale &&
         std::abs(line.tangential_component(val)) > tol * scale &&
         std::abs(der.imag()) > tol * std::max(1.0, std::abs(der));
}

enum class PairingLabel {
  RegularFold,
  VisibleVisible,
  InvisibleInvisible,
  VisibleInvisible,  // minus side visible, plus side invisible
  InvisibleVisible,  // minus side invisible, plus side visible
  RegularHigherOrder
};

inline const char* to_string(PairingLabel p) {
  switch (p) {
    case PairingLabel::RegularFold: return "regular-fold";
    case PairingLabel::VisibleVisible: return "visible-visible";
    case PairingLabel::InvisibleInvisible: return "invisible-invisible";
    case PairingLabel::VisibleInvisible: return "visible-invisible";
    case PairingLabel::InvisibleVisible: return "invisible-visible";
    case PairingLabel::RegularHigherOrder: return "regular-higher-order";
  }
  return "?";
}

struct TangencyReport {
  Complex point;
  ContactResult plus;
  ContactResult minus;
  PairingLabel pairing = PairingLabel::RegularFold;
};

inline TangencyReport classify_tangency(const PWSystem& sys, Complex q, int k_max = 8) {
  if (classify_point(sys, q) != RegionClass::Tangency)
    throw Error("classify_tangency: point does not classify as tangency");
  TangencyReport rep;
  rep.point = q;
  rep.plus = contact_multiplicity(sys.plus, q, sys.line, k_max, Side::Plus);
  rep.minus = contact_multiplicity(sys.minus, q, sys.line, k_max, Side::Minus);
  const ContactResult& p = rep.plus;
  const ContactResult& m = rep.minus;
  if (p.regular != m.regular) {
    const ContactResult& tangent = p.regular ? m : p;
    rep.pairing = tangent.multiplicity == 2 ? PairingLabel::RegularFold
                                            : PairingLabel::RegularHigherOrder;
  } else if (!p.regular && !m.regular) {
    if (p.visibility == Visibility::Visible && m.visibility == Visibility::Visible)
      rep.pairing = PairingLabel::VisibleVisible;
    else if (p.visibility == Visibility::Invisible && m.visibility == Visibility::Invisible)
      rep.pairing = PairingLabel::InvisibleInvisible;
    else if (p.visibility == Visibility::Visible)
      rep.pairing = PairingLabel::InvisibleVisible;  // named minus-first
    else
      rep.pairing = PairingLabel::VisibleInvisible;
  } else {
    throw Error("classify_tangency: both sides regular at a tangency point");
  }
  return rep;
}

}  // namespace pwhs
