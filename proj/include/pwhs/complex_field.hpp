#pragma once

// Exact evaluation of the planar holomorphic fields the library works with:
// the conformal normal forms (1, (a+ib)(z-z0), (z-z0)^n, gamma*(z-z0)^n/(1+(z-z0)^{n-1}),
// 1/(z-z0)^n), truncated Laurent series, and the essential-singularity field
// z^m exp(z^-n).  All variants expose their value, complex derivative, and a
// Taylor expansion at any regular point.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <variant>
#include <vector>

#include "pwhs/errors.hpp"

namespace pwhs {

using Complex = std::complex<double>;

inline constexpr double kSingularityRadius = 1e-12;
inline constexpr double kPi = 3.14159265358979323846;

inline bool is_finite(Complex z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

struct Constant {
  Complex value{1.0, 0.0};
};

struct Linear {
  Complex coeff;   // a + ib
  Complex center;  // z0
};

struct Power {
  int n = 2;       // exponent, n >= 2
  Complex center;  // z0
  int premul = 0;  // m in i^m, m in {0,1}
};

struct Pole {
  int n = 1;       // pole order, n >= 1
  Complex center;  // z0
  int premul = 0;  // m in i^m, m in {0,1}
};

struct Rational {
  double gamma = 1.0;  // gamma != 0
  int n = 2;           // n >= 2
  Complex center;      // z0
};

struct Laurent {
  Complex center;
  std::vector<Complex> principal;  // B_1..B_N, coefficients of (z-z0)^{-k}
  std::vector<Complex> analytic;   // A_0..A_M, coefficients of (z-z0)^{k}
};

struct EssentialExp {
  int m = 2;  // m >= n + 1
  int n = 1;  // n >= 1; field is z^m exp(z^-n), centered at 0
};

using FieldSpec =
    std::variant<Constant, Linear, Power, Pole, Rational, Laurent, EssentialExp>;

inline void validate(const FieldSpec& f) {
  std::visit(
      [](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Constant>) {
          if (!is_finite(v.value)) throw InvalidFieldSpec("Constant: non-finite value");
        } else if constexpr (std::is_same_v<T, Linear>) {
          if (!is_finite(v.coeff) || !is_finite(v.center))
            throw InvalidFieldSpec("Linear: non-finite parameters");
        } else if constexpr (std::is_same_v<T, Power>) {
          if (v.n < 2) throw InvalidFieldSpec("Power: n must be >= 2");
          if (v.premul != 0 && v.premul != 1)
            throw InvalidFieldSpec("Power: premultiplier exponent must be 0 or 1");
        } else if constexpr (std::is_same_v<T, Pole>) {
          if (v.n < 1) throw InvalidFieldSpec("Pole: n must be >= 1");
          if (v.premul != 0 && v.premul != 1)
            throw InvalidFieldSpec("Pole: premultiplier exponent must be 0 or 1");
        } else if constexpr (std::is_same_v<T, Rational>) {
          if (v.gamma == 0.0) throw InvalidFieldSpec("Rational: gamma must be nonzero");
          if (v.n < 2) throw InvalidFieldSpec("Rational: n must be >= 2");
        } else if constexpr (std::is_same_v<T, Laurent>) {
          bool any = false;
          for (Complex c : v.principal) any = any || c != Complex{};
          for (Complex c : v.analytic) any = any || c != Complex{};
          if (!any) throw InvalidFieldSpec("Laurent: needs at least one nonzero coefficient");
        } else if constexpr (std::is_same_v<T, EssentialExp>) {
          if (v.n < 1) throw InvalidFieldSpec("EssentialExp: n must be >= 1");
          if (v.m < v.n + 1) throw InvalidFieldSpec("EssentialExp: m must be >= n + 1");
        }
      },
      f);
}

namespace detail {

inline Complex ipow(Complex w, int p) {
  if (p < 0) return 1.0 / ipow(w, -p);
  Complex r{1.0, 0.0};
  Complex base = w;
  while (p > 0) {
    if (p & 1) r *= base;
    base *= base;
    p >>= 1;
  }
  return r;
}

inline Complex premul_factor(int m) { return m == 0 ? Complex{1.0, 0.0} : Complex{0.0, 1.0}; }

}  // namespace detail

/// Singular points of a field (poles, essential singularities, zeros of the
/// rational normal form's denominator).  Empty for entire variants.
inline std::vector<Complex> singular_points(const FieldSpec& f) {
  return std::visit(
      [](const auto& v) -> std::vector<Complex> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Pole>) {
          return {v.center};
        } else if constexpr (std::is_same_v<T, Rational>) {
          // 1 + w^{n-1} = 0 on the unit circle about the center.
          std::vector<Complex> pts;
          const int k = v.n - 1;
          for (int j = 0; j < k; ++j) {
            double theta = M_PI * (2.0 * j + 1.0) / k;
            pts.push_back(v.center + std::polar(1.0, theta));
          }
          return pts;
        } else if constexpr (std::is_same_v<T, Laurent>) {
          for (Complex c : v.principal)
            if (c != Complex{}) return {v.center};
          return {};
        } else if constexpr (std::is_same_v<T, EssentialExp>) {
          return {Complex{0.0, 0.0}};
        } else {
          return {};
        }
      },
      f);
}

/// Distance from z to the nearest singular point (+inf for entire fields).
inline double exclusion_distance(const FieldSpec& f, Complex z) {
  double d = std::numeric_limits<double>::infinity();
  for (Complex s : singular_points(f)) d = std::min(d, std::abs(z - s));
  return d;
}

inline void check_evaluable(const FieldSpec& f, Complex z) {
  if (!is_finite(z)) throw EvaluationAtSingularity("evaluation at non-finite point");
  if (exclusion_distance(f, z) < kSingularityRadius)
    throw EvaluationAtSingularity("evaluation at a singular point of the field");
}

/// F(z).
inline Complex eval(const FieldSpec& f, Complex z) {
  check_evaluable(f, z);
  return std::visit(
      [z](const auto& v) -> Complex {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return v.value;
        } else if constexpr (std::is_same_v<T, Linear>) {
          return v.coeff * (z - v.center);
        } else if constexpr (std::is_same_v<T, Power>) {
          return detail::premul_factor(v.premul) * detail::ipow(z - v.center, v.n);
        } else if constexpr (std::is_same_v<T, Pole>) {
          return detail::premul_factor(v.premul) / detail::ipow(z - v.center, v.n);
        } else if constexpr (std::is_same_v<T, Rational>) {
          Complex w = z - v.center;
          Complex den = 1.0 + detail::ipow(w, v.n - 1);
          if (std::abs(den) < kSingularityRadius)
            throw EvaluationAtSingularity("rational denominator vanishes");
          return v.gamma * detail::ipow(w, v.n) / den;
        } else if constexpr (std::is_same_v<T, Laurent>) {
          Complex w = z - v.center;
          Complex acc{0.0, 0.0};
          Complex winv = 1.0 / w;
          Complex p = winv;
          for (Complex c : v.principal) {
            acc += c * p;
            p *= winv;
          }
          Complex q{1.0, 0.0};
          for (Complex c : v.analytic) {
            acc += c * q;
            q *= w;
          }
          return acc;
        } else if constexpr (std::is_same_v<T, EssentialExp>) {
          return detail::ipow(z, v.m) * std::exp(detail::ipow(z, -v.n));
        }
      },
      f);
}

namespace detail {

using Series = std::vector<Complex>;  // coefficients 0..K

inline Series series_mul(const Series& a, const Series& b, int K) {
  Series r(K + 1, Complex{});
  for (int i = 0; i <= K && i < static_cast<int>(a.size()); ++i)
    for (int j = 0; i + j <= K && j < static_cast<int>(b.size()); ++j)
      r[i + j] += a[i] * b[j];
  return r;
}

inline Series series_div(const Series& num, const Series& den, int K) {
  Series r(K + 1, Complex{});
  for (int k = 0; k <= K; ++k) {
    Complex s = k < static_cast<int>(num.size()) ? num[k] : Complex{};
    for (int j = 1; j <= k; ++j)
      if (j < static_cast<int>(den.size())) s -= den[j] * r[k - j];
    r[k] = s / den[0];
  }
  return r;
}

inline Series series_exp(const Series& g, int K) {
  Series e(K + 1, Complex{});
  e[0] = std::exp(g[0]);
  for (int k = 1; k <= K; ++k) {
    Complex s{};
    for (int j = 1; j <= k; ++j)
      if (j < static_cast<int>(g.size())) s += static_cast<double>(j) * g[j] * e[k - j];
    e[k] = s / static_cast<double>(k);
  }
  return e;
}

// Taylor coefficients of w^p about w0 (binomial expansion), p >= 0.
inline Series power_series(Complex w0, int p, int K) {
  Series r(K + 1, Complex{});
  double c = 1.0;  // C(p, j)
  for (int j = 0; j <= std::min(p, K); ++j) {
    r[j] = c * ipow(w0, p - j);
    c = c * (p - j) / (j + 1.0);
  }
  return r;
}

// Taylor coefficients of w^{-p} about w0 != 0, p >= 1.
inline Series inv_power_series(Complex w0, int p, int K) {
  Series r(K + 1, Complex{});
  double c = 1.0;  // |C(-p, j)| = C(p+j-1, j)
  double sign = 1.0;
  for (int j = 0; j <= K; ++j) {
    r[j] = sign * c * ipow(w0, -p - j);
    c = c * (p + j) / (j + 1.0);
    sign = -sign;
  }
  return r;
}

}  // namespace detail

/// Taylor coefficients A_0..A_K of F about a regular point q: A_j = F^(j)(q)/j!.
inline std::vector<Complex> taylor(const FieldSpec& f, Complex q, int K) {
  check_evaluable(f, q);
  using detail::Series;
  return std::visit(
      [q, K](const auto& v) -> Series {
        using T = std::decay_t<decltype(v)>;
        Series r(K + 1, Complex{});
        if constexpr (std::is_same_v<T, Constant>) {
          r[0] = v.value;
        } else if constexpr (std::is_same_v<T, Linear>) {
          r[0] = v.coeff * (q - v.center);
          if (K >= 1) r[1] = v.coeff;
        } else if constexpr (std::is_same_v<T, Power>) {
          r = detail::power_series(q - v.center, v.n, K);
          for (auto& c : r) c *= detail::premul_factor(v.premul);
        } else if constexpr (std::is_same_v<T, Pole>) {
          r = detail::inv_power_series(q - v.center, v.n, K);
          for (auto& c : r) c *= detail::premul_factor(v.premul);
        } else if constexpr (std::is_same_v<T, Rational>) {
          Complex w0 = q - v.center;
          Series num = detail::power_series(w0, v.n, K);
          Series den = detail::power_series(w0, v.n - 1, K);
          den[0] += 1.0;
          if (std::abs(den[0]) < kSingularityRadius)
            throw EvaluationAtSingularity("rational denominator vanishes");
          r = detail::series_div(num, den, K);
          for (auto& c : r) c *= v.gamma;
        } else if constexpr (std::is_same_v<T, Laurent>) {
          Complex w0 = q - v.center;
          for (int k = 0; k < static_cast<int>(v.principal.size()); ++k) {
            if (v.principal[k] == Complex{}) continue;
            Series s = detail::inv_power_series(w0, k + 1, K);
            for (int j = 0; j <= K; ++j) r[j] += v.principal[k] * s[j];
          }
          for (int k = 0; k < static_cast<int>(v.analytic.size()); ++k) {
            if (v.analytic[k] == Complex{}) continue;
            Series s = detail::power_series(w0, k, K);
            for (int j = 0; j <= K; ++j) r[j] += v.analytic[k] * s[j];
          }
        } else if constexpr (std::is_same_v<T, EssentialExp>) {
          Series g = detail::inv_power_series(q, v.n, K);
          Series e = detail::series_exp(g, K);
          Series zm = detail::power_series(q, v.m, K);
          r = detail::series_mul(zm, e, K);
        }
        return r;
      },
      f);
}

/// F'(z) via the closed-form derivative of each variant.
inline Complex eval_derivative(const FieldSpec& f, Complex z) {
  return taylor(f, z, 1)[1];
}

/// Taylor coefficients c_1..c_K of the orbit of zdot = F(z) through q:
/// phi(t) = q + sum_j c_j t^j.  Index 0 of the result is zero.
inline std::vector<Complex> orbit_series(const FieldSpec& f, Complex q, int K) {
  using detail::Series;
  Series A = taylor(f, q, K);
  Series psi(1, Complex{});  // phi - q, known up to current degree
  Series c(K + 1, Complex{});
  for (int j = 0; j < K; ++j) {
    // [t^j] of F(q + psi(t)) with psi known through degree j.
    Series comp(j + 1, Complex{});
    comp[0] = A[0];
    Series p(1, Complex{1.0, 0.0});
    for (int deg = 1; deg <= j; ++deg) {
      p = detail::series_mul(p, psi, j);
      for (int i = 0; i <= j; ++i) comp[i] += A[deg] * p[i];
    }
    c[j + 1] = comp[j] / static_cast<double>(j + 1);
    psi = c;
    psi.resize(j + 2);
  }
  return c;
}

/// Planar (u, v) view of a FieldSpec, with its domain-exclusion set.
struct PlanarField {
  FieldSpec spec;

  double u(Complex z) const { return eval(spec, z).real(); }
  double v(Complex z) const { return eval(spec, z).imag(); }
  Complex operator()(Complex z) const { return eval(spec, z); }
  std::vector<Complex> exclusions() const { return singular_points(spec); }
};

inline PlanarField to_planar(const FieldSpec& f) {
  validate(f);
  return PlanarField{f};
}

/// Cauchy-Riemann residual max(|u_x - v_y|, |u_y + v_x|) of any planar field
/// z -> u + iv, partials by central differences of step h.
template <class F>
double cr_residual_of(F&& field, Complex z, double h) {
  Complex stencil[4] = {z + Complex{h, 0}, z - Complex{h, 0}, z + Complex{0, h},
                        z - Complex{0, h}};
  Complex fxp = field(stencil[0]);
  Complex fxm = field(stencil[1]);
  Complex fyp = field(stencil[2]);
  Complex fym = field(stencil[3]);
  double ux = (fxp.real() - fxm.real()) / (2 * h);
  double vx = (fxp.imag() - fxm.imag()) / (2 * h);
  double uy = (fyp.real() - fym.real()) / (2 * h);
  double vy = (fyp.imag() - fym.imag()) / (2 * h);
  return std::max(std::abs(ux - vy), std::abs(uy + vx));
}

inline double cr_residual(const PlanarField& pf, Complex z, double h) {
  if (h <= 0) throw Error("cr_residual: step must be positive");
  Complex stencil[4] = {z + Complex{h, 0}, z - Complex{h, 0}, z + Complex{0, h},
                        z - Complex{0, h}};
  for (Complex p : stencil)
    if (exclusion_distance(pf.spec, p) < kSingularityRadius)
      throw StencilHitsSingularity("finite-difference stencil touches a singularity");
  return cr_residual_of(pf, z, h);
}

}  // namespace pwhs
