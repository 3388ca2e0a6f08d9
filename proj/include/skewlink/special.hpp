#ifndef SKEWLINK_SPECIAL_HPP
#define SKEWLINK_SPECIAL_HPP

// Special functions used by the link families: erf/erfc/erfcx (Cody's
// rational Chebyshev approximations), the standard normal cdf and its
// inverse, log1mexp, and digamma.

#include <cmath>
#include <limits>
#include <stdexcept>

namespace skewlink {

namespace detail {

enum class ErfKind { erf, erfc, erfcx };

// W. J. Cody, "Rational Chebyshev approximations for the error function",
// Math. Comp. 23 (1969). Coefficients from the netlib specfun CALERF packet.
inline double cody_erf(double x, ErfKind kind) {
  static constexpr double a[5] = {3.16112374387056560e00, 1.13864154151050156e02,
                                  3.77485237685302021e02, 3.20937758913846947e03,
                                  1.85777706184603153e-1};
  static constexpr double b[4] = {2.36012909523441209e01, 2.44024637934444173e02,
                                  1.28261652607737228e03, 2.84423683343917062e03};
  static constexpr double c[9] = {5.64188496988670089e-1, 8.88314979438837594e00,
                                  6.61191906371416295e01, 2.98635138197400131e02,
                                  8.81952221241769090e02, 1.71204761263407058e03,
                                  2.05107837782607147e03, 1.23033935479799725e03,
                                  2.15311535474403846e-8};
  static constexpr double d[8] = {1.57449261107098347e01, 1.17693950891312499e02,
                                  5.37181101862009858e02, 1.62138957456669019e03,
                                  3.29079923573345963e03, 4.36261909014324716e03,
                                  3.43936767414372164e03, 1.23033935480374942e03};
  static constexpr double p[6] = {3.05326634961232344e-1, 3.60344899949804439e-1,
                                  1.25781726111229246e-1, 1.60837851487422766e-2,
                                  6.58749161529837803e-4, 1.63153871373020978e-2};
  static constexpr double q[5] = {2.56852019228982242e00, 1.87295284992346047e00,
                                  5.27905102951428412e-1, 6.05183413124413191e-2,
                                  2.33520497626869185e-3};
  constexpr double sqrpi = 5.6418958354775628695e-1;  // 1/sqrt(pi)
  constexpr double thresh = 0.46875;
  constexpr double xsmall = 1.11e-16;
  constexpr double xbig = 26.543;
  constexpr double xhuge = 6.71e7;
  constexpr double xmax = 2.53e307;
  constexpr double xneg = -26.628;

  if (std::isnan(x)) return x;
  const double y = std::fabs(x);
  double result = 0.0;

  if (y <= thresh) {
    const double ysq = y > xsmall ? y * y : 0.0;
    double xnum = a[4] * ysq;
    double xden = ysq;
    for (int i = 0; i < 3; ++i) {
      xnum = (xnum + a[i]) * ysq;
      xden = (xden + b[i]) * ysq;
    }
    result = x * (xnum + a[3]) / (xden + b[3]);
    if (kind != ErfKind::erf) result = 1.0 - result;
    if (kind == ErfKind::erfcx) result *= std::exp(ysq);
    return result;
  }

  if (y <= 4.0) {
    double xnum = c[8] * y;
    double xden = y;
    for (int i = 0; i < 7; ++i) {
      xnum = (xnum + c[i]) * y;
      xden = (xden + d[i]) * y;
    }
    result = (xnum + c[7]) / (xden + d[7]);
    if (kind != ErfKind::erfcx) {
      const double ysq = std::trunc(y * 16.0) / 16.0;
      const double del = (y - ysq) * (y + ysq);
      result *= std::exp(-ysq * ysq) * std::exp(-del);
    }
  } else {
    bool done = false;
    if (y >= xbig) {
      if (kind != ErfKind::erfcx || y >= xmax) {
        done = true;
      } else if (y >= xhuge) {
        result = sqrpi / y;
        done = true;
      }
    }
    if (!done) {
      const double ysq = 1.0 / (y * y);
      double xnum = p[5] * ysq;
      double xden = ysq;
      for (int i = 0; i < 4; ++i) {
        xnum = (xnum + p[i]) * ysq;
        xden = (xden + q[i]) * ysq;
      }
      result = ysq * (xnum + p[4]) / (xden + q[4]);
      result = (sqrpi - result) / y;
      if (kind != ErfKind::erfcx) {
        const double ysq2 = std::trunc(y * 16.0) / 16.0;
        const double del = (y - ysq2) * (y + ysq2);
        result *= std::exp(-ysq2 * ysq2) * std::exp(-del);
      }
    }
  }

  // Fix up negative arguments.
  switch (kind) {
    case ErfKind::erf:
      result = (0.5 - result) + 0.5;
      if (x < 0) result = -result;
      break;
    case ErfKind::erfc:
      if (x < 0) result = 2.0 - result;
      break;
    case ErfKind::erfcx:
      if (x < 0) {
        if (x < xneg) {
          result = std::numeric_limits<double>::infinity();
        } else {
          const double ysq = std::trunc(x * 16.0) / 16.0;
          const double del = (x - ysq) * (x + ysq);
          const double e = std::exp(ysq * ysq) * std::exp(del);
          result = (e + e) - result;
        }
      }
      break;
  }
  return result;
}

}  // namespace detail

inline double erf(double x) { return detail::cody_erf(x, detail::ErfKind::erf); }
inline double erfc(double x) { return detail::cody_erf(x, detail::ErfKind::erfc); }
/// Scaled complementary error function exp(x^2) erfc(x).
inline double erfcx(double x) { return detail::cody_erf(x, detail::ErfKind::erfcx); }

inline constexpr double kSqrt1_2 = 0.70710678118654752440;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

/// Standard normal cdf.
inline double normal_cdf(double x) { return 0.5 * erfc(-x * kSqrt1_2); }

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x - kLogSqrt2Pi); }

/// log Phi(x), finite far into the lower tail.
inline double log_normal_cdf(double x) {
  if (x > -5.0) return std::log1p(-0.5 * erfc(x * kSqrt1_2));
  // Phi(x) = 0.5 erfcx(-x/sqrt2) exp(-x^2/2)
  return std::log(0.5 * erfcx(-x * kSqrt1_2)) - 0.5 * x * x;
}

/// Inverse of normal_cdf on (0, 1). A rational starting value refined by
/// Halley steps against normal_cdf; accurate to a few ulp of p.
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw std::domain_error("normal_quantile: probability must lie in [0, 1]");
  }
  // 1 - p is exact for p in [0.5, 1].
  if (p > 0.5) return -normal_quantile(1.0 - p);
  // Abramowitz & Stegun 26.2.23 starting value.
  const double t = std::sqrt(-2.0 * std::log(p));
  double x = -(t - (2.515517 + 0.802853 * t + 0.010328 * t * t) /
                       (1.0 + 1.432788 * t + 0.189269 * t * t + 0.001308 * t * t * t));
  for (int i = 0; i < 4; ++i) {
    const double u = (normal_cdf(x) - p) / normal_pdf(x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

/// log(1 - exp(-t)) for t >= 0; -inf at t == 0.
inline double log1mexp(double t) {
  if (t <= 0.0) return -std::numeric_limits<double>::infinity();
  if (t <= 0.6931471805599453) return std::log(-std::expm1(-t));
  return std::log1p(-std::exp(-t));
}

/// log(1 + exp(x)) without overflow.
inline double log1pexp(double x) {
  if (x > 0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

/// Digamma function for x > 0: recurrence to x >= 12, then the asymptotic series.
inline double digamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("digamma: argument must be positive");
  double result = 0.0;
  while (x < 12.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  result += std::log(x) - 0.5 * inv -
            inv2 * (1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 * (1.0 / 240 - inv2 / 132))));
  return result;
}

}  // namespace skewlink

#endif  // SKEWLINK_SPECIAL_HPP
