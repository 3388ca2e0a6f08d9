#ifndef SKEWLINK_LINKS_HPP
#define SKEWLINK_LINKS_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

#include "skewlink/special.hpp"

namespace skewlink {

enum class LinkKind { weibull, reflected_weibull, logit, probit, cloglog, loglog };

/// Weibull-family approximations to the probit and logit links, of the form
/// 1 - exp(-(intercept + slope * eta)^shape).
namespace constants {
inline constexpr double probit_approx_intercept = 0.90114;
inline constexpr double probit_approx_slope = 0.27787;
inline constexpr double probit_approx_shape = 3.60235;
inline constexpr double logit_approx_intercept = 0.89864;
inline constexpr double logit_approx_slope = 0.16957;
inline constexpr double logit_approx_shape = 3.50215;

/// Infimum of the Weibull moment skewness (the Gumbel-minimum limit, rounded).
inline constexpr double moment_skewness_floor = -1.1395;
/// Infimum of the Arnold-Groeneveld skewness, 2/e - 1 (rounded).
inline constexpr double ag_skewness_floor = -0.26424;
}  // namespace constants

/// A link family. Weibull kinds carry a positive shape gamma; the other
/// kinds ignore it.
class LinkFamily {
 public:
  explicit LinkFamily(LinkKind kind, double gamma = 1.0) : kind_(kind), gamma_(gamma) {
    if (has_shape() && !(gamma > 0.0 && std::isfinite(gamma)))
      throw std::invalid_argument("Weibull link shape gamma must be finite and > 0, got " +
                                  std::to_string(gamma));
    if (!has_shape()) gamma_ = 1.0;
  }

  static LinkFamily weibull(double gamma) { return LinkFamily(LinkKind::weibull, gamma); }
  static LinkFamily reflected_weibull(double gamma) {
    return LinkFamily(LinkKind::reflected_weibull, gamma);
  }
  static LinkFamily logit() { return LinkFamily(LinkKind::logit); }
  static LinkFamily probit() { return LinkFamily(LinkKind::probit); }
  static LinkFamily cloglog() { return LinkFamily(LinkKind::cloglog); }
  static LinkFamily loglog() { return LinkFamily(LinkKind::loglog); }

  /// Accepts "weibull", "reflected_weibull" (or "rweibull"), "logit", "probit",
  /// "cloglog", "loglog".
  static LinkFamily from_name(std::string_view name,
                              double gamma = constants::probit_approx_shape) {
    if (name == "weibull") return weibull(gamma);
    if (name == "reflected_weibull" || name == "rweibull") return reflected_weibull(gamma);
    if (name == "logit") return logit();
    if (name == "probit") return probit();
    if (name == "cloglog") return cloglog();
    if (name == "loglog") return loglog();
    throw std::invalid_argument("unknown link family '" + std::string(name) + "'");
  }

  LinkKind kind() const { return kind_; }
  double gamma() const { return gamma_; }
  bool has_shape() const { return kind_ == LinkKind::weibull || kind_ == LinkKind::reflected_weibull; }
  /// Whether the link's mean is nonincreasing in eta.
  bool decreasing() const { return kind_ == LinkKind::reflected_weibull; }

  LinkFamily with_gamma(double gamma) const { return LinkFamily(kind_, gamma); }

  std::string_view name() const {
    switch (kind_) {
      case LinkKind::weibull: return "weibull";
      case LinkKind::reflected_weibull: return "reflected_weibull";
      case LinkKind::logit: return "logit";
      case LinkKind::probit: return "probit";
      case LinkKind::cloglog: return "cloglog";
      case LinkKind::loglog: return "loglog";
    }
    return "unknown";
  }

  friend bool operator==(const LinkFamily&, const LinkFamily&) = default;

 private:
  LinkKind kind_;
  double gamma_;
};

namespace detail {

inline constexpr double kExpGuard = 700.0;

/// eta^gamma for eta > 0 via exp(gamma log eta), saturating past the guard.
inline double weibull_power(double eta, double gamma) {
  const double z = gamma * std::log(eta);
  if (z > kExpGuard) return std::numeric_limits<double>::infinity();
  return std::exp(z);
}

/// log(1 - exp(-eta^gamma)) for eta > 0.
inline double log_weibull_cdf(double eta, double gamma) {
  const double z = gamma * std::log(eta);
  // 1 - exp(-u) ~ u for tiny u.
  if (z < -kExpGuard) return z;
  if (z > kExpGuard) return 0.0;
  return log1mexp(std::exp(z));
}

}  // namespace detail

/// Mean response mu = g^{-1}(eta). Weibull kinds use the threshold form:
/// exactly 0 (weibull) or 1 (reflected) for eta <= 0.
inline double inverse_link(const LinkFamily& link, double eta) {
  switch (link.kind()) {
    case LinkKind::weibull:
      if (eta <= 0.0) return 0.0;
      return -std::expm1(-detail::weibull_power(eta, link.gamma()));
    case LinkKind::reflected_weibull:
      if (eta <= 0.0) return 1.0;
      return std::exp(-detail::weibull_power(eta, link.gamma()));
    case LinkKind::logit:
      return eta >= 0 ? 1.0 / (1.0 + std::exp(-eta)) : std::exp(eta) / (1.0 + std::exp(eta));
    case LinkKind::probit:
      return normal_cdf(eta);
    case LinkKind::cloglog:
      return -std::expm1(-std::exp(eta));
    case LinkKind::loglog:
      return std::exp(-std::exp(-eta));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

/// (log mu, log(1 - mu)) at eta, each accurate where the other saturates.
struct LogProbs {
  double log_mu;
  double log_one_minus_mu;
};

inline LogProbs log_probs(const LinkFamily& link, double eta) {
  constexpr double ninf = -std::numeric_limits<double>::infinity();
  switch (link.kind()) {
    case LinkKind::weibull:
      if (eta <= 0.0) return {ninf, 0.0};
      return {detail::log_weibull_cdf(eta, link.gamma()), -detail::weibull_power(eta, link.gamma())};
    case LinkKind::reflected_weibull:
      if (eta <= 0.0) return {0.0, ninf};
      return {-detail::weibull_power(eta, link.gamma()), detail::log_weibull_cdf(eta, link.gamma())};
    case LinkKind::logit:
      return {-log1pexp(-eta), -log1pexp(eta)};
    case LinkKind::probit:
      return {log_normal_cdf(eta), log_normal_cdf(-eta)};
    case LinkKind::cloglog: {
      const double u = std::exp(eta);
      return {log1mexp(u), -u};
    }
    case LinkKind::loglog: {
      const double u = std::exp(-eta);
      return {-u, log1mexp(u)};
    }
  }
  return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
}

/// Linear predictor eta = g(mu) for mu in (0, 1).
inline double forward_link(const LinkFamily& link, double mu) {
  if (!(mu > 0.0 && mu < 1.0))
    throw std::domain_error("forward_link: mu must lie in the open interval (0, 1)");
  switch (link.kind()) {
    case LinkKind::weibull:
      return std::pow(-std::log1p(-mu), 1.0 / link.gamma());
    case LinkKind::reflected_weibull:
      return std::pow(-std::log(mu), 1.0 / link.gamma());
    case LinkKind::logit:
      return std::log(mu) - std::log1p(-mu);
    case LinkKind::probit:
      return normal_quantile(mu);
    case LinkKind::cloglog:
      return std::log(-std::log1p(-mu));
    case LinkKind::loglog:
      return -std::log(-std::log(mu));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

/// |d mu / d eta|. For the reflected Weibull link this is the magnitude of a
/// negative derivative. Zero at and left of the Weibull threshold.
inline double link_density(const LinkFamily& link, double eta) {
  switch (link.kind()) {
    case LinkKind::weibull:
    case LinkKind::reflected_weibull: {
      if (eta <= 0.0) return 0.0;
      const double g = link.gamma();
      const double u = detail::weibull_power(eta, g);
      if (!std::isfinite(u)) return 0.0;
      // gamma eta^(gamma-1) exp(-eta^gamma) = gamma u / eta exp(-u)
      return g * u / eta * std::exp(-u);
    }
    case LinkKind::logit: {
      const double e = std::exp(-std::fabs(eta));
      return e / ((1.0 + e) * (1.0 + e));
    }
    case LinkKind::probit:
      return normal_pdf(eta);
    case LinkKind::cloglog:
      return std::exp(eta - std::exp(eta));
    case LinkKind::loglog:
      return std::exp(-eta - std::exp(-eta));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

/// Weibull moment skewness (G3 - 3 G2 G1 + 2 G1^3) / (G2 - G1^2)^{3/2} with
/// G_j = Gamma(1 + j/gamma). Evaluated through ratios G_j / G1^j so that the
/// large-gamma cancellation stays relative.
inline double moment_skewness(double gamma) {
  if (!(gamma > 0.0)) throw std::domain_error("moment_skewness: gamma must be > 0");
  const double l1 = std::lgamma(1.0 + 1.0 / gamma);
  const double a2 = std::lgamma(1.0 + 2.0 / gamma) - 2.0 * l1;
  const double a3 = std::lgamma(1.0 + 3.0 / gamma) - 3.0 * l1;
  const double var = std::expm1(a2);
  const double third = std::expm1(a3) - 3.0 * std::expm1(a2);
  return third / std::pow(var, 1.5);
}

/// Arnold-Groeneveld (mode-based) skewness 2 exp((1 - gamma)/gamma) - 1.
inline double ag_skewness(double gamma) {
  if (!(gamma > 0.0)) throw std::domain_error("ag_skewness: gamma must be > 0");
  return 2.0 * std::exp((1.0 - gamma) / gamma) - 1.0;
}

struct SkewnessReport {
  double gamma;
  double moment_skewness;
  double ag_skewness;
};

inline SkewnessReport skewness_report(double gamma) {
  return {gamma, moment_skewness(gamma), ag_skewness(gamma)};
}

/// Clamped Weibull approximant 1 - exp(-(intercept + slope*eta)^shape); zero
/// where the base is nonpositive.
inline double weibull_approximant(double intercept, double slope, double shape, double eta) {
  const double base = intercept + slope * eta;
  if (base <= 0.0) return 0.0;
  return -std::expm1(-std::pow(base, shape));
}

inline double probit_approximant(double eta) {
  using namespace constants;
  return weibull_approximant(probit_approx_intercept, probit_approx_slope, probit_approx_shape, eta);
}

inline double logit_approximant(double eta) {
  using namespace constants;
  return weibull_approximant(logit_approx_intercept, logit_approx_slope, logit_approx_shape, eta);
}

/// |(1 - exp{-(1 + eta/gamma)^gamma}) - (1 - exp{-e^eta})|: the distance of the
/// rescaled Weibull link from the complementary log-log link.
inline double cloglog_limit_gap(double eta, double gamma) {
  if (!(gamma > 0.0)) throw std::domain_error("cloglog_limit_gap: gamma must be > 0");
  const double base = 1.0 + eta / gamma;
  if (!(base > 0.0)) throw std::domain_error("cloglog_limit_gap: requires 1 + eta/gamma > 0");
  const double weib = -std::expm1(-std::exp(gamma * std::log1p(eta / gamma)));
  const double cll = -std::expm1(-std::exp(eta));
  return std::fabs(weib - cll);
}

}  // namespace skewlink

#endif  // SKEWLINK_LINKS_HPP
