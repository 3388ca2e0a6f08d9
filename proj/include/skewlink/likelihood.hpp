#ifndef SKEWLINK_LIKELIHOOD_HPP
#define SKEWLINK_LIKELIHOOD_HPP

#include <cassert>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "skewlink/dataset.hpp"
#include "skewlink/linalg.hpp"
#include "skewlink/links.hpp"

namespace skewlink {

/// Grouped-binomial log-likelihood sum_i [s_i log mu_i + (t_i - s_i) log(1 - mu_i)],
/// without the binomial coefficients. Returns -inf when an observed outcome
/// has zero probability. Weibull kinds take the shape from params.gamma; other
/// kinds ignore it.
inline double log_likelihood(const ParamVector& params, const GroupedDataset& data, const LinkFamily& link) {
  const LinkFamily lk = link.has_shape() ? link.with_gamma(params.gamma) : link;
  constexpr double ninf = -std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (const auto& row : data.rows) {
    const double eta = linear_predictor(row.x, params.beta);
    const auto lp = log_probs(lk, eta);
    const double s = static_cast<double>(row.successes);
    const double f = static_cast<double>(row.trials - row.successes);
    if (s > 0) {
      if (lp.log_mu == ninf) return ninf;
      total += s * lp.log_mu;
    }
    if (f > 0) {
      if (lp.log_one_minus_mu == ninf) return ninf;
      total += f * lp.log_one_minus_mu;
    }
  }
  return std::isnan(total) ? ninf : total;
}

/// Log-likelihood for links without a free shape.
inline double log_likelihood(std::span<const double> beta, const GroupedDataset& data, const LinkFamily& link) {
  return log_likelihood(ParamVector{link.gamma(), {beta.begin(), beta.end()}}, data, link);
}

/// Fitted mean per row.
inline std::vector<double> fitted_probabilities(const LinkFamily& link, std::span<const double> beta,
                                                const GroupedDataset& data) {
  std::vector<double> mu;
  mu.reserve(data.size());
  for (const auto& row : data.rows) mu.push_back(inverse_link(link, linear_predictor(row.x, beta)));
  return mu;
}

namespace detail {

inline constexpr double kMinEta = 1e-300;

/// Per-row quantities shared by the Weibull gradient and Hessian.
struct WeibullRowTerms {
  double eta;
  double log_eta;  // L = log(eta)
  double u;        // eta^gamma
  double xi1;      // exp(-eta^gamma)
  double xi2;      // exp(-2 eta^gamma)
  double one_minus_xi1;
};

inline WeibullRowTerms weibull_row_terms(double eta, double gamma, std::size_t row) {
  if (!(eta >= kMinEta))
    throw std::domain_error("Weibull derivatives need eta > 0 in every row; row " + std::to_string(row + 1) +
                            " has eta = " + std::to_string(eta));
  WeibullRowTerms t{};
  t.eta = eta;
  t.log_eta = std::log(eta);
  t.u = weibull_power(eta, gamma);
  t.xi1 = std::exp(-t.u);
  t.xi2 = std::exp(-2.0 * t.u);
  t.one_minus_xi1 = -std::expm1(-t.u);
  assert(std::fabs(t.xi2 - t.xi1 * t.xi1) <= 1e-12 * t.xi2 + std::numeric_limits<double>::min());
  return t;
}

}  // namespace detail

/// Analytic gradient of the Weibull-link log-likelihood in the order
/// (gamma, beta_0, ..., beta_r). Grouped counts weight the success terms by s
/// and the failure terms by t - s. Throws std::domain_error when some row has
/// eta <= 0.
inline std::vector<double> gradient(const ParamVector& params, const GroupedDataset& data) {
  const double g = params.gamma;
  const std::size_t p = params.beta.size();
  std::vector<double> grad(p + 1, 0.0);
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    const auto& row = data.rows[i];
    const auto t = detail::weibull_row_terms(linear_predictor(row.x, params.beta), g, i);
    const double s = static_cast<double>(row.successes);
    const double f = static_cast<double>(row.trials - row.successes);
    const double eta_gm1 = t.u / t.eta;  // eta^(gamma-1)

    double d_gamma = 0.0;
    double d_eta = 0.0;
    if (f > 0) {
      d_gamma += -f * t.u * t.log_eta;
      d_eta += -g * f * eta_gm1;
    }
    if (s > 0 && t.xi1 > 0.0) {
      d_gamma += s * t.xi1 * t.u * t.log_eta / t.one_minus_xi1;
      d_eta += g * s * t.xi1 * eta_gm1 / t.one_minus_xi1;
    }
    grad[0] += d_gamma;
    for (std::size_t j = 0; j < p; ++j) grad[j + 1] += d_eta * row.x[j];
  }
  return grad;
}

/// Analytic Hessian of the Weibull-link log-likelihood, same ordering as
/// gradient(). Symmetric by construction.
inline Matrix hessian(const ParamVector& params, const GroupedDataset& data) {
  const double g = params.gamma;
  const std::size_t p = params.beta.size();
  const std::size_t n = p + 1;
  Matrix h(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    const auto& row = data.rows[i];
    const auto t = detail::weibull_row_terms(linear_predictor(row.x, params.beta), g, i);
    const double s = static_cast<double>(row.successes);
    const double f = static_cast<double>(row.trials - row.successes);
    const double L = t.log_eta;
    const double L2 = L * L;
    const double u = t.u;
    const double om = t.one_minus_xi1;
    const double eta_gm1 = u / t.eta;              // eta^(gamma-1)
    const double eta_gm2 = u / (t.eta * t.eta);    // eta^(gamma-2)
    const double eta_2gm1 = u * u / t.eta;         // eta^(2gamma-1)
    const double eta_2gm2 = u * u / (t.eta * t.eta);  // eta^(2gamma-2)

    double h_gg = 0.0;  // d2/dgamma2
    double h_ge = 0.0;  // d2/dgamma deta, times x_j
    double h_ee = 0.0;  // d2/deta2, times x_j x_k
    if (f > 0) {
      h_gg += -f * L2 * u;
      h_ge += -f * eta_gm1 * (1.0 + g * L);
      h_ee += -(g - 1.0) * g * f * eta_gm2;
    }
    if (s > 0 && t.xi1 > 0.0) {
      h_gg += t.xi1 * s * L2 * (u - u * u) / om - t.xi2 * s * L2 * u * u / (om * om);
      h_ge += t.xi1 * s * eta_gm1 * (1.0 + g * L * (1.0 - u)) / om -
              t.xi2 * g * s * L * eta_2gm1 / (om * om);
      h_ee += ((g - 1.0) - g * u) * t.xi1 * g * s * eta_gm2 / om - t.xi2 * g * g * s * eta_2gm2 / (om * om);
    }
    h[0][0] += h_gg;
    for (std::size_t j = 0; j < p; ++j) {
      h[0][j + 1] += h_ge * row.x[j];
      for (std::size_t k = j; k < p; ++k) h[j + 1][k + 1] += h_ee * row.x[j] * row.x[k];
    }
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) h[b][a] = h[a][b];
  return h;
}

/// Gradient for either Weibull kind. The reflected link satisfies
/// mu_reflected = 1 - mu_weibull, so its likelihood is the Weibull likelihood
/// of the complemented counts.
inline std::vector<double> gradient(const ParamVector& params, const GroupedDataset& data, const LinkFamily& link) {
  if (link.kind() == LinkKind::weibull) return gradient(params, data);
  if (link.kind() == LinkKind::reflected_weibull) return gradient(params, data.complement());
  throw std::invalid_argument("gradient(params, data, link) is defined for Weibull kinds only");
}

inline Matrix hessian(const ParamVector& params, const GroupedDataset& data, const LinkFamily& link) {
  if (link.kind() == LinkKind::weibull) return hessian(params, data);
  if (link.kind() == LinkKind::reflected_weibull) return hessian(params, data.complement());
  throw std::invalid_argument("hessian(params, data, link) is defined for Weibull kinds only");
}

namespace detail {

/// d^2 mu / d eta^2 for the fixed-shape links.
inline double link_density_slope(const LinkFamily& link, double eta) {
  switch (link.kind()) {
    case LinkKind::logit: {
      const double mu = inverse_link(link, eta);
      return mu * (1.0 - mu) * (1.0 - 2.0 * mu);
    }
    case LinkKind::probit:
      return -eta * normal_pdf(eta);
    case LinkKind::cloglog:
      return link_density(link, eta) * (1.0 - std::exp(eta));
    case LinkKind::loglog:
      return link_density(link, eta) * (std::exp(-eta) - 1.0);
    default:
      throw std::invalid_argument("link_density_slope: fixed-shape links only");
  }
}

}  // namespace detail

/// Score in beta for the fixed-shape links (textbook binomial GLM form).
inline std::vector<double> glm_gradient(std::span<const double> beta, const GroupedDataset& data,
                                        const LinkFamily& link) {
  if (link.has_shape()) throw std::invalid_argument("glm_gradient: use gradient() for Weibull kinds");
  std::vector<double> grad(beta.size(), 0.0);
  for (const auto& row : data.rows) {
    const double eta = linear_predictor(row.x, beta);
    const double mu = inverse_link(link, eta);
    const double dens = link_density(link, eta);
    const double s = static_cast<double>(row.successes);
    const double f = static_cast<double>(row.trials - row.successes);
    const double d = s * dens / mu - f * dens / (1.0 - mu);
    for (std::size_t j = 0; j < beta.size(); ++j) grad[j] += d * row.x[j];
  }
  return grad;
}

/// Observed-information Hessian in beta for the fixed-shape links.
inline Matrix glm_hessian(std::span<const double> beta, const GroupedDataset& data, const LinkFamily& link) {
  if (link.has_shape()) throw std::invalid_argument("glm_hessian: use hessian() for Weibull kinds");
  const std::size_t p = beta.size();
  Matrix h(p, std::vector<double>(p, 0.0));
  for (const auto& row : data.rows) {
    const double eta = linear_predictor(row.x, beta);
    const double mu = inverse_link(link, eta);
    const double dens = link_density(link, eta);
    const double slope = detail::link_density_slope(link, eta);
    const double s = static_cast<double>(row.successes);
    const double f = static_cast<double>(row.trials - row.successes);
    const double w = s * (slope / mu - dens * dens / (mu * mu)) -
                     f * (slope / (1.0 - mu) + dens * dens / ((1.0 - mu) * (1.0 - mu)));
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t k = j; k < p; ++k) h[j][k] += w * row.x[j] * row.x[k];
  }
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = a + 1; b < p; ++b) h[b][a] = h[a][b];
  return h;
}

}  // namespace skewlink

#endif  // SKEWLINK_LIKELIHOOD_HPP
