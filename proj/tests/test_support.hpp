#ifndef SKEWLINK_TEST_SUPPORT_HPP
#define SKEWLINK_TEST_SUPPORT_HPP

// Oracles shared by the test binaries. Nothing here calls the library's
// likelihood code.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "skewlink/dataset.hpp"

namespace skewlink::testing {

/// Weibull-link grouped log-likelihood in long double, written from the
/// definition: mu = 1 - exp(-eta^gamma).
inline long double weibull_loglik_ld(long double gamma, const std::vector<long double>& beta,
                                     const GroupedDataset& data) {
  long double total = 0.0L;
  for (const auto& row : data.rows) {
    long double eta = 0.0L;
    for (std::size_t j = 0; j < beta.size(); ++j) eta += static_cast<long double>(row.x[j]) * beta[j];
    if (eta <= 0.0L) return -INFINITY;
    const long double u = std::pow(eta, gamma);
    const long double log_mu = std::log(-std::expm1(-u));
    const long double log_1m = -u;
    total += static_cast<long double>(row.successes) * log_mu +
             static_cast<long double>(row.trials - row.successes) * log_1m;
  }
  return total;
}

/// Packed (gamma, beta...) wrapper around weibull_loglik_ld.
inline long double weibull_loglik_packed(const std::vector<long double>& theta, const GroupedDataset& data) {
  return weibull_loglik_ld(theta[0], std::vector<long double>(theta.begin() + 1, theta.end()), data);
}

/// Central-difference gradient of f at x, step h scaled by max(1, |x_j|).
inline std::vector<long double> fd_gradient(const std::function<long double(const std::vector<long double>&)>& f,
                                            const std::vector<long double>& x, long double h) {
  std::vector<long double> g(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const long double step = h * std::max(1.0L, std::fabs(x[j]));
    auto xp = x, xm = x;
    xp[j] += step;
    xm[j] -= step;
    g[j] = (f(xp) - f(xm)) / (2.0L * step);
  }
  return g;
}

/// Small random grouped dataset with intercept, positive covariates, and a
/// coefficient vector that keeps every eta inside [eta_lo, eta_hi].
struct RandomProblem {
  GroupedDataset data;
  double gamma = 1.0;
  std::vector<double> beta;
};

inline RandomProblem random_weibull_problem(std::mt19937_64& rng, std::size_t rows = 6, std::size_t covs = 2) {
  std::uniform_real_distribution<double> cov(0.0, 1.0);
  std::uniform_real_distribution<double> coef(0.05, 0.6);
  std::uniform_real_distribution<double> shape(0.4, 4.0);
  std::uniform_int_distribution<int> trials(1, 40);
  RandomProblem p;
  p.gamma = shape(rng);
  p.data.covariate_names.push_back("(Intercept)");
  for (std::size_t k = 0; k < covs; ++k) p.data.covariate_names.push_back("x" + std::to_string(k + 1));
  p.beta.push_back(coef(rng) + 0.2);
  for (std::size_t k = 0; k < covs; ++k) p.beta.push_back(coef(rng));
  for (std::size_t i = 0; i < rows; ++i) {
    GroupedRow r;
    r.x.push_back(1.0);
    for (std::size_t k = 0; k < covs; ++k) r.x.push_back(cov(rng));
    r.trials = trials(rng);
    std::uniform_int_distribution<std::int64_t> succ(0, r.trials);
    r.successes = succ(rng);
    p.data.rows.push_back(std::move(r));
  }
  return p;
}

inline double rel_err(double a, double b) { return std::fabs(a - b) / std::max(1.0, std::fabs(b)); }

}  // namespace skewlink::testing

#endif  // SKEWLINK_TEST_SUPPORT_HPP
