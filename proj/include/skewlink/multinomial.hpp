#ifndef SKEWLINK_MULTINOMIAL_HPP
#define SKEWLINK_MULTINOMIAL_HPP

// Continuation-ratio fits: p_1 = theta_1, p_k = theta_k prod_{l<k} (1 - theta_l),
// so a K-category likelihood factors into K-1 independent binomial ones.

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "skewlink/bayes.hpp"
#include "skewlink/dataset.hpp"
#include "skewlink/likelihood.hpp"
#include "skewlink/links.hpp"
#include "skewlink/mle.hpp"
#include "skewlink/model_selection.hpp"
#include "skewlink/multinomial_data.hpp"
#include "skewlink/parallel.hpp"

namespace skewlink {

/// Binary dataset k (0-based) has successes = count_k and trials =
/// sum_{l>=k} count_l per row; rows with zero trials are dropped.
inline std::vector<GroupedDataset> decompose(const MultinomialDataset& data) {
  data.validate();
  const std::size_t K = data.n_categories();
  std::vector<GroupedDataset> out(K - 1);
  for (std::size_t k = 0; k + 1 < K; ++k) {
    out[k].covariate_names = data.covariate_names;
    for (const auto& row : data.rows) {
      std::int64_t at_risk = 0;
      for (std::size_t l = k; l < K; ++l) at_risk += row.counts[l];
      if (at_risk == 0) continue;
      out[k].rows.push_back({row.x, row.counts[k], at_risk});
    }
  }
  return out;
}

/// theta -> p. theta has K-1 entries; the result has K and sums to 1.
inline std::vector<double> theta_to_p(std::span<const double> theta) {
  std::vector<double> p;
  p.reserve(theta.size() + 1);
  double remaining = 1.0;
  for (double t : theta) {
    p.push_back(t * remaining);
    remaining *= 1.0 - t;
  }
  p.push_back(remaining);
  return p;
}

/// p -> theta with theta_k = p_k / (1 - sum_{l<k} p_l). Needs nonzero tails.
inline std::vector<double> p_to_theta(std::span<const double> p) {
  if (p.size() < 2) throw std::invalid_argument("p_to_theta: need at least two categories");
  std::vector<double> theta;
  double tail = 0.0;
  for (double v : p) tail += v;
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {
    if (!(tail > 0.0)) throw std::domain_error("p_to_theta: zero remaining mass at category " + std::to_string(k + 1));
    theta.push_back(p[k] / tail);
    tail -= p[k];
  }
  return theta;
}

enum class FitMethod { mle, bayes };

struct MultinomialOptions {
  FitOptions mle;
  PriorSpec prior;
  McmcOptions mcmc;
};

struct MultinomialFit {
  LinkFamily link = LinkFamily::logit();
  FitMethod method = FitMethod::mle;
  /// One per conditional probability theta_1 .. theta_{K-1}. Under the Bayes
  /// method these hold posterior means.
  std::vector<FitResult> sub_fits;
  /// Bayes method only; chain k uses seed mcmc.seed + k.
  std::vector<PosteriorChain> chains;
  std::vector<std::string> category_labels;
  bool converged = false;
  /// Per-component failure descriptions, empty when all converged.
  std::vector<std::string> failures;

  int n_params() const {
    int n = 0;
    for (const auto& f : sub_fits) n += f.n_params;
    return n;
  }
};

/// Fits each decomposed dataset independently (in parallel) with the same
/// link family. Any failed component marks the whole fit non-converged.
inline MultinomialFit fit_multinomial(const MultinomialDataset& data, const LinkFamily& link,
                                      FitMethod method = FitMethod::mle, const MultinomialOptions& opt = {}) {
  const auto parts = decompose(data);
  MultinomialFit fit;
  fit.link = link;
  fit.method = method;
  fit.category_labels = data.category_labels;
  fit.sub_fits.resize(parts.size());
  if (method == FitMethod::bayes) fit.chains.resize(parts.size());
  std::vector<std::string> errors(parts.size());

  parallel_for(parts.size(), [&](std::size_t k) {
    try {
      if (method == FitMethod::mle) {
        fit.sub_fits[k] = fit_mle(parts[k], link, opt.mle);
        return;
      }
      McmcOptions mo = opt.mcmc;
      mo.seed = opt.mcmc.seed + k;
      fit.chains[k] = run_mcmc(parts[k], link, opt.prior, mo);
      const auto& chain = fit.chains[k];
      const auto mean = posterior_mean_params(chain);
      FitResult& r = fit.sub_fits[k];
      r.link = link.has_shape() ? link.with_gamma(mean.gamma) : link;
      if (link.has_shape()) r.gamma = mean.gamma;
      r.beta = mean.beta;
      r.log_lik = log_likelihood(mean, parts[k], link);
      r.n_obs = parts[k].total_trials();
      r.n_params = static_cast<int>(r.beta.size()) + (r.gamma ? 1 : 0);
      r.fitted = fitted_probabilities(r.link, r.beta, parts[k]);
      r.converged = std::isfinite(r.log_lik);
      r.message = "posterior mean";
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  });

  fit.converged = true;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const std::string label = "theta_" + std::to_string(k + 1);
    if (!errors[k].empty()) {
      fit.failures.push_back(label + ": " + errors[k]);
      fit.converged = false;
    } else if (!fit.sub_fits[k].converged) {
      fit.failures.push_back(label + ": " + fit.sub_fits[k].message);
      fit.converged = false;
    }
  }
  return fit;
}

/// Conditional probabilities theta_k(x) from the sub-fits.
inline std::vector<double> conditional_probs(const MultinomialFit& fit, std::span<const double> x) {
  std::vector<double> theta;
  for (const auto& f : fit.sub_fits) theta.push_back(inverse_link(f.link, linear_predictor(x, f.beta)));
  return theta;
}

inline std::vector<double> category_probs(const MultinomialFit& fit, std::span<const double> x) {
  const auto theta = conditional_probs(fit, x);
  return theta_to_p(theta);
}

struct MultinomialMetrics {
  double log_lik = 0.0;
  int n_params = 0;
  double aic = 0.0;
  double ks = 0.0;
  double mae = 0.0;
  /// Row-major fitted probabilities, one row per data row.
  std::vector<std::vector<double>> fitted;
};

/// Total log-likelihood sum count * log p_hat over all cells (-inf when a
/// positive count has p_hat = 0); KS/MAE over the (row, category) cells.
inline MultinomialMetrics multinomial_metrics(const MultinomialFit& fit, const MultinomialDataset& data) {
  MultinomialMetrics m;
  std::vector<double> obs, pred;
  bool impossible = false;
  for (const auto& row : data.rows) {
    const auto p = category_probs(fit, row.x);
    const auto total = static_cast<double>(row.total());
    for (std::size_t k = 0; k < p.size(); ++k) {
      const auto c = static_cast<double>(row.counts[k]);
      if (c > 0) {
        if (p[k] > 0.0)
          m.log_lik += c * std::log(p[k]);
        else
          impossible = true;
      }
      obs.push_back(c / total);
      pred.push_back(p[k]);
    }
    m.fitted.push_back(p);
  }
  if (impossible) m.log_lik = -std::numeric_limits<double>::infinity();
  m.n_params = fit.n_params();
  m.aic = aic(m.log_lik, m.n_params);
  const auto km = ks_mae(obs, pred);
  m.ks = km.ks;
  m.mae = km.mae;
  return m;
}

}  // namespace skewlink

#endif  // SKEWLINK_MULTINOMIAL_HPP
