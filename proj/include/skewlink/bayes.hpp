#ifndef SKEWLINK_BAYES_HPP
#define SKEWLINK_BAYES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "skewlink/dataset.hpp"
#include "skewlink/likelihood.hpp"
#include "skewlink/links.hpp"
#include "skewlink/mle.hpp"
#include "skewlink/special.hpp"

namespace skewlink {

enum class PriorKind { hierarchical, noninformative };

/// Prior on (gamma, beta).
///
/// hierarchical: gamma ~ Gamma with mean m_gamma and variance v_gamma
/// (shape m^2/v, scale v/m), beta ~ N(m_beta, v_beta I).
/// noninformative: p(beta, gamma) proportional to gamma^-c on gamma > 1, c > 1.
struct PriorSpec {
  PriorKind kind = PriorKind::hierarchical;
  double m_gamma = constants::probit_approx_shape;
  double v_gamma = 100.0;
  std::vector<double> m_beta;
  double v_beta = 25.0;
  double c = 2.0;

  static PriorSpec hierarchical(double m_gamma, double v_gamma, std::vector<double> m_beta, double v_beta) {
    PriorSpec p;
    p.kind = PriorKind::hierarchical;
    p.m_gamma = m_gamma;
    p.v_gamma = v_gamma;
    p.m_beta = std::move(m_beta);
    p.v_beta = v_beta;
    p.validate();
    return p;
  }

  static PriorSpec noninformative(double c) {
    PriorSpec p;
    p.kind = PriorKind::noninformative;
    p.c = c;
    p.validate();
    return p;
  }

  double gamma_shape() const { return m_gamma * m_gamma / v_gamma; }
  double gamma_scale() const { return v_gamma / m_gamma; }

  void validate() const {
    if (kind == PriorKind::hierarchical) {
      if (!(v_gamma > 0.0)) throw std::invalid_argument("prior: v_gamma must be > 0");
      if (!(v_beta > 0.0)) throw std::invalid_argument("prior: v_beta must be > 0");
      if (!(m_gamma > 0.0)) throw std::invalid_argument("prior: m_gamma must be > 0");
    } else if (!(c > 1.0)) {
      throw std::invalid_argument("prior: noninformative exponent c must be > 1");
    }
  }
};

namespace detail {

inline double gamma_log_density(double x, double shape, double scale) {
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  return (shape - 1.0) * std::log(x) - x / scale - shape * std::log(scale) - std::lgamma(shape);
}

inline double normal_log_density(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * d * d / var - 0.5 * std::log(var) - kLogSqrt2Pi;
}

}  // namespace detail

/// Log prior density. Links without a shape use only the beta part
/// (pass with_gamma = false). m_beta must match beta in length when nonempty;
/// an empty m_beta means zero means.
inline double log_prior(const ParamVector& params, const PriorSpec& prior, bool with_gamma = true) {
  constexpr double ninf = -std::numeric_limits<double>::infinity();
  if (prior.kind == PriorKind::noninformative) {
    if (!with_gamma) return 0.0;
    if (!(params.gamma > 1.0)) return ninf;
    return -prior.c * std::log(params.gamma);
  }
  if (!prior.m_beta.empty() && prior.m_beta.size() != params.beta.size())
    throw std::invalid_argument("prior: m_beta length does not match beta");
  double lp = 0.0;
  if (with_gamma) lp += detail::gamma_log_density(params.gamma, prior.gamma_shape(), prior.gamma_scale());
  for (std::size_t j = 0; j < params.beta.size(); ++j)
    lp += detail::normal_log_density(params.beta[j], prior.m_beta.empty() ? 0.0 : prior.m_beta[j], prior.v_beta);
  return lp;
}

inline double log_posterior(const ParamVector& params, const GroupedDataset& data, const LinkFamily& link,
                            const PriorSpec& prior) {
  const double lp = log_prior(params, prior, link.has_shape());
  if (lp == -std::numeric_limits<double>::infinity()) return lp;
  const double ll = log_likelihood(params, data, link);
  return lp + ll;
}

struct McmcOptions {
  std::uint64_t seed = 20240101;
  int n_burn = 10000;
  int n_keep = 50000;
  int thin = 5;
  double initial_scale = 0.1;
  /// Burn-in adapts each proposal scale toward this acceptance band.
  double target_low = 0.30;
  double target_high = 0.45;
  /// Starting point; defaults to the probit-based initializer (or the prior
  /// means when the data are empty).
  std::optional<ParamVector> start;
};

/// Kept draws, row-major n_kept x dim, in natural scale: (gamma, beta...)
/// for Weibull kinds, (beta...) otherwise.
struct PosteriorChain {
  std::vector<double> draws;
  std::size_t dim = 0;
  std::vector<std::string> names;
  bool has_gamma = true;
  std::uint64_t seed = 0;
  int burn_in = 0;
  int thin = 1;
  double acceptance_rate = 0.0;
  std::vector<double> proposal_scales;

  std::size_t size() const { return dim == 0 ? 0 : draws.size() / dim; }
  bool empty() const { return size() == 0; }
  std::span<const double> draw(std::size_t i) const { return {draws.data() + i * dim, dim}; }
  double at(std::size_t i, std::size_t j) const { return draws[i * dim + j]; }

  ParamVector params(std::size_t i) const {
    const auto d = draw(i);
    if (has_gamma) return ParamVector::unpack(d);
    return ParamVector{1.0, {d.begin(), d.end()}};
  }

  /// One row per kept draw, header = parameter names.
  void write_csv(std::ostream& os) const {
    os.precision(17);
    for (std::size_t j = 0; j < dim; ++j) os << (j ? "," : "") << names[j];
    os << '\n';
    for (std::size_t i = 0; i < size(); ++i) {
      for (std::size_t j = 0; j < dim; ++j) os << (j ? "," : "") << at(i, j);
      os << '\n';
    }
  }
};

/// Adaptive component-wise Gaussian random-walk Metropolis on an unconstrained
/// target. During burn-in each coordinate's log proposal scale follows a
/// Robbins-Monro update toward the middle of the target acceptance band; the
/// scales are frozen afterwards, so kept draws come from a fixed Metropolis
/// kernel. Returns draws of the raw coordinates. Deterministic given the seed.
template <class LogDensity>
PosteriorChain metropolis(LogDensity&& log_density, std::vector<double> start, const McmcOptions& opt) {
  if (opt.n_keep < 1 || opt.thin < 1 || opt.n_burn < 0) throw std::invalid_argument("mcmc: bad chain sizes");
  const std::size_t d = start.size();
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  std::vector<double> x = std::move(start);
  double lp = log_density(x);
  if (!std::isfinite(lp))
    throw std::invalid_argument("mcmc: log posterior is not finite at the starting point; start from the MLE initializer");

  std::vector<double> log_scale(d, std::log(opt.initial_scale));
  const double target = 0.5 * (opt.target_low + opt.target_high);

  PosteriorChain chain;
  chain.dim = d;
  chain.seed = opt.seed;
  chain.burn_in = opt.n_burn;
  chain.thin = opt.thin;
  chain.draws.reserve(static_cast<std::size_t>(opt.n_keep) * d);

  std::int64_t accepted = 0;
  std::int64_t proposed = 0;
  const std::int64_t total = static_cast<std::int64_t>(opt.n_burn) + static_cast<std::int64_t>(opt.n_keep) * opt.thin;
  for (std::int64_t it = 0; it < total; ++it) {
    const bool burning = it < opt.n_burn;
    for (std::size_t j = 0; j < d; ++j) {
      const double old = x[j];
      x[j] = old + std::exp(log_scale[j]) * normal(rng);
      const double lq = log_density(x);
      const double u = unif(rng);
      const bool accept = std::isfinite(lq) && std::log(u) < lq - lp;
      if (accept)
        lp = lq;
      else
        x[j] = old;
      if (burning) {
        log_scale[j] += ((accept ? 1.0 : 0.0) - target) / std::pow(static_cast<double>(it) + 1.0, 0.6);
      } else {
        ++proposed;
        accepted += accept ? 1 : 0;
      }
    }
    if (!burning && (it - opt.n_burn) % opt.thin == opt.thin - 1) chain.draws.insert(chain.draws.end(), x.begin(), x.end());
  }
  chain.acceptance_rate = proposed ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0;
  for (double ls : log_scale) chain.proposal_scales.push_back(std::exp(ls));
  return chain;
}

inline std::vector<std::string> chain_names(std::size_t n_beta, bool has_gamma) {
  std::vector<std::string> names;
  if (has_gamma) names.emplace_back("gamma");
  for (std::size_t j = 0; j < n_beta; ++j) names.push_back("beta" + std::to_string(j));
  return names;
}

/// Posterior sample of (gamma, beta) by adaptive random-walk Metropolis on
/// (log gamma, beta); the log-gamma Jacobian is included in the target.
inline PosteriorChain run_mcmc(const GroupedDataset& data, const LinkFamily& link, const PriorSpec& prior,
                               const McmcOptions& opt = {}) {
  data.validate();
  prior.validate();
  const bool has_gamma = link.has_shape();
  const std::size_t p = data.n_coef();

  ParamVector start;
  if (opt.start) {
    start = *opt.start;
  } else if (data.empty()) {
    start.gamma = prior.kind == PriorKind::hierarchical ? prior.m_gamma : constants::probit_approx_shape;
    start.beta = prior.m_beta.empty() ? std::vector<double>(p, 0.0) : prior.m_beta;
  } else if (has_gamma) {
    start = initial_guess(data, link);
  } else {
    const auto fit = fit_mle(data, link);
    start = ParamVector{1.0, fit.beta};
  }
  if (start.beta.size() != p) throw std::invalid_argument("mcmc: start has the wrong number of coefficients");

  std::vector<double> x0;
  if (has_gamma) x0.push_back(std::log(start.gamma));
  x0.insert(x0.end(), start.beta.begin(), start.beta.end());

  ParamVector work{start.gamma, start.beta};
  auto target = [&](const std::vector<double>& x) {
    std::size_t off = 0;
    double jac = 0.0;
    if (has_gamma) {
      work.gamma = std::exp(x[0]);
      jac = x[0];
      off = 1;
      if (!(work.gamma > 0.0) || !std::isfinite(work.gamma)) return -std::numeric_limits<double>::infinity();
    }
    for (std::size_t j = 0; j < p; ++j) work.beta[j] = x[j + off];
    const double lp = log_posterior(work, data, link, prior);
    return lp + jac;
  };

  auto chain = metropolis(target, std::move(x0), opt);
  chain.has_gamma = has_gamma;
  chain.names = chain_names(p, has_gamma);
  if (has_gamma)
    for (std::size_t i = 0; i < chain.size(); ++i) chain.draws[i * chain.dim] = std::exp(chain.draws[i * chain.dim]);
  return chain;
}

struct ParameterSummary {
  std::string name;
  double mean = 0.0;
  /// Population convention (divisor n).
  double sd = 0.0;
  double q025 = 0.0;
  double q50 = 0.0;
  double q975 = 0.0;
};

namespace detail {

/// Linear interpolation between order statistics (R type 7).
inline double quantile_sorted(const std::vector<double>& v, double q) {
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace detail

/// Means shifted by the first draw, so a constant column is returned exactly.
inline std::vector<double> column_means(const PosteriorChain& chain) {
  std::vector<double> m(chain.dim, 0.0);
  if (chain.empty()) return m;
  const auto n = static_cast<double>(chain.size());
  for (std::size_t i = 0; i < chain.size(); ++i)
    for (std::size_t j = 0; j < chain.dim; ++j) m[j] += chain.at(i, j) - chain.at(0, j);
  for (std::size_t j = 0; j < chain.dim; ++j) m[j] = chain.at(0, j) + m[j] / n;
  return m;
}

inline std::vector<ParameterSummary> posterior_summary(const PosteriorChain& chain) {
  if (chain.empty()) throw std::invalid_argument("posterior_summary: empty chain");
  const auto means = column_means(chain);
  std::vector<ParameterSummary> out;
  const auto n = static_cast<double>(chain.size());
  for (std::size_t j = 0; j < chain.dim; ++j) {
    ParameterSummary s;
    s.name = j < chain.names.size() ? chain.names[j] : "theta" + std::to_string(j);
    s.mean = means[j];
    std::vector<double> col;
    col.reserve(chain.size());
    double ss = 0.0;
    for (std::size_t i = 0; i < chain.size(); ++i) {
      const double v = chain.at(i, j);
      col.push_back(v);
      ss += (v - s.mean) * (v - s.mean);
    }
    s.sd = std::sqrt(ss / n);
    std::sort(col.begin(), col.end());
    s.q025 = detail::quantile_sorted(col, 0.025);
    s.q50 = detail::quantile_sorted(col, 0.5);
    s.q975 = detail::quantile_sorted(col, 0.975);
    out.push_back(std::move(s));
  }
  return out;
}

inline ParamVector posterior_mean_params(const PosteriorChain& chain) {
  const auto m = column_means(chain);
  if (chain.has_gamma) return ParamVector::unpack(m);
  return ParamVector{1.0, m};
}

enum class DicPlugin {
  /// Posterior mean of the sampled coordinates (log gamma, beta): gamma is
  /// plugged in at its posterior geometric mean.
  sampler_scale,
  /// Posterior mean of (gamma, beta).
  natural_scale,
};

struct DicResult {
  double dic = 0.0;
  double p_d = 0.0;
  /// Posterior mean deviance.
  double mean_deviance = 0.0;
  /// Deviance at the plug-in point.
  double plugin_deviance = 0.0;
  ParamVector plugin;
  /// p_D below -0.5 signals a plug-in point in a poorly fitting region.
  bool p_d_flag = false;
};

/// Plug-in point for DIC.
inline ParamVector dic_plugin_point(const PosteriorChain& chain, DicPlugin plugin) {
  auto p = posterior_mean_params(chain);
  if (chain.has_gamma && plugin == DicPlugin::sampler_scale) {
    double mean_log = 0.0;
    for (std::size_t i = 0; i < chain.size(); ++i) mean_log += std::log(chain.at(i, 0));
    p.gamma = std::exp(mean_log / static_cast<double>(chain.size()));
  }
  return p;
}

/// DIC = mean(D) + p_D with D = -2 log L and p_D = mean(D) - D(plug-in).
/// Under a heavy right tail in gamma the natural-scale mean sits off the
/// likelihood ridge and p_D turns negative; the sampler-scale mean does not.
inline DicResult dic(const PosteriorChain& chain, const GroupedDataset& data, const LinkFamily& link,
                     DicPlugin plugin = DicPlugin::sampler_scale) {
  if (chain.empty()) throw std::invalid_argument("dic: empty chain");
  const double d0 = -2.0 * log_likelihood(chain.params(0), data, link);
  double shift = 0.0;
  for (std::size_t i = 1; i < chain.size(); ++i) shift += -2.0 * log_likelihood(chain.params(i), data, link) - d0;
  DicResult r;
  r.mean_deviance = d0 + shift / static_cast<double>(chain.size());
  r.plugin = dic_plugin_point(chain, plugin);
  const double ll_hat = log_likelihood(r.plugin, data, link);
  if (!std::isfinite(ll_hat))
    throw std::domain_error("dic: the posterior mean lies where the likelihood is zero (an observed outcome has "
                            "probability 0); DIC is undefined for this chain");
  r.plugin_deviance = -2.0 * ll_hat;
  r.p_d = r.mean_deviance - r.plugin_deviance;
  r.dic = r.mean_deviance + r.p_d;
  r.p_d_flag = r.p_d < -0.5;
  return r;
}

/// Posterior mean of each row's success probability.
inline std::vector<double> posterior_predictive_means(const PosteriorChain& chain, const GroupedDataset& data,
                                                      const LinkFamily& link) {
  std::vector<double> mu(data.size(), 0.0);
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const auto p = chain.params(i);
    const auto lk = link.has_shape() ? link.with_gamma(p.gamma) : link;
    for (std::size_t r = 0; r < data.size(); ++r) mu[r] += inverse_link(lk, linear_predictor(data.rows[r].x, p.beta));
  }
  for (auto& v : mu) v /= static_cast<double>(chain.size());
  return mu;
}

struct EmpiricalBayesOptions {
  McmcOptions mcmc;
  int max_iterations = 30;
  /// Stop when no hyper-mean moves by more than this.
  double tolerance = 1e-2;
  double m_gamma_start = constants::probit_approx_shape;
  /// Defaults to zeros.
  std::vector<double> m_beta_start;
  /// The tolerance is only checked from this iteration on.
  int min_iterations = 10;
  /// The estimate averages this many final iterates (at most the later half),
  /// which damps the Monte Carlo noise of single E-steps.
  int average_last = 10;
};

struct EmpiricalBayesResult {
  double m_gamma = 0.0;
  std::vector<double> m_beta;
  bool converged = false;
  int iterations = 0;
  /// (m_gamma, m_beta...) after each iteration.
  std::vector<std::vector<double>> trace;
  /// Number of final iterates averaged into the estimate.
  int averaged = 1;
};

/// Gamma-prior mean maximizing E[log Gamma(gamma; shape m^2/v, scale v/m)]
/// given the posterior moments E[gamma] and E[log gamma], with v fixed.
inline double gamma_mean_mstep(double mean_gamma, double mean_log_gamma, double v_gamma) {
  auto score = [&](double m) {
    const double a = m * m / v_gamma;
    return (2.0 * m / v_gamma) * (mean_log_gamma - std::log(v_gamma / m) - digamma(a)) + (m - mean_gamma) / v_gamma;
  };
  // score > 0 as m -> 0 and < 0 for large m.
  double lo = 1e-8, hi = std::max(1.0, 10.0 * mean_gamma);
  while (score(hi) > 0.0 && hi < 1e12) hi *= 2.0;
  while (score(lo) < 0.0 && lo > 1e-300) lo *= 0.5;
  for (int i = 0; i < 200; ++i) {
    const double mid = std::sqrt(lo * hi);
    if (score(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi / lo - 1.0 < 1e-14) break;
  }
  return std::sqrt(lo * hi);
}

/// Monte Carlo EM for the hierarchical prior means with v_gamma and v_beta
/// fixed. Each E-step runs a chain under the current hyper-means (seed offset
/// by the iteration number); the M-step sets m_beta to the posterior mean of
/// beta and m_gamma to the maximizer of the expected gamma log-prior.
/// Iteration stops once no hyper-mean moves by more than the tolerance (after
/// min_iterations) and the reported hyper-means average the final iterates.
inline EmpiricalBayesResult empirical_bayes(const GroupedDataset& data, const LinkFamily& link, double v_gamma,
                                            double v_beta, const EmpiricalBayesOptions& opt = {}) {
  EmpiricalBayesResult res;
  res.m_gamma = opt.m_gamma_start;
  res.m_beta = opt.m_beta_start.empty() ? std::vector<double>(data.n_coef(), 0.0) : opt.m_beta_start;
  const bool has_gamma = link.has_shape();

  std::optional<ParamVector> start = opt.mcmc.start;
  if (!start && !data.empty() && has_gamma) start = initial_guess(data, link);

  for (int it = 0; it < opt.max_iterations; ++it) {
    const auto prior = PriorSpec::hierarchical(res.m_gamma, v_gamma, res.m_beta, v_beta);
    McmcOptions mo = opt.mcmc;
    mo.seed = opt.mcmc.seed + static_cast<std::uint64_t>(it);
    mo.start = start;
    if (!mo.start && data.empty()) mo.start = ParamVector{res.m_gamma, res.m_beta};
    const auto chain = run_mcmc(data, link, prior, mo);

    const auto means = column_means(chain);
    double new_m_gamma = res.m_gamma;
    std::size_t off = 0;
    if (has_gamma) {
      double mean_log = 0.0;
      for (std::size_t i = 0; i < chain.size(); ++i) mean_log += std::log(chain.at(i, 0));
      mean_log /= static_cast<double>(chain.size());
      new_m_gamma = gamma_mean_mstep(means[0], mean_log, v_gamma);
      off = 1;
    }
    std::vector<double> new_m_beta(means.begin() + static_cast<std::ptrdiff_t>(off), means.end());

    double change = std::fabs(new_m_gamma - res.m_gamma);
    for (std::size_t j = 0; j < new_m_beta.size(); ++j) change = std::max(change, std::fabs(new_m_beta[j] - res.m_beta[j]));
    res.m_gamma = new_m_gamma;
    res.m_beta = std::move(new_m_beta);
    res.iterations = it + 1;
    std::vector<double> row{res.m_gamma};
    row.insert(row.end(), res.m_beta.begin(), res.m_beta.end());
    res.trace.push_back(std::move(row));
    // Warm start the next chain from this chain's final draw.
    start = chain.params(chain.size() - 1);
    if (change < opt.tolerance && res.iterations >= opt.min_iterations) {
      res.converged = true;
      break;
    }
  }
  if (opt.average_last > 1 && !res.trace.empty()) {
    const auto n = std::min<std::size_t>(static_cast<std::size_t>(opt.average_last), (res.trace.size() + 1) / 2);
    std::vector<double> avg(res.trace.front().size(), 0.0);
    for (std::size_t i = res.trace.size() - n; i < res.trace.size(); ++i)
      for (std::size_t j = 0; j < avg.size(); ++j) avg[j] += res.trace[i][j] / static_cast<double>(n);
    res.m_gamma = avg[0];
    res.m_beta.assign(avg.begin() + 1, avg.end());
    res.averaged = static_cast<int>(n);
  }
  return res;
}

}  // namespace skewlink

#endif  // SKEWLINK_BAYES_HPP
