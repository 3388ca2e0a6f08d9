#ifndef SKEWLINK_MLE_HPP
#define SKEWLINK_MLE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "skewlink/dataset.hpp"
#include "skewlink/likelihood.hpp"
#include "skewlink/linalg.hpp"
#include "skewlink/links.hpp"
#include "skewlink/nelder_mead.hpp"

namespace skewlink {

struct FitOptions {
  NelderMeadOptions optimizer;
  /// Holds the Weibull shape fixed instead of estimating it.
  std::optional<double> fixed_gamma;
  bool compute_standard_errors = true;
  /// |beta_j| past this bound is treated as separation.
  double separation_bound = 1e3;
  /// A free shape estimate past this bound is checked against the limiting
  /// link (cloglog for weibull, loglog for reflected_weibull).
  double shape_divergence_bound = 1e4;
  /// Largest log-likelihood gap to the limiting link accepted as a boundary optimum.
  double boundary_tolerance = 1e-3;
};

struct FitResult {
  /// For Weibull kinds the shape is the estimate (or the fixed value).
  LinkFamily link = LinkFamily::probit();
  /// Present when the link has a free shape.
  std::optional<double> gamma;
  std::vector<double> beta;
  /// Ordered like the free parameters: (gamma, beta...) or (beta...).
  std::optional<std::vector<double>> std_errors;
  std::string se_diagnostic;
  double condition_number = std::numeric_limits<double>::quiet_NaN();
  double log_lik = -std::numeric_limits<double>::infinity();
  std::int64_t n_obs = 0;
  int n_params = 0;
  bool converged = false;
  /// The likelihood supremum lies at gamma -> infinity (the limiting link).
  bool boundary = false;
  int n_evals = 0;
  int restarts = 0;
  std::string message;
  std::vector<double> fitted;

  ParamVector params() const { return ParamVector{link.gamma(), beta}; }

  /// Free-parameter names in standard-error order.
  std::vector<std::string> parameter_names() const {
    std::vector<std::string> names;
    if (gamma) names.emplace_back("gamma");
    for (std::size_t j = 0; j < beta.size(); ++j) names.push_back("beta" + std::to_string(j));
    return names;
  }
};

namespace detail {

inline double clamp_rate(double r) { return std::clamp(r, 1e-6, 1.0 - 1e-6); }

inline double overall_rate(const GroupedDataset& data) {
  const auto t = data.total_trials();
  if (t == 0) return 0.5;
  return clamp_rate(static_cast<double>(data.total_successes()) / static_cast<double>(t));
}

inline void require_fit_data(const GroupedDataset& data) {
  data.validate();
  if (data.empty()) throw std::invalid_argument("cannot fit a model to an empty dataset");
  if (!data.full_rank())
    throw std::invalid_argument("design matrix is rank deficient (rank " + std::to_string(data.design_rank()) +
                                " < " + std::to_string(data.n_coef()) + " columns)");
}

inline bool separated(const std::vector<double>& beta, double bound) {
  return std::any_of(beta.begin(), beta.end(), [&](double b) { return !(std::fabs(b) <= bound); });
}

inline void finish_fit(FitResult& fit, const GroupedDataset& data, const NelderMeadResult& nm, const FitOptions& opt) {
  fit.log_lik = log_likelihood(fit.params(), data, fit.link);
  fit.n_obs = data.total_trials();
  fit.n_params = static_cast<int>(fit.beta.size()) + (fit.gamma ? 1 : 0);
  fit.n_evals = nm.n_evals;
  fit.restarts = nm.restarts;
  fit.fitted = fitted_probabilities(fit.link, fit.beta, data);
  fit.converged = nm.converged && std::isfinite(fit.log_lik);
  if (!nm.converged) fit.message = "simplex did not meet tolerances within the evaluation budget";
  if (detail::separated(fit.beta, opt.separation_bound)) {
    fit.converged = false;
    fit.message = "coefficients diverge past the separation bound";
  }
}

}  // namespace detail

inline FitResult fit_mle(const GroupedDataset& data, const LinkFamily& link, const FitOptions& opt);

namespace detail {

/// The Weibull link tends to cloglog as gamma grows (and the reflected link to
/// loglog), so a diverging shape means the supremum is the limiting link's
/// maximum. Accept the ridge point when it attains that maximum.
inline void check_shape_boundary(FitResult& fit, const GroupedDataset& data, const FitOptions& opt) {
  const auto limit = fit.link.decreasing() ? LinkFamily::loglog() : LinkFamily::cloglog();
  FitOptions lopt = opt;
  lopt.compute_standard_errors = false;
  const auto lim = fit_mle(data, limit, lopt);
  const double gap = lim.log_lik - fit.log_lik;
  fit.boundary = true;
  if (lim.converged && gap < opt.boundary_tolerance) {
    fit.converged = std::isfinite(fit.log_lik);
    fit.message = "shape diverges (gamma -> infinity): supremum at the " + std::string(limit.name()) +
                  " limit, log-likelihood within " + std::to_string(gap) + " of it";
  } else {
    fit.converged = false;
    fit.message = "shape diverges (gamma -> infinity) but the " + std::string(limit.name()) +
                  " limit was not attained";
  }
}

}  // namespace detail

struct StandardErrorReport {
  std::optional<std::vector<double>> std_errors;
  double condition_number = std::numeric_limits<double>::quiet_NaN();
  std::string diagnostic;
};

/// Observed-information standard errors: sqrt(diag((-H)^{-1})) at the fit.
/// Weibull kinds use the analytic Hessian; the fixed-shape links use the
/// textbook GLM form.
inline StandardErrorReport standard_errors(const FitResult& fit, const GroupedDataset& data) {
  StandardErrorReport rep;
  Matrix info;
  try {
    if (fit.link.has_shape()) {
      const auto h = hessian(fit.params(), data, fit.link);
      const std::size_t skip = fit.gamma ? 0 : 1;
      const std::size_t n = h.size() - skip;
      info.assign(n, std::vector<double>(n));
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) info[a][b] = -h[a + skip][b + skip];
    } else {
      info = glm_hessian(fit.beta, data, fit.link);
      for (auto& row : info)
        for (auto& v : row) v = -v;
    }
  } catch (const std::domain_error& e) {
    rep.diagnostic = std::string("Hessian undefined at the estimate: ") + e.what();
    return rep;
  }
  const auto inv = spd_inverse(info);
  if (!inv) {
    rep.diagnostic = "negative Hessian is not positive definite; standard errors unavailable";
    return rep;
  }
  rep.condition_number = norm1(info) * norm1(*inv);
  std::vector<double> se;
  for (std::size_t a = 0; a < inv->size(); ++a) se.push_back(std::sqrt((*inv)[a][a]));
  rep.std_errors = std::move(se);
  if (rep.condition_number > 1e12) rep.diagnostic = "information matrix is ill-conditioned";
  return rep;
}

/// Probit regression by Nelder-Mead, started from beta = 0 with the intercept
/// at the probit of the overall success rate.
inline FitResult fit_probit(const GroupedDataset& data, const FitOptions& opt = {}) {
  detail::require_fit_data(data);
  const auto link = LinkFamily::probit();
  std::vector<double> x0(data.n_coef(), 0.0);
  x0[0] = normal_quantile(detail::overall_rate(data));
  auto objective = [&](const std::vector<double>& b) {
    const double ll = log_likelihood(b, data, link);
    return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
  };
  const auto nm = nelder_mead(objective, x0, opt.optimizer);
  FitResult fit;
  fit.link = link;
  fit.beta = nm.x;
  detail::finish_fit(fit, data, nm, opt);
  if (opt.compute_standard_errors && std::isfinite(fit.log_lik)) {
    auto rep = standard_errors(fit, data);
    fit.std_errors = std::move(rep.std_errors);
    fit.condition_number = rep.condition_number;
    fit.se_diagnostic = std::move(rep.diagnostic);
  }
  return fit;
}

/// Weibull starting point from probit coefficients: slopes from probit (sign
/// flipped for the reflected link), intercept chosen so the smallest linear
/// predictor is exactly 0.001, and gamma = 3.60235 (the probit-matching shape).
inline ParamVector initial_guess(const GroupedDataset& data, std::span<const double> probit_beta,
                                 const LinkFamily& link = LinkFamily::weibull(constants::probit_approx_shape)) {
  const double sign = link.decreasing() ? -1.0 : 1.0;
  ParamVector p;
  p.gamma = constants::probit_approx_shape;
  p.beta.assign(probit_beta.begin(), probit_beta.end());
  for (auto& b : p.beta) b *= sign;
  double min_partial = std::numeric_limits<double>::infinity();
  for (const auto& row : data.rows) {
    double partial = 0.0;
    for (std::size_t j = 1; j < row.x.size(); ++j) partial += row.x[j] * p.beta[j];
    min_partial = std::min(min_partial, partial);
  }
  if (!std::isfinite(min_partial)) min_partial = 0.0;
  p.beta[0] = -min_partial + 0.001;
  return p;
}

inline ParamVector initial_guess(const GroupedDataset& data,
                                 const LinkFamily& link = LinkFamily::weibull(constants::probit_approx_shape)) {
  const auto probit = fit_probit(data);
  if (detail::separated(probit.beta, 1e3) || !std::isfinite(probit.log_lik))
    throw std::runtime_error("probit initializer failed: " + probit.message);
  return initial_guess(data, probit.beta, link);
}

/// Maximum-likelihood fit under `link`. Weibull kinds search over
/// (log gamma, beta) from initial_guess(); fixed-shape links search over beta
/// from the link transform of the overall success rate. Points with zero
/// likelihood are rejected by the simplex. Never throws on non-convergence;
/// check FitResult::converged.
inline FitResult fit_mle(const GroupedDataset& data, const LinkFamily& link, const FitOptions& opt = {});

inline FitResult fit_mle(const GroupedDataset& data, const LinkFamily& link, const FitOptions& opt) {
  detail::require_fit_data(data);
  FitResult fit;
  NelderMeadResult nm;

  if (link.has_shape() && !opt.fixed_gamma) {
    const auto start = initial_guess(data, link);
    std::vector<double> x0{std::log(start.gamma)};
    x0.insert(x0.end(), start.beta.begin(), start.beta.end());
    auto objective = [&](const std::vector<double>& x) {
      const double g = std::exp(x[0]);
      if (!(g > 0.0) || !std::isfinite(g)) return std::numeric_limits<double>::infinity();
      const double ll = log_likelihood(ParamVector{g, {x.begin() + 1, x.end()}}, data, link);
      return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
    };
    nm = nelder_mead(objective, x0, opt.optimizer);
    fit.gamma = std::exp(nm.x[0]);
    fit.link = link.with_gamma(*fit.gamma);
    fit.beta.assign(nm.x.begin() + 1, nm.x.end());
  } else {
    LinkFamily lk = link;
    std::vector<double> x0(data.n_coef(), 0.0);
    if (link.has_shape()) {
      lk = link.with_gamma(*opt.fixed_gamma);
      auto start = initial_guess(data, lk);
      x0 = start.beta;
    } else {
      x0[0] = forward_link(lk, detail::overall_rate(data));
    }
    auto objective = [&](const std::vector<double>& b) {
      const double ll = log_likelihood(b, data, lk);
      return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
    };
    nm = nelder_mead(objective, x0, opt.optimizer);
    fit.link = lk;
    fit.beta = nm.x;
  }

  detail::finish_fit(fit, data, nm, opt);
  if (fit.gamma && *fit.gamma > opt.shape_divergence_bound) detail::check_shape_boundary(fit, data, opt);
  if (opt.compute_standard_errors && std::isfinite(fit.log_lik)) {
    auto rep = standard_errors(fit, data);
    fit.std_errors = std::move(rep.std_errors);
    fit.condition_number = rep.condition_number;
    fit.se_diagnostic = std::move(rep.diagnostic);
  }
  return fit;
}

}  // namespace skewlink

#endif  // SKEWLINK_MLE_HPP
