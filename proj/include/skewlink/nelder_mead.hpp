#ifndef SKEWLINK_NELDER_MEAD_HPP
#define SKEWLINK_NELDER_MEAD_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace skewlink {

struct NelderMeadOptions {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  /// Converged when the spread of simplex function values and the largest
  /// vertex distance from the best vertex both fall below these.
  double f_tol = 1e-10;
  double x_tol = 1e-8;
  int max_evals = 50000;
  /// Restarts from the incumbent with a fresh simplex.
  int max_restarts = 5;
  double restart_perturbation = 0.1;
  /// A restart that improves the objective by less than this ends the search.
  double restart_improvement = 1e-8;
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = std::numeric_limits<double>::infinity();
  int n_evals = 0;
  int restarts = 0;
  bool converged = false;
};

namespace detail {

/// Simplex around x0: each coordinate moved by `frac` of its magnitude, or by
/// a small absolute step at zero.
inline std::vector<std::vector<double>> initial_simplex(const std::vector<double>& x0, double frac) {
  std::vector<std::vector<double>> s{x0};
  for (std::size_t j = 0; j < x0.size(); ++j) {
    auto v = x0;
    v[j] = v[j] != 0.0 ? v[j] * (1.0 + frac) : frac * 0.005;
    s.push_back(std::move(v));
  }
  return s;
}

template <class F>
NelderMeadResult nelder_mead_once(F& f, const std::vector<double>& x0, double frac, const NelderMeadOptions& opt,
                                  int eval_budget) {
  const std::size_t n = x0.size();
  auto simplex = initial_simplex(x0, frac);
  std::vector<double> fv(n + 1);
  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };
  for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  bool converged = false;
  while (evals < eval_budget) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    {
      std::vector<std::vector<double>> s2;
      std::vector<double> f2;
      for (auto k : order) {
        s2.push_back(simplex[k]);
        f2.push_back(fv[k]);
      }
      simplex = std::move(s2);
      fv = std::move(f2);
    }

    double xspread = 0.0;
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = 0; j < n; ++j) xspread = std::max(xspread, std::fabs(simplex[i][j] - simplex[0][j]));
    const double fspread = std::isfinite(fv[n]) ? fv[n] - fv[0] : std::numeric_limits<double>::infinity();
    if (fspread <= opt.f_tol && xspread <= opt.x_tol) {
      converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);

    auto along = [&](double coef) {
      std::vector<double> v(n);
      for (std::size_t j = 0; j < n; ++j) v[j] = centroid[j] + coef * (simplex[n][j] - centroid[j]);
      return v;
    };

    const auto xr = along(-opt.reflection);
    const double fr = eval(xr);
    if (fr < fv[0]) {
      const auto xe = along(-opt.reflection * opt.expansion);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[n] = xe;
        fv[n] = fe;
      } else {
        simplex[n] = xr;
        fv[n] = fr;
      }
      continue;
    }
    if (fr < fv[n - 1]) {
      simplex[n] = xr;
      fv[n] = fr;
      continue;
    }
    if (fr < fv[n]) {
      const auto xc = along(-opt.reflection * opt.contraction);
      const double fc = eval(xc);
      if (fc <= fr) {
        simplex[n] = xc;
        fv[n] = fc;
        continue;
      }
    } else {
      const auto xc = along(opt.contraction);
      const double fc = eval(xc);
      if (fc < fv[n]) {
        simplex[n] = xc;
        fv[n] = fc;
        continue;
      }
    }
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t j = 0; j < n; ++j) simplex[i][j] = simplex[0][j] + opt.shrink * (simplex[i][j] - simplex[0][j]);
      fv[i] = eval(simplex[i]);
    }
  }

  const auto best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  return {simplex[best], fv[best], evals, 0, converged};
}

}  // namespace detail

/// Minimizes f from x0 by the Nelder-Mead simplex method, restarting from the
/// incumbent until a restart stops improving. f may return +inf to reject a
/// point. Deterministic.
template <class F>
NelderMeadResult nelder_mead(F&& f, std::vector<double> x0, const NelderMeadOptions& opt = {}) {
  NelderMeadResult out;
  out.x = std::move(x0);
  out.f = f(out.x);
  int budget = opt.max_evals;
  double frac = 0.05;
  for (int attempt = 0; attempt <= opt.max_restarts && budget > 0; ++attempt) {
    auto r = detail::nelder_mead_once(f, out.x, frac, opt, budget);
    budget -= r.n_evals;
    out.n_evals += r.n_evals;
    const double improvement = out.f - r.f;
    if (r.f <= out.f) {
      out.x = std::move(r.x);
      out.f = r.f;
    }
    out.converged = r.converged;
    out.restarts = attempt;
    if (r.converged && attempt > 0 && !(improvement > opt.restart_improvement)) break;
    frac = opt.restart_perturbation;
  }
  return out;
}

}  // namespace skewlink

#endif  // SKEWLINK_NELDER_MEAD_HPP
