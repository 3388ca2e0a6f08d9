#ifndef SKEWLINK_DATASET_HPP
#define SKEWLINK_DATASET_HPP

#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "skewlink/linalg.hpp"

namespace skewlink {

/// One covariate pattern of grouped binomial data. x includes the leading 1.
struct GroupedRow {
  std::vector<double> x;
  std::int64_t successes = 0;
  std::int64_t trials = 0;

  double proportion() const { return static_cast<double>(successes) / static_cast<double>(trials); }
};

struct GroupedDataset {
  std::vector<GroupedRow> rows;
  /// One name per column of x, the intercept included.
  std::vector<std::string> covariate_names;

  std::size_t n_coef() const { return covariate_names.size(); }
  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }

  std::int64_t total_trials() const {
    return std::accumulate(rows.begin(), rows.end(), std::int64_t{0},
                           [](std::int64_t acc, const GroupedRow& r) { return acc + r.trials; });
  }
  std::int64_t total_successes() const {
    return std::accumulate(rows.begin(), rows.end(), std::int64_t{0},
                           [](std::int64_t acc, const GroupedRow& r) { return acc + r.successes; });
  }

  /// Throws std::invalid_argument naming the offending row (1-based).
  void validate() const {
    if (covariate_names.empty()) throw std::invalid_argument("dataset has no covariate columns");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      const std::string where = "row " + std::to_string(i + 1);
      if (r.x.size() != n_coef())
        throw std::invalid_argument(where + ": covariate vector has length " + std::to_string(r.x.size()) +
                                    ", expected " + std::to_string(n_coef()));
      if (r.trials <= 0) throw std::invalid_argument(where + ": trials must be positive");
      if (r.successes < 0) throw std::invalid_argument(where + ": successes must be nonnegative");
      if (r.successes > r.trials) throw std::invalid_argument(where + ": successes exceed trials");
    }
  }

  std::vector<std::vector<double>> design() const {
    std::vector<std::vector<double>> m;
    m.reserve(rows.size());
    for (const auto& r : rows) m.push_back(r.x);
    return m;
  }

  std::size_t design_rank() const { return matrix_rank(design(), n_coef()); }
  bool full_rank() const { return design_rank() == n_coef(); }

  /// Observed proportions s/t per row.
  std::vector<double> proportions() const {
    std::vector<double> p;
    p.reserve(rows.size());
    for (const auto& r : rows) p.push_back(r.proportion());
    return p;
  }

  /// The same data with successes and failures exchanged.
  GroupedDataset complement() const {
    GroupedDataset out = *this;
    for (auto& r : out.rows) r.successes = r.trials - r.successes;
    return out;
  }

  /// Every grouped row expanded into its Bernoulli trials.
  GroupedDataset ungrouped() const {
    GroupedDataset out;
    out.covariate_names = covariate_names;
    for (const auto& r : rows)
      for (std::int64_t k = 0; k < r.trials; ++k) out.rows.push_back({r.x, k < r.successes ? 1 : 0, 1});
    return out;
  }
};

/// Parameters of one binary-model fit: the Weibull shape and the linear
/// coefficients (beta_0 .. beta_r).
struct ParamVector {
  double gamma = 1.0;
  std::vector<double> beta;

  std::size_t size() const { return beta.size() + 1; }

  /// Packed (gamma, beta_0, ..., beta_r).
  std::vector<double> packed() const {
    std::vector<double> v;
    v.reserve(size());
    v.push_back(gamma);
    v.insert(v.end(), beta.begin(), beta.end());
    return v;
  }

  static ParamVector unpack(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("ParamVector::unpack: empty vector");
    return ParamVector{v[0], std::vector<double>(v.begin() + 1, v.end())};
  }
};

inline double linear_predictor(std::span<const double> x, std::span<const double> beta) {
  double eta = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) eta += x[j] * beta[j];
  return eta;
}

}  // namespace skewlink

#endif  // SKEWLINK_DATASET_HPP
