#ifndef SKEWLINK_MODEL_SELECTION_HPP
#define SKEWLINK_MODEL_SELECTION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "skewlink/dataset.hpp"

namespace skewlink {

inline double aic(double log_lik, int n_params) { return -2.0 * log_lik + 2.0 * n_params; }

/// n_obs is the number of Bernoulli trials, not grouped rows.
inline double bic(double log_lik, int n_params, std::int64_t n_obs) {
  return -2.0 * log_lik + static_cast<double>(n_params) * std::log(static_cast<double>(n_obs));
}

struct KsMae {
  double ks = 0.0;
  double mae = 0.0;
};

/// Maximum and mean absolute gap between observed cell frequencies and
/// predicted probabilities.
inline KsMae ks_mae(std::span<const double> observed, std::span<const double> predicted) {
  if (observed.size() != predicted.size()) throw std::invalid_argument("ks_mae: size mismatch");
  KsMae r;
  if (observed.empty()) return r;
  double sum = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double d = std::fabs(observed[i] - predicted[i]);
    r.ks = std::max(r.ks, d);
    sum += d;
  }
  r.mae = sum / static_cast<double>(observed.size());
  return r;
}

/// Binomial cells: one per row with observed value s/t.
inline KsMae ks_mae(const GroupedDataset& data, std::span<const double> predicted) {
  const auto obs = data.proportions();
  return ks_mae(obs, predicted);
}

struct ComparisonRow {
  std::string model_name;
  double log_lik = 0.0;
  int n_params = 0;
  std::int64_t n_obs = 0;
  std::optional<double> aic;
  std::optional<double> bic;
  std::optional<double> dic;
  double ks = 0.0;
  double mae = 0.0;
  std::string dataset_fingerprint;
  bool converged = true;
  std::string note;
};

/// Sorts by AIC (DIC for rows without AIC), ties broken by name. All rows
/// must come from the same dataset.
inline std::vector<ComparisonRow> compare(std::vector<ComparisonRow> rows) {
  for (const auto& r : rows)
    if (r.dataset_fingerprint != rows.front().dataset_fingerprint)
      throw std::invalid_argument("compare: fits come from different datasets (" + rows.front().dataset_fingerprint +
                                  " vs " + r.dataset_fingerprint + ")");
  auto key = [](const ComparisonRow& r) {
    if (r.aic) return *r.aic;
    if (r.dic) return *r.dic;
    return std::numeric_limits<double>::infinity();
  };
  std::stable_sort(rows.begin(), rows.end(), [&](const ComparisonRow& a, const ComparisonRow& b) {
    const double ka = key(a), kb = key(b);
    if (ka != kb) return ka < kb;
    return a.model_name < b.model_name;
  });
  return rows;
}

namespace detail {

inline std::string fmt(std::optional<double> v, int precision) {
  if (!v) return "-";
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << *v;
  return os.str();
}

}  // namespace detail

inline void write_comparison_text(std::ostream& os, const std::vector<ComparisonRow>& rows) {
  os << std::left << std::setw(20) << "model" << std::right << std::setw(12) << "logL" << std::setw(5) << "p"
     << std::setw(12) << "AIC" << std::setw(12) << "BIC" << std::setw(12) << "DIC" << std::setw(9) << "KS"
     << std::setw(9) << "MAE" << '\n';
  for (const auto& r : rows) {
    os << std::left << std::setw(20) << r.model_name << std::right << std::setw(12) << detail::fmt(r.log_lik, 3)
       << std::setw(5) << r.n_params << std::setw(12) << detail::fmt(r.aic, 2) << std::setw(12)
       << detail::fmt(r.bic, 2) << std::setw(12) << detail::fmt(r.dic, 2) << std::setw(9) << detail::fmt(r.ks, 4)
       << std::setw(9) << detail::fmt(r.mae, 4);
    if (!r.converged) os << "  (not converged)";
    if (!r.note.empty()) os << "  " << r.note;
    os << '\n';
  }
  if (!rows.empty()) os << "n_obs = " << rows.front().n_obs << ", dataset " << rows.front().dataset_fingerprint << '\n';
}

inline void write_comparison_csv(std::ostream& os, const std::vector<ComparisonRow>& rows) {
  os << "model,log_lik,n_params,n_obs,aic,bic,dic,ks,mae,converged\n";
  auto opt = [](std::optional<double> v) { return v ? detail::fmt(v, 6) : std::string(); };
  for (const auto& r : rows)
    os << r.model_name << ',' << detail::fmt(r.log_lik, 6) << ',' << r.n_params << ',' << r.n_obs << ',' << opt(r.aic)
       << ',' << opt(r.bic) << ',' << opt(r.dic) << ',' << detail::fmt(r.ks, 6) << ',' << detail::fmt(r.mae, 6) << ','
       << (r.converged ? "true" : "false") << '\n';
}

inline nlohmann::ordered_json to_json(const ComparisonRow& r) {
  nlohmann::ordered_json j;
  j["model"] = r.model_name;
  j["log_lik"] = r.log_lik;
  j["n_params"] = r.n_params;
  j["n_obs"] = r.n_obs;
  j["aic"] = r.aic ? nlohmann::ordered_json(*r.aic) : nlohmann::ordered_json(nullptr);
  j["bic"] = r.bic ? nlohmann::ordered_json(*r.bic) : nlohmann::ordered_json(nullptr);
  j["dic"] = r.dic ? nlohmann::ordered_json(*r.dic) : nlohmann::ordered_json(nullptr);
  j["ks"] = r.ks;
  j["mae"] = r.mae;
  j["converged"] = r.converged;
  j["dataset_fingerprint"] = r.dataset_fingerprint;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

inline nlohmann::ordered_json to_json(const std::vector<ComparisonRow>& rows) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) arr.push_back(to_json(r));
  return arr;
}

}  // namespace skewlink

#endif  // SKEWLINK_MODEL_SELECTION_HPP
