#ifndef SKEWLINK_MULTINOMIAL_DATA_HPP
#define SKEWLINK_MULTINOMIAL_DATA_HPP

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace skewlink {

struct MultinomialRow {
  std::vector<double> x;
  std::vector<std::int64_t> counts;

  std::int64_t total() const { return std::accumulate(counts.begin(), counts.end(), std::int64_t{0}); }
};

/// Grouped multinomial data: one count per category for each covariate row.
/// Categories are taken in label order; no reordering is applied.
struct MultinomialDataset {
  std::vector<MultinomialRow> rows;
  std::vector<std::string> covariate_names;
  std::vector<std::string> category_labels;

  std::size_t n_categories() const { return category_labels.size(); }
  std::size_t n_coef() const { return covariate_names.size(); }

  std::int64_t total_count() const {
    std::int64_t t = 0;
    for (const auto& r : rows) t += r.total();
    return t;
  }

  void validate() const {
    if (n_categories() < 2) throw std::invalid_argument("multinomial data needs K >= 2 categories");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      const std::string where = "row " + std::to_string(i + 1);
      if (r.x.size() != n_coef()) throw std::invalid_argument(where + ": covariate vector length mismatch");
      if (r.counts.size() != n_categories()) throw std::invalid_argument(where + ": expected K counts");
      for (auto c : r.counts)
        if (c < 0) throw std::invalid_argument(where + ": negative count");
      if (r.total() < 1) throw std::invalid_argument(where + ": counts sum to zero");
    }
  }
};

}  // namespace skewlink

#endif  // SKEWLINK_MULTINOMIAL_DATA_HPP
