#ifndef SKEWLINK_DATASETS_HPP
#define SKEWLINK_DATASETS_HPP

// Reference datasets shipped with the library.
//
// finney1947: insecticide potency of rotenone, a deguelin concentrate and
// their mixture (Finney, Probit Analysis, 1947, p. 69). Mixture is the
// reference poison.
// grazeffe2008: comet-assay DNA damage classes in snail hemocytes after
// gamma irradiation (Grazeffe et al., 2008).

#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "skewlink/io.hpp"

namespace skewlink::datasets {

inline constexpr std::string_view kFinney1947Csv =
    "poison,logdose,rotenone,deguelin,dead,n\n"
    "rotenone,1.01,1,0,44,50\n"
    "rotenone,0.89,1,0,42,49\n"
    "rotenone,0.71,1,0,24,46\n"
    "rotenone,0.58,1,0,16,48\n"
    "rotenone,0.41,1,0,6,50\n"
    "deguelin,1.70,0,1,48,48\n"
    "deguelin,1.61,0,1,47,50\n"
    "deguelin,1.48,0,1,47,49\n"
    "deguelin,1.31,0,1,34,48\n"
    "deguelin,1.00,0,1,18,48\n"
    "deguelin,0.71,0,1,16,49\n"
    "mixture,1.40,0,0,48,50\n"
    "mixture,1.31,0,0,43,46\n"
    "mixture,1.18,0,0,38,48\n"
    "mixture,1.00,0,0,27,46\n"
    "mixture,0.71,0,0,22,46\n"
    "mixture,0.40,0,0,7,47\n";

inline constexpr std::string_view kGrazeffe2008Csv =
    "dose,none,low,intermediate,high\n"
    "0,654,125,72,249\n"
    "2.5,442,178,105,175\n"
    "5,197,253,173,277\n"
    "10,159,296,264,281\n"
    "20,58,49,133,660\n";

struct BinomialLayout {
  std::string_view csv;
  std::vector<std::string> covariates;
  std::string success;
  std::string trials;
};

struct MultinomialLayout {
  std::string_view csv;
  std::vector<std::string> covariates;
  std::vector<std::string> counts;
};

inline BinomialLayout finney1947_layout() {
  return {kFinney1947Csv, {"logdose", "rotenone", "deguelin"}, "dead", "n"};
}

inline MultinomialLayout grazeffe2008_layout() {
  return {kGrazeffe2008Csv, {"dose", "dose^2"}, {"none", "low", "intermediate", "high"}};
}

inline GroupedDataset finney1947() {
  const auto layout = finney1947_layout();
  std::istringstream in{std::string(layout.csv)};
  return parse_binomial_csv(in, layout.covariates, layout.success, layout.trials);
}

/// Raw dose and dose squared as covariates; `scale` divides the raw dose.
inline MultinomialDataset grazeffe2008(const ColumnScale& scale = {}) {
  const auto layout = grazeffe2008_layout();
  std::istringstream in{std::string(layout.csv)};
  return parse_multinomial_csv(in, layout.covariates, layout.counts, scale);
}

inline bool is_builtin(std::string_view name) { return name == "finney1947" || name == "grazeffe2008"; }

}  // namespace skewlink::datasets

#endif  // SKEWLINK_DATASETS_HPP
