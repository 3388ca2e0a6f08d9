#ifndef SKEWLINK_REFERENCE_HPP
#define SKEWLINK_REFERENCE_HPP

// Previously reported results for the builtin datasets, used by `reproduce`
// to flag agreement and by the acceptance checks.

#include <array>
#include <string_view>

namespace skewlink::reference {

struct LinkCriteria {
  std::string_view link;
  double log_lik;
  double aic;
  double bic;
  double ks;
  double mae;
};

/// finney1947, maximum likelihood.
inline constexpr std::array<LinkCriteria, 4> kFinneyMle{{
    {"cloglog", -370.33, 748.66, 767.48, 0.1451, 0.0551},
    {"weibull", -370.34, 750.69, 774.22, 0.1440, 0.0553},
    {"probit", -372.57, 753.14, 771.97, 0.1292, 0.0656},
    {"logit", -373.41, 754.82, 773.65, 0.1351, 0.0668},
}};

inline constexpr std::array<double, 4> kFinneyProbitBeta{-2.3364, 2.8478, 0.4138, -0.5369};
inline constexpr std::array<double, 4> kFinneyProbitSe{0.1953, 0.1832, 0.1333, 0.1367};

inline constexpr double kFinneyWeibullGamma = 114.5084;
inline constexpr double kFinneyWeibullGammaSe = 47.9818;
inline constexpr std::array<double, 4> kFinneyWeibullBeta{0.9735, 0.0266, 0.0053, -0.0051};
inline constexpr std::array<double, 4> kFinneyWeibullBetaSe{0.0110, 0.0111, 0.0024, 0.0024};

/// finney1947, hierarchical prior with v_gamma = 100, v_beta = 25.
inline constexpr double kFinneyVGamma = 100.0;
inline constexpr double kFinneyVBeta = 25.0;
inline constexpr double kFinneyMGamma = 9.1125;
inline constexpr std::array<double, 4> kFinneyMBeta{0.1548, 0.9029, 0.1273, -0.1619};
/// Posterior means and SDs in (gamma, beta_0 .. beta_3) order.
inline constexpr std::array<double, 5> kFinneyPosteriorMean{3.2420, 0.1342, 0.9276, 0.1284, -0.1727};
inline constexpr std::array<double, 5> kFinneyPosteriorSd{0.7326, 0.1692, 0.1983, 0.0436, 0.0593};
inline constexpr double kFinneyDic = 753.43;
inline constexpr double kFinneyBayesKs = 0.1305;
inline constexpr double kFinneyBayesMae = 0.0660;

struct MultinomialCriteria {
  std::string_view link;
  double aic;
  double ks;
  double mae;
};

/// grazeffe2008, continuation-ratio fits on (dose, dose^2).
inline constexpr std::array<MultinomialCriteria, 2> kGrazeffeMle{{
    {"reflected_weibull", 11332.83, 0.031, 0.0097},
    {"logit", 11362.39, 0.071, 0.0165},
}};

inline constexpr std::array<double, 5> kGrazeffeDoses{0.0, 2.5, 5.0, 10.0, 20.0};

/// Reflected-Weibull fitted category frequencies, one row per dose.
inline constexpr std::array<std::array<double, 4>, 5> kGrazeffeWeibullFitted{{
    {0.595, 0.120, 0.065, 0.220},
    {0.491, 0.178, 0.112, 0.219},
    {0.233, 0.289, 0.200, 0.278},
    {0.137, 0.302, 0.264, 0.296},
    {0.075, 0.054, 0.147, 0.725},
}};

inline constexpr std::array<std::array<double, 4>, 5> kGrazeffeLogitFitted{{
    {0.607, 0.112, 0.065, 0.216},
    {0.430, 0.203, 0.123, 0.244},
    {0.285, 0.276, 0.183, 0.255},
    {0.138, 0.297, 0.267, 0.297},
    {0.067, 0.054, 0.147, 0.731},
}};

}  // namespace skewlink::reference

#endif  // SKEWLINK_REFERENCE_HPP
