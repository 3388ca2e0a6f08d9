#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "skewlink/special.hpp"

namespace sl = skewlink;

TEST(Erf, KnownValues) {
  EXPECT_NEAR(sl::erf(0.5), 0.520499877813046537682746653892, 1e-15);
  EXPECT_NEAR(sl::erf(1.0), 0.842700792949714869341220635083, 1e-15);
  EXPECT_NEAR(sl::erfc(3.0) / 2.20904969985854413727761295823e-05, 1.0, 1e-13);
  EXPECT_NEAR(sl::erfc(10.0) / 2.08848758376254475700078629496e-45, 1.0, 1e-12);
  EXPECT_EQ(sl::erf(0.0), 0.0);
}

TEST(Erf, AgreesWithStdOnGrid) {
  for (double x = -6.0; x <= 6.0; x += 0.013) {
    EXPECT_NEAR(sl::erf(x), std::erf(x), 1e-14) << x;
    EXPECT_NEAR(sl::erfc(x), std::erfc(x), 1e-14 * std::max(1.0, std::erfc(x))) << x;
  }
}

TEST(Erf, OddSymmetry) {
  for (double x : {0.1, 0.47, 0.5, 1.3, 2.9, 4.1}) EXPECT_DOUBLE_EQ(sl::erf(-x), -sl::erf(x));
}

TEST(Erfcx, MatchesDefinitionAndTail) {
  for (double x : {0.0, 0.3, 1.0, 2.5, 5.0}) EXPECT_NEAR(sl::erfcx(x), std::exp(x * x) * std::erfc(x), 1e-13);
  // x erfcx(x) sqrt(pi) -> 1 as x grows.
  EXPECT_NEAR(1e4 * sl::erfcx(1e4) * std::sqrt(M_PI), 1.0, 1e-8);
}

TEST(NormalCdf, KnownValues) {
  EXPECT_DOUBLE_EQ(sl::normal_cdf(0.0), 0.5);
  EXPECT_NEAR(sl::normal_cdf(-1.96), 0.0249978951482204362128236923956, 1e-15);
  EXPECT_NEAR(sl::normal_cdf(1.96), 1.0 - 0.0249978951482204362128236923956, 1e-15);
}

TEST(NormalCdf, LogTail) {
  EXPECT_NEAR(sl::log_normal_cdf(-10.0), -53.2312851505124705783470273541, 1e-10);
  EXPECT_NEAR(sl::log_normal_cdf(-40.0), -804.608442013753788166606832919, 1e-9);
  EXPECT_NEAR(sl::log_normal_cdf(0.0), std::log(0.5), 1e-15);
}

TEST(NormalQuantile, KnownValuesAndRoundtrip) {
  EXPECT_NEAR(sl::normal_quantile(0.975), 1.95996398454005385560443064983, 1e-12);
  EXPECT_NEAR(sl::normal_quantile(1e-10), -6.36134090240405620469535501582, 1e-9);
  EXPECT_NEAR(sl::normal_quantile(0.5), 0.0, 1e-15);
  for (double p = 0.001; p < 1.0; p += 0.0137) EXPECT_NEAR(sl::normal_cdf(sl::normal_quantile(p)), p, 1e-14);
  EXPECT_THROW(sl::normal_quantile(1.5), std::domain_error);
  EXPECT_EQ(sl::normal_quantile(0.0), -std::numeric_limits<double>::infinity());
}

TEST(Log1mexp, StableBothBranches) {
  EXPECT_NEAR(sl::log1mexp(1e-20), std::log(1e-20), 1e-12);
  EXPECT_NEAR(sl::log1mexp(1.0), std::log(1.0 - std::exp(-1.0)), 1e-15);
  EXPECT_NEAR(sl::log1mexp(50.0), -std::exp(-50.0), 1e-35);
  EXPECT_EQ(sl::log1mexp(0.0), -std::numeric_limits<double>::infinity());
}

TEST(Log1pexp, NoOverflow) {
  EXPECT_NEAR(sl::log1pexp(1000.0), 1000.0, 1e-12);
  EXPECT_NEAR(sl::log1pexp(0.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(sl::log1pexp(-40.0), std::exp(-40.0), 1e-30);
}

TEST(Digamma, KnownValues) {
  EXPECT_NEAR(sl::digamma(1.0), -0.577215664901532860606512090082, 1e-13);
  EXPECT_NEAR(sl::digamma(0.5), -1.963510026021423479440976333, 1e-13);
  EXPECT_NEAR(sl::digamma(7.3), 1.91782033563798607229146772371, 1e-13);
  // Recurrence psi(x+1) = psi(x) + 1/x.
  EXPECT_NEAR(sl::digamma(3.7) - sl::digamma(2.7), 1.0 / 2.7, 1e-13);
  EXPECT_THROW(sl::digamma(0.0), std::domain_error);
}
