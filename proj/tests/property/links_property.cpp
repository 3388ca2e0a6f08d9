#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "skewlink/links.hpp"
#include "skewlink/special.hpp"

namespace sl = skewlink;
using sl::LinkFamily;

namespace {

std::vector<LinkFamily> random_links(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> log_shape(std::log(0.05), std::log(500.0));
  const double g = std::exp(log_shape(rng));
  return {LinkFamily::weibull(g), LinkFamily::reflected_weibull(g), LinkFamily::logit(), LinkFamily::probit(),
          LinkFamily::cloglog(), LinkFamily::loglog()};
}

}  // namespace

TEST(LinkProperty, RoundtripOnOpenUnitInterval) {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> logit_mu(std::log(1e-9 / (1 - 1e-9)), std::log((1 - 1e-9) / 1e-9));
  for (int rep = 0; rep < 50; ++rep) {
    for (const auto& link : random_links(rng)) {
      for (int i = 0; i < 200; ++i) {
        const double mu = 1.0 / (1.0 + std::exp(-logit_mu(rng)));
        const double back = sl::inverse_link(link, sl::forward_link(link, mu));
        ASSERT_LT(std::fabs(back - mu), 1e-10) << link.name() << " gamma " << link.gamma() << " mu " << mu;
      }
    }
  }
}

TEST(LinkProperty, RoundtripAtIntervalEdges) {
  std::mt19937_64 rng(102);
  for (int rep = 0; rep < 20; ++rep)
    for (const auto& link : random_links(rng))
      for (double mu : {1e-9 * 1.0000001, 1.0 - 1e-9 * 1.0000001, 0.5})
        EXPECT_LT(std::fabs(sl::inverse_link(link, sl::forward_link(link, mu)) - mu), 1e-10) << link.name();
}

TEST(LinkProperty, MonotoneOnGrid) {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> log_shape(std::log(0.05), std::log(500.0));
  for (int rep = 0; rep < 50; ++rep) {
    const double g = std::exp(log_shape(rng));
    const LinkFamily w = LinkFamily::weibull(g), r = LinkFamily::reflected_weibull(g);
    double prev_w = -1.0, prev_r = 2.0;
    for (int i = 0; i < 1000; ++i) {
      const double eta = -1.0 + 4.0 * i / 999.0;
      const double mw = sl::inverse_link(w, eta), mr = sl::inverse_link(r, eta);
      ASSERT_GE(mw, prev_w) << "gamma " << g << " eta " << eta;
      ASSERT_LE(mr, prev_r) << "gamma " << g << " eta " << eta;
      prev_w = mw;
      prev_r = mr;
    }
  }
  for (const auto& link : {LinkFamily::logit(), LinkFamily::probit(), LinkFamily::cloglog(), LinkFamily::loglog()}) {
    double prev = -1.0;
    for (int i = 0; i < 1000; ++i) {
      const double mu = sl::inverse_link(link, -10.0 + 20.0 * i / 999.0);
      ASSERT_GE(mu, prev) << link.name();
      prev = mu;
    }
  }
}

TEST(LinkProperty, SkewnessAboveFloors) {
  for (int i = 0; i <= 400; ++i) {
    const double g = std::exp(std::log(0.05) + (std::log(500.0) - std::log(0.05)) * i / 400.0);
    EXPECT_GT(sl::moment_skewness(g), -1.1395) << g;
    EXPECT_GT(sl::ag_skewness(g), -0.26424) << g;
  }
}

TEST(LinkProperty, ApproximantsWithinTwoHundredthsOnGrid) {
  double sup_probit = 0.0, sup_logit = 0.0;
  for (int i = 0; i <= 6000; ++i) {
    const double eta = -3.0 + 6.0 * i / 6000.0;
    sup_probit = std::max(sup_probit, std::fabs(sl::probit_approximant(eta) - sl::normal_cdf(eta)));
  }
  for (int i = 0; i <= 8000; ++i) {
    const double eta = -4.0 + 8.0 * i / 8000.0;
    sup_logit = std::max(sup_logit, std::fabs(sl::logit_approximant(eta) - 1.0 / (1.0 + std::exp(-eta))));
  }
  EXPECT_LT(sup_probit, 0.02);
  EXPECT_LT(sup_logit, 0.02);
}

TEST(LinkProperty, CloglogGapShrinksWithShape) {
  for (double eta : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
    const double a = sl::cloglog_limit_gap(eta, 1e2), b = sl::cloglog_limit_gap(eta, 1e3),
                 c = sl::cloglog_limit_gap(eta, 1e4);
    EXPECT_LT(c, 1e-3) << eta;
    if (eta == 0.0) {
      // (1 + 0/gamma)^gamma = e^0 for every shape: the limit is attained.
      EXPECT_EQ(a, 0.0);
      EXPECT_EQ(b, 0.0);
      EXPECT_EQ(c, 0.0);
      continue;
    }
    EXPECT_GT(a, b) << eta;
    EXPECT_GT(b, c) << eta;
  }
}
