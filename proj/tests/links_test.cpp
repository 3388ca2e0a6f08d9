#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "skewlink/links.hpp"

namespace sl = skewlink;
using sl::LinkFamily;

TEST(LinkFamily, RejectsNonPositiveShape) {
  EXPECT_THROW(LinkFamily::weibull(0.0), std::invalid_argument);
  EXPECT_THROW(LinkFamily::weibull(-1.0), std::invalid_argument);
  EXPECT_THROW(LinkFamily::reflected_weibull(0.0), std::invalid_argument);
  EXPECT_NO_THROW(LinkFamily::logit());
}

TEST(LinkFamily, FromName) {
  EXPECT_EQ(LinkFamily::from_name("rweibull", 2.0), LinkFamily::reflected_weibull(2.0));
  EXPECT_EQ(LinkFamily::from_name("cloglog").kind(), sl::LinkKind::cloglog);
  EXPECT_THROW(LinkFamily::from_name("stukel"), std::invalid_argument);
}

TEST(InverseLink, WeibullExamples) {
  EXPECT_NEAR(sl::inverse_link(LinkFamily::weibull(1.0), 1.0), 1.0 - std::exp(-1.0), 1e-15);
  EXPECT_EQ(sl::inverse_link(LinkFamily::weibull(2.5), 0.0), 0.0);
  EXPECT_EQ(sl::inverse_link(LinkFamily::weibull(2.5), -3.0), 0.0);
  EXPECT_EQ(sl::inverse_link(LinkFamily::reflected_weibull(3.0), -0.5), 1.0);
}

TEST(InverseLink, ProbitMatchingShapeNearHalfAtZero) {
  const double eta = sl::constants::probit_approx_intercept + sl::constants::probit_approx_slope * 0.0;
  EXPECT_NEAR(sl::inverse_link(LinkFamily::weibull(sl::constants::probit_approx_shape), eta), 0.5, 0.005);
}

TEST(InverseLink, StandardForms) {
  EXPECT_NEAR(sl::inverse_link(LinkFamily::logit(), 0.7), 1.0 / (1.0 + std::exp(-0.7)), 1e-15);
  EXPECT_NEAR(sl::inverse_link(LinkFamily::probit(), 1.0), 0.5 * std::erfc(-1.0 / std::sqrt(2.0)), 1e-15);
  EXPECT_NEAR(sl::inverse_link(LinkFamily::cloglog(), 0.3), 1.0 - std::exp(-std::exp(0.3)), 1e-15);
  EXPECT_NEAR(sl::inverse_link(LinkFamily::loglog(), 0.3), std::exp(-std::exp(-0.3)), 1e-15);
}

TEST(InverseLink, ExtremeArgumentsStayInUnitInterval) {
  for (auto link : {LinkFamily::weibull(0.3), LinkFamily::weibull(50.0), LinkFamily::reflected_weibull(7.0),
                    LinkFamily::logit(), LinkFamily::probit(), LinkFamily::cloglog(), LinkFamily::loglog()})
    for (double eta : {-1e6, -40.0, -1e-300, 0.0, 1e-300, 40.0, 1e6}) {
      const double mu = sl::inverse_link(link, eta);
      EXPECT_GE(mu, 0.0);
      EXPECT_LE(mu, 1.0);
    }
}

TEST(LogProbs, WeibullComplementIsExact) {
  const auto lp = sl::log_probs(LinkFamily::weibull(2.0), 30.0);
  EXPECT_DOUBLE_EQ(lp.log_one_minus_mu, -900.0);
  EXPECT_NEAR(lp.log_mu, -std::exp(-900.0), 1e-300);
}

TEST(ForwardLink, Examples) {
  EXPECT_NEAR(sl::forward_link(LinkFamily::weibull(2.0), 0.5), 0.832554611157697756353164644895, 1e-15);
  EXPECT_NEAR(sl::forward_link(LinkFamily::weibull(1.0), 1.0 - std::exp(-1.0)), 1.0, 1e-15);
  EXPECT_NEAR(sl::forward_link(LinkFamily::logit(), 0.5), 0.0, 1e-15);
  EXPECT_THROW(sl::forward_link(LinkFamily::logit(), 0.0), std::domain_error);
  EXPECT_THROW(sl::forward_link(LinkFamily::weibull(2.0), 1.0), std::domain_error);
  EXPECT_THROW(sl::forward_link(LinkFamily::probit(), -0.1), std::domain_error);
}

TEST(ForwardLink, RoundtripAllKinds) {
  for (auto link : {LinkFamily::weibull(0.7), LinkFamily::weibull(3.6), LinkFamily::reflected_weibull(1.9),
                    LinkFamily::logit(), LinkFamily::probit(), LinkFamily::cloglog(), LinkFamily::loglog()})
    for (double mu : {1e-6, 0.01, 0.3, 0.5, 0.77, 0.999}) EXPECT_NEAR(sl::inverse_link(link, sl::forward_link(link, mu)), mu, 1e-12);
}

TEST(LinkDensity, Examples) {
  EXPECT_NEAR(sl::link_density(LinkFamily::weibull(1.0), 1.0), std::exp(-1.0), 1e-15);
  EXPECT_EQ(sl::link_density(LinkFamily::weibull(2.0), 0.0), 0.0);
}

TEST(LinkDensity, CentralDifferenceAtRandomPoints) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> shape(0.3, 8.0), pos(0.05, 2.5), any(-4.0, 4.0);
  const double h = 1e-5;
  for (int k = 0; k < 20; ++k) {
    const double g = shape(rng);
    for (auto link : {LinkFamily::weibull(g), LinkFamily::reflected_weibull(g)}) {
      const double eta = pos(rng);
      const double fd = std::fabs(sl::inverse_link(link, eta + h) - sl::inverse_link(link, eta - h)) / (2 * h);
      EXPECT_NEAR(sl::link_density(link, eta), fd, 1e-6 * std::max(fd, 1e-3)) << link.name() << ' ' << g << ' ' << eta;
    }
    for (auto link : {LinkFamily::logit(), LinkFamily::probit(), LinkFamily::cloglog(), LinkFamily::loglog()}) {
      const double eta = any(rng);
      const double fd = (sl::inverse_link(link, eta + h) - sl::inverse_link(link, eta - h)) / (2 * h);
      EXPECT_NEAR(sl::link_density(link, eta), fd, 1e-6 * std::max(fd, 1e-3)) << link.name() << ' ' << eta;
    }
  }
}

TEST(Skewness, MomentExamples) {
  EXPECT_NEAR(sl::moment_skewness(1.0), 2.0, 1e-12);
  EXPECT_LT(std::fabs(sl::moment_skewness(sl::constants::probit_approx_shape)), 0.01);
  EXPECT_NEAR(sl::moment_skewness(200.0), -1.1395, 0.05);
}

TEST(Skewness, AtMostTwoForShapeAtLeastOne) {
  for (double g = 1.0; g <= 400.0; g *= 1.3) EXPECT_LE(sl::moment_skewness(g), 2.0 + 1e-12) << g;
}

TEST(Skewness, ArnoldGroeneveldExamples) {
  EXPECT_DOUBLE_EQ(sl::ag_skewness(1.0), 1.0);
  EXPECT_NEAR(sl::ag_skewness(200.0), -0.26424, 1e-2);
  EXPECT_NEAR(sl::ag_skewness(0.5), 4.43656365691809047072057494271, 1e-14);
  const auto rep = sl::skewness_report(2.0);
  EXPECT_EQ(rep.gamma, 2.0);
  EXPECT_EQ(rep.ag_skewness, sl::ag_skewness(2.0));
}

TEST(CloglogLimitGap, Examples) {
  EXPECT_NEAR(sl::cloglog_limit_gap(0.0, 3.0), 0.0, 1e-16);
  EXPECT_NEAR(sl::cloglog_limit_gap(0.0, 1e5), 0.0, 1e-16);
  EXPECT_LT(sl::cloglog_limit_gap(1.0, 1e4), 1e-3);
  EXPECT_LT(sl::cloglog_limit_gap(-2.0, 1e6), 1e-4);
  EXPECT_THROW(sl::cloglog_limit_gap(-5.0, 5.0), std::domain_error);
  EXPECT_THROW(sl::cloglog_limit_gap(-6.0, 5.0), std::domain_error);
}

TEST(Approximants, ClampedBelowThreshold) {
  EXPECT_EQ(sl::probit_approximant(-10.0), 0.0);
  EXPECT_GT(sl::probit_approximant(0.0), 0.0);
}
