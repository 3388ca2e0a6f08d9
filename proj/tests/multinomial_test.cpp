#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "skewlink/datasets.hpp"
#include "skewlink/multinomial.hpp"
#include "skewlink/reference.hpp"

namespace sl = skewlink;
namespace ref = skewlink::reference;
using sl::LinkFamily;

namespace {

const sl::MultinomialDataset& snails() {
  static const auto data = sl::datasets::grazeffe2008();
  return data;
}

const ref::MultinomialCriteria& criteria(std::string_view link) {
  for (const auto& c : ref::kGrazeffeMle)
    if (c.link == link) return c;
  throw std::logic_error("no reference row");
}

sl::MultinomialDataset single_row(std::vector<std::int64_t> counts) {
  sl::MultinomialDataset d;
  d.covariate_names = {"(Intercept)"};
  for (std::size_t k = 0; k < counts.size(); ++k) d.category_labels.push_back("c" + std::to_string(k + 1));
  d.rows.push_back({{1.0}, std::move(counts)});
  return d;
}

}  // namespace

TEST(Decompose, DoseZeroRowOfSnailData) {
  const auto parts = sl::decompose(snails());
  ASSERT_EQ(parts.size(), 3u);
  EXPECT_EQ(parts[0].rows[0].successes, 654);
  EXPECT_EQ(parts[0].rows[0].trials, 1100);
  EXPECT_EQ(parts[1].rows[0].successes, 125);
  EXPECT_EQ(parts[1].rows[0].trials, 446);
  EXPECT_EQ(parts[2].rows[0].successes, 72);
  EXPECT_EQ(parts[2].rows[0].trials, 321);
}

TEST(Decompose, TwoCategoriesGiveTheBinomialData) {
  const auto parts = sl::decompose(single_row({3, 7}));
  ASSERT_EQ(parts.size(), 1u);
  EXPECT_EQ(parts[0].rows[0].successes, 3);
  EXPECT_EQ(parts[0].rows[0].trials, 10);
}

TEST(Decompose, AllMassInLastCategory) {
  const auto parts = sl::decompose(single_row({0, 0, 0, 5}));
  for (const auto& p : parts) {
    ASSERT_EQ(p.rows.size(), 1u);
    EXPECT_EQ(p.rows[0].successes, 0);
    EXPECT_EQ(p.rows[0].trials, 5);
  }
}

TEST(Decompose, DropsRowsWithNobodyAtRisk) {
  const auto parts = sl::decompose(single_row({4, 0, 0}));
  EXPECT_EQ(parts[0].rows.size(), 1u);
  EXPECT_TRUE(parts[1].rows.empty());
}

TEST(Decompose, RejectsNegativeCounts) { EXPECT_THROW(sl::decompose(single_row({4, -1, 2})), std::invalid_argument); }

TEST(Reparameterization, CascadeExamples) {
  const std::vector<double> half{0.5, 0.5, 0.5};
  const auto p = sl::theta_to_p(half);
  ASSERT_EQ(p.size(), 4u);
  EXPECT_EQ(p[0], 0.5);
  EXPECT_EQ(p[1], 0.25);
  EXPECT_EQ(p[2], 0.125);
  EXPECT_EQ(p[3], 0.125);
  const std::vector<double> absorbing{1.0, 0.3, 0.7};
  const auto q = sl::theta_to_p(absorbing);
  EXPECT_EQ(q, (std::vector<double>{1.0, 0.0, 0.0, 0.0}));
}

TEST(Reparameterization, InverseOfCascade) {
  const std::vector<double> p{0.1, 0.2, 0.3, 0.4};
  const auto theta = sl::p_to_theta(p);
  EXPECT_NEAR(theta[0], 0.1, 1e-15);
  EXPECT_NEAR(theta[1], 0.2 / 0.9, 1e-15);
  EXPECT_NEAR(theta[2], 0.3 / 0.7, 1e-15);
  const auto back = sl::theta_to_p(theta);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(back[k], p[k], 1e-15);
}

TEST(FitMultinomial, LogitOnSnailData) {
  const auto fit = sl::fit_multinomial(snails(), LinkFamily::logit());
  ASSERT_TRUE(fit.converged);
  const auto m = sl::multinomial_metrics(fit, snails());
  // Three coefficients per component, no shape.
  EXPECT_EQ(m.n_params, 9);
  const auto& c = criteria("logit");
  EXPECT_NEAR(m.aic, c.aic, 2.0);
  EXPECT_NEAR(m.ks, c.ks, 0.01);
  EXPECT_NEAR(m.mae, c.mae, 0.003);
}

TEST(FitMultinomial, ReflectedWeibullOnSnailData) {
  const auto fit = sl::fit_multinomial(snails(), LinkFamily::reflected_weibull(1.0));
  ASSERT_TRUE(fit.converged) << (fit.failures.empty() ? "" : fit.failures.front());
  ASSERT_EQ(fit.sub_fits.size(), 3u);
  // The first shape is well identified and matches the reference order of
  // magnitude. The other two sit on near-flat likelihood ridges: holding the
  // shape at the reference value costs less than a quarter of a log-likelihood unit.
  const double ref_gamma[3] = {0.1742, 2.3604, 1.7562};
  ASSERT_TRUE(fit.sub_fits[0].gamma.has_value());
  EXPECT_GT(*fit.sub_fits[0].gamma, ref_gamma[0] / 10);
  EXPECT_LT(*fit.sub_fits[0].gamma, ref_gamma[0] * 10);
  const auto parts = sl::decompose(snails());
  for (std::size_t k = 1; k < 3; ++k) {
    ASSERT_TRUE(fit.sub_fits[k].gamma.has_value());
    EXPECT_GT(*fit.sub_fits[k].gamma, ref_gamma[k] / 10) << k;
    sl::FitOptions held;
    held.fixed_gamma = ref_gamma[k];
    held.compute_standard_errors = false;
    const auto at_ref = sl::fit_mle(parts[k], LinkFamily::reflected_weibull(1.0), held);
    EXPECT_GE(at_ref.log_lik, fit.sub_fits[k].log_lik - 0.25) << k;
    EXPECT_LE(at_ref.log_lik, fit.sub_fits[k].log_lik + 1e-6) << k;
  }
  const auto m = sl::multinomial_metrics(fit, snails());
  EXPECT_EQ(m.n_params, 12);
  EXPECT_LE(m.aic, 11340.0);
  EXPECT_LE(m.ks, 0.04);
  EXPECT_LE(m.mae, 0.012);
  for (std::size_t r = 0; r < ref::kGrazeffeDoses.size(); ++r) {
    const double dose = ref::kGrazeffeDoses[r];
    const std::vector<double> x{1.0, dose, dose * dose};
    const auto p = sl::category_probs(fit, x);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(p[k], ref::kGrazeffeWeibullFitted[r][k], 0.02) << dose << ' ' << k;
  }
}

TEST(FitMultinomial, ProbabilitiesSumToOne) {
  const auto fit = sl::fit_multinomial(snails(), LinkFamily::reflected_weibull(1.0));
  for (double dose = 0.0; dose <= 20.0; dose += 0.5) {
    const std::vector<double> x{1.0, dose, dose * dose};
    const auto p = sl::category_probs(fit, x);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
  }
}

TEST(FitMultinomial, LikelihoodFactorizesOverSubFits) {
  for (auto link : {LinkFamily::logit(), LinkFamily::reflected_weibull(1.0)}) {
    const auto fit = sl::fit_multinomial(snails(), link);
    const auto m = sl::multinomial_metrics(fit, snails());
    double sum = 0.0;
    for (const auto& f : fit.sub_fits) sum += f.log_lik;
    EXPECT_NEAR(m.log_lik, sum, 1e-9) << link.name();
  }
}

TEST(FitMultinomial, TwoCategoriesReduceToBinomialFit) {
  const auto bin = sl::datasets::finney1947();
  sl::MultinomialDataset d;
  d.covariate_names = bin.covariate_names;
  d.category_labels = {"dead", "alive"};
  for (const auto& r : bin.rows) d.rows.push_back({r.x, {r.successes, r.trials - r.successes}});
  const auto multi = sl::fit_multinomial(d, LinkFamily::probit());
  const auto direct = sl::fit_mle(bin, LinkFamily::probit());
  ASSERT_EQ(multi.sub_fits.size(), 1u);
  EXPECT_EQ(multi.sub_fits[0].beta, direct.beta);
  EXPECT_EQ(multi.sub_fits[0].log_lik, direct.log_lik);
}

TEST(FitMultinomial, PerfectFitHasZeroDiscrepancy) {
  // One covariate pattern: the intercept-only fit reproduces the observed frequencies.
  const auto d = single_row({30, 20, 50});
  const auto fit = sl::fit_multinomial(d, LinkFamily::logit());
  const auto m = sl::multinomial_metrics(fit, d);
  EXPECT_NEAR(m.ks, 0.0, 1e-6);
  EXPECT_NEAR(m.mae, 0.0, 1e-6);
  const std::vector<double> obs{0.3, 0.2, 0.5};
  const auto exact = sl::ks_mae(obs, obs);
  EXPECT_EQ(exact.ks, 0.0);
  EXPECT_EQ(exact.mae, 0.0);
}

TEST(FitMultinomial, ComponentFailureIsReported) {
  sl::MultinomialDataset d;
  d.covariate_names = {"(Intercept)", "x"};
  d.category_labels = {"a", "b", "c"};
  // The second component is perfectly separated in x.
  d.rows = {{{1.0, -1.0}, {5, 0, 5}}, {{1.0, 0.0}, {5, 0, 5}}, {{1.0, 1.0}, {5, 5, 0}}, {{1.0, 2.0}, {5, 5, 0}}};
  const auto fit = sl::fit_multinomial(d, LinkFamily::logit());
  EXPECT_FALSE(fit.converged);
  ASSERT_FALSE(fit.failures.empty());
  EXPECT_NE(fit.failures.front().find("theta_2"), std::string::npos);
}

TEST(FitMultinomial, BayesMethodRunsOneChainPerComponent) {
  sl::MultinomialOptions opt;
  opt.prior = sl::PriorSpec::hierarchical(1.0, 1.0, {0.0, 0.0, 0.0}, 25.0);
  opt.mcmc.seed = 5;
  opt.mcmc.n_burn = 500;
  opt.mcmc.n_keep = 1000;
  opt.mcmc.thin = 1;
  const auto fit = sl::fit_multinomial(snails(), LinkFamily::logit(), sl::FitMethod::bayes, opt);
  ASSERT_TRUE(fit.converged);
  ASSERT_EQ(fit.chains.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(fit.chains[k].seed, 5u + k);
  const auto again = sl::fit_multinomial(snails(), LinkFamily::logit(), sl::FitMethod::bayes, opt);
  EXPECT_EQ(fit.chains[2].draws, again.chains[2].draws);
  const auto mle = sl::fit_multinomial(snails(), LinkFamily::logit());
  const auto m_bayes = sl::multinomial_metrics(fit, snails());
  const auto m_mle = sl::multinomial_metrics(mle, snails());
  EXPECT_NEAR(m_bayes.log_lik, m_mle.log_lik, 10.0);
}
