#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "skewlink/bayes.hpp"
#include "test_support.hpp"

namespace sl = skewlink;
namespace st = skewlink::testing;
using sl::LinkFamily;

namespace {

sl::McmcOptions short_chain(std::uint64_t seed) {
  sl::McmcOptions o;
  o.seed = seed;
  o.n_burn = 300;
  o.n_keep = 500;
  o.thin = 1;
  return o;
}

sl::PosteriorChain constant_chain(const sl::ParamVector& p, std::size_t n) {
  sl::PosteriorChain c;
  c.dim = p.size();
  c.names = sl::chain_names(p.beta.size(), true);
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = p.packed();
    c.draws.insert(c.draws.end(), v.begin(), v.end());
  }
  return c;
}

}  // namespace

TEST(BayesProperty, SeedDeterminismAndIsolation) {
  std::mt19937_64 rng(401);
  for (int k = 0; k < 5; ++k) {
    const auto p = st::random_weibull_problem(rng, 6, 1);
    const auto prior = sl::PriorSpec::hierarchical(3.0, 10.0, {0.0, 0.0}, 25.0);
    auto o = short_chain(1000 + k);
    o.start = sl::ParamVector{p.gamma, p.beta};
    const auto a = sl::run_mcmc(p.data, LinkFamily::weibull(1.0), prior, o);
    const auto b = sl::run_mcmc(p.data, LinkFamily::weibull(1.0), prior, o);
    o.seed += 1;
    const auto c = sl::run_mcmc(p.data, LinkFamily::weibull(1.0), prior, o);
    EXPECT_EQ(a.draws, b.draws);
    EXPECT_EQ(a.proposal_scales, b.proposal_scales);
    EXPECT_NE(a.draws, c.draws);
  }
}

TEST(BayesProperty, StandardNormalTarget) {
  sl::McmcOptions o;
  o.seed = 402;
  o.n_keep = 50000;
  const auto chain = sl::metropolis([](const std::vector<double>& x) { return -0.5 * x[0] * x[0]; },
                                    std::vector<double>{3.0}, o);
  ASSERT_EQ(chain.size(), 50000u);
  double sum = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < chain.size(); ++i) sum += chain.at(i, 0);
  const double m = sum / static_cast<double>(chain.size());
  for (std::size_t i = 0; i < chain.size(); ++i) sq += (chain.at(i, 0) - m) * (chain.at(i, 0) - m);
  const double sd = std::sqrt(sq / static_cast<double>(chain.size()));
  EXPECT_LT(std::fabs(m), 0.05);
  EXPECT_GE(sd, 0.93);
  EXPECT_LE(sd, 1.07);
  EXPECT_GT(chain.acceptance_rate, 0.25);
  EXPECT_LT(chain.acceptance_rate, 0.5);
}

TEST(BayesProperty, DrawsRespectPriorSupport) {
  std::mt19937_64 rng(403);
  for (int k = 0; k < 4; ++k) {
    const auto p = st::random_weibull_problem(rng, 6, 1);
    auto o = short_chain(2000 + k);
    o.start = sl::ParamVector{p.gamma + 1.0, p.beta};
    const auto hier = sl::run_mcmc(p.data, LinkFamily::weibull(1.0),
                                   sl::PriorSpec::hierarchical(3.0, 10.0, {0.0, 0.0}, 25.0), o);
    const auto noninf = sl::run_mcmc(p.data, LinkFamily::weibull(1.0), sl::PriorSpec::noninformative(2.0), o);
    for (std::size_t i = 0; i < hier.size(); ++i) ASSERT_GT(hier.at(i, 0), 0.0);
    for (std::size_t i = 0; i < noninf.size(); ++i) ASSERT_GT(noninf.at(i, 0), 1.0);
    EXPECT_GT(hier.acceptance_rate, 0.0);
    EXPECT_LT(hier.acceptance_rate, 1.0);
  }
}

TEST(BayesProperty, IdenticalDrawDicEqualsPluginDeviance) {
  std::mt19937_64 rng(404);
  for (int k = 0; k < 20; ++k) {
    const auto p = st::random_weibull_problem(rng);
    const sl::ParamVector theta{p.gamma, p.beta};
    const auto chain = constant_chain(theta, 5);
    const auto r = sl::dic(chain, p.data, LinkFamily::weibull(1.0), sl::DicPlugin::natural_scale);
    EXPECT_EQ(r.dic, r.plugin_deviance);
    EXPECT_EQ(r.p_d, 0.0);
  }
}
