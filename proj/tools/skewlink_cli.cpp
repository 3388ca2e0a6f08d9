// skewlink: fit skewed-link binomial and multinomial regressions from the
// command line. See README.md for examples.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "skewlink/cli.hpp"

namespace {

struct Flags {
  std::string data;
  std::string link = "weibull";
  std::string links;
  double gamma_fixed = 0.0;
  std::string covariates;
  std::string success = "s";
  std::string trials = "t";
  std::string counts;
  std::vector<std::string> scale;
  std::string method = "mle";
  std::string prior = "hierarchical";
  double c = 2.0;
  double v_gamma = 100.0;
  double v_beta = 25.0;
  double m_gamma = 0.0;
  std::vector<double> m_beta;
  bool eb = false;
  std::uint64_t seed = 0;
  int burn = 10000;
  int keep = 50000;
  int thin = 5;
  std::string out;
  std::string format = "text";
  std::string chain;
  std::string predictions;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto pos = s.find(',', start);
    auto item = s.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
    if (!item.empty()) out.push_back(item);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--data", f.data, "CSV path or builtin dataset (finney1947, grazeffe2008)");
  cmd->add_option("--covariates", f.covariates, "comma-separated covariate terms, e.g. dose,dose^2");
  cmd->add_option("--success", f.success, "success column (binomial CSV)");
  cmd->add_option("--trials", f.trials, "trial column (binomial CSV)");
  cmd->add_option("--counts", f.counts, "comma-separated count columns (multinomial CSV)");
  cmd->add_option("--scale", f.scale, "divide a raw column before use, COLUMN=DIVISOR (repeatable)");
  cmd->add_option("--gamma-fixed", f.gamma_fixed, "hold the Weibull shape fixed");
  cmd->add_option("--method", f.method, "mle or bayes");
  cmd->add_option("--prior", f.prior, "hierarchical or noninf");
  cmd->add_option("--c", f.c, "exponent of the noninformative prior (> 1)");
  cmd->add_option("--v-gamma", f.v_gamma, "variance of the gamma prior on the shape");
  cmd->add_option("--v-beta", f.v_beta, "variance of the normal prior on each coefficient");
  cmd->add_option("--m-gamma", f.m_gamma, "mean of the gamma prior on the shape");
  cmd->add_option("--m-beta", f.m_beta, "means of the coefficient priors")->delimiter(',');
  cmd->add_flag("--eb", f.eb, "estimate the prior means by Monte Carlo EM");
  cmd->add_option("--seed", f.seed, "random seed (required for MCMC runs)");
  cmd->add_option("--burn", f.burn, "burn-in iterations");
  cmd->add_option("--keep", f.keep, "kept draws");
  cmd->add_option("--thin", f.thin, "thinning interval");
  cmd->add_option("--out", f.out, "write the report here instead of stdout");
  cmd->add_option("--format", f.format, "text, csv or json");
  cmd->add_option("--chain", f.chain, "write kept MCMC draws as CSV");
  cmd->add_option("--predictions", f.predictions, "write observed and predicted cells as CSV");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"skewlink: binomial and multinomial regression with skewed Weibull links"};
  app.require_subcommand(1);
  Flags f;

  auto* fit = app.add_subcommand("fit", "maximum-likelihood fit of a binomial model");
  auto* bayes = app.add_subcommand("bayes", "posterior sample of a binomial model");
  auto* multi = app.add_subcommand("multinomial", "continuation-ratio fit of a multinomial model");
  auto* comp = app.add_subcommand("compare", "compare links on one dataset");
  auto* repro = app.add_subcommand("reproduce", "refit a builtin dataset and check reference results");
  for (auto* cmd : {fit, bayes, multi})
    cmd->add_option("--link", f.link, "weibull, rweibull, logit, probit, cloglog, loglog");
  comp->add_option("--links", f.links, "comma-separated links")->required();
  repro->add_option("target", f.data, "finney1947 or grazeffe2008");
  for (auto* cmd : {fit, bayes, multi, comp, repro}) add_common(cmd, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : skewlink::cli::kExitError;
  }

  namespace sc = skewlink::cli;
  sc::RunConfig cfg;
  try {
    const auto* sub = app.get_subcommands().front();
    cfg.command = sc::parse_command(sub->get_name());
    cfg.data = f.data;
    cfg.links = cfg.command == sc::Command::compare ? split_list(f.links) : std::vector<std::string>{f.link};
    if (sub->count("--gamma-fixed")) cfg.gamma_fixed = f.gamma_fixed;
    cfg.covariates = split_list(f.covariates);
    cfg.success_col = f.success;
    cfg.trial_col = f.trials;
    cfg.count_cols = split_list(f.counts);
    cfg.scale = sc::parse_scale(f.scale);
    cfg.method = sc::parse_method(f.method);
    cfg.prior = sc::parse_prior(f.prior);
    cfg.c = f.c;
    cfg.v_gamma = f.v_gamma;
    cfg.v_beta = f.v_beta;
    if (sub->count("--m-gamma")) cfg.m_gamma = f.m_gamma;
    cfg.m_beta = f.m_beta;
    cfg.empirical_bayes = f.eb;
    if (sub->count("--seed")) cfg.seed = f.seed;
    cfg.burn = f.burn;
    cfg.keep = f.keep;
    cfg.thin = f.thin;
    cfg.format = sc::parse_format(f.format);
    if (!f.out.empty()) cfg.out = f.out;
    if (!f.chain.empty()) cfg.chain_out = f.chain;
    if (!f.predictions.empty()) cfg.predictions_out = f.predictions;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return sc::kExitError;
  }
  return sc::run(cfg, std::cout, std::cerr);
}
