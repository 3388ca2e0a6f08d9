#ifndef SKEWLINK_CLI_HPP
#define SKEWLINK_CLI_HPP

// Command pipelines behind the `skewlink` tool. run() never throws: load and
// configuration errors map to exit code 1, non-convergence to 2.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "skewlink/bayes.hpp"
#include "skewlink/datasets.hpp"
#include "skewlink/io.hpp"
#include "skewlink/links.hpp"
#include "skewlink/mle.hpp"
#include "skewlink/model_selection.hpp"
#include "skewlink/multinomial.hpp"
#include "skewlink/parallel.hpp"
#include "skewlink/reference.hpp"

namespace skewlink::cli {

using Json = nlohmann::ordered_json;

enum class Command { fit, bayes, multinomial, compare, reproduce };
enum class OutputFormat { text, csv, json };

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotConverged = 2;

/// Seed used by `reproduce` when none is given.
inline constexpr std::uint64_t kReproduceSeed = 20240101;

struct RunConfig {
  Command command = Command::fit;
  /// CSV path or builtin name (finney1947, grazeffe2008).
  std::string data;
  std::vector<std::string> links{"weibull"};
  std::optional<double> gamma_fixed;
  /// Covariate terms ("dose", "dose^2"); builtins supply defaults.
  std::vector<std::string> covariates;
  std::string success_col = "s";
  std::string trial_col = "t";
  /// Count columns; a nonempty list selects the multinomial reader.
  std::vector<std::string> count_cols;
  ColumnScale scale;

  FitMethod method = FitMethod::mle;
  PriorKind prior = PriorKind::hierarchical;
  double c = 2.0;
  double v_gamma = reference::kFinneyVGamma;
  double v_beta = reference::kFinneyVBeta;
  std::optional<double> m_gamma;
  std::vector<double> m_beta;
  bool empirical_bayes = false;
  std::optional<std::uint64_t> seed;
  int burn = 10000;
  int keep = 50000;
  int thin = 5;

  OutputFormat format = OutputFormat::text;
  std::optional<std::string> out;
  /// Kept draws as CSV (bayes).
  std::optional<std::string> chain_out;
  /// Predicted-vs-observed cells as CSV.
  std::optional<std::string> predictions_out;

  bool uses_mcmc() const {
    return command == Command::bayes ||
           (method == FitMethod::bayes && (command == Command::multinomial || command == Command::compare));
  }

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const {
    if (data.empty()) throw std::invalid_argument("no data source given (--data PATH or a builtin name)");
    if (links.empty()) throw std::invalid_argument("no link given");
    if (uses_mcmc() && !seed) throw std::invalid_argument("MCMC runs need an explicit --seed");
    if (burn < 0 || keep < 1 || thin < 1) throw std::invalid_argument("--burn must be >= 0, --keep and --thin >= 1");
    if (gamma_fixed && !(*gamma_fixed > 0.0)) throw std::invalid_argument("--gamma-fixed must be positive");
    if (empirical_bayes && prior != PriorKind::hierarchical)
      throw std::invalid_argument("--eb needs the hierarchical prior");
    if (command != Command::compare && command != Command::reproduce && links.size() != 1)
      throw std::invalid_argument("this command takes a single --link");
  }
};

inline Command parse_command(const std::string& s) {
  if (s == "fit") return Command::fit;
  if (s == "bayes") return Command::bayes;
  if (s == "multinomial") return Command::multinomial;
  if (s == "compare") return Command::compare;
  if (s == "reproduce") return Command::reproduce;
  throw std::invalid_argument("unknown command '" + s + "'");
}

inline OutputFormat parse_format(const std::string& s) {
  if (s == "text") return OutputFormat::text;
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw std::invalid_argument("unknown format '" + s + "' (text, csv, json)");
}

inline FitMethod parse_method(const std::string& s) {
  if (s == "mle") return FitMethod::mle;
  if (s == "bayes") return FitMethod::bayes;
  throw std::invalid_argument("unknown method '" + s + "' (mle, bayes)");
}

inline PriorKind parse_prior(const std::string& s) {
  if (s == "hierarchical") return PriorKind::hierarchical;
  if (s == "noninf" || s == "noninformative") return PriorKind::noninformative;
  throw std::invalid_argument("unknown prior '" + s + "' (hierarchical, noninf)");
}

/// "col=divisor" entries.
inline ColumnScale parse_scale(const std::vector<std::string>& items) {
  ColumnScale scale;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--scale expects COLUMN=DIVISOR, got '" + item + "'");
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument("trailing text");
    } catch (const std::exception&) {
      throw std::invalid_argument("--scale: bad divisor in '" + item + "'");
    }
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("--scale: divisor must be positive");
    scale[item.substr(0, eq)] = v;
  }
  return scale;
}

/// Link by name; Weibull kinds start at the probit-matching shape (the
/// estimate replaces it) unless a fixed shape is given.
inline LinkFamily make_link(const std::string& name, std::optional<double> gamma_fixed) {
  return LinkFamily::from_name(name, gamma_fixed.value_or(constants::probit_approx_shape));
}

// ---------------------------------------------------------------------------
// Data loading

inline void require_readable(const std::string& path) {
  if (!std::ifstream(path)) throw LoadError("cannot open data file '" + path + "'");
}

inline bool is_multinomial_source(const RunConfig& cfg) {
  return !cfg.count_cols.empty() || cfg.data == "grazeffe2008";
}

inline GroupedDataset load_binomial(const RunConfig& cfg) {
  if (cfg.data == "grazeffe2008")
    throw LoadError("grazeffe2008 is a multinomial dataset; use the multinomial command");
  if (cfg.data == "finney1947") {
    const auto layout = datasets::finney1947_layout();
    std::istringstream in{std::string(layout.csv)};
    return parse_binomial_csv(in, cfg.covariates.empty() ? layout.covariates : cfg.covariates, layout.success, layout.trials,
                              cfg.scale);
  }
  require_readable(cfg.data);
  if (cfg.covariates.empty()) throw LoadError("--covariates is required for CSV input");
  return parse_binomial_csv(cfg.data, cfg.covariates, cfg.success_col, cfg.trial_col, cfg.scale);
}

inline MultinomialDataset load_multinomial(const RunConfig& cfg) {
  if (cfg.data == "finney1947") throw LoadError("finney1947 is a binomial dataset");
  if (cfg.data == "grazeffe2008") {
    const auto layout = datasets::grazeffe2008_layout();
    std::istringstream in{std::string(layout.csv)};
    return parse_multinomial_csv(in, cfg.covariates.empty() ? layout.covariates : cfg.covariates,
                                 cfg.count_cols.empty() ? layout.counts : cfg.count_cols, cfg.scale);
  }
  require_readable(cfg.data);
  if (cfg.covariates.empty()) throw LoadError("--covariates is required for CSV input");
  if (cfg.count_cols.empty()) throw LoadError("--counts is required for multinomial CSV input");
  return parse_multinomial_csv(cfg.data, cfg.covariates, cfg.count_cols, cfg.scale);
}

// ---------------------------------------------------------------------------
// Report helpers

namespace detail {

inline Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json num(const std::optional<double>& v) { return v ? num(*v) : Json(nullptr); }

inline Json vec(const std::vector<double>& v) {
  auto a = Json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

inline std::string fixed(double v, int p) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(p) << v;
  return os.str();
}

inline std::string general(double v, int p = 6) {
  std::ostringstream os;
  os << std::setprecision(p) << v;
  return os.str();
}

}  // namespace detail

/// A computed quantity against a reference value.
struct ReferenceCheck {
  std::string name;
  double value = 0.0;
  double reference = 0.0;
  /// |value - reference| <= tolerance, or value <= reference when upper_bound.
  double tolerance = 0.0;
  bool upper_bound = false;

  bool ok() const {
    if (!std::isfinite(value)) return false;
    return upper_bound ? value <= reference : std::fabs(value - reference) <= tolerance;
  }
};

inline Json to_json(const ReferenceCheck& c) {
  Json j;
  j["name"] = c.name;
  j["value"] = detail::num(c.value);
  j["reference"] = c.reference;
  if (c.upper_bound)
    j["bound"] = "upper";
  else
    j["tolerance"] = c.tolerance;
  j["ok"] = c.ok();
  return j;
}

inline void write_checks_text(std::ostream& os, const std::vector<ReferenceCheck>& checks) {
  if (checks.empty()) return;
  os << "\nreference checks\n";
  for (const auto& c : checks) {
    os << "  " << (c.ok() ? "ok    " : "DIFFER") << "  " << std::left << std::setw(44) << c.name << std::right
       << std::setw(14) << detail::general(c.value, 7) << (c.upper_bound ? "  <= " : "  vs ") << std::setw(10)
       << detail::general(c.reference, 7);
    if (!c.upper_bound) os << "  +/- " << detail::general(c.tolerance, 3);
    os << '\n';
  }
}

inline Json settings_json(const RunConfig& cfg, const NelderMeadOptions& nm) {
  Json s;
  s["data"] = cfg.data;
  s["links"] = cfg.links;
  s["gamma_fixed"] = detail::num(cfg.gamma_fixed);
  s["covariates"] = cfg.covariates;
  Json scale = Json::object();
  for (const auto& [k, v] : cfg.scale) scale[k] = v;
  s["scale"] = scale;
  s["method"] = cfg.method == FitMethod::mle ? "mle" : "bayes";
  Json opt;
  opt["reflection"] = nm.reflection;
  opt["expansion"] = nm.expansion;
  opt["contraction"] = nm.contraction;
  opt["shrink"] = nm.shrink;
  opt["f_tol"] = nm.f_tol;
  opt["x_tol"] = nm.x_tol;
  opt["max_evals"] = nm.max_evals;
  opt["max_restarts"] = nm.max_restarts;
  opt["restart_perturbation"] = nm.restart_perturbation;
  s["optimizer"] = opt;
  if (cfg.uses_mcmc() || cfg.command == Command::reproduce) {
    Json m;
    m["seed"] = cfg.seed ? Json(*cfg.seed) : Json(nullptr);
    m["burn"] = cfg.burn;
    m["keep"] = cfg.keep;
    m["thin"] = cfg.thin;
    m["prior"] = cfg.prior == PriorKind::hierarchical ? "hierarchical" : "noninformative";
    if (cfg.prior == PriorKind::hierarchical) {
      m["v_gamma"] = cfg.v_gamma;
      m["v_beta"] = cfg.v_beta;
    } else {
      m["c"] = cfg.c;
    }
    m["empirical_bayes"] = cfg.empirical_bayes;
    s["mcmc"] = m;
  }
  return s;
}

inline Json fit_json(const FitResult& f, const GroupedDataset& data) {
  Json j;
  j["link"] = std::string(f.link.name());
  j["gamma"] = detail::num(f.gamma);
  Json beta = Json::object();
  for (std::size_t k = 0; k < f.beta.size(); ++k)
    beta[k < data.covariate_names.size() ? data.covariate_names[k] : "beta" + std::to_string(k)] = f.beta[k];
  j["beta"] = beta;
  j["parameter_names"] = f.parameter_names();
  j["std_errors"] = f.std_errors ? detail::vec(*f.std_errors) : Json(nullptr);
  j["se_diagnostic"] = f.se_diagnostic;
  j["condition_number"] = detail::num(f.condition_number);
  j["log_lik"] = detail::num(f.log_lik);
  j["n_obs"] = f.n_obs;
  j["n_params"] = f.n_params;
  j["aic"] = detail::num(aic(f.log_lik, f.n_params));
  j["bic"] = detail::num(bic(f.log_lik, f.n_params, f.n_obs));
  const auto km = ks_mae(data, f.fitted);
  j["ks"] = km.ks;
  j["mae"] = km.mae;
  j["converged"] = f.converged;
  j["boundary"] = f.boundary;
  j["n_evals"] = f.n_evals;
  j["restarts"] = f.restarts;
  j["message"] = f.message;
  j["fitted"] = detail::vec(f.fitted);
  return j;
}

inline void write_fit_text(std::ostream& os, const FitResult& f, const GroupedDataset& data) {
  os << "link: " << f.link.name() << "\n";
  os << std::left << std::setw(16) << "parameter" << std::right << std::setw(16) << "estimate" << std::setw(16)
     << "std.error" << '\n';
  const auto names = f.parameter_names();
  for (std::size_t k = 0; k < names.size(); ++k) {
    const double est = f.gamma ? (k == 0 ? *f.gamma : f.beta[k - 1]) : f.beta[k];
    const std::size_t b = f.gamma ? k - 1 : k;
    std::string label = names[k];
    if (!(f.gamma && k == 0) && b < data.covariate_names.size()) label = data.covariate_names[b];
    os << std::left << std::setw(16) << label << std::right << std::setw(16) << detail::general(est, 7)
       << std::setw(16) << (f.std_errors ? detail::general((*f.std_errors)[k], 5) : std::string("-")) << '\n';
  }
  const auto km = ks_mae(data, f.fitted);
  os << "logL " << detail::fixed(f.log_lik, 4) << "  AIC " << detail::fixed(aic(f.log_lik, f.n_params), 3) << "  BIC "
     << detail::fixed(bic(f.log_lik, f.n_params, f.n_obs), 3) << "  KS " << detail::fixed(km.ks, 4) << "  MAE "
     << detail::fixed(km.mae, 4) << '\n';
  os << "n_obs " << f.n_obs << "  n_params " << f.n_params << "  evaluations " << f.n_evals << "  converged "
     << (f.converged ? "yes" : "no") << '\n';
  if (!f.message.empty()) os << "note: " << f.message << '\n';
  if (!f.se_diagnostic.empty()) os << "standard errors: " << f.se_diagnostic << '\n';
}

inline void write_fit_csv(std::ostream& os, const FitResult& f, const GroupedDataset& data) {
  os << "name,value,std_error\n";
  const auto names = f.parameter_names();
  for (std::size_t k = 0; k < names.size(); ++k) {
    const double est = f.gamma ? (k == 0 ? *f.gamma : f.beta[k - 1]) : f.beta[k];
    os << names[k] << ',' << detail::general(est, 17) << ','
       << (f.std_errors ? detail::general((*f.std_errors)[k], 17) : std::string()) << '\n';
  }
  const auto km = ks_mae(data, f.fitted);
  os << "log_lik," << detail::general(f.log_lik, 17) << ",\n";
  os << "aic," << detail::general(aic(f.log_lik, f.n_params), 17) << ",\n";
  os << "bic," << detail::general(bic(f.log_lik, f.n_params, f.n_obs), 17) << ",\n";
  os << "ks," << detail::general(km.ks, 17) << ",\n";
  os << "mae," << detail::general(km.mae, 17) << ",\n";
  os << "converged," << (f.converged ? 1 : 0) << ",\n";
}

inline void write_binomial_predictions(const std::string& path, const GroupedDataset& data,
                                       const std::vector<double>& predicted) {
  std::ofstream os(path);
  if (!os) throw LoadError("cannot write '" + path + "'");
  os << "row,successes,trials,observed,predicted\n";
  for (std::size_t i = 0; i < data.size(); ++i)
    os << i + 1 << ',' << data.rows[i].successes << ',' << data.rows[i].trials << ','
       << detail::general(data.rows[i].proportion(), 17) << ',' << detail::general(predicted[i], 17) << '\n';
}

inline void write_multinomial_predictions(const std::string& path, const MultinomialDataset& data,
                                          const MultinomialMetrics& m) {
  std::ofstream os(path);
  if (!os) throw LoadError("cannot write '" + path + "'");
  os << "row,category,count,observed,predicted\n";
  for (std::size_t i = 0; i < data.rows.size(); ++i)
    for (std::size_t k = 0; k < data.n_categories(); ++k)
      os << i + 1 << ',' << data.category_labels[k] << ',' << data.rows[i].counts[k] << ','
         << detail::general(static_cast<double>(data.rows[i].counts[k]) / static_cast<double>(data.rows[i].total()), 17)
         << ',' << detail::general(m.fitted[i][k], 17) << '\n';
}

inline FitOptions fit_options(const RunConfig& cfg) {
  FitOptions o;
  o.fixed_gamma = cfg.gamma_fixed;
  return o;
}

inline McmcOptions mcmc_options(const RunConfig& cfg) {
  McmcOptions o;
  o.seed = cfg.seed.value_or(kReproduceSeed);
  o.n_burn = cfg.burn;
  o.n_keep = cfg.keep;
  o.thin = cfg.thin;
  return o;
}

inline PriorSpec prior_from(const RunConfig& cfg, std::size_t n_coef) {
  if (cfg.prior == PriorKind::noninformative) return PriorSpec::noninformative(cfg.c);
  std::vector<double> m_beta = cfg.m_beta.empty() ? std::vector<double>(n_coef, 0.0) : cfg.m_beta;
  if (m_beta.size() != n_coef)
    throw std::invalid_argument("--m-beta needs " + std::to_string(n_coef) + " values");
  return PriorSpec::hierarchical(cfg.m_gamma.value_or(constants::probit_approx_shape), cfg.v_gamma, m_beta,
                                 cfg.v_beta);
}

// ---------------------------------------------------------------------------
// Bayesian binomial pipeline, shared by `bayes` and `reproduce`

struct BayesRun {
  std::optional<EmpiricalBayesResult> eb;
  PriorSpec prior;
  PosteriorChain chain;
  std::vector<ParameterSummary> summary;
  DicResult dic;
  DicResult dic_natural;
  std::vector<double> predicted;
  KsMae fit;
};

inline BayesRun run_bayes(const GroupedDataset& data, const LinkFamily& link, const RunConfig& cfg) {
  BayesRun r;
  const auto mo = mcmc_options(cfg);
  r.prior = prior_from(cfg, data.n_coef());
  if (cfg.empirical_bayes) {
    EmpiricalBayesOptions eo;
    eo.mcmc = mo;
    eo.m_gamma_start = r.prior.m_gamma;
    eo.m_beta_start = r.prior.m_beta;
    r.eb = empirical_bayes(data, link, cfg.v_gamma, cfg.v_beta, eo);
    r.prior = PriorSpec::hierarchical(r.eb->m_gamma, cfg.v_gamma, r.eb->m_beta, cfg.v_beta);
  }
  McmcOptions final_opt = mo;
  // The EB iterations used seeds seed .. seed + iterations - 1.
  if (r.eb) final_opt.seed = mo.seed + static_cast<std::uint64_t>(r.eb->iterations);
  r.chain = run_mcmc(data, link, r.prior, final_opt);
  r.summary = posterior_summary(r.chain);
  r.dic = dic(r.chain, data, link, DicPlugin::sampler_scale);
  r.dic_natural = dic(r.chain, data, link, DicPlugin::natural_scale);
  r.predicted = posterior_predictive_means(r.chain, data, link);
  r.fit = ks_mae(data, r.predicted);
  return r;
}

inline Json bayes_json(const BayesRun& r, const GroupedDataset& data) {
  Json j;
  if (r.eb) {
    Json eb;
    eb["m_gamma"] = r.eb->m_gamma;
    eb["m_beta"] = r.eb->m_beta;
    eb["converged"] = r.eb->converged;
    eb["iterations"] = r.eb->iterations;
    eb["averaged_iterates"] = r.eb->averaged;
    auto tr = Json::array();
    for (const auto& row : r.eb->trace) tr.push_back(row);
    eb["trace"] = tr;
    j["empirical_bayes"] = eb;
  }
  Json prior;
  if (r.prior.kind == PriorKind::hierarchical) {
    prior["kind"] = "hierarchical";
    prior["m_gamma"] = r.prior.m_gamma;
    prior["v_gamma"] = r.prior.v_gamma;
    prior["m_beta"] = r.prior.m_beta;
    prior["v_beta"] = r.prior.v_beta;
  } else {
    prior["kind"] = "noninformative";
    prior["c"] = r.prior.c;
  }
  j["prior"] = prior;
  auto post = Json::array();
  for (const auto& s : r.summary) {
    Json p;
    p["name"] = s.name;
    p["mean"] = s.mean;
    p["sd"] = s.sd;
    p["q025"] = s.q025;
    p["q50"] = s.q50;
    p["q975"] = s.q975;
    post.push_back(p);
  }
  j["posterior"] = post;
  Json chain;
  chain["seed"] = r.chain.seed;
  chain["burn_in"] = r.chain.burn_in;
  chain["thin"] = r.chain.thin;
  chain["kept"] = r.chain.size();
  chain["acceptance_rate"] = r.chain.acceptance_rate;
  chain["proposal_scales"] = r.chain.proposal_scales;
  j["chain"] = chain;
  Json d;
  d["dic"] = r.dic.dic;
  d["p_d"] = r.dic.p_d;
  d["mean_deviance"] = r.dic.mean_deviance;
  d["plugin_deviance"] = r.dic.plugin_deviance;
  d["plugin"] = "posterior mean of (log gamma, beta)";
  d["p_d_flag"] = r.dic.p_d_flag;
  d["natural_scale_dic"] = r.dic_natural.dic;
  d["natural_scale_p_d"] = r.dic_natural.p_d;
  j["dic"] = d;
  j["ks"] = r.fit.ks;
  j["mae"] = r.fit.mae;
  j["n_obs"] = data.total_trials();
  j["predicted"] = r.predicted;
  return j;
}

inline void write_bayes_text(std::ostream& os, const BayesRun& r) {
  if (r.eb) {
    os << "empirical Bayes hyper-means after " << r.eb->iterations << " iterations ("
       << (r.eb->converged ? "converged" : "tolerance not met") << ", last " << r.eb->averaged << " averaged)\n";
    os << "  m_gamma " << detail::fixed(r.eb->m_gamma, 4) << "\n  m_beta ";
    for (double b : r.eb->m_beta) os << ' ' << detail::fixed(b, 4);
    os << '\n';
  }
  os << std::left << std::setw(10) << "parameter" << std::right << std::setw(12) << "mean" << std::setw(12) << "sd"
     << std::setw(12) << "2.5%" << std::setw(12) << "50%" << std::setw(12) << "97.5%" << '\n';
  for (const auto& s : r.summary)
    os << std::left << std::setw(10) << s.name << std::right << std::setw(12) << detail::fixed(s.mean, 4)
       << std::setw(12) << detail::fixed(s.sd, 4) << std::setw(12) << detail::fixed(s.q025, 4) << std::setw(12)
       << detail::fixed(s.q50, 4) << std::setw(12) << detail::fixed(s.q975, 4) << '\n';
  os << "DIC " << detail::fixed(r.dic.dic, 2) << "  p_D " << detail::fixed(r.dic.p_d, 2) << "  KS "
     << detail::fixed(r.fit.ks, 4) << "  MAE " << detail::fixed(r.fit.mae, 4) << '\n';
  os << "seed " << r.chain.seed << "  kept " << r.chain.size() << "  acceptance " << detail::fixed(r.chain.acceptance_rate, 3)
     << '\n';
  if (r.dic.p_d_flag) os << "warning: p_D below -0.5; the plug-in point fits poorly\n";
}

// ---------------------------------------------------------------------------
// Multinomial helpers

inline Json multinomial_json(const MultinomialFit& fit, const MultinomialDataset& data, const MultinomialMetrics& m) {
  Json j;
  j["link"] = std::string(fit.link.name());
  j["method"] = fit.method == FitMethod::mle ? "mle" : "bayes";
  j["converged"] = fit.converged;
  j["failures"] = fit.failures;
  const auto parts = decompose(data);
  auto subs = Json::array();
  for (std::size_t k = 0; k < fit.sub_fits.size(); ++k) {
    auto s = fit_json(fit.sub_fits[k], parts[k]);
    s["component"] = "theta_" + std::to_string(k + 1);
    s.erase("fitted");
    subs.push_back(s);
  }
  j["components"] = subs;
  j["log_lik"] = detail::num(m.log_lik);
  j["n_params"] = m.n_params;
  j["aic"] = detail::num(m.aic);
  j["ks"] = m.ks;
  j["mae"] = m.mae;
  j["category_labels"] = data.category_labels;
  auto fitted = Json::array();
  for (const auto& row : m.fitted) fitted.push_back(row);
  j["fitted"] = fitted;
  return j;
}

inline void write_multinomial_text(std::ostream& os, const MultinomialFit& fit, const MultinomialDataset& data,
                                   const MultinomialMetrics& m) {
  const auto parts = decompose(data);
  for (std::size_t k = 0; k < fit.sub_fits.size(); ++k) {
    os << "component theta_" << k + 1 << " (" << data.category_labels[k] << ")\n";
    write_fit_text(os, fit.sub_fits[k], parts[k]);
    os << '\n';
  }
  os << "total logL " << detail::fixed(m.log_lik, 3) << "  parameters " << m.n_params << "  AIC "
     << detail::fixed(m.aic, 2) << "  KS " << detail::fixed(m.ks, 4) << "  MAE " << detail::fixed(m.mae, 4) << '\n';
  os << "\nfitted category probabilities\n" << std::setw(8) << "row";
  for (const auto& l : data.category_labels) os << std::setw(14) << l;
  os << '\n';
  for (std::size_t i = 0; i < m.fitted.size(); ++i) {
    os << std::setw(8) << i + 1;
    for (double p : m.fitted[i]) os << std::setw(14) << detail::fixed(p, 3);
    os << '\n';
  }
  for (const auto& f : fit.failures) os << "failure: " << f << '\n';
}

inline MultinomialOptions multinomial_options(const RunConfig& cfg, std::size_t n_coef) {
  MultinomialOptions o;
  o.mle = fit_options(cfg);
  o.mcmc = mcmc_options(cfg);
  o.prior = prior_from(cfg, n_coef);
  return o;
}

// ---------------------------------------------------------------------------
// Commands. Each writes its report to `os` and returns an exit code.

inline int emit(std::ostream& os, const RunConfig& cfg, const Json& j, const std::string& text, const std::string& csv) {
  switch (cfg.format) {
    case OutputFormat::json:
      os << j.dump(2) << '\n';
      break;
    case OutputFormat::csv:
      os << csv;
      break;
    case OutputFormat::text:
      os << text;
      break;
  }
  return kExitOk;
}

inline int cmd_fit(const RunConfig& cfg, std::ostream& os) {
  const auto data = load_binomial(cfg);
  const auto link = make_link(cfg.links.front(), cfg.gamma_fixed);
  const auto fit = fit_mle(data, link, fit_options(cfg));
  Json j;
  j["command"] = "fit";
  j["dataset_fingerprint"] = fingerprint(data);
  j["settings"] = settings_json(cfg, FitOptions{}.optimizer);
  j["fit"] = fit_json(fit, data);
  std::ostringstream text, csv;
  text << "dataset " << cfg.data << " (" << data.size() << " rows, " << data.total_trials() << " trials, fingerprint "
       << fingerprint(data) << ")\n";
  write_fit_text(text, fit, data);
  write_fit_csv(csv, fit, data);
  emit(os, cfg, j, text.str(), csv.str());
  if (cfg.predictions_out) write_binomial_predictions(*cfg.predictions_out, data, fit.fitted);
  return fit.converged ? kExitOk : kExitNotConverged;
}

inline int cmd_bayes(const RunConfig& cfg, std::ostream& os) {
  const auto data = load_binomial(cfg);
  const auto link = make_link(cfg.links.front(), cfg.gamma_fixed);
  const auto r = run_bayes(data, link, cfg);
  Json j;
  j["command"] = "bayes";
  j["dataset_fingerprint"] = fingerprint(data);
  j["settings"] = settings_json(cfg, FitOptions{}.optimizer);
  j["link"] = std::string(link.name());
  j["bayes"] = bayes_json(r, data);
  std::ostringstream text, csv;
  text << "dataset " << cfg.data << " (fingerprint " << fingerprint(data) << "), link " << link.name() << '\n';
  write_bayes_text(text, r);
  csv << "name,mean,sd,q025,q50,q975\n";
  for (const auto& s : r.summary)
    csv << s.name << ',' << detail::general(s.mean, 17) << ',' << detail::general(s.sd, 17) << ','
        << detail::general(s.q025, 17) << ',' << detail::general(s.q50, 17) << ',' << detail::general(s.q975, 17)
        << '\n';
  csv << "dic," << detail::general(r.dic.dic, 17) << ",,,,\n";
  csv << "p_d," << detail::general(r.dic.p_d, 17) << ",,,,\n";
  emit(os, cfg, j, text.str(), csv.str());
  if (cfg.chain_out) {
    std::ofstream c(*cfg.chain_out);
    if (!c) throw LoadError("cannot write '" + *cfg.chain_out + "'");
    r.chain.write_csv(c);
  }
  if (cfg.predictions_out) write_binomial_predictions(*cfg.predictions_out, data, r.predicted);
  return kExitOk;
}

inline int cmd_multinomial(const RunConfig& cfg, std::ostream& os) {
  const auto data = load_multinomial(cfg);
  const auto link = make_link(cfg.links.front(), cfg.gamma_fixed);
  const auto fit = fit_multinomial(data, link, cfg.method, multinomial_options(cfg, data.n_coef()));
  const auto m = multinomial_metrics(fit, data);
  Json j;
  j["command"] = "multinomial";
  j["dataset_fingerprint"] = fingerprint(data);
  j["settings"] = settings_json(cfg, FitOptions{}.optimizer);
  j["fit"] = multinomial_json(fit, data, m);
  std::ostringstream text, csv;
  text << "dataset " << cfg.data << " (" << data.rows.size() << " rows, " << data.total_count()
       << " counts, fingerprint " << fingerprint(data) << "), link " << link.name() << '\n';
  write_multinomial_text(text, fit, data, m);
  csv << "row";
  for (const auto& l : data.category_labels) csv << ',' << l;
  csv << '\n';
  for (std::size_t i = 0; i < m.fitted.size(); ++i) {
    csv << i + 1;
    for (double p : m.fitted[i]) csv << ',' << detail::general(p, 17);
    csv << '\n';
  }
  emit(os, cfg, j, text.str(), csv.str());
  if (cfg.predictions_out) write_multinomial_predictions(*cfg.predictions_out, data, m);
  return fit.converged ? kExitOk : kExitNotConverged;
}

inline ComparisonRow comparison_row(const std::string& name, const FitResult& f, const GroupedDataset& data,
                                    const std::string& fp) {
  ComparisonRow r;
  r.model_name = name;
  r.log_lik = f.log_lik;
  r.n_params = f.n_params;
  r.n_obs = f.n_obs;
  r.aic = aic(f.log_lik, f.n_params);
  r.bic = bic(f.log_lik, f.n_params, f.n_obs);
  const auto km = ks_mae(data, f.fitted);
  r.ks = km.ks;
  r.mae = km.mae;
  r.dataset_fingerprint = fp;
  r.converged = f.converged;
  if (f.boundary) r.note = "shape at boundary";
  return r;
}

inline int cmd_compare(const RunConfig& cfg, std::ostream& os) {
  std::vector<ComparisonRow> rows(cfg.links.size());
  bool all_converged = true;
  std::string fp;
  if (is_multinomial_source(cfg)) {
    const auto data = load_multinomial(cfg);
    fp = fingerprint(data);
    std::vector<MultinomialFit> fits(cfg.links.size());
    for (std::size_t k = 0; k < cfg.links.size(); ++k) {
      const auto link = make_link(cfg.links[k], cfg.gamma_fixed);
      fits[k] = fit_multinomial(data, link, cfg.method, multinomial_options(cfg, data.n_coef()));
      const auto m = multinomial_metrics(fits[k], data);
      auto& r = rows[k];
      r.model_name = cfg.links[k];
      r.log_lik = m.log_lik;
      r.n_params = m.n_params;
      r.n_obs = data.total_count();
      r.aic = m.aic;
      r.ks = m.ks;
      r.mae = m.mae;
      r.dataset_fingerprint = fp;
      r.converged = fits[k].converged;
      all_converged = all_converged && fits[k].converged;
    }
  } else {
    const auto data = load_binomial(cfg);
    fp = fingerprint(data);
    std::vector<std::string> errors(cfg.links.size());
    std::vector<char> converged(cfg.links.size(), 1);
    parallel_for(cfg.links.size(), [&](std::size_t k) {
      try {
        const auto link = make_link(cfg.links[k], cfg.gamma_fixed);
        if (cfg.method == FitMethod::mle) {
          const auto f = fit_mle(data, link, fit_options(cfg));
          rows[k] = comparison_row(cfg.links[k], f, data, fp);
          converged[k] = f.converged;
          return;
        }
        const auto r = run_bayes(data, link, cfg);
        auto& row = rows[k];
        row.model_name = cfg.links[k];
        row.log_lik = -0.5 * r.dic.plugin_deviance;
        row.n_params = static_cast<int>(r.chain.dim);
        row.n_obs = data.total_trials();
        row.dic = r.dic.dic;
        row.ks = r.fit.ks;
        row.mae = r.fit.mae;
        row.dataset_fingerprint = fp;
      } catch (const std::exception& e) {
        errors[k] = e.what();
      }
    });
    for (std::size_t k = 0; k < errors.size(); ++k) {
      if (!errors[k].empty()) throw std::runtime_error(cfg.links[k] + ": " + errors[k]);
      all_converged = all_converged && converged[k];
    }
  }
  const auto sorted = compare(rows);
  Json j;
  j["command"] = "compare";
  j["dataset_fingerprint"] = fp;
  j["settings"] = settings_json(cfg, FitOptions{}.optimizer);
  j["rows"] = to_json(sorted);
  std::ostringstream text, csv;
  write_comparison_text(text, sorted);
  write_comparison_csv(csv, sorted);
  emit(os, cfg, j, text.str(), csv.str());
  return all_converged ? kExitOk : kExitNotConverged;
}

// ---------------------------------------------------------------------------
// reproduce

inline int reproduce_finney(const RunConfig& base, std::ostream& os) {
  RunConfig cfg = base;
  cfg.data = "finney1947";
  if (!cfg.seed) cfg.seed = kReproduceSeed;
  const auto data = datasets::finney1947();
  const std::string fp = fingerprint(data);
  std::vector<ReferenceCheck> checks;

  // Maximum likelihood under each link.
  std::vector<FitResult> fits(reference::kFinneyMle.size());
  parallel_for(fits.size(), [&](std::size_t k) {
    fits[k] = fit_mle(data, make_link(std::string(reference::kFinneyMle[k].link), std::nullopt));
  });
  std::vector<ComparisonRow> rows;
  bool all_converged = true;
  for (std::size_t k = 0; k < fits.size(); ++k) {
    const auto& ref = reference::kFinneyMle[k];
    const auto row = comparison_row(std::string(ref.link), fits[k], data, fp);
    rows.push_back(row);
    all_converged = all_converged && fits[k].converged;
    const std::string n(ref.link);
    checks.push_back({n + " logL", row.log_lik, ref.log_lik, 0.05});
    checks.push_back({n + " AIC", *row.aic, ref.aic, 0.1});
    checks.push_back({n + " BIC", *row.bic, ref.bic, 0.2});
    checks.push_back({n + " KS", row.ks, ref.ks, 0.005});
    checks.push_back({n + " MAE", row.mae, ref.mae, 0.003});
  }
  const auto& weibull = fits[1];
  const auto& probit = fits[2];
  for (std::size_t j = 0; j < probit.beta.size(); ++j)
    checks.push_back({"probit beta" + std::to_string(j), probit.beta[j], reference::kFinneyProbitBeta[j],
                      2.0 * reference::kFinneyProbitSe[j]});
  {
    const std::vector<double> ref_beta(reference::kFinneyWeibullBeta.begin(), reference::kFinneyWeibullBeta.end());
    const auto ref_mu =
        fitted_probabilities(LinkFamily::weibull(reference::kFinneyWeibullGamma), ref_beta, data);
    double worst = 0.0;
    for (std::size_t i = 0; i < ref_mu.size(); ++i) worst = std::max(worst, std::fabs(ref_mu[i] - weibull.fitted[i]));
    checks.push_back({"weibull fitted cells, max gap to reference fit", worst, 0.0, 0.01});
  }

  // Hierarchical Bayes with empirical-Bayes hyper-means.
  RunConfig bcfg = cfg;
  bcfg.prior = PriorKind::hierarchical;
  bcfg.v_gamma = reference::kFinneyVGamma;
  bcfg.v_beta = reference::kFinneyVBeta;
  bcfg.empirical_bayes = true;
  const auto bayes = run_bayes(data, LinkFamily::weibull(constants::probit_approx_shape), bcfg);
  checks.push_back({"EB m_gamma", bayes.eb->m_gamma, reference::kFinneyMGamma, 0.25 * reference::kFinneyMGamma});
  for (std::size_t j = 0; j < bayes.eb->m_beta.size(); ++j)
    checks.push_back({"EB m_beta" + std::to_string(j), bayes.eb->m_beta[j], reference::kFinneyMBeta[j], 0.15});
  for (std::size_t j = 0; j < bayes.summary.size(); ++j)
    checks.push_back({"posterior mean " + bayes.summary[j].name, bayes.summary[j].mean,
                      reference::kFinneyPosteriorMean[j], 2.0 * reference::kFinneyPosteriorSd[j]});
  checks.push_back({"weibull DIC", bayes.dic.dic, reference::kFinneyDic, 5.0});

  Json j;
  j["command"] = "reproduce";
  j["target"] = "finney1947";
  j["dataset_fingerprint"] = fp;
  j["settings"] = settings_json(cfg, FitOptions{}.optimizer);
  auto mle = Json::array();
  for (std::size_t k = 0; k < fits.size(); ++k) mle.push_back(fit_json(fits[k], data));
  j["mle"] = mle;
  j["comparison"] = to_json(compare(rows));
  j["bayes"] = bayes_json(bayes, data);
  auto cj = Json::array();
  for (const auto& c : checks) cj.push_back(to_json(c));
  j["reference_checks"] = cj;

  std::ostringstream text, csv;
  text << "finney1947 (" << data.size() << " rows, " << data.total_trials() << " trials, fingerprint " << fp << ")\n\n";
  text << "model comparison, maximum likelihood\n";
  write_comparison_text(text, compare(rows));
  text << "\nprobit fit\n";
  write_fit_text(text, probit, data);
  text << "\nweibull fit\n";
  write_fit_text(text, weibull, data);
  text << "\nweibull, hierarchical prior (v_gamma " << bcfg.v_gamma << ", v_beta " << bcfg.v_beta << ")\n";
  write_bayes_text(text, bayes);
  write_checks_text(text, checks);
  write_comparison_csv(csv, compare(rows));
  emit(os, cfg, j, text.str(), csv.str());
  return all_converged ? kExitOk : kExitNotConverged;
}

inline int reproduce_grazeffe(const RunConfig& base, std::ostream& os) {
  RunConfig cfg = base;
  cfg.data = "grazeffe2008";
  const auto data = load_multinomial(cfg);
  const std::string fp = fingerprint(data);
  std::vector<ReferenceCheck> checks;

  const std::vector<LinkFamily> links{LinkFamily::reflected_weibull(constants::probit_approx_shape),
                                      LinkFamily::logit()};
  std::vector<MultinomialFit> fits;
  std::vector<MultinomialMetrics> metrics;
  std::vector<ComparisonRow> rows;
  bool all_converged = true;
  for (std::size_t k = 0; k < links.size(); ++k) {
    fits.push_back(fit_multinomial(data, links[k]));
    metrics.push_back(multinomial_metrics(fits.back(), data));
    const auto& m = metrics.back();
    all_converged = all_converged && fits.back().converged;
    ComparisonRow r;
    r.model_name = std::string(links[k].name());
    r.log_lik = m.log_lik;
    r.n_params = m.n_params;
    r.n_obs = data.total_count();
    r.aic = m.aic;
    r.ks = m.ks;
    r.mae = m.mae;
    r.dataset_fingerprint = fp;
    r.converged = fits.back().converged;
    rows.push_back(r);
  }
  const auto& wm = metrics[0];
  const auto& lm = metrics[1];
  const auto& lref = reference::kGrazeffeMle[1];
  checks.push_back({"reflected_weibull AIC", wm.aic, 11340.0, 0.0, true});
  checks.push_back({"reflected_weibull KS", wm.ks, 0.04, 0.0, true});
  checks.push_back({"reflected_weibull MAE", wm.mae, 0.012, 0.0, true});
  checks.push_back({"logit AIC", lm.aic, lref.aic, 2.0});
  checks.push_back({"logit KS", lm.ks, lref.ks, 0.01});
  checks.push_back({"logit MAE", lm.mae, lref.mae, 0.003});
  if (data.rows.size() == reference::kGrazeffeWeibullFitted.size()) {
    for (std::size_t i = 0; i < data.rows.size(); ++i)
      for (std::size_t c = 0; c < 4; ++c)
        checks.push_back({"reflected_weibull p(dose " + detail::general(reference::kGrazeffeDoses[i], 3) + ", " +
                              data.category_labels[c] + ")",
                          wm.fitted[i][c], reference::kGrazeffeWeibullFitted[i][c], 0.02});
  }

  Json j;
  j["command"] = "reproduce";
  j["target"] = "grazeffe2008";
  j["dataset_fingerprint"] = fp;
  j["settings"] = settings_json(cfg, FitOptions{}.optimizer);
  auto fj = Json::array();
  for (std::size_t k = 0; k < fits.size(); ++k) fj.push_back(multinomial_json(fits[k], data, metrics[k]));
  j["fits"] = fj;
  j["comparison"] = to_json(compare(rows));
  auto cj = Json::array();
  for (const auto& c : checks) cj.push_back(to_json(c));
  j["reference_checks"] = cj;

  std::ostringstream text, csv;
  text << "grazeffe2008 (" << data.rows.size() << " rows, " << data.total_count() << " counts, fingerprint " << fp
       << ")\n\n";
  write_comparison_text(text, compare(rows));
  text << "\nobserved and fitted category frequencies\n";
  text << std::setw(8) << "dose" << std::setw(20) << "model";
  for (const auto& l : data.category_labels) text << std::setw(14) << l;
  text << '\n';
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    const auto& row = data.rows[i];
    const double dose = row.x.size() > 1 ? row.x[1] : 0.0;
    text << std::setw(8) << detail::general(dose, 4) << std::setw(20) << "observed";
    for (auto c : row.counts)
      text << std::setw(14) << detail::fixed(static_cast<double>(c) / static_cast<double>(row.total()), 3);
    text << '\n';
    for (std::size_t k = 0; k < fits.size(); ++k) {
      text << std::setw(8) << "" << std::setw(20) << links[k].name();
      for (double p : metrics[k].fitted[i]) text << std::setw(14) << detail::fixed(p, 3);
      text << '\n';
    }
  }
  write_checks_text(text, checks);
  write_comparison_csv(csv, compare(rows));
  emit(os, cfg, j, text.str(), csv.str());
  return all_converged ? kExitOk : kExitNotConverged;
}

inline int cmd_reproduce(const RunConfig& cfg, std::ostream& os) {
  if (cfg.data == "finney1947") return reproduce_finney(cfg, os);
  if (cfg.data == "grazeffe2008") return reproduce_grazeffe(cfg, os);
  throw std::invalid_argument("reproduce takes finney1947 or grazeffe2008, got '" + cfg.data + "'");
}

/// Runs one command. The report goes to cfg.out when set, else to `out`;
/// diagnostics go to `err`.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    cfg.validate();
    std::ostringstream report;
    int code = kExitOk;
    switch (cfg.command) {
      case Command::fit:
        code = cmd_fit(cfg, report);
        break;
      case Command::bayes:
        code = cmd_bayes(cfg, report);
        break;
      case Command::multinomial:
        code = cmd_multinomial(cfg, report);
        break;
      case Command::compare:
        code = cmd_compare(cfg, report);
        break;
      case Command::reproduce:
        code = cmd_reproduce(cfg, report);
        break;
    }
    if (cfg.out) {
      std::ofstream f(*cfg.out);
      if (!f) throw LoadError("cannot write '" + *cfg.out + "'");
      f << report.str();
    } else {
      out << report.str();
    }
    if (code == kExitNotConverged) err << "warning: at least one fit did not converge\n";
    return code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace skewlink::cli

#endif  // SKEWLINK_CLI_HPP
