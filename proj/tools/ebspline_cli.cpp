// ebspline: fit data, build credible balls, run simulation and comparison studies.

#include <cmath>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ebspline/credible.hpp"
#include "ebspline/ebcore.hpp"
#include "ebspline/errors.hpp"
#include "ebspline/freq.hpp"
#include "ebspline/io.hpp"
#include "ebspline/oracle.hpp"
#include "ebspline/simlab.hpp"

using nlohmann::json;
using namespace ebs;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

struct Common {
  double qmin = 1.0, qmax = 6.0, qstep = 1.0;
  std::string design;  // empty: infer
  std::string basis = "natural";
  bool raw_q = false;
  bool to_stdout = false;
  unsigned threads = 0;
};

struct FitArgs {
  std::string input, output = "fit.json", fitted;
};

struct CredibleArgs {
  std::string input, output = "ball.json", samples;
  double alpha = 0.05, L = 2.0;
  std::size_t mc_draws = 10000, draws = 0;
  std::uint64_t seed = 20240607;
};

struct StudyArgs {
  std::string config, output, table;
  std::optional<std::uint64_t> seed;
  std::optional<double> sigma;
  std::optional<std::size_t> M;
};

struct OracleArgs {
  std::string generator = "f1";
  std::size_t n = 1000;
  double q = 3.0, sigma = 0.01;
};

struct KappaArgs {
  double q = 1.0;
  int m = 0, l = 1;
};

void add_common(CLI::App* sub, Common& c, bool data_flags) {
  if (data_flags) {
    sub->add_option("--qmin", c.qmin, "smallest order on the q grid")->capture_default_str();
    sub->add_option("--qmax", c.qmax, "largest order on the q grid")->capture_default_str();
    sub->add_option("--qstep", c.qstep, "q grid spacing")->capture_default_str();
    sub->add_flag("--raw-q", c.raw_q, "report the interpolated root instead of rounding q");
  }
  sub->add_option("--design", c.design, "design convention")->check(CLI::IsMember({"midpoint", "right"}));
  sub->add_option("--basis", c.basis, "spectral basis")
      ->check(CLI::IsMember({"natural", "analytic-surrogate", "exact-eigen"}))
      ->capture_default_str();
  sub->add_flag("--stdout", c.to_stdout, "print the JSON payload to stdout instead of a file");
  sub->add_option("--threads", c.threads, "worker threads (0 = hardware)");
}

void emit(const Common& c, const std::string& path, const json& j) {
  const std::string text = j.dump(2) + "\n";
  if (c.to_stdout) {
    std::cout << text;
  } else {
    atomic_write(path, text);
    std::cerr << "wrote " << path << "\n";
  }
}

FitOptions fit_options(const Common& c) {
  FitOptions o;
  o.grid = c.qstep == 1.0 && c.qmin == std::floor(c.qmin) && c.qmax == std::floor(c.qmax)
               ? QGrid::integers(static_cast<int>(c.qmin), static_cast<int>(c.qmax))
               : QGrid::range(c.qmin, c.qmax, c.qstep);
  o.policy = c.raw_q ? RoundingPolicy::raw : RoundingPolicy::integer;
  return o;
}

struct LoadedFit {
  CsvData data;
  DesignGrid grid;
  FitResult result;
};

LoadedFit load_and_fit(const std::string& input, const Common& c) {
  CsvData data = read_csv(input);
  std::optional<Convention> conv;
  if (!c.design.empty()) conv = parse_convention(c.design);
  DesignGrid grid = infer_design(data, conv);
  const ModelFamily family(grid, parse_basis_kind(c.basis));
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(data.y.data(), static_cast<Eigen::Index>(data.y.size()));
  FitResult r = fit(family, y, fit_options(c));
  return {std::move(data), std::move(grid), std::move(r)};
}

int cmd_fit(const FitArgs& a, const Common& c) {
  const LoadedFit lf = load_and_fit(a.input, c);
  json j = to_json(lf.result);
  j["design_convention"] = to_string(lf.grid.convention);
  j["basis"] = c.basis;
  emit(c, a.output, j);
  if (!a.fitted.empty()) {
    std::ostringstream s;
    s << "x,y,fitted\n";
    for (std::size_t i = 0; i < lf.grid.n; ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      s << format_double(lf.grid.x[k]) << ',' << format_double(lf.data.y[i]) << ','
        << format_double(lf.result.fitted[k]) << '\n';
    }
    atomic_write(a.fitted, s.str());
  }
  return kExitOk;
}

int cmd_credible(const CredibleArgs& a, const Common& c) {
  if (!a.samples.empty() && a.draws == 0) throw InputError("--samples needs --draws >= 1");
  const LoadedFit lf = load_and_fit(a.input, c);
  RadiusSpec spec;
  spec.alpha = a.alpha;
  spec.mc_draws = a.mc_draws;
  spec.seed = a.seed;
  const CredibleBall ball = credible_ball(lf.result, a.L, spec);

  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "credible";
  j["n"] = lf.grid.n;
  j["design_convention"] = to_string(lf.grid.convention);
  j["basis"] = c.basis;
  j["lambda_hat"] = ball.lambda_hat;
  j["q_hat"] = ball.q_hat;
  j["sigma_hat"] = ball.sigma_hat;
  j["alpha"] = ball.alpha;
  j["L"] = ball.L;
  j["r_n"] = ball.r_n;
  j["radius"] = ball.radius;
  j["center_contained"] = ball.contains(ball.center);
  j["mc_draws"] = spec.mc_draws;
  j["seed"] = spec.seed;
  emit(c, a.output, j);

  if (!a.samples.empty()) {
    const Eigen::MatrixXd draws = sample_posterior(lf.result, a.draws, a.seed);
    std::ostringstream s;
    s << "x,fitted";
    for (Eigen::Index d = 0; d < draws.cols(); ++d) s << ",draw" << d + 1;
    s << '\n';
    for (Eigen::Index i = 0; i < draws.rows(); ++i) {
      s << format_double(lf.grid.x[i]) << ',' << format_double(ball.center[i]);
      for (Eigen::Index d = 0; d < draws.cols(); ++d) s << ',' << format_double(draws(i, d));
      s << '\n';
    }
    atomic_write(a.samples, s.str());
  }
  return kExitOk;
}

json load_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw InputError("'" + path + "' is not valid JSON: " + e.what());
  }
}

int cmd_simulate(const StudyArgs& a, const Common& c) {
  StudyConfig cfg = parse_study_config(load_json(a.config));
  if (a.seed) cfg.seed = *a.seed;
  if (a.sigma) cfg.sigma = *a.sigma;
  if (a.M) cfg.M = *a.M;
  if (!c.design.empty()) cfg.convention = parse_convention(c.design);
  if (c.threads) cfg.threads = c.threads;
  const SimulationReport rep = run_study(cfg);
  emit(c, a.output.empty() ? "report.json" : a.output, to_json(rep));
  if (!a.table.empty()) atomic_write(a.table, to_csv_table(rep));
  return kExitOk;
}

// Config keys: generator, n, M, sigma, q, L, alpha, mc_draws, two_sample, seed,
// design_convention, basis, threads.
int cmd_compare(const StudyArgs& a, const Common& c) {
  const json j = load_json(a.config);
  if (!j.is_object()) throw InputError("compare config must be a JSON object");
  static const std::set<std::string> known = {"schema_version", "generator", "n", "M", "sigma", "q", "L",
                                              "alpha", "mc_draws", "two_sample", "seed",
                                              "design_convention", "basis", "threads"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) throw InputError("unknown key '" + it.key() + "' in compare config");
  }
  auto get = [&](const char* key, auto fallback) {
    if (!j.contains(key)) return fallback;
    try {
      return j.at(key).get<decltype(fallback)>();
    } catch (const json::exception&) {
      throw InputError(std::string("bad value for '") + key + "' in compare config");
    }
  };
  const Generator gen = j.contains("generator") ? parse_generator(j.at("generator")) : Generator::f1();
  const auto n = get("n", std::size_t{1000});
  const auto M = a.M.value_or(get("M", std::size_t{200}));
  const auto q = get("q", std::vector<double>{2.0});
  RadiusSpec spec;
  spec.alpha = get("alpha", spec.alpha);
  spec.mc_draws = get("mc_draws", spec.mc_draws);
  ExperimentOptions opts;
  opts.sigma = a.sigma.value_or(get("sigma", opts.sigma));
  opts.seed = a.seed.value_or(get("seed", opts.seed));
  opts.convention = parse_convention(get("design_convention", std::string("right")));
  if (!c.design.empty()) opts.convention = parse_convention(c.design);
  opts.kind = parse_basis_kind(get("basis", std::string("natural")));
  opts.threads = c.threads ? c.threads : get("threads", 0u);
  const double L = get("L", 2.0);
  const bool two = get("two_sample", true);
  if (n < 8) throw InputError("compare needs n >= 8");

  const CoverageLossReport rep = theorem4_experiment(gen, n, q, M, spec, opts, L, two);
  json out = to_json(rep);
  out["sigma"] = opts.sigma;
  out["seed"] = opts.seed;
  out["L"] = L;
  out["alpha"] = spec.alpha;
  emit(c, a.output.empty() ? "compare.json" : a.output, out);
  return kExitOk;
}

int cmd_oracle(const OracleArgs& a, const Common& c) {
  if (a.n < 8) throw InputError("oracle needs n >= 8");
  if (!(a.sigma > 0.0)) throw InputError("oracle needs sigma > 0");
  const Generator gen = parse_generator(json(a.generator));
  const DesignGrid grid = DesignGrid::make(a.n, c.design.empty() ? Convention::right : parse_convention(c.design));
  const ModelFamily family(grid, parse_basis_kind(c.basis));
  const Eigen::VectorXd f = generate(gen, grid, family.kind());
  const auto model = family.model(a.q);
  SignalSpectrum s;
  s.B = forward(model->basis, f);
  s.beta_nominal = gen.beta_nominal();
  const double s2 = a.sigma * a.sigma;

  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "oracle";
  j["generator"] = gen.name();
  j["n"] = a.n;
  j["q"] = a.q;
  j["sigma"] = a.sigma;
  j["sobolev_energy"] = sobolev_energy(model->eigen, s);
  auto put = [&](const char* key, OracleMethod m) {
    const double lam = oracle_lambda(model->eigen, s, s2, m).lambda_q;
    j[key] = std::isfinite(lam) ? json(lam) : json(nullptr);
  };
  put("lambda_closed_form", OracleMethod::closed_form);
  put("lambda_numeric", OracleMethod::numeric_root);

  std::vector<EigenSequence> eigens;
  std::vector<SignalSpectrum> spectra;
  for (int k = 1; k <= 6; ++k) {
    const auto m = family.model(k);
    SignalSpectrum sk;
    sk.B = forward(m->basis, f);
    eigens.push_back(m->eigen);
    spectra.push_back(std::move(sk));
  }
  j["beta_bar"] = beta_bar(eigens, spectra, s2);
  emit(c, "oracle.json", j);
  return kExitOk;
}

int cmd_kappa(const KappaArgs& a) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "kappa";
  j["q"] = a.q;
  j["m"] = a.m;
  j["l"] = a.l;
  j["kappa"] = kappa(a.q, a.m, a.l);
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Empirical Bayes smoothing splines with adaptive order selection"};
  app.require_subcommand(1);

  Common common;
  FitArgs fa;
  CredibleArgs ca;
  StudyArgs sa, cmpa;
  OracleArgs oa;
  KappaArgs ka;

  auto* fit_cmd = app.add_subcommand("fit", "select (lambda, q) and smooth a CSV series");
  fit_cmd->add_option("input", fa.input, "CSV with header 'x,y' or 'y'")->required();
  fit_cmd->add_option("-o,--output", fa.output, "fit JSON path")->capture_default_str();
  fit_cmd->add_option("--fitted", fa.fitted, "also write x,y,fitted CSV here");
  add_common(fit_cmd, common, true);

  auto* cred_cmd = app.add_subcommand("credible", "credible ball around the EB fit");
  cred_cmd->add_option("input", ca.input, "CSV with header 'x,y' or 'y'")->required();
  cred_cmd->add_option("-o,--output", ca.output, "ball JSON path")->capture_default_str();
  cred_cmd->add_option("--samples", ca.samples, "write posterior draws as CSV here");
  cred_cmd->add_option("--draws", ca.draws, "number of posterior curves for --samples");
  cred_cmd->add_option("--alpha", ca.alpha, "credible level is 1 - alpha")->capture_default_str();
  cred_cmd->add_option("--L", ca.L, "radius inflation factor")->capture_default_str();
  cred_cmd->add_option("--mc-draws", ca.mc_draws, "Monte-Carlo draws for the radius")->capture_default_str();
  cred_cmd->add_option("--seed", ca.seed, "random seed")->capture_default_str();
  add_common(cred_cmd, common, true);

  auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo study from a JSON config");
  sim_cmd->add_option("config", sa.config, "study config JSON")->required();
  sim_cmd->add_option("-o,--output", sa.output, "report JSON path (default report.json)");
  sim_cmd->add_option("--table", sa.table, "also write the summary table as CSV here");
  sim_cmd->add_option("--seed", sa.seed, "override the config seed");
  sim_cmd->add_option("--sigma", sa.sigma, "override the config noise level");
  sim_cmd->add_option("--M", sa.M, "override the number of replicates");
  add_common(sim_cmd, common, false);

  auto* cmp_cmd = app.add_subcommand("compare", "GCV-centred ball against the EB credible ball");
  cmp_cmd->add_option("config", cmpa.config, "comparison config JSON")->required();
  cmp_cmd->add_option("-o,--output", cmpa.output, "report JSON path (default compare.json)");
  cmp_cmd->add_option("--seed", cmpa.seed, "override the config seed");
  cmp_cmd->add_option("--M", cmpa.M, "override the number of replicates");
  add_common(cmp_cmd, common, false);

  auto* orc_cmd = app.add_subcommand("oracle", "oracle lambda and smoothness for a test signal");
  orc_cmd->add_option("--generator", oa.generator, "f1, f2 or polynomial")->capture_default_str();
  orc_cmd->add_option("--n", oa.n, "sample size")->capture_default_str();
  orc_cmd->add_option("--q", oa.q, "penalty order")->capture_default_str();
  orc_cmd->add_option("--sigma", oa.sigma, "noise level")->capture_default_str();
  add_common(orc_cmd, common, false);

  auto* kap_cmd = app.add_subcommand("kappa", "trace constant kappa_q(m, l)");
  kap_cmd->add_option("--q", ka.q, "order (> 1/2)")->capture_default_str();
  kap_cmd->add_option("--m", ka.m, "power of (I - S)")->capture_default_str();
  kap_cmd->add_option("--l", ka.l, "power of S")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*fit_cmd) return cmd_fit(fa, common);
    if (*cred_cmd) return cmd_credible(ca, common);
    if (*sim_cmd) return cmd_simulate(sa, common);
    if (*cmp_cmd) return cmd_compare(cmpa, common);
    if (*orc_cmd) return cmd_oracle(oa, common);
    if (*kap_cmd) return cmd_kappa(ka);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitInput;
}
