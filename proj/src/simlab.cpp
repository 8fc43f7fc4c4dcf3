#include "ebspline/simlab.hpp"

#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "ebspline/errors.hpp"
#include "ebspline/parallel.hpp"
#include "ebspline/rng.hpp"
#include "ebspline/stats.hpp"

namespace ebs {

using Eigen::Index;
using Eigen::VectorXd;
using nlohmann::json;

const MethodRow* SimulationReport::row(const std::string& method, double q) const {
  for (const auto& r : rows) {
    if (r.method == method && (method == "EB" || r.q == q)) return &r;
  }
  return nullptr;
}

double SimulationReport::q_hat_fraction(double q) const {
  auto it = q_hat_histogram.find(q);
  if (it == q_hat_histogram.end() || config.M == 0) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(config.M);
}

SimulationReport run_study(const StudyConfig& cfg) {
  if (cfg.M < 1) throw InputError("study needs M >= 1");
  if (!(cfg.sigma > 0.0)) throw InputError("study needs sigma > 0");
  cfg.q_grid.validate();

  const DesignGrid grid = DesignGrid::make(cfg.n, cfg.convention);
  const ModelFamily family(grid, cfg.kind);
  const VectorXd f = generate(cfg.generator, grid, cfg.kind);

  std::set<double> orders(cfg.q_grid.values.begin(), cfg.q_grid.values.end());
  orders.insert(cfg.gcv_q.begin(), cfg.gcv_q.end());
  std::map<int, VectorXd> truth;
  for (double q : orders) {
    const auto m = family.model(q);
    const int d = basis_degree(q);
    if (!truth.count(d)) truth.emplace(d, forward(m->basis, f));
  }

  const std::size_t M = cfg.M, nq = cfg.gcv_q.size();
  std::vector<double> eb_lam(M), eb_q(M), eb_qstar(M), eb_err(M);
  std::vector<double> g_lam(M * nq), g_err(M * nq);

  FitOptions fopts;
  fopts.grid = cfg.q_grid;

  parallel_for(
      M,
      [&](std::size_t r) {
        auto eng = rng::engine(cfg.seed, rng::kNoise, r);
        const VectorXd y = add_noise(f, NoiseModel{cfg.sigma}, eng);
        std::map<int, VectorXd> coeffs;
        auto X = [&](const SpectralModel& m) -> const VectorXd& {
          auto it = coeffs.find(m.basis.q_degree);
          if (it == coeffs.end()) it = coeffs.emplace(m.basis.q_degree, forward(m.basis, y)).first;
          return it->second;
        };
        if (cfg.eb) {
          const FitResult fr = fit(family, y, fopts);
          const VectorXd& B = truth.at(fr.model->basis.q_degree);
          eb_lam[r] = fr.lambda_hat;
          eb_q[r] = fr.q_hat;
          eb_qstar[r] = fr.q_star;
          eb_err[r] = (fr.weights.cwiseProduct(fr.coeffs) - B).squaredNorm();
        }
        for (std::size_t k = 0; k < nq; ++k) {
          const auto m = family.model(cfg.gcv_q[k]);
          const VectorXd& x = X(*m);
          const GcvResult g = select_lambda_gcv_coeffs(*m, x);
          const VectorXd w = smoother_weights(m->eigen, g.lambda_f_hat);
          g_lam[r * nq + k] = g.lambda_f_hat;
          g_err[r * nq + k] = (w.cwiseProduct(x) - truth.at(m->basis.q_degree)).squaredNorm();
        }
      },
      cfg.threads);

  SimulationReport rep;
  rep.config = cfg;
  const double scale = 1.0 / (static_cast<double>(M) * static_cast<double>(cfg.n));
  double eb_amse = 0.0;
  if (cfg.eb) {
    MethodRow row;
    row.method = "EB";
    row.mean_lambda = mean(eb_lam);
    row.var_lambda = sample_variance(eb_lam);
    for (double e : eb_err) eb_amse += e;
    eb_amse *= scale;
    row.amse = eb_amse;
    row.ratio = 1.0;
    rep.rows.push_back(row);
    for (double q : eb_q) rep.q_hat_histogram[q] += 1;
    rep.mean_q_star = mean(eb_qstar);
    rep.eb_lambda = eb_lam;
    rep.eb_q_hat = eb_q;
  }
  for (std::size_t k = 0; k < nq; ++k) {
    std::vector<double> lam(M);
    double amse = 0.0;
    for (std::size_t r = 0; r < M; ++r) {
      lam[r] = g_lam[r * nq + k];
      amse += g_err[r * nq + k];
    }
    amse *= scale;
    MethodRow row;
    row.method = "GCV";
    row.q = cfg.gcv_q[k];
    row.mean_lambda = mean(lam);
    row.var_lambda = sample_variance(lam);
    row.amse = amse;
    row.ratio = cfg.eb && eb_amse > 0.0 ? amse / eb_amse : 0.0;
    rep.rows.push_back(row);
    rep.gcv_lambda[row.q] = std::move(lam);
  }
  return rep;
}

// ---- JSON ----------------------------------------------------------------

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) throw InputError("unknown key '" + it.key() + "' in " + where);
  }
}

template <class T>
T get_as(const json& j, const std::string& key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InputError("bad or missing value for '" + key + "' in " + where);
  }
}

std::string q_key(double q) {
  std::ostringstream s;
  s << q;
  return s.str();
}

}  // namespace

Generator parse_generator(const json& j) {
  if (j.is_string()) {
    const auto kind = parse_generator_kind(j.get<std::string>());
    switch (kind) {
      case GeneratorKind::f1_spectral: return Generator::f1();
      case GeneratorKind::f2_cosine: return Generator::f2();
      case GeneratorKind::polynomial: return Generator::polynomial(2);
      case GeneratorKind::custom_spectrum: throw InputError("custom generator needs an object with coefficients");
    }
  }
  if (!j.is_object()) throw InputError("generator must be a string or an object");
  reject_unknown(j, {"kind", "params", "coefficients", "range_scaled"}, "generator");
  const auto kind = parse_generator_kind(get_as<std::string>(j, "kind", "generator"));
  Generator g;
  switch (kind) {
    case GeneratorKind::f1_spectral: g = Generator::f1(); break;
    case GeneratorKind::f2_cosine: g = Generator::f2(); break;
    case GeneratorKind::polynomial: g = Generator::polynomial(2); break;
    case GeneratorKind::custom_spectrum: g = Generator::custom({}, 1); break;
  }
  if (j.contains("params")) {
    for (auto& [k, v] : get_as<std::map<std::string, double>>(j, "params", "generator")) g.params[k] = v;
  }
  if (j.contains("coefficients")) g.coefficients = get_as<std::vector<double>>(j, "coefficients", "generator");
  if (j.contains("range_scaled")) g.range_scaled = get_as<bool>(j, "range_scaled", "generator");
  return g;
}

json to_json(const Generator& g) {
  json j;
  j["kind"] = to_string(g.kind);
  j["params"] = g.params;
  if (!g.coefficients.empty()) j["coefficients"] = g.coefficients;
  j["range_scaled"] = g.range_scaled;
  return j;
}

StudyConfig parse_study_config(const json& j) {
  if (!j.is_object()) throw InputError("study config must be a JSON object");
  const std::string where = "study config";
  reject_unknown(j, {"schema_version", "generator", "n", "M", "sigma", "q_grid", "methods", "gcv_q", "seed",
                     "design_convention", "basis", "threads"},
                 where);
  StudyConfig c;
  if (j.contains("generator")) c.generator = parse_generator(j.at("generator"));
  if (j.contains("n")) c.n = get_as<std::size_t>(j, "n", where);
  if (j.contains("M")) c.M = get_as<std::size_t>(j, "M", where);
  if (j.contains("sigma")) c.sigma = get_as<double>(j, "sigma", where);
  if (j.contains("q_grid")) {
    const json& g = j.at("q_grid");
    if (g.is_array()) {
      c.q_grid.values = get_as<std::vector<double>>(j, "q_grid", where);
    } else if (g.is_object()) {
      reject_unknown(g, {"min", "max", "step"}, "q_grid");
      c.q_grid = QGrid::range(get_as<double>(g, "min", "q_grid"), get_as<double>(g, "max", "q_grid"),
                              g.contains("step") ? get_as<double>(g, "step", "q_grid") : 1.0);
    } else {
      throw InputError("q_grid must be an array or {min, max, step}");
    }
  }
  if (j.contains("gcv_q")) c.gcv_q = get_as<std::vector<double>>(j, "gcv_q", where);
  if (j.contains("methods")) {
    const auto methods = get_as<std::vector<std::string>>(j, "methods", where);
    c.eb = false;
    bool gcv = false;
    for (const auto& m : methods) {
      if (m == "EB") {
        c.eb = true;
      } else if (m == "GCV") {
        gcv = true;
      } else {
        throw InputError("unknown method '" + m + "' (expected EB or GCV)");
      }
    }
    if (!gcv) c.gcv_q.clear();
  }
  if (j.contains("seed")) c.seed = get_as<std::uint64_t>(j, "seed", where);
  if (j.contains("design_convention")) c.convention = parse_convention(get_as<std::string>(j, "design_convention", where));
  if (j.contains("basis")) c.kind = parse_basis_kind(get_as<std::string>(j, "basis", where));
  if (j.contains("threads")) c.threads = get_as<unsigned>(j, "threads", where);
  if (c.n < 8) throw InputError("study needs n >= 8");
  if (c.M < 1) throw InputError("study needs M >= 1");
  if (!(c.sigma > 0.0)) throw InputError("study needs sigma > 0");
  c.q_grid.validate();
  return c;
}

json to_json(const StudyConfig& c) {
  json j;
  j["generator"] = to_json(c.generator);
  j["n"] = c.n;
  j["M"] = c.M;
  j["sigma"] = c.sigma;
  j["q_grid"] = c.q_grid.values;
  json methods = json::array();
  if (c.eb) methods.push_back("EB");
  if (!c.gcv_q.empty()) methods.push_back("GCV");
  j["methods"] = methods;
  j["gcv_q"] = c.gcv_q;
  j["seed"] = c.seed;
  j["design_convention"] = to_string(c.convention);
  j["basis"] = to_string(c.kind);
  return j;
}

json to_json(const SimulationReport& r) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "simulation";
  j["config"] = to_json(r.config);
  json rows = json::array();
  for (const auto& m : r.rows) {
    json row;
    row["method"] = m.method;
    if (m.method == "GCV") row["q"] = m.q;
    row["mean_lambda"] = m.mean_lambda;
    row["var_lambda"] = m.var_lambda;
    row["amse"] = m.amse;
    row["ratio"] = m.ratio;
    rows.push_back(row);
  }
  j["rows"] = rows;
  json hist = json::object();
  for (const auto& [q, c] : r.q_hat_histogram) hist[q_key(q)] = c;
  j["q_hat_histogram"] = hist;
  j["mean_q_star"] = r.mean_q_star;
  return j;
}

std::string to_csv_table(const SimulationReport& r) {
  std::ostringstream s;
  s << "statistic";
  for (const auto& m : r.rows) {
    s << ',' << m.method;
    if (m.method == "GCV") s << " q=" << m.q;
  }
  s << '\n' << std::scientific << std::setprecision(6);
  auto line = [&](const char* name, auto get) {
    s << name;
    for (const auto& m : r.rows) s << ',' << get(m);
    s << '\n';
  };
  line("mean_lambda", [](const MethodRow& m) { return m.mean_lambda; });
  line("var_lambda", [](const MethodRow& m) { return m.var_lambda; });
  line("amse", [](const MethodRow& m) { return m.amse; });
  line("R", [](const MethodRow& m) { return m.ratio; });
  return s.str();
}

json to_json(const CoverageReport& r) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "coverage";
  j["generator"] = r.generator;
  j["n"] = r.n;
  j["replicates"] = r.replicates;
  j["L"] = r.L;
  j["alpha"] = r.alpha;
  j["coverage"] = r.coverage;
  j["radius_quantiles"] = {{"min", r.radius.min}, {"q25", r.radius.q25}, {"median", r.radius.median},
                           {"q75", r.radius.q75}, {"max", r.radius.max}};
  j["radius_mean"] = r.radius.mean;
  j["target_rate"] = r.target_rate;
  return j;
}

json to_json(const CoverageLossReport& r) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "compare";
  j["generator"] = r.generator;
  j["n"] = r.n;
  j["replicates"] = r.replicates;
  j["beta"] = r.beta;
  j["lambda_beta"] = r.lambda_beta;
  j["radius_gcv_ball"] = r.radius_gcv_ball;
  j["two_sample"] = r.two_sample;
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"q", row.q},
                    {"coverage_gcv_ball", row.coverage_gcv_ball},
                    {"coverage_eb_ball", row.coverage_eb_ball},
                    {"mean_lambda_f", row.mean_lambda_f},
                    {"n", r.n},
                    {"replicates", r.replicates}});
  }
  j["rows"] = rows;
  return j;
}

json to_json(const FitResult& r) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "fit";
  j["n"] = r.fitted.size();
  j["lambda_hat"] = r.lambda_hat;
  j["q_hat"] = r.q_hat;
  j["q_star"] = r.q_star;
  j["sigma2_hat"] = r.sigma2_hat;
  j["boundary"] = to_string(r.boundary);
  j["warning"] = r.warning;
  json diags = json::array();
  for (const auto& d : r.diagnostics) {
    diags.push_back({{"q", d.q},
                     {"lambda", d.lambda},
                     {"t_lambda", d.t_lambda},
                     {"t_q", d.t_q},
                     {"boundary", to_string(d.boundary)}});
  }
  j["diagnostics"] = diags;
  return j;
}

}  // namespace ebs
