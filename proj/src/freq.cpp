#include "ebspline/freq.hpp"

#include <cmath>
#include <limits>

#include <boost/math/tools/minima.hpp>

#include "ebspline/errors.hpp"
#include "ebspline/oracle.hpp"
#include "ebspline/parallel.hpp"
#include "ebspline/rng.hpp"

namespace ebs {

using Eigen::Index;
using Eigen::VectorXd;

double gcv_criterion(const SpectralModel& model, const VectorXd& X, double lambda) {
  if (static_cast<std::size_t>(X.size()) != model.n()) throw InputError("gcv: length mismatch");
  if (!(lambda > 0.0)) throw InputError("gcv needs lambda > 0");
  const auto& v = model.eigen.values;
  double num = 0.0, den = 0.0;
  for (Index i = static_cast<Index>(model.null_dim()); i < X.size(); ++i) {
    const double a = lambda * v[i];
    const double r = a / (1.0 + a);
    num += X[i] * X[i] * r * r;
    den += r;
  }
  return static_cast<double>(model.n()) * num / (den * den);
}

double mallows_cp(const SpectralModel& model, const VectorXd& X, double lambda, double sigma2) {
  if (static_cast<std::size_t>(X.size()) != model.n()) throw InputError("mallows cp: length mismatch");
  const auto& v = model.eigen.values;
  double rss = 0.0, tr = 0.0;
  for (Index i = 0; i < X.size(); ++i) {
    const double a = lambda * v[i];
    const double r = a / (1.0 + a);
    rss += X[i] * X[i] * r * r;
    tr += 1.0 / (1.0 + a);
  }
  const double n = static_cast<double>(model.n());
  return rss / n + 2.0 * sigma2 * tr / n;
}

GcvResult select_lambda_gcv_coeffs(const SpectralModel& model, const VectorXd& X, const GcvOptions& opts) {
  if (opts.criterion == Criterion::mallows_cp && !(opts.sigma2 > 0.0))
    throw InputError("Mallows C_p needs a known sigma2 > 0");
  const double lo = opts.lambda_lo > 0.0 ? opts.lambda_lo : default_lambda_lo(model);
  const double hi = opts.lambda_hi;
  if (!(hi > lo) || opts.grid_points < 3) throw InputError("bad GCV search settings");

  auto crit = [&](double u) {
    const double lam = std::exp(u);
    return opts.criterion == Criterion::gcv ? gcv_criterion(model, X, lam)
                                            : mallows_cp(model, X, lam, opts.sigma2);
  };

  const double ulo = std::log(lo), uhi = std::log(hi);
  const int m = opts.grid_points;
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    u[k] = k + 1 == m ? uhi : ulo + (uhi - ulo) * k / (m - 1);
    const double c = crit(u[k]);
    if (c < best_val) {
      best_val = c;
      best = k;
    }
  }

  const double a = u[static_cast<std::size_t>(std::max(best - 1, 0))];
  const double b = u[static_cast<std::size_t>(std::min(best + 1, m - 1))];
  // Bits of precision giving a relative tolerance of about opts.log_tol.
  const int bits = std::max(4, static_cast<int>(std::ceil(1.0 - std::log2(opts.log_tol))));
  const auto r = boost::math::tools::brent_find_minima(crit, a, b, bits);

  GcvResult res;
  res.q = model.q;
  if (r.second <= best_val) {
    res.lambda_f_hat = std::exp(r.first);
    res.criterion_value = r.second;
  } else {
    res.lambda_f_hat = std::exp(u[static_cast<std::size_t>(best)]);
    res.criterion_value = best_val;
  }
  const double span = (uhi - ulo) / (m - 1);
  const double ur = std::log(res.lambda_f_hat);
  res.boundary_flag = (ur - ulo) < 1e-3 * span || (uhi - ur) < 1e-3 * span;
  return res;
}

GcvResult select_lambda_gcv(const SpectralModel& model, const VectorXd& y, const GcvOptions& opts) {
  return select_lambda_gcv_coeffs(model, forward(model.basis, y), opts);
}

CoverageLossReport theorem4_experiment(const Generator& gen, std::size_t n,
                                       const std::vector<double>& q_choices, std::size_t replicates,
                                       const RadiusSpec& spec, const ExperimentOptions& opts, double L,
                                       bool two_sample) {
  if (q_choices.empty()) throw InputError("coverage-loss experiment needs at least one q");
  if (replicates < 1) throw InputError("coverage-loss experiment needs replicates >= 1");
  const double beta = gen.beta_nominal();
  if (!std::isfinite(beta) || beta < 1.0 || beta != std::floor(beta))
    throw InputError("coverage-loss experiment needs a generator with integer nominal smoothness");

  const DesignGrid grid = DesignGrid::make(n, opts.convention);
  const ModelFamily family(grid, opts.kind);
  const VectorXd f = generate(gen, grid, opts.kind);

  CoverageLossReport rep;
  rep.generator = gen.name();
  rep.n = n;
  rep.replicates = replicates;
  rep.beta = beta;
  rep.two_sample = two_sample;

  const auto model_beta = family.model(beta);
  SignalSpectrum spectrum;
  spectrum.B = forward(model_beta->basis, f);
  spectrum.beta_nominal = beta;
  const double sigma2 = opts.sigma * opts.sigma;
  rep.lambda_beta = oracle_lambda(model_beta->eigen, spectrum, sigma2, OracleMethod::numeric_root).lambda_q;
  rep.radius_gcv_ball = opts.sigma * radius(*model_beta, rep.lambda_beta, spec);

  const std::size_t nq = q_choices.size();
  std::vector<int> eb_hit(replicates, 0);
  std::vector<int> gcv_hit(replicates * nq, 0);
  std::vector<double> lam_f(replicates * nq, 0.0);
  for (double q : q_choices) family.model(q);

  parallel_for(
      replicates,
      [&](std::size_t r) {
        auto eng_b = rng::engine(opts.seed, rng::kNoise, r);
        const VectorXd yb = add_noise(f, NoiseModel{opts.sigma}, eng_b);
        VectorXd ya = yb;
        if (two_sample) {
          auto eng_a = rng::engine(opts.seed, rng::kNoiseSecond, r);
          ya = add_noise(f, NoiseModel{opts.sigma}, eng_a);
        }
        const FitResult fr = fit(family, yb, opts.fit);
        eb_hit[r] = credible_ball(fr, L, spec).contains(f) ? 1 : 0;

        for (std::size_t k = 0; k < nq; ++k) {
          const auto model = family.model(q_choices[k]);
          const GcvResult g = select_lambda_gcv(*model, ya);
          const VectorXd w = smoother_weights(model->eigen, g.lambda_f_hat);
          const VectorXd fhat = inverse(model->basis, w.cwiseProduct(forward(model->basis, yb)));
          gcv_hit[r * nq + k] = design_norm(f - fhat) <= rep.radius_gcv_ball ? 1 : 0;
          lam_f[r * nq + k] = g.lambda_f_hat;
        }
      },
      opts.threads);

  double eb = 0.0;
  for (int h : eb_hit) eb += h;
  eb /= static_cast<double>(replicates);
  for (std::size_t k = 0; k < nq; ++k) {
    CoverageLossRow row;
    row.q = q_choices[k];
    row.coverage_eb_ball = eb;
    double hits = 0.0, lam = 0.0;
    for (std::size_t r = 0; r < replicates; ++r) {
      hits += gcv_hit[r * nq + k];
      lam += lam_f[r * nq + k];
    }
    row.coverage_gcv_ball = hits / static_cast<double>(replicates);
    row.mean_lambda_f = lam / static_cast<double>(replicates);
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace ebs
