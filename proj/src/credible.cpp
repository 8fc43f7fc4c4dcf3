#include "ebspline/credible.hpp"

#include <cmath>
#include <random>

#include "ebspline/errors.hpp"
#include "ebspline/parallel.hpp"
#include "ebspline/rng.hpp"

namespace ebs {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void RadiusSpec::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
  if (mc_draws < 1000) throw InputError("radius needs at least 1000 Monte-Carlo draws");
  if (!(tail_threshold >= 0.0 && tail_threshold < 1.0)) throw InputError("tail threshold must lie in [0, 1)");
}

double design_norm(const VectorXd& v) {
  return v.size() == 0 ? 0.0 : std::sqrt(v.squaredNorm() / static_cast<double>(v.size()));
}

double radius(const SpectralModel& model, double lambda, const RadiusSpec& spec) {
  spec.validate();
  const VectorXd w = smoother_weights(model.eigen, lambda);
  std::vector<Index> active;
  double tail_mean = 0.0;
  for (Index i = 0; i < w.size(); ++i) {
    if (w[i] >= spec.tail_threshold) {
      active.push_back(i);
    } else {
      tail_mean += w[i];
    }
  }

  const double n = static_cast<double>(model.n());
  auto chi = rng::engine(spec.seed, rng::kChiSquare, 0);
  std::gamma_distribution<double> chi2(n / 2.0, 2.0);
  const std::uint64_t key = rng::substream(spec.seed, rng::kRadius, 0);

  std::vector<double> stat(spec.mc_draws);
  for (std::size_t j = 0; j < spec.mc_draws; ++j) {
    double s = tail_mean;
    for (Index i : active) {
      const double e = rng::counter_normal(key, j, static_cast<std::uint64_t>(i));
      s += w[i] * e * e;
    }
    stat[j] = s / chi2(chi);
  }
  return std::sqrt(quantile(std::move(stat), 1.0 - spec.alpha));
}

bool CredibleBall::contains(const VectorXd& f) const { return distance(f) <= radius; }

double CredibleBall::distance(const VectorXd& f) const {
  if (f.size() != center.size()) throw InputError("membership test: length mismatch");
  return design_norm(f - center);
}

CredibleBall credible_ball(const FitResult& fit, double L, const RadiusSpec& spec) {
  if (!(L >= 1.0)) throw InputError("credible ball needs L >= 1");
  if (!fit.model) throw InputError("fit result carries no model");
  CredibleBall b;
  b.center = fit.fitted;
  b.L = L;
  b.alpha = spec.alpha;
  b.lambda_hat = fit.lambda_hat;
  b.q_hat = fit.q_hat;
  b.sigma_hat = std::sqrt(fit.sigma2_hat);
  b.r_n = radius(*fit.model, fit.lambda_hat, spec);
  b.radius = b.sigma_hat * L * b.r_n;
  return b;
}

MatrixXd sample_posterior(const FitResult& fit, std::size_t draws, std::uint64_t seed) {
  if (draws < 1) throw InputError("posterior sampling needs draws >= 1");
  if (!fit.model) throw InputError("fit result carries no model");
  const Index n = fit.fitted.size();
  auto eng = rng::engine(seed, rng::kPosterior, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::gamma_distribution<double> chi2(static_cast<double>(n) / 2.0, 2.0);

  const VectorXd sd = (fit.sigma2_hat * fit.weights.array()).sqrt().matrix();
  MatrixXd coef(n, static_cast<Index>(draws));
  for (Index j = 0; j < coef.cols(); ++j) {
    const double scale = 1.0 / std::sqrt(chi2(eng) / static_cast<double>(n));
    for (Index i = 0; i < n; ++i) coef(i, j) = sd[i] * normal(eng) * scale;
  }
  MatrixXd out = fit.model->basis.matrix() * coef;
  out.colwise() += fit.fitted;
  return out;
}

CoverageReport coverage_experiment(const Generator& gen, std::size_t n, std::size_t replicates,
                                   double L, const RadiusSpec& spec, const ExperimentOptions& opts) {
  if (replicates < 1) throw InputError("coverage experiment needs replicates >= 1");
  const DesignGrid grid = DesignGrid::make(n, opts.convention);
  const ModelFamily family(grid, opts.kind);
  const VectorXd f = generate(gen, grid, opts.kind);

  CoverageReport rep;
  rep.generator = gen.name();
  rep.n = n;
  rep.replicates = replicates;
  rep.L = L;
  rep.alpha = spec.alpha;
  rep.radii.assign(replicates, 0.0);
  rep.covered.assign(replicates, 0);

  parallel_for(
      replicates,
      [&](std::size_t r) {
        auto eng = rng::engine(opts.seed, rng::kNoise, r);
        const VectorXd y = add_noise(f, NoiseModel{opts.sigma}, eng);
        const FitResult fr = fit(family, y, opts.fit);
        const CredibleBall ball = credible_ball(fr, L, spec);
        rep.radii[r] = ball.radius;
        rep.covered[r] = ball.contains(f) ? 1 : 0;
      },
      opts.threads);

  double hits = 0.0;
  for (int c : rep.covered) hits += c;
  rep.coverage = hits / static_cast<double>(replicates);
  rep.radius = summarize(rep.radii);
  const double beta = gen.beta_nominal();
  rep.target_rate = std::isfinite(beta) && beta > 0.0
                        ? std::pow(static_cast<double>(n), -beta / (2.0 * beta + 1.0))
                        : 0.0;
  return rep;
}

}  // namespace ebs
