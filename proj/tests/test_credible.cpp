#include <doctest.h>

#include <cmath>
#include <random>

#include "ebspline/credible.hpp"
#include "ebspline/errors.hpp"
#include "ebspline/stats.hpp"
#include "test_support.hpp"

using namespace ebs;
using Eigen::VectorXd;

TEST_CASE("design norm") {
  VectorXd v(4);
  v << 1, 1, 1, 1;
  CHECK(design_norm(v) == 1.0);
  CHECK(design_norm(VectorXd()) == 0.0);
}

TEST_CASE("radius matches an independent Monte-Carlo quantile") {
  const auto grid = DesignGrid::make(200, Convention::midpoint);
  const auto m = make_model(grid, 2, BasisKind::natural_modes);
  const double lam = 1e-6;
  RadiusSpec spec;
  spec.mc_draws = 20000;
  const double r = radius(m, lam, spec);

  const VectorXd w = smoother_weights(m.eigen, lam);
  std::mt19937_64 eng(99);
  std::normal_distribution<double> nd;
  std::chi_squared_distribution<double> chi(200.0);
  std::vector<double> stat(40000);
  for (auto& s : stat) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      const double e = nd(eng);
      acc += w[i] * e * e;
    }
    s = acc / chi(eng);
  }
  CHECK(r == doctest::Approx(std::sqrt(quantile(stat, 0.95))).epsilon(0.02));
}

TEST_CASE("radius is monotone in lambda and insensitive to the tail cut") {
  const auto grid = DesignGrid::make(300, Convention::right);
  const auto m = make_model(grid, 3, BasisKind::natural_modes);
  RadiusSpec spec;
  spec.mc_draws = 2000;
  double prev = radius(m, 1e-16, spec);
  for (double lam = 1e-14; lam <= 1.0; lam *= 100.0) {
    const double r = radius(m, lam, spec);
    CHECK(r <= prev);
    prev = r;
  }
  RadiusSpec full = spec;
  full.tail_threshold = 0.0;
  CHECK(radius(m, 1e-10, spec) == doctest::Approx(radius(m, 1e-10, full)).epsilon(1e-3));
  CHECK(radius(m, 1e-10, spec) == radius(m, 1e-10, spec));
}

TEST_CASE("radius spec validation") {
  const auto m = make_model(DesignGrid::make(50, Convention::right), 2, BasisKind::natural_modes);
  RadiusSpec s;
  s.alpha = 0.0;
  CHECK_THROWS_AS(radius(m, 1e-4, s), InputError);
  s.alpha = 1.0;
  CHECK_THROWS_AS(radius(m, 1e-4, s), InputError);
  s = RadiusSpec{};
  s.mc_draws = 500;
  CHECK_THROWS_AS(radius(m, 1e-4, s), InputError);
}

TEST_CASE("credible ball") {
  const auto grid = DesignGrid::make(400, Convention::right);
  const ModelFamily fam(grid, BasisKind::natural_modes);
  const VectorXd f = generate(Generator::f1(), grid);
  const FitResult fr = fit(fam, testing::noisy(f, 0.01, 5));
  RadiusSpec spec;
  spec.mc_draws = 2000;
  const CredibleBall b = credible_ball(fr, 2.0, spec);
  CHECK(b.radius > 0.0);
  CHECK(b.contains(b.center));
  CHECK(b.radius == doctest::Approx(b.sigma_hat * 2.0 * b.r_n));
  CHECK(b.distance(f) == doctest::Approx(design_norm(f - fr.fitted)));
  CHECK_THROWS_AS(credible_ball(fr, 0.5, spec), InputError);
  CHECK_THROWS_AS(b.distance(VectorXd::Zero(3)), InputError);
}

TEST_CASE("posterior draws") {
  const auto grid = DesignGrid::make(200, Convention::right);
  const ModelFamily fam(grid, BasisKind::natural_modes);
  const VectorXd f = generate(Generator::f2(), grid);
  const FitResult fr = fit(fam, testing::noisy(f, 0.01, 3));
  const Eigen::MatrixXd a = sample_posterior(fr, 2000, 11);
  const Eigen::MatrixXd b = sample_posterior(fr, 2000, 11);
  CHECK(a.rows() == 200);
  CHECK(a.cols() == 2000);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  const VectorXd mean = a.rowwise().mean();
  CHECK(design_norm(mean - fr.fitted) < 0.2 * std::sqrt(fr.sigma2_hat));
  CHECK_THROWS_AS(sample_posterior(fr, 0, 1), InputError);
}

TEST_CASE("coverage experiment replays exactly") {
  RadiusSpec spec;
  spec.mc_draws = 1000;
  ExperimentOptions opts;
  const auto a = coverage_experiment(Generator::f1(), 200, 6, 2.0, spec, opts);
  opts.threads = 1;
  const auto b = coverage_experiment(Generator::f1(), 200, 6, 2.0, spec, opts);
  CHECK(a.radii == b.radii);
  CHECK(a.covered == b.covered);
  CHECK(a.coverage >= 0.0);
  CHECK(a.coverage <= 1.0);
  CHECK(a.target_rate == doctest::Approx(std::pow(200.0, -3.0 / 7.0)));
  CHECK_THROWS_AS(coverage_experiment(Generator::f1(), 200, 0, 2.0, spec, opts), InputError);
}
