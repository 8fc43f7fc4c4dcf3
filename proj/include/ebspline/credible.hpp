#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ebspline/ebcore.hpp"
#include "ebspline/signals.hpp"
#include "ebspline/spectral.hpp"
#include "ebspline/stats.hpp"

namespace ebs {

struct RadiusSpec {
  double alpha = 0.05;
  std::size_t mc_draws = 10000;
  std::uint64_t seed = 20240607;
  // Indices with weight below this are replaced by their mean contribution.
  // 0 keeps every index.
  double tail_threshold = 1e-6;

  void validate() const;
};

// ||v||^2 = (1/n) sum v_i^2. Every ball and coverage check uses this norm.
double design_norm(const Eigen::VectorXd& v);

// sqrt of the (1 - alpha) quantile of (1/N) sum_i eps_i^2 / (1 + lambda n eta_i),
// eps ~ N(0, I_n), N ~ chi^2_n. Normals are counter-based per (draw, index),
// so different lambda share random numbers.
double radius(const SpectralModel& model, double lambda, const RadiusSpec& spec = {});

struct CredibleBall {
  Eigen::VectorXd center;
  double radius = 0.0;  // sigma_hat * L * r_n
  double r_n = 0.0;
  double L = 2.0;
  double alpha = 0.05;
  double lambda_hat = 0.0;
  double q_hat = 0.0;
  double sigma_hat = 0.0;

  bool contains(const Eigen::VectorXd& f) const;
  double distance(const Eigen::VectorXd& f) const;
};

CredibleBall credible_ball(const FitResult& fit, double L = 2.0, const RadiusSpec& spec = {});

// Draws from t_n(center, sigma2_hat S): Gaussian with spectral variances
// sigma2_hat * w_i, divided by sqrt(chi^2_n / n). Returns an n x draws matrix.
Eigen::MatrixXd sample_posterior(const FitResult& fit, std::size_t draws, std::uint64_t seed);

// Settings shared by the Monte-Carlo experiments.
struct ExperimentOptions {
  double sigma = 0.01;
  std::uint64_t seed = 1;
  Convention convention = Convention::right;
  BasisKind kind = BasisKind::natural_modes;
  FitOptions fit;
  unsigned threads = 0;
};

struct CoverageReport {
  std::string generator;
  std::size_t n = 0;
  std::size_t replicates = 0;
  double L = 2.0;
  double alpha = 0.05;
  double coverage = 0.0;
  Summary radius;
  double target_rate = 0.0;  // n^{-beta/(2 beta + 1)} for the nominal beta
  std::vector<double> radii;
  std::vector<int> covered;
};

CoverageReport coverage_experiment(const Generator& gen, std::size_t n, std::size_t replicates,
                                   double L, const RadiusSpec& spec, const ExperimentOptions& opts);

}  // namespace ebs
