#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ebspline/credible.hpp"
#include "ebspline/ebcore.hpp"
#include "ebspline/signals.hpp"
#include "ebspline/spectral.hpp"

namespace ebs {

enum class Criterion { gcv, mallows_cp };

// n sum X_i^2 (a_i/(1+a_i))^2 / (sum a_i/(1+a_i))^2 over i > floor(q).
double gcv_criterion(const SpectralModel& model, const Eigen::VectorXd& X, double lambda);
// (1/n) ||(I-S)Y||^2 + 2 sigma2 tr(S) / n. Needs a known noise variance.
double mallows_cp(const SpectralModel& model, const Eigen::VectorXd& X, double lambda, double sigma2);

struct GcvOptions {
  Criterion criterion = Criterion::gcv;
  double sigma2 = 0.0;      // Mallows C_p only
  double lambda_lo = 0.0;   // 0 selects the EB default
  double lambda_hi = 1.0;
  int grid_points = 60;
  double log_tol = 1e-4;    // relative, in log lambda
};

struct GcvResult {
  double lambda_f_hat = 0.0;
  double q = 0.0;
  double criterion_value = 0.0;
  bool boundary_flag = false;
};

GcvResult select_lambda_gcv_coeffs(const SpectralModel& model, const Eigen::VectorXd& X,
                                   const GcvOptions& opts = {});
GcvResult select_lambda_gcv(const SpectralModel& model, const Eigen::VectorXd& y,
                            const GcvOptions& opts = {});

struct CoverageLossRow {
  double q = 0.0;
  double coverage_gcv_ball = 0.0;
  double coverage_eb_ball = 0.0;
  double mean_lambda_f = 0.0;
};

struct CoverageLossReport {
  std::string generator;
  std::size_t n = 0;
  std::size_t replicates = 0;
  double beta = 0.0;
  double lambda_beta = 0.0;    // oracle lambda at q = beta, true sigma
  double radius_gcv_ball = 0.0;  // sigma * r_n(lambda_beta, beta)
  bool two_sample = true;
  std::vector<CoverageLossRow> rows;
};

// GCV-centred ball with radius sigma r_n(lambda_beta, beta) against the EB ball
// C_n(L). With two_sample, lambda_f comes from an independent copy of the data.
CoverageLossReport theorem4_experiment(const Generator& gen, std::size_t n,
                                       const std::vector<double>& q_choices, std::size_t replicates,
                                       const RadiusSpec& spec, const ExperimentOptions& opts,
                                       double L = 2.0, bool two_sample = true);

}  // namespace ebs
