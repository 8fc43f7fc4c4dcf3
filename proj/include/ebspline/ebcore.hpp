#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ebspline/spectral.hpp"

namespace ebs {

// Inverse-gamma prior on sigma^2. A negative `a` means the default q/2.
struct HyperParams {
  double a = -1.0;
  double b = 0.0;
};

// Marginal log-likelihood up to a constant. Throws DegenerateInput when the
// residual quadratic form vanishes.
double marginal_loglik(const SpectralModel& model, const Eigen::VectorXd& X, double lambda,
                       const HyperParams& prior = {});

// Estimating equations in their spectral form (a = q/2, b = 0).
double t_lambda(const SpectralModel& model, const Eigen::VectorXd& X, double lambda);
double t_q(const SpectralModel& model, const Eigen::VectorXd& X, double lambda);

// (1/n) sum_{i > null} X_i^2 lambda n eta_i / (1 + lambda n eta_i). lambda may be 0 or +inf.
double sigma2_hat(const SpectralModel& model, const Eigen::VectorXd& X, double lambda);

enum class Boundary { none, lower, upper };
std::string to_string(Boundary b);

struct LambdaOptions {
  double lambda_lo = 0.0;  // 0 selects 1 / (n * max n eta)
  double lambda_hi = 1.0;
  int points_per_decade = 8;
  int max_iter = 200;
  double log_tol = 1e-10;
};

struct LambdaSolution {
  double lambda = 0.0;
  double t_value = 0.0;
  Boundary boundary = Boundary::none;
};

// Default lower end of the lambda search interval.
double default_lambda_lo(const SpectralModel& model);

// Root of T_lambda in log lambda. Among sign changes from - to + (local
// maxima of the likelihood) the one with the largest lambda is bisected.
LambdaSolution solve_lambda(const SpectralModel& model, const Eigen::VectorXd& X,
                            const LambdaOptions& opts = {});

struct QGrid {
  std::vector<double> values;

  static QGrid integers(int qmin, int qmax);
  static QGrid range(double qmin, double qmax, double step);
  // Spacing 1/log(n)^2 between qmin and qmax.
  static QGrid refined(std::size_t n, double qmin, double qmax);
  void validate() const;
};

enum class RoundingPolicy { integer, raw };

struct QDiagnostic {
  double q = 0.0;
  double lambda = 0.0;
  double t_lambda = 0.0;
  double t_q = 0.0;
  Boundary boundary = Boundary::none;
};

struct QSelection {
  double q_hat = 0.0;
  double q_star = 0.0;
  bool warning = false;  // T_q > 0 on the whole grid
  std::vector<QDiagnostic> per_q;
};

QSelection select_q(const ModelFamily& family, const Eigen::VectorXd& y, const QGrid& grid,
                    RoundingPolicy policy = RoundingPolicy::integer,
                    const LambdaOptions& opts = {});

struct FitOptions {
  QGrid grid = QGrid::integers(1, 6);
  RoundingPolicy policy = RoundingPolicy::integer;
  LambdaOptions solver;
  std::optional<double> force_q;       // skip order selection
  std::optional<double> force_lambda;  // 0 and +inf allowed
};

struct FitResult {
  double lambda_hat = 0.0;
  double q_hat = 0.0;
  double q_star = 0.0;
  Eigen::VectorXd fitted;
  double sigma2_hat = 0.0;
  Eigen::VectorXd coeffs;   // X = Phi^T y in the basis of degree floor(q_hat)
  Eigen::VectorXd weights;  // smoother weights at (lambda_hat, q_hat)
  Boundary boundary = Boundary::none;
  bool warning = false;
  std::vector<QDiagnostic> diagnostics;
  std::shared_ptr<const SpectralModel> model;  // model at q_hat
};

FitResult fit(const ModelFamily& family, const Eigen::VectorXd& y, const FitOptions& opts = {});

}  // namespace ebs
