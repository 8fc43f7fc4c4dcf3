#pragma once

#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "ebspline/spectral.hpp"

namespace ebs {

// Gamma(m + 1/(2q)) Gamma(l - 1/(2q)) / (2 pi q Gamma(l + m)), via lgamma.
double kappa(double q, int m, int l);
// kappa(q, 0, 1) through the reflection formula 1 / (2q sin(pi/(2q))).
double kappa01_reflection(double q);

struct TraceCheck {
  double exact_sum = 0.0;
  double approx = 0.0;
  double rel_err = 0.0;
};

// sum_i (a_i)^m (log n eta_i)^r / (1 + a_i)^{m+l}, a_i = lambda n eta_i, over
// the asymptotic eigenvalues, against lambda^{-1/(2q)} log(1/lambda)^r kappa.
// With r = 0 the sum runs over all i (a trace); with r > 0 over i > floor(q).
TraceCheck trace_approx_check(double q, double lambda, std::size_t n, int m, int l, int r = 0);

// Noiseless spectral coefficients B = Phi^T f in the basis of the model
// they are used with.
struct SignalSpectrum {
  Eigen::VectorXd B;
  double beta_nominal = 0.0;
  double M = 0.0;  // optional Sobolev radius, 0 when unknown
};

double expected_t_lambda(const EigenSequence& eigen, const SignalSpectrum& s, double sigma2,
                         double lambda);
// Full expression: quadratic-form term + log(1/lambda) E T_lambda.
double expected_t_q(const EigenSequence& eigen, const SignalSpectrum& s, double sigma2,
                    double lambda);
// The quadratic-form term alone, which is E T_q at the oracle root.
double expected_t_q_quadratic(const EigenSequence& eigen, const SignalSpectrum& s, double lambda);
// E T_q without asymptotic simplification. The leading-order form above drops
// a -sigma^2 sum log(a_i)/(1+a_i)^2 term that decides the sign at n ~ 1e3.
double expected_t_q_exact(const EigenSequence& eigen, const SignalSpectrum& s, double sigma2,
                          double lambda);

// (1/n) sum_{i > null} B_i^2 n eta_i.
double sobolev_energy(const EigenSequence& eigen, const SignalSpectrum& s);

enum class OracleMethod { closed_form, numeric_root };

struct OracleResult {
  double lambda_q = 0.0;  // +inf when the signal lies in the null space
  double beta_bar_estimate = 0.0;
  OracleMethod method = OracleMethod::closed_form;
};

OracleResult oracle_lambda(const EigenSequence& eigen, const SignalSpectrum& s, double sigma2,
                           OracleMethod method);

// Smoothness estimate: first - to + crossing of expected_t_q_exact at the
// oracle lambda over a q grid,
// linearly interpolated. `spectra[k]` must be expressed in the basis of `eigens[k]`.
double beta_bar(const std::vector<EigenSequence>& eigens, const std::vector<SignalSpectrum>& spectra,
                double sigma2);

struct PolishedTail {
  bool holds = true;
  std::size_t worst_j = 0;
  double worst_ratio = 0.0;
};

// (1/n) sum_{i>=j} B_i^2 <= (L/n) sum_{i=j}^{rho j} B_i^2 for N <= j <= n/rho (1-based j).
PolishedTail polished_tail_check(const Eigen::VectorXd& B, double L = 2.0, std::size_t N = 10,
                                 double rho = 2.0);

struct AsymptoticVariances {
  double eb_var = 0.0;
  double gcv_var = 0.0;
  double ratio = 0.0;  // gcv / eb
};

AsymptoticVariances asymptotic_variances(double q);

}  // namespace ebs
