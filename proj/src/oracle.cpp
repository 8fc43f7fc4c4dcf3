#include "ebspline/oracle.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "ebspline/errors.hpp"
#include "ebspline/roots.hpp"

namespace ebs {
namespace {

using Eigen::Index;
using Eigen::VectorXd;

void check_spectrum(const EigenSequence& e, const SignalSpectrum& s) {
  if (s.B.size() != e.values.size()) throw InputError("spectrum length does not match eigenvalues");
}

}  // namespace

double kappa(double q, int m, int l) {
  if (!(q > 0.5)) throw InputError("kappa needs q > 1/2");
  if (l < 1) throw InputError("kappa needs l >= 1");
  if (m < 0) throw InputError("kappa needs m >= 0");
  const double h = 1.0 / (2.0 * q);
  const double lg = std::lgamma(m + h) + std::lgamma(l - h) - std::lgamma(static_cast<double>(l + m));
  return std::exp(lg) / (2.0 * std::numbers::pi * q);
}

double kappa01_reflection(double q) {
  if (!(q > 0.5)) throw InputError("kappa needs q > 1/2");
  return 1.0 / (2.0 * q * std::sin(std::numbers::pi / (2.0 * q)));
}

TraceCheck trace_approx_check(double q, double lambda, std::size_t n, int m, int l, int r) {
  if (!(lambda > 0.0)) throw InputError("trace check needs lambda > 0");
  const EigenSequence e = eigenvalues(q, n);
  const Index start = r > 0 ? static_cast<Index>(e.null_dim()) : 0;
  double sum = 0.0;
  for (Index i = start; i < e.values.size(); ++i) {
    const double a = lambda * e.values[i];
    double term = std::pow(a, m) / std::pow(1.0 + a, m + l);
    if (r > 0) term *= std::pow(std::log(e.values[i]), r);
    sum += term;
  }
  TraceCheck t;
  t.exact_sum = sum;
  t.approx = std::pow(lambda, -1.0 / (2.0 * q)) * std::pow(std::log(1.0 / lambda), r) * kappa(q, m, l);
  t.rel_err = std::abs(sum - t.approx) / t.approx;
  return t;
}

double expected_t_lambda(const EigenSequence& eigen, const SignalSpectrum& s, double sigma2,
                         double lambda) {
  check_spectrum(eigen, s);
  double acc = 0.0;
  for (Index i = static_cast<Index>(eigen.null_dim()); i < s.B.size(); ++i) {
    const double a = lambda * eigen.values[i];
    const double w = 1.0 / (1.0 + a);
    acc += s.B[i] * s.B[i] * a * w * w - sigma2 * w * w;
  }
  return acc / static_cast<double>(eigen.n);
}

double expected_t_q_quadratic(const EigenSequence& eigen, const SignalSpectrum& s, double lambda) {
  check_spectrum(eigen, s);
  double acc = 0.0;
  for (Index i = static_cast<Index>(eigen.null_dim()); i < s.B.size(); ++i) {
    const double a = lambda * eigen.values[i];
    const double w = 1.0 / (1.0 + a);
    acc += s.B[i] * s.B[i] * a * std::log(a) * w * w;
  }
  return acc / static_cast<double>(eigen.n);
}

double expected_t_q(const EigenSequence& eigen, const SignalSpectrum& s, double sigma2,
                    double lambda) {
  return expected_t_q_quadratic(eigen, s, lambda) +
         std::log(1.0 / lambda) * expected_t_lambda(eigen, s, sigma2, lambda);
}

double expected_t_q_exact(const EigenSequence& eigen, const SignalSpectrum& s, double sigma2,
                          double lambda) {
  check_spectrum(eigen, s);
  double s1 = 0.0, s2 = 0.0, s3 = 0.0;
  for (Index i = static_cast<Index>(eigen.null_dim()); i < s.B.size(); ++i) {
    const double a = lambda * eigen.values[i];
    const double w = 1.0 / (1.0 + a);
    const double L = std::log(eigen.values[i]);
    const double ex2 = s.B[i] * s.B[i] + sigma2;
    s1 += ex2 * a * L * w * w;
    s2 += ex2 * a * w;
    s3 += L * w;
  }
  const double n = static_cast<double>(eigen.n);
  return s1 / n - s2 * s3 / (n * n);
}

double sobolev_energy(const EigenSequence& eigen, const SignalSpectrum& s) {
  check_spectrum(eigen, s);
  double acc = 0.0;
  for (Index i = static_cast<Index>(eigen.null_dim()); i < s.B.size(); ++i)
    acc += s.B[i] * s.B[i] * eigen.values[i];
  return acc / static_cast<double>(eigen.n);
}

OracleResult oracle_lambda(const EigenSequence& eigen, const SignalSpectrum& s, double sigma2,
                           OracleMethod method) {
  check_spectrum(eigen, s);
  if (!(sigma2 > 0.0)) throw InputError("oracle lambda needs sigma2 > 0");
  OracleResult res;
  res.method = method;
  res.beta_bar_estimate = s.beta_nominal;
  const double n = static_cast<double>(eigen.n);
  const double q = eigen.q;
  const double energy = sobolev_energy(eigen, s);
  if (!(energy > 0.0)) {
    res.lambda_q = std::numeric_limits<double>::infinity();
    return res;
  }
  if (method == OracleMethod::closed_form) {
    res.lambda_q = std::pow(n * energy / (sigma2 * kappa(q, 0, 2)), -2.0 * q / (2.0 * q + 1.0));
    return res;
  }
  const double vmax = eigen.values.maxCoeff();
  const double ulo = std::log(1.0 / (n * vmax));
  const double uhi = std::log(1e12);
  auto f = [&](double u) { return expected_t_lambda(eigen, s, sigma2, std::exp(u)); };
  const auto c = last_up_crossing(f, ulo, uhi, 8, 1e-12, 200);
  if (c.found) {
    res.lambda_q = std::exp(c.u);
  } else {
    res.lambda_q = c.f_last <= 0.0 ? std::numeric_limits<double>::infinity() : std::exp(ulo);
  }
  return res;
}

double beta_bar(const std::vector<EigenSequence>& eigens, const std::vector<SignalSpectrum>& spectra,
                double sigma2) {
  if (eigens.empty() || eigens.size() != spectra.size())
    throw InputError("beta_bar needs matching, non-empty eigen and spectrum lists");
  std::vector<double> qs, ts;
  for (std::size_t k = 0; k < eigens.size(); ++k) {
    const auto o = oracle_lambda(eigens[k], spectra[k], sigma2, OracleMethod::numeric_root);
    qs.push_back(eigens[k].q);
    ts.push_back(std::isinf(o.lambda_q) ? 0.0 : expected_t_q_exact(eigens[k], spectra[k], sigma2, o.lambda_q));
  }
  for (std::size_t k = 0; k + 1 < qs.size(); ++k) {
    if (ts[k] <= 0.0 && ts[k + 1] > 0.0) return qs[k] + (-ts[k]) / (ts[k + 1] - ts[k]) * (qs[k + 1] - qs[k]);
  }
  return ts.front() > 0.0 ? qs.front() : qs.back();
}

PolishedTail polished_tail_check(const VectorXd& B, double L, std::size_t N, double rho) {
  if (!(rho >= 2.0)) throw InputError("polished tail check needs rho >= 2");
  if (N < 1) throw InputError("polished tail check needs N >= 1");
  const std::size_t n = static_cast<std::size_t>(B.size());
  // tail[j] = sum_{i >= j} B_i^2, 1-based.
  std::vector<double> tail(n + 2, 0.0);
  for (std::size_t i = n; i >= 1; --i) tail[i] = tail[i + 1] + B[static_cast<Index>(i - 1)] * B[static_cast<Index>(i - 1)];

  PolishedTail out;
  const auto jmax = static_cast<std::size_t>(std::floor(static_cast<double>(n) / rho));
  for (std::size_t j = N; j <= jmax; ++j) {
    const auto hi = std::min(n, static_cast<std::size_t>(std::floor(rho * static_cast<double>(j))));
    const double lhs = tail[j];
    const double block = tail[j] - tail[hi + 1];
    double ratio;
    if (block > 0.0) {
      ratio = lhs / block;
    } else {
      ratio = lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    if (ratio > out.worst_ratio || out.worst_j == 0) {
      out.worst_ratio = ratio;
      out.worst_j = j;
    }
  }
  out.holds = out.worst_ratio <= L;
  return out;
}

AsymptoticVariances asymptotic_variances(double q) {
  AsymptoticVariances v;
  const double eb_den = 3.0 * kappa(q, 0, 2) - 2.0 * kappa(q, 0, 3);
  const double gcv_den = 4.0 * kappa(q, 1, 2) - 3.0 * kappa(q, 1, 3);
  v.eb_var = 2.0 * kappa(q, 2, 2) / (eb_den * eb_den);
  v.gcv_var = 2.0 * kappa(q, 4, 2) / (gcv_den * gcv_den);
  v.ratio = v.gcv_var / v.eb_var;
  return v;
}

}  // namespace ebs
