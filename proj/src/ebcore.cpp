#include "ebspline/ebcore.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ebspline/errors.hpp"
#include "ebspline/roots.hpp"

namespace ebs {
namespace {

using Eigen::Index;
using Eigen::VectorXd;

void check_lengths(const SpectralModel& model, const VectorXd& X) {
  if (static_cast<std::size_t>(X.size()) != model.n())
    throw InputError("coefficient vector length does not match the model");
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InputError("lambda must be finite and > 0");
}

}  // namespace

std::string to_string(Boundary b) {
  switch (b) {
    case Boundary::none: return "none";
    case Boundary::lower: return "lower";
    case Boundary::upper: return "upper";
  }
  return "?";
}

double marginal_loglik(const SpectralModel& model, const VectorXd& X, double lambda,
                       const HyperParams& prior) {
  check_lengths(model, X);
  check_lambda(lambda);
  const double q = model.q;
  const double a = prior.a < 0.0 ? q / 2.0 : prior.a;
  const auto& v = model.eigen.values;
  const double n = static_cast<double>(model.n());
  double rss = 2.0 * prior.b;
  double logdet = 0.0;
  for (Index i = static_cast<Index>(model.null_dim()); i < X.size(); ++i) {
    const double ai = lambda * v[i];
    rss += X[i] * X[i] * ai / (1.0 + ai);
    logdet += std::log(ai) - std::log1p(ai);
  }
  if (!(rss > 0.0)) throw DegenerateInput("residual quadratic form is zero; likelihood undefined");
  return -(a + (n - q) / 2.0) * std::log(rss) + 0.5 * logdet;
}

double t_lambda(const SpectralModel& model, const VectorXd& X, double lambda) {
  check_lengths(model, X);
  const auto& v = model.eigen.values;
  double s1 = 0.0, s2 = 0.0, s3 = 0.0;
  for (Index i = static_cast<Index>(model.null_dim()); i < X.size(); ++i) {
    const double a = lambda * v[i];
    const double w = 1.0 / (1.0 + a);
    const double x2 = X[i] * X[i];
    s1 += x2 * a * w * w;
    s2 += x2 * a * w;
    s3 += w;
  }
  const double n = static_cast<double>(model.n());
  return s1 / n - s2 * s3 / (n * n);
}

double t_q(const SpectralModel& model, const VectorXd& X, double lambda) {
  check_lengths(model, X);
  const auto& v = model.eigen.values;
  double s1 = 0.0, s2 = 0.0, s3 = 0.0;
  for (Index i = static_cast<Index>(model.null_dim()); i < X.size(); ++i) {
    const double a = lambda * v[i];
    const double w = 1.0 / (1.0 + a);
    const double x2 = X[i] * X[i];
    const double lv = std::log(v[i]);
    s1 += x2 * a * lv * w * w;
    s2 += x2 * a * w;
    s3 += lv * w;
  }
  const double n = static_cast<double>(model.n());
  return s1 / n - s2 * s3 / (n * n);
}

double sigma2_hat(const SpectralModel& model, const VectorXd& X, double lambda) {
  check_lengths(model, X);
  if (!(lambda >= 0.0)) throw InputError("sigma2_hat needs lambda >= 0");
  const auto& v = model.eigen.values;
  double s = 0.0;
  for (Index i = static_cast<Index>(model.null_dim()); i < X.size(); ++i) {
    const double x2 = X[i] * X[i];
    if (std::isinf(lambda)) {
      s += x2;
    } else {
      const double a = lambda * v[i];
      s += x2 * a / (1.0 + a);
    }
  }
  return s / static_cast<double>(model.n());
}

double default_lambda_lo(const SpectralModel& model) {
  const double vmax = model.eigen.values.maxCoeff();
  return 1.0 / (static_cast<double>(model.n()) * std::max(vmax, 1.0));
}

LambdaSolution solve_lambda(const SpectralModel& model, const VectorXd& X,
                            const LambdaOptions& opts) {
  check_lengths(model, X);
  const double lo = opts.lambda_lo > 0.0 ? opts.lambda_lo : default_lambda_lo(model);
  const double hi = opts.lambda_hi;
  if (!(hi > lo)) throw InputError("empty lambda search interval");

  // Data in the null space up to rounding: no penalty is too strong.
  const double resid = X.tail(X.size() - static_cast<Index>(model.null_dim())).squaredNorm();
  if (resid <= 1e-24 * X.squaredNorm()) {
    LambdaSolution sol;
    sol.lambda = hi;
    sol.t_value = 0.0;
    sol.boundary = Boundary::upper;
    return sol;
  }

  auto T = [&](double u) { return t_lambda(model, X, std::exp(u)); };
  const auto c = last_up_crossing(T, std::log(lo), std::log(hi), opts.points_per_decade,
                                  opts.log_tol, opts.max_iter);
  LambdaSolution sol;
  if (!c.found) {
    const bool upper = c.f_last <= 0.0;
    sol.lambda = upper ? hi : lo;
    sol.t_value = upper ? c.f_last : c.f_first;
    sol.boundary = upper ? Boundary::upper : Boundary::lower;
    return sol;
  }
  sol.lambda = std::exp(c.u);
  sol.t_value = t_lambda(model, X, sol.lambda);
  return sol;
}

QGrid QGrid::integers(int qmin, int qmax) {
  QGrid g;
  for (int q = qmin; q <= qmax; ++q) g.values.push_back(q);
  return g;
}

QGrid QGrid::range(double qmin, double qmax, double step) {
  if (!(step > 0.0)) throw InputError("q grid step must be > 0");
  QGrid g;
  const int count = static_cast<int>(std::floor((qmax - qmin) / step + 1e-9));
  for (int k = 0; k <= count; ++k) g.values.push_back(qmin + k * step);
  return g;
}

QGrid QGrid::refined(std::size_t n, double qmin, double qmax) {
  const double ln = std::log(static_cast<double>(n));
  return range(qmin, qmax, 1.0 / (ln * ln));
}

void QGrid::validate() const {
  if (values.empty()) throw InputError("q grid is empty");
  if (!(values.front() > 0.5)) throw InputError("q grid values must exceed 1/2");
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (!(values[k] > values[k - 1])) throw InputError("q grid must be strictly increasing");
  }
}

QSelection select_q(const ModelFamily& family, const VectorXd& y, const QGrid& grid,
                    RoundingPolicy policy, const LambdaOptions& opts) {
  grid.validate();
  if (static_cast<std::size_t>(y.size()) != family.n()) throw InputError("data length does not match the design");

  std::map<int, VectorXd> coeffs;
  QSelection sel;
  for (double q : grid.values) {
    const auto model = family.model(q);
    const int d = basis_degree(q);
    auto it = coeffs.find(d);
    if (it == coeffs.end()) it = coeffs.emplace(d, forward(model->basis, y)).first;
    const auto sol = solve_lambda(*model, it->second, opts);
    QDiagnostic diag;
    diag.q = q;
    diag.lambda = sol.lambda;
    diag.t_lambda = sol.t_value;
    diag.boundary = sol.boundary;
    diag.t_q = t_q(*model, it->second, sol.lambda);
    sel.per_q.push_back(diag);
  }

  const double scale = y.squaredNorm() / static_cast<double>(y.size());
  const double zero_tol = 1e-12 * scale;
  auto sign = [&](double v) { return v > zero_tol ? 1 : (v < -zero_tol ? -1 : 0); };

  const auto& d = sel.per_q;
  const std::size_t m = d.size();
  bool found = false;
  for (std::size_t k = 0; k + 1 < m; ++k) {
    if (sign(d[k].t_q) <= 0 && sign(d[k + 1].t_q) > 0) {
      const double t0 = d[k].t_q, t1 = d[k + 1].t_q;
      const double frac = t1 > t0 ? std::clamp(-t0 / (t1 - t0), 0.0, 1.0) : 0.0;
      sel.q_star = d[k].q + frac * (d[k + 1].q - d[k].q);
      found = true;
      break;
    }
  }
  if (!found) {
    if (sign(d.front().t_q) > 0) {
      sel.q_star = d.front().q;
      sel.warning = true;
    } else {
      sel.q_star = d.back().q;
    }
  }
  sel.q_hat = policy == RoundingPolicy::integer ? std::max(1.0, std::round(sel.q_star)) : sel.q_star;
  return sel;
}

FitResult fit(const ModelFamily& family, const VectorXd& y, const FitOptions& opts) {
  if (family.n() < 8) throw InputError("fit needs n >= 8");
  if (static_cast<std::size_t>(y.size()) != family.n()) throw InputError("data length does not match the design");
  if (!y.allFinite()) throw InputError("data contain non-finite values");

  FitResult res;
  if (opts.force_q) {
    res.q_hat = res.q_star = *opts.force_q;
  } else {
    auto sel = select_q(family, y, opts.grid, opts.policy, opts.solver);
    res.q_hat = sel.q_hat;
    res.q_star = sel.q_star;
    res.warning = sel.warning;
    res.diagnostics = std::move(sel.per_q);
  }

  res.model = family.model(res.q_hat);
  const SpectralModel& model = *res.model;
  res.coeffs = forward(model.basis, y);

  if (opts.force_lambda) {
    res.lambda_hat = *opts.force_lambda;
  } else {
    auto it = std::find_if(res.diagnostics.begin(), res.diagnostics.end(),
                           [&](const QDiagnostic& d) { return d.q == res.q_hat; });
    if (it != res.diagnostics.end()) {
      res.lambda_hat = it->lambda;
      res.boundary = it->boundary;
    } else {
      const auto sol = solve_lambda(model, res.coeffs, opts.solver);
      res.lambda_hat = sol.lambda;
      res.boundary = sol.boundary;
    }
  }

  res.weights = smoother_weights(model.eigen, res.lambda_hat);
  res.fitted = inverse(model.basis, res.weights.cwiseProduct(res.coeffs));
  res.sigma2_hat = sigma2_hat(model, res.coeffs, res.lambda_hat);
  return res;
}

}  // namespace ebs
