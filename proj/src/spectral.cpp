#include "ebspline/spectral.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <tuple>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "ebspline/errors.hpp"
#include "ebspline/natural_modes.hpp"

namespace ebs {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void check_order(double q) {
  if (!(q > 0.5) || !std::isfinite(q)) throw InputError("order q must be finite and > 1/2");
}

// Householder QR of `a` with the signs chosen so that R has a positive
// diagonal, i.e. Gram-Schmidt of the columns in order.
MatrixXd orthonormalize(const MatrixXd& a) {
  Eigen::HouseholderQR<MatrixXd> qr(a);
  MatrixXd q = qr.householderQ() * MatrixXd::Identity(a.rows(), a.cols());
  const MatrixXd& r = qr.matrixQR();
  for (Index j = 0; j < a.cols(); ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

MatrixXd vandermonde(const VectorXd& x, int degree) {
  MatrixXd v(x.size(), degree);
  for (Index i = 0; i < x.size(); ++i) {
    const double t = 2.0 * x[i] - 1.0;
    double p = 1.0;
    for (int j = 0; j < degree; ++j) {
      v(i, j) = p;
      p *= t;
    }
  }
  return v;
}

MatrixXd surrogate_matrix(const DesignGrid& grid, int d) {
  const Index n = static_cast<Index>(grid.n);
  MatrixXd a(n, n);
  a.leftCols(d) = vandermonde(grid.x, d);
  for (Index k = 1; k <= n - d; ++k) {
    for (Index i = 0; i < n; ++i) {
      a(i, d + k - 1) = std::cos(static_cast<double>(k) * std::numbers::pi * grid.x[i]);
    }
  }
  return orthonormalize(a);
}

BasisHandle build_surrogate(const DesignGrid& grid, int d) {
  BasisHandle b;
  b.kind = BasisKind::analytic_surrogate;
  b.q_degree = d;
  b.phi = std::make_shared<const MatrixXd>(surrogate_matrix(grid, d));
  return b;
}

BasisHandle build_natural(const DesignGrid& grid, int d) {
  const Index n = static_cast<Index>(grid.n);
  const auto omega = natural_frequencies(d, grid.n - static_cast<std::size_t>(d));
  MatrixXd a(n, n);
  a.leftCols(d) = vandermonde(grid.x, d);
  a.rightCols(n - d) = sample_natural_modes(d, omega, grid.x);

  VectorXd spec = VectorXd::Zero(n);
  for (Index i = d; i < n; ++i) spec[i] = omega[static_cast<std::size_t>(i - d)];

  BasisHandle b;
  b.kind = BasisKind::natural_modes;
  b.q_degree = d;
  b.phi = std::make_shared<const MatrixXd>(orthonormalize(a));
  b.spectrum = std::make_shared<const VectorXd>(std::move(spec));
  return b;
}

BasisHandle build_exact(const DesignGrid& grid, int d) {
  const Index n = static_cast<Index>(grid.n);
  MatrixXd diff = MatrixXd::Zero(n - d, n);
  for (Index i = 0; i < n - d; ++i) {
    if (d == 1) {
      diff(i, i) = -1.0;
      diff(i, i + 1) = 1.0;
    } else {
      diff(i, i) = 1.0;
      diff(i, i + 1) = -2.0;
      diff(i, i + 2) = 1.0;
    }
  }
  MatrixXd k = diff.transpose() * diff;
  k = 0.5 * (k + k.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(k);
  if (es.info() != Eigen::Success) throw NumericError("penalty eigensolve failed");

  MatrixXd phi = es.eigenvectors();
  VectorXd ev = es.eigenvalues() * std::pow(static_cast<double>(n), 2.0 * d);
  phi.leftCols(d) = orthonormalize(vandermonde(grid.x, d));
  for (Index j = 0; j < d; ++j) ev[j] = 0.0;
  for (Index j = d; j < n; ++j) {
    Index lead = 0;
    while (lead + 1 < n && std::abs(phi(lead, j)) < 1e-8) ++lead;
    if (phi(lead, j) < 0.0) phi.col(j) = -phi.col(j);
  }
  // The solver's null vectors span the polynomials only approximately.
  phi = orthonormalize(phi);

  BasisHandle b;
  b.kind = BasisKind::exact_eigen;
  b.q_degree = d;
  b.phi = std::make_shared<const MatrixXd>(std::move(phi));
  b.spectrum = std::make_shared<const VectorXd>(std::move(ev));
  return b;
}

using CacheKey = std::tuple<int, std::size_t, int, int>;

std::shared_future<BasisHandle> cached_basis(const DesignGrid& grid, int d, BasisKind kind) {
  static std::mutex mutex;
  static std::map<CacheKey, std::shared_future<BasisHandle>> cache;
  const CacheKey key{static_cast<int>(kind), grid.n, static_cast<int>(grid.convention), d};

  std::promise<BasisHandle> promise;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    cache.emplace(key, promise.get_future().share());
  }
  try {
    switch (kind) {
      case BasisKind::analytic_surrogate: promise.set_value(build_surrogate(grid, d)); break;
      case BasisKind::natural_modes: promise.set_value(build_natural(grid, d)); break;
      case BasisKind::exact_eigen: promise.set_value(build_exact(grid, d)); break;
    }
  } catch (...) {
    promise.set_exception(std::current_exception());
    std::lock_guard lock(mutex);
    auto failed = cache.at(key);
    cache.erase(key);
    return failed;
  }
  std::lock_guard lock(mutex);
  return cache.at(key);
}

}  // namespace

std::size_t EigenSequence::null_dim() const { return static_cast<std::size_t>(std::floor(q)); }

int basis_degree(double q) { return std::max(1, static_cast<int>(std::floor(q))); }

std::string to_string(BasisKind k) {
  switch (k) {
    case BasisKind::analytic_surrogate: return "analytic-surrogate";
    case BasisKind::natural_modes: return "natural";
    case BasisKind::exact_eigen: return "exact-eigen";
  }
  return "?";
}

BasisKind parse_basis_kind(const std::string& s) {
  if (s == "analytic-surrogate" || s == "surrogate" || s == "cosine") return BasisKind::analytic_surrogate;
  if (s == "natural") return BasisKind::natural_modes;
  if (s == "exact-eigen" || s == "exact") return BasisKind::exact_eigen;
  throw InputError("unknown basis kind '" + s + "' (expected natural, analytic-surrogate or exact-eigen)");
}

EigenSequence eigenvalues(double q, std::size_t n) {
  check_order(q);
  const auto nd = static_cast<std::size_t>(std::floor(q));
  if (n < 4 || n <= 2 * nd) throw InputError("n too small for order q (need n >= 4 and n > 2 floor(q))");
  EigenSequence e;
  e.q = q;
  e.n = n;
  e.values = VectorXd::Zero(static_cast<Index>(n));
  const double pq = std::pow(std::numbers::pi, 2.0 * q);
  for (std::size_t i = nd + 1; i <= n; ++i) {
    e.values[static_cast<Index>(i - 1)] = pq * std::pow(static_cast<double>(i) - q, 2.0 * q);
  }
  return e;
}

BasisHandle make_basis(const DesignGrid& grid, double q, BasisKind kind) {
  check_order(q);
  if (grid.n < 4) throw InputError("basis needs n >= 4");
  const int d = basis_degree(q);
  if (grid.n <= 2 * static_cast<std::size_t>(d)) throw InputError("n too small for order q");
  if (kind == BasisKind::exact_eigen) {
    if (q != std::floor(q) || (d != 1 && d != 2))
      throw UnsupportedBackend("exact-eigen backend supports only q in {1, 2}");
    if (grid.n > 512) throw UnsupportedBackend("exact-eigen backend supports only n <= 512");
  }
  return cached_basis(grid, d, kind).get();
}

VectorXd forward(const BasisHandle& basis, const VectorXd& y) {
  if (static_cast<std::size_t>(y.size()) != basis.n())
    throw InputError("forward: length mismatch");
  return basis.matrix().transpose() * y;
}

VectorXd inverse(const BasisHandle& basis, const VectorXd& coeffs) {
  if (static_cast<std::size_t>(coeffs.size()) != basis.n())
    throw InputError("inverse: length mismatch");
  return basis.matrix() * coeffs;
}

VectorXd smoother_weights(const EigenSequence& eigen, double lambda) {
  if (!(lambda >= 0.0)) throw InputError("smoother weights need lambda >= 0");
  VectorXd w(eigen.values.size());
  for (Index i = 0; i < w.size(); ++i) {
    const double v = eigen.values[i];
    if (v == 0.0) {
      w[i] = 1.0;
    } else if (std::isinf(lambda)) {
      w[i] = 0.0;
    } else {
      w[i] = 1.0 / (1.0 + lambda * v);
    }
  }
  return w;
}

SpectralModel make_model(const DesignGrid& grid, double q, BasisKind kind) {
  check_order(q);
  if (q < 1.0) throw InputError("basis models need q >= 1");
  SpectralModel m;
  m.grid = grid;
  m.q = q;
  m.basis = make_basis(grid, q, kind);
  switch (kind) {
    case BasisKind::analytic_surrogate:
      m.eigen = eigenvalues(q, grid.n);
      break;
    case BasisKind::natural_modes: {
      m.eigen.q = q;
      m.eigen.n = grid.n;
      const VectorXd& omega = *m.basis.spectrum;
      m.eigen.values = VectorXd::Zero(omega.size());
      for (Index i = 0; i < omega.size(); ++i) {
        if (omega[i] > 0.0) m.eigen.values[i] = std::exp(2.0 * q * std::log(omega[i]));
      }
      break;
    }
    case BasisKind::exact_eigen:
      m.eigen.q = q;
      m.eigen.n = grid.n;
      m.eigen.values = *m.basis.spectrum;
      break;
  }
  return m;
}

ModelFamily::ModelFamily(DesignGrid grid, BasisKind kind) : grid_(std::move(grid)), kind_(kind) {}

std::shared_ptr<const SpectralModel> ModelFamily::model(double q) const {
  std::lock_guard lock(mutex_);
  auto it = cache_.find(q);
  if (it != cache_.end()) return it->second;
  auto m = std::make_shared<const SpectralModel>(make_model(grid_, q, kind_));
  cache_.emplace(q, m);
  return m;
}

}  // namespace ebs
