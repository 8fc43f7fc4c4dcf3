#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include <Eigen/Dense>

#include "ebspline/grid.hpp"

namespace ebs {

// n*eta_{q,i}: zero on the null space, strictly increasing afterwards.
struct EigenSequence {
  double q = 0.0;
  std::size_t n = 0;
  Eigen::VectorXd values;

  std::size_t null_dim() const;
};

// Asymptotic eigenvalues pi^{2q} (i-q)^{2q} for i > floor(q).
EigenSequence eigenvalues(double q, std::size_t n);

enum class BasisKind {
  analytic_surrogate,  // polynomials + cosines, paired with the asymptotic eigenvalues
  natural_modes,       // sampled continuous eigenfunctions with natural boundary conditions
  exact_eigen,         // finite-difference penalty eigendecomposition, q in {1,2}, n <= 512
};

std::string to_string(BasisKind k);
BasisKind parse_basis_kind(const std::string& s);

// Orthonormal n x n transform Phi for one integer degree. Columns are
// ordered by frequency; the first q_degree columns span the polynomials of
// degree < q_degree.
struct BasisHandle {
  BasisKind kind = BasisKind::analytic_surrogate;
  int q_degree = 1;
  std::shared_ptr<const Eigen::MatrixXd> phi;
  // Natural frequencies omega_i (natural_modes) or n*eta_i (exact_eigen);
  // empty for the surrogate. Null-space entries are zero.
  std::shared_ptr<const Eigen::VectorXd> spectrum;

  std::size_t n() const { return phi ? static_cast<std::size_t>(phi->rows()) : 0; }
  const Eigen::MatrixXd& matrix() const { return *phi; }
};

BasisHandle make_basis(const DesignGrid& grid, double q, BasisKind kind);

Eigen::VectorXd forward(const BasisHandle& basis, const Eigen::VectorXd& y);
Eigen::VectorXd inverse(const BasisHandle& basis, const Eigen::VectorXd& coeffs);

// w_i = 1/(1 + lambda n eta_i). lambda = 0 gives all ones, lambda = +inf the
// null-space indicator.
Eigen::VectorXd smoother_weights(const EigenSequence& eigen, double lambda);

struct SpectralModel {
  DesignGrid grid;
  double q = 0.0;
  EigenSequence eigen;
  BasisHandle basis;

  std::size_t n() const { return grid.n; }
  std::size_t null_dim() const { return eigen.null_dim(); }
};

// Eigenvalues matched to the basis kind: asymptotic for the surrogate,
// omega^{2q} for natural modes, the assembled penalty spectrum for exact_eigen.
SpectralModel make_model(const DesignGrid& grid, double q, BasisKind kind);

// Models for many q on one grid, built lazily and shared between threads.
class ModelFamily {
 public:
  ModelFamily(DesignGrid grid, BasisKind kind);

  const DesignGrid& grid() const { return grid_; }
  BasisKind kind() const { return kind_; }
  std::size_t n() const { return grid_.n; }

  std::shared_ptr<const SpectralModel> model(double q) const;

 private:
  DesignGrid grid_;
  BasisKind kind_;
  mutable std::mutex mutex_;
  mutable std::map<double, std::shared_ptr<const SpectralModel>> cache_;
};

// Degree of the basis used for order q.
int basis_degree(double q);

}  // namespace ebs
