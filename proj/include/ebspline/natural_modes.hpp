#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace ebs {

// Eigenfunctions of (-1)^q psi^{(2q)} = omega^{2q} psi on [0,1] with
// psi^{(j)}(0) = psi^{(j)}(1) = 0 for j = q..2q-1. These are the continuous
// Demmler-Reinsch functions of the order-q Sobolev penalty.

// First `count` positive frequencies omega_1 < omega_2 < ...
std::vector<double> natural_frequencies(int q, std::size_t count);

// Column k holds the mode with frequency omega[k] evaluated at x, scaled to
// unit sup-norm and signed so that psi(0) > 0.
Eigen::MatrixXd sample_natural_modes(int q, const std::vector<double>& omega,
                                     const Eigen::VectorXd& x);

}  // namespace ebs
