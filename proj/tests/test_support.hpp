#pragma once

#include <Eigen/Dense>

#include "ebspline/rng.hpp"
#include "ebspline/signals.hpp"
#include "ebspline/spectral.hpp"

namespace ebs::testing {

inline Eigen::VectorXd noisy(const Eigen::VectorXd& f, double sigma, std::uint64_t seed) {
  auto eng = rng::engine(seed, rng::kNoise, 0);
  return add_noise(f, NoiseModel{sigma}, eng);
}

inline double max_offdiag_identity_error(const Eigen::MatrixXd& phi) {
  const Eigen::MatrixXd g = phi.transpose() * phi;
  return (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

}  // namespace ebs::testing
