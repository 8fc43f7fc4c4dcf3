#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ebspline/grid.hpp"
#include "ebspline/rng.hpp"
#include "ebspline/spectral.hpp"

namespace ebs {

enum class GeneratorKind { f1_spectral, f2_cosine, polynomial, custom_spectrum };

std::string to_string(GeneratorKind k);
GeneratorKind parse_generator_kind(const std::string& s);

// Test signals.
//   f1_spectral: sqrt(n) Phi_beta c with c = (k+1)^-beta cos(2k) on the k-th
//     non-null column (params: beta = 3, index_origin = 0). index_origin = 1
//     indexes by absolute column number i instead, i.e. (i+1)^-beta cos(2i).
//   f2_cosine: cos(freq pi x) (params: freq = 5).
//   polynomial: sum_j coefficients[j] x^j, degree < params.degree (default all ones).
//   custom_spectrum: Phi_d B with B = coefficients (params: degree = 1).
struct Generator {
  GeneratorKind kind = GeneratorKind::f1_spectral;
  std::map<std::string, double> params;
  std::vector<double> coefficients;
  bool range_scaled = true;

  static Generator f1();
  static Generator f2();
  static Generator polynomial(int degree);
  static Generator custom(std::vector<double> spectrum, int degree);

  double param(const std::string& key, double fallback) const;
  // Smoothness used by oracle-based experiments; +inf for analytic signals.
  double beta_nominal() const;
  std::string name() const;
};

Eigen::VectorXd generate(const Generator& gen, const DesignGrid& grid,
                         BasisKind kind = BasisKind::natural_modes);

struct NoiseModel {
  double sigma = 0.01;
};

Eigen::VectorXd add_noise(const Eigen::VectorXd& f, const NoiseModel& noise, rng::Engine& engine);

}  // namespace ebs
