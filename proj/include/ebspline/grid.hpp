#pragma once

#include <cstddef>
#include <string>

#include <Eigen/Dense>

namespace ebs {

enum class Convention { midpoint, right };

std::string to_string(Convention c);
Convention parse_convention(const std::string& s);

// Equidistant design on (0,1]: x_i = (2i-1)/(2n) or x_i = i/n.
struct DesignGrid {
  std::size_t n = 0;
  Convention convention = Convention::midpoint;
  Eigen::VectorXd x;

  static DesignGrid make(std::size_t n, Convention c);
};

}  // namespace ebs
