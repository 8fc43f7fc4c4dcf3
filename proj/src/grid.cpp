#include "ebspline/grid.hpp"

#include "ebspline/errors.hpp"

namespace ebs {

std::string to_string(Convention c) {
  return c == Convention::midpoint ? "midpoint" : "right";
}

Convention parse_convention(const std::string& s) {
  if (s == "midpoint") return Convention::midpoint;
  if (s == "right") return Convention::right;
  throw InputError("unknown design convention '" + s + "' (expected midpoint or right)");
}

DesignGrid DesignGrid::make(std::size_t n, Convention c) {
  if (n == 0) throw InputError("design grid needs n >= 1");
  DesignGrid g;
  g.n = n;
  g.convention = c;
  g.x.resize(static_cast<Eigen::Index>(n));
  const double dn = static_cast<double>(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const double di = static_cast<double>(i);
    g.x[static_cast<Eigen::Index>(i - 1)] =
        c == Convention::midpoint ? (2.0 * di - 1.0) / (2.0 * dn) : di / dn;
  }
  return g;
}

}  // namespace ebs
