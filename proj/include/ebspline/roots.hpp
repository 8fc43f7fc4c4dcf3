#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/math/tools/roots.hpp>

namespace ebs {

struct UpCrossing {
  bool found = false;
  double u = 0.0;       // root location when found
  double f_first = 0.0; // f at the lower end of the scan
  double f_last = 0.0;  // f at the upper end of the scan
};

// Scans f on an even grid over [ulo, uhi] in natural-log units
// (points_per_decade per factor of ten) and bisects the last sign change
// from negative to non-negative.
template <class F>
UpCrossing last_up_crossing(F&& f, double ulo, double uhi, int points_per_decade, double tol,
                            int max_iter) {
  const double decades = (uhi - ulo) / std::log(10.0);
  const int m = std::max(2, static_cast<int>(std::ceil(decades * points_per_decade)) + 1);
  std::vector<double> u(static_cast<std::size_t>(m)), v(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    u[k] = k + 1 == m ? uhi : ulo + (uhi - ulo) * k / (m - 1);
    v[k] = f(u[k]);
  }
  UpCrossing out;
  out.f_first = v.front();
  out.f_last = v.back();
  for (int k = m - 2; k >= 0; --k) {
    if (v[k] < 0.0 && v[k + 1] >= 0.0) {
      out.found = true;
      if (v[k + 1] == 0.0) {
        out.u = u[k + 1];
        return out;
      }
      auto done = [tol](double a, double b) { return std::abs(b - a) <= tol; };
      boost::uintmax_t iters = static_cast<boost::uintmax_t>(max_iter);
      const auto r = boost::math::tools::bisect(f, u[k], u[k + 1], done, iters);
      out.u = 0.5 * (r.first + r.second);
      return out;
    }
  }
  return out;
}

}  // namespace ebs
