#include "ebspline/natural_modes.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "ebspline/errors.hpp"

namespace ebs {
namespace {

using cplx = std::complex<double>;

// One real solution of the ODE: Re or Im of exp(omega * zeta * (x - x0)).
// x0 is the endpoint where the exponential is largest, so nothing overflows.
struct Term {
  cplx zeta;
  bool imag = false;
  double x0 = 0.0;
};

std::vector<Term> ode_terms(int q) {
  std::vector<Term> terms;
  for (int l = 0; l < 2 * q; ++l) {
    const double angle = std::numbers::pi * (q + 2.0 * l) / (2.0 * q);
    cplx z = std::polar(1.0, angle);
    if (std::abs(z.imag()) < 1e-12) z = cplx(z.real(), 0.0);
    if (std::abs(z.real()) < 1e-12) z = cplx(0.0, z.imag());
    if (z.imag() < 0.0) continue;
    const double x0 = z.real() > 0.0 ? 1.0 : 0.0;
    terms.push_back({z, false, x0});
    if (z.imag() > 0.0) terms.push_back({z, true, x0});
  }
  return terms;
}

double part(const Term& t, cplx v) { return t.imag ? v.imag() : v.real(); }

// Boundary matrix: rows (endpoint, derivative order j = q..2q-1), columns
// terms. The common factor omega^j of each row is dropped.
Eigen::MatrixXd boundary_matrix(int q, const std::vector<Term>& terms, double omega) {
  const int m = 2 * q;
  Eigen::MatrixXd a(m, m);
  for (int side = 0; side < 2; ++side) {
    const double x = side;
    for (int j = q; j < 2 * q; ++j) {
      const int row = side * q + (j - q);
      for (int c = 0; c < m; ++c) {
        const Term& t = terms[static_cast<std::size_t>(c)];
        const cplx v = std::pow(t.zeta, j) * std::exp(omega * t.zeta * (x - t.x0));
        a(row, c) = part(t, v);
      }
    }
  }
  return a;
}

double boundary_det(int q, const std::vector<Term>& terms, double omega) {
  return Eigen::PartialPivLU<Eigen::MatrixXd>(boundary_matrix(q, terms, omega)).determinant();
}

}  // namespace

std::vector<double> natural_frequencies(int q, std::size_t count) {
  if (q < 1) throw InputError("natural modes need integer order q >= 1");
  const auto terms = ode_terms(q);
  std::vector<double> roots;
  roots.reserve(count);
  const double step = std::numbers::pi / 16.0;
  double lo = 0.5;
  double f_lo = boundary_det(q, terms, lo);
  while (roots.size() < count) {
    const double hi = lo + step;
    const double f_hi = boundary_det(q, terms, hi);
    if (f_lo == 0.0) {
      roots.push_back(lo);
    } else if ((f_lo < 0.0) != (f_hi < 0.0) && f_hi != 0.0) {
      double a = lo, b = hi, fa = f_lo;
      for (int it = 0; it < 64; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        const double fm = boundary_det(q, terms, mid);
        if ((fm < 0.0) == (fa < 0.0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    lo = hi;
    f_lo = f_hi;
    if (lo > (static_cast<double>(count) + q + 8.0) * std::numbers::pi)
      throw NumericError("natural mode search lost track of the frequencies");
  }
  return roots;
}

Eigen::MatrixXd sample_natural_modes(int q, const std::vector<double>& omega,
                                     const Eigen::VectorXd& x) {
  const auto terms = ode_terms(q);
  const int m = 2 * q;
  const Eigen::Index n = x.size();
  const Eigen::Index k = static_cast<Eigen::Index>(omega.size());
  Eigen::MatrixXd psi(n, k);

  for (Eigen::Index col = 0; col < k; ++col) {
    const double w = omega[static_cast<std::size_t>(col)];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(boundary_matrix(q, terms, w), Eigen::ComputeFullV);
    const Eigen::VectorXd c = svd.matrixV().col(m - 1);

    auto eval = [&](double xi) {
      double s = 0.0;
      for (int t = 0; t < m; ++t) {
        const Term& term = terms[static_cast<std::size_t>(t)];
        s += c[t] * part(term, std::exp(w * term.zeta * (xi - term.x0)));
      }
      return s;
    };

    for (Eigen::Index i = 0; i < n; ++i) psi(i, col) = eval(x[i]);
    const double at0 = eval(0.0);
    const double scale = psi.col(col).cwiseAbs().maxCoeff();
    if (!(scale > 0.0)) throw NumericError("natural mode vanished on the design");
    psi.col(col) *= (at0 < 0.0 ? -1.0 : 1.0) / scale;
  }
  return psi;
}

}  // namespace ebs
