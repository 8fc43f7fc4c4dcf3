#include "ebspline/signals.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "ebspline/errors.hpp"

namespace ebs {

using Eigen::Index;
using Eigen::VectorXd;

std::string to_string(GeneratorKind k) {
  switch (k) {
    case GeneratorKind::f1_spectral: return "f1";
    case GeneratorKind::f2_cosine: return "f2";
    case GeneratorKind::polynomial: return "polynomial";
    case GeneratorKind::custom_spectrum: return "custom";
  }
  return "?";
}

GeneratorKind parse_generator_kind(const std::string& s) {
  if (s == "f1" || s == "f1-spectral") return GeneratorKind::f1_spectral;
  if (s == "f2" || s == "f2-cosine") return GeneratorKind::f2_cosine;
  if (s == "polynomial") return GeneratorKind::polynomial;
  if (s == "custom" || s == "custom-spectrum") return GeneratorKind::custom_spectrum;
  throw InputError("unknown generator '" + s + "'");
}

Generator Generator::f1() {
  Generator g;
  g.kind = GeneratorKind::f1_spectral;
  g.params = {{"beta", 3.0}, {"index_origin", 0.0}};
  return g;
}

Generator Generator::f2() {
  Generator g;
  g.kind = GeneratorKind::f2_cosine;
  g.params = {{"freq", 5.0}};
  return g;
}

Generator Generator::polynomial(int degree) {
  if (degree < 1) throw InputError("polynomial generator needs degree >= 1");
  Generator g;
  g.kind = GeneratorKind::polynomial;
  g.params = {{"degree", static_cast<double>(degree)}};
  g.range_scaled = false;
  return g;
}

Generator Generator::custom(std::vector<double> spectrum, int degree) {
  Generator g;
  g.kind = GeneratorKind::custom_spectrum;
  g.params = {{"degree", static_cast<double>(degree)}};
  g.coefficients = std::move(spectrum);
  g.range_scaled = false;
  return g;
}

double Generator::param(const std::string& key, double fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

double Generator::beta_nominal() const {
  switch (kind) {
    case GeneratorKind::f1_spectral: return param("beta", 3.0);
    case GeneratorKind::custom_spectrum: return param("beta", 0.0);
    default: return std::numeric_limits<double>::infinity();
  }
}

std::string Generator::name() const { return to_string(kind); }

VectorXd generate(const Generator& gen, const DesignGrid& grid, BasisKind kind) {
  const Index n = static_cast<Index>(grid.n);
  VectorXd f(n);
  switch (gen.kind) {
    case GeneratorKind::f1_spectral: {
      const double beta = gen.param("beta", 3.0);
      const int d = static_cast<int>(beta);
      if (d < 1 || beta != d) throw InputError("f1 generator needs an integer beta >= 1");
      const bool absolute = gen.param("index_origin", 0.0) != 0.0;
      const BasisHandle basis = make_basis(grid, beta, kind);
      VectorXd c = VectorXd::Zero(n);
      for (Index k = 1; k <= n - d; ++k) {
        const double idx = absolute ? static_cast<double>(d + k) : static_cast<double>(k);
        c[d + k - 1] = std::pow(idx + 1.0, -beta) * std::cos(2.0 * idx);
      }
      f = std::sqrt(static_cast<double>(n)) * inverse(basis, c);
      break;
    }
    case GeneratorKind::f2_cosine: {
      const double freq = gen.param("freq", 5.0);
      for (Index i = 0; i < n; ++i) f[i] = std::cos(freq * std::numbers::pi * grid.x[i]);
      break;
    }
    case GeneratorKind::polynomial: {
      const int d = static_cast<int>(gen.param("degree", 1.0));
      std::vector<double> c = gen.coefficients;
      if (c.empty()) c.assign(static_cast<std::size_t>(d), 1.0);
      if (static_cast<int>(c.size()) > d) throw InputError("polynomial has more coefficients than its degree allows");
      for (Index i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = c.size(); j-- > 0;) acc = acc * grid.x[i] + c[j];
        f[i] = acc;
      }
      break;
    }
    case GeneratorKind::custom_spectrum: {
      const double d = gen.param("degree", 1.0);
      if (gen.coefficients.size() > grid.n) throw InputError("custom spectrum longer than n");
      VectorXd b = VectorXd::Zero(n);
      for (std::size_t i = 0; i < gen.coefficients.size(); ++i) b[static_cast<Index>(i)] = gen.coefficients[i];
      f = inverse(make_basis(grid, d, kind), b);
      break;
    }
  }
  if (gen.range_scaled) {
    const double range = f.maxCoeff() - f.minCoeff();
    if (!(range > 0.0)) throw InputError("cannot range-scale a constant signal");
    f /= range;
  }
  return f;
}

VectorXd add_noise(const VectorXd& f, const NoiseModel& noise, rng::Engine& engine) {
  std::normal_distribution<double> normal(0.0, 1.0);
  VectorXd y(f.size());
  for (Index i = 0; i < f.size(); ++i) y[i] = f[i] + noise.sigma * normal(engine);
  return y;
}

}  // namespace ebs
