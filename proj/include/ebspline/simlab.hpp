#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ebspline/credible.hpp"
#include "ebspline/ebcore.hpp"
#include "ebspline/freq.hpp"
#include "ebspline/signals.hpp"

namespace ebs {

inline constexpr int kSchemaVersion = 1;

struct StudyConfig {
  Generator generator = Generator::f1();
  std::size_t n = 1000;
  std::size_t M = 200;
  double sigma = 0.01;
  QGrid q_grid = QGrid::integers(1, 6);
  bool eb = true;
  std::vector<double> gcv_q = {2, 3, 4, 5, 6};
  std::uint64_t seed = 1;
  Convention convention = Convention::right;
  BasisKind kind = BasisKind::natural_modes;
  unsigned threads = 0;
};

struct MethodRow {
  std::string method;  // "EB" or "GCV"
  double q = 0.0;      // GCV order; 0 for EB
  double mean_lambda = 0.0;
  double var_lambda = 0.0;
  double amse = 0.0;
  double ratio = 0.0;  // A(GCV)/A(EB); 1 for EB, 0 when EB did not run
};

struct SimulationReport {
  StudyConfig config;
  std::vector<MethodRow> rows;
  std::map<double, std::size_t> q_hat_histogram;
  double mean_q_star = 0.0;
  // Per-replicate values, kept for variance and replay checks.
  std::vector<double> eb_lambda;
  std::vector<double> eb_q_hat;
  std::map<double, std::vector<double>> gcv_lambda;

  const MethodRow* row(const std::string& method, double q = 0.0) const;
  double q_hat_fraction(double q) const;
};

SimulationReport run_study(const StudyConfig& cfg);

// JSON config keys: generator (string or object {kind, params, coefficients,
// range_scaled}), n, M, sigma, q_grid (array or {min, max, step}), methods
// (subset of ["EB", "GCV"]), gcv_q, seed, design_convention, basis, threads.
StudyConfig parse_study_config(const nlohmann::json& j);
nlohmann::json to_json(const StudyConfig& cfg);
Generator parse_generator(const nlohmann::json& j);
nlohmann::json to_json(const Generator& g);

nlohmann::json to_json(const SimulationReport& r);
// Table layout: one row per statistic, one column per method.
std::string to_csv_table(const SimulationReport& r);

nlohmann::json to_json(const CoverageReport& r);
nlohmann::json to_json(const CoverageLossReport& r);
nlohmann::json to_json(const FitResult& r);

}  // namespace ebs
