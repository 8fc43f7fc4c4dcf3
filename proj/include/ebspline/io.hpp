#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ebspline/grid.hpp"

namespace ebs {

// Comma-separated data with a header of either `x,y` or `y`.
struct CsvData {
  bool has_x = false;
  std::vector<double> x;
  std::vector<double> y;
};

// Throws InputError naming the offending line for malformed rows, non-finite
// values and files without data rows.
CsvData parse_csv(const std::string& text);
CsvData read_csv(const std::string& path);

// Grid for the data. Without an x column the convention defaults to midpoint.
// With one, x must match the requested (or either) convention to 1e-8.
DesignGrid infer_design(const CsvData& data, std::optional<Convention> requested);

std::string read_file(const std::string& path);
// Writes to a sibling temp file and renames it over `path`.
void atomic_write(const std::string& path, const std::string& content);

// Shortest round-trip representation.
std::string format_double(double v);

}  // namespace ebs
