#include "ebspline/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ebspline/errors.hpp"

namespace ebs {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(const std::string& field, std::size_t line_no) {
  double v = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  if (!field.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (field.empty() || ec != std::errc() || ptr != end)
    throw InputError("line " + std::to_string(line_no) + ": cannot parse '" + field + "' as a number");
  if (!std::isfinite(v)) throw InputError("line " + std::to_string(line_no) + ": non-finite value");
  return v;
}

}  // namespace

CsvData parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::size_t cols = 0;
  CsvData data;

  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    auto fields = split(line);
    if (cols == 0) {
      if (fields.size() == 1 && fields[0] == "y") {
        cols = 1;
      } else if (fields.size() == 2 && fields[0] == "x" && fields[1] == "y") {
        cols = 2;
        data.has_x = true;
      } else {
        throw InputError("line " + std::to_string(line_no) + ": header must be 'x,y' or 'y'");
      }
      continue;
    }
    if (fields.size() != cols)
      throw InputError("line " + std::to_string(line_no) + ": expected " + std::to_string(cols) +
                       " fields, got " + std::to_string(fields.size()));
    if (cols == 2) data.x.push_back(parse_number(fields[0], line_no));
    data.y.push_back(parse_number(fields.back(), line_no));
  }
  if (cols == 0) throw InputError("empty input: no header");
  if (data.y.empty()) throw InputError("no data rows");
  return data;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

CsvData read_csv(const std::string& path) { return parse_csv(read_file(path)); }

DesignGrid infer_design(const CsvData& data, std::optional<Convention> requested) {
  const std::size_t n = data.y.size();
  if (!data.has_x) return DesignGrid::make(n, requested.value_or(Convention::midpoint));

  auto matches = [&](Convention c) {
    const DesignGrid g = DesignGrid::make(n, c);
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(g.x[static_cast<Eigen::Index>(i)] - data.x[i]) > 1e-8) return false;
    }
    return true;
  };
  if (requested) {
    if (!matches(*requested))
      throw InputError("x column does not match the " + to_string(*requested) + " design");
    return DesignGrid::make(n, *requested);
  }
  for (Convention c : {Convention::midpoint, Convention::right}) {
    if (matches(c)) return DesignGrid::make(n, c);
  }
  throw InputError("x column is not an equispaced midpoint or right-endpoint design on (0,1]");
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw InputError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw InputError("cannot rename onto '" + path + "': " + ec.message());
  }
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

}  // namespace ebs
