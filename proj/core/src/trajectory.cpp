#include "regait/trajectory.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "regait/error.hpp"

namespace regait {

double Trajectory::dt() const {
  if (t.size() < 2) throw Error("trajectory: fewer than 2 samples");
  return (t(t.size() - 1) - t(0)) / static_cast<double>(t.size() - 1);
}

Mat central_differences(const Vec& t, const Mat& x) {
  const auto n = x.rows();
  if (n < 3) throw Error("central_differences: need at least 3 samples, got " + std::to_string(n));
  if (t.size() != n) throw DimensionError("central_differences: time and state lengths differ");
  const double h = (t(n - 1) - t(0)) / static_cast<double>(n - 1);
  Mat v(n, x.cols());
  for (Eigen::Index i = 1; i + 1 < n; ++i) v.row(i) = (x.row(i + 1) - x.row(i - 1)) / (2.0 * h);
  v.row(0) = (-3.0 * x.row(0) + 4.0 * x.row(1) - x.row(2)) / (2.0 * h);
  v.row(n - 1) = (3.0 * x.row(n - 1) - 4.0 * x.row(n - 2) + x.row(n - 3)) / (2.0 * h);
  return v;
}

Mat velocities(const Trajectory& traj) {
  if (traj.v.rows() == traj.x.rows() && traj.v.cols() == traj.x.cols() && traj.v.size() > 0) return traj.v;
  return central_differences(traj.t, traj.x);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& os, const Trajectory& traj, const std::string& prefix) {
  os << "t";
  for (int j = 0; j < traj.dim(); ++j) os << ',' << prefix << '_' << j;
  os << '\n';
  for (Eigen::Index i = 0; i < traj.size(); ++i) {
    os << format_double(traj.t(i));
    for (int j = 0; j < traj.dim(); ++j) os << ',' << format_double(traj.x(i, j));
    os << '\n';
  }
}

void write_csv(const std::string& path, const Trajectory& traj, const std::string& prefix) {
  std::ofstream os(path);
  if (!os) throw std::ios_base::failure("cannot open " + path + " for writing");
  write_csv(os, traj, prefix);
  if (!os) throw std::ios_base::failure("write failed: " + path);
}

void write_table_csv(const std::string& path, const std::vector<std::string>& header, const Mat& rows) {
  std::ofstream os(path);
  if (!os) throw std::ios_base::failure("cannot open " + path + " for writing");
  for (size_t j = 0; j < header.size(); ++j) os << (j ? "," : "") << header[j];
  os << '\n';
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows.cols(); ++j) os << (j ? "," : "") << format_double(rows(i, j));
    os << '\n';
  }
  if (!os) throw std::ios_base::failure("write failed: " + path);
}

Trajectory read_csv(std::istream& is) {
  std::string line;
  int lineno = 0;
  if (!std::getline(is, line)) throw ParseError("empty CSV", 1);
  ++lineno;
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 2 || header[0] != "t") throw ParseError("header must start with 't' followed by state columns", lineno);
  const size_t cols = header.size();
  std::vector<double> vals;
  size_t rows = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    size_t c = 0;
    while (std::getline(ss, cell, ',')) {
      errno = 0;
      char* end = nullptr;
      double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0' || errno == ERANGE)
        throw ParseError("column " + std::to_string(c + 1) + ": not a number: '" + cell + "'", lineno);
      vals.push_back(v);
      ++c;
    }
    if (c != cols) throw ParseError("expected " + std::to_string(cols) + " fields, got " + std::to_string(c), lineno);
    ++rows;
  }
  Trajectory tr;
  tr.t.resize(rows);
  tr.x.resize(rows, cols - 1);
  for (size_t i = 0; i < rows; ++i) {
    tr.t(i) = vals[i * cols];
    for (size_t j = 1; j < cols; ++j) tr.x(i, j - 1) = vals[i * cols + j];
  }
  return tr;
}

Trajectory read_csv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::ios_base::failure("cannot open " + path);
  return read_csv(is);
}

}  // namespace regait
