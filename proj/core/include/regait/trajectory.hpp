#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "regait/linalg.hpp"

namespace regait {

// Uniformly sampled states; rows of x are samples.
struct Trajectory {
  Vec t;
  Mat x;
  Mat u;  // optional inputs, empty when absent
  Mat v;  // optional exact velocities, empty when absent

  Eigen::Index size() const { return t.size(); }
  int dim() const { return static_cast<int>(x.cols()); }
  Vec state(Eigen::Index i) const { return x.row(i).transpose(); }
  double dt() const;
};

// Second-order central differences, one-sided second-order at the ends.
Mat central_differences(const Vec& t, const Mat& x);
// Stored velocities when present, central differences otherwise.
Mat velocities(const Trajectory& traj);

// Header t,q_0..q_{n-1}; values printed with %.17g.
void write_csv(std::ostream& os, const Trajectory& traj, const std::string& prefix = "q");
void write_csv(const std::string& path, const Trajectory& traj, const std::string& prefix = "q");
void write_table_csv(const std::string& path, const std::vector<std::string>& header, const Mat& rows);

Trajectory read_csv(std::istream& is);
Trajectory read_csv_file(const std::string& path);

std::string format_double(double v);

}  // namespace regait
