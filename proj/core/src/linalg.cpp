#include "regait/linalg.hpp"

#include <limits>

namespace regait {

namespace {

Eigen::JacobiSVD<Mat> svd_of(const Mat& a, unsigned opts) { return Eigen::JacobiSVD<Mat>(a, opts); }

int rank_from(const Vec& s, double tol) {
  if (s.size() == 0 || s(0) <= 0.0) return 0;
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > tol * s(0)) ++r;
  return r;
}

}  // namespace

Mat pinv(const Mat& a, double tol) {
  if (a.rows() == 0 || a.cols() == 0) return Mat::Zero(a.cols(), a.rows());
  auto svd = svd_of(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& s = svd.singularValues();
  int r = rank_from(s, tol);
  Vec inv = Vec::Zero(s.size());
  for (int i = 0; i < r; ++i) inv(i) = 1.0 / s(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

int numerical_rank(const Mat& a, double tol) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  return rank_from(svd_of(a, 0).singularValues(), tol);
}

double condition_number(const Mat& a, double tol) {
  if (a.rows() == 0 || a.cols() == 0) return 1.0;
  Vec s = svd_of(a, 0).singularValues();
  int r = rank_from(s, tol);
  if (r == 0) return std::numeric_limits<double>::infinity();
  return s(0) / s(r - 1);
}

Mat null_space(const Mat& a, double tol) {
  const auto n = a.cols();
  if (a.rows() == 0) return Mat::Identity(n, n);
  auto svd = svd_of(a, Eigen::ComputeFullV);
  int r = rank_from(svd.singularValues(), tol);
  return svd.matrixV().rightCols(n - r);
}

}  // namespace regait
