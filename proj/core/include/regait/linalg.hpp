#pragma once

#include <Eigen/Dense>

namespace regait {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kDefaultTol = 1e-10;

// Singular values below tol * sigma_max are treated as zero.
Mat pinv(const Mat& a, double tol = kDefaultTol);
int numerical_rank(const Mat& a, double tol = kDefaultTol);
double condition_number(const Mat& a, double tol = kDefaultTol);

// Orthonormal basis of the right null space, one column per direction.
Mat null_space(const Mat& a, double tol = kDefaultTol);

}  // namespace regait
