#pragma once

#include <array>
#include <string>
#include <vector>

#include "regait/linalg.hpp"

namespace regait {

// Truncated real Fourier series in a phase argument (radians).
struct FourierSeries {
  int order = 0;
  double a0 = 0.0;
  Vec a;  // cosine coefficients, k = 1..order
  Vec b;  // sine coefficients
  double residual_rms = 0.0;

  double eval(double phase) const;
  double deriv(double phase) const;
  FourierSeries derivative() const;

  std::string to_json() const;
  static FourierSeries from_json(const std::string& text);
};

FourierSeries fit_fourier(const Vec& phases, const Vec& values, int order);

struct PcaResult {
  Mat basis;  // principal directions as rows, ordered by singular value
  Vec center;
  Vec singular_values;
};

// data is N x d, one sample per row.
PcaResult pca_fit(const Mat& data);

// Angle of the projection onto the first two principal directions.
class PhaseEstimator {
 public:
  static PhaseEstimator train(const Mat& data);

  // Phase in [0, 2pi). Throws near the PCA center where the angle is undefined.
  double phase(const Vec& x) const;
  // Same as phase() but never throws; the center maps to the offset angle.
  double phase_unchecked(const Vec& x) const;
  // Unwrapped phase along a sample sequence, starting in [0, 2pi).
  Vec unwrapped(const Mat& data) const;

  const Mat& basis() const { return basis_; }
  const Vec& center() const { return center_; }
  double direction_sign() const { return sign_; }
  double offset() const { return offset_; }

  std::string to_json() const;
  static PhaseEstimator from_json(const std::string& text);

 private:
  double raw_angle(const Vec& x) const;

  Mat basis_;
  Vec center_;
  double sign_ = 1.0;
  double offset_ = 0.0;
  double center_eps_ = 0.0;
};

// Accumulates minimal angular increments (|delta| <= pi).
Vec unwrap(const Vec& angles);
double wrap_to_2pi(double angle);
double wrap_to_pi(double angle);

// Period-1 piecewise-linear wave with knots at s = 0, 0.25, 0.5, 0.75.
struct TriangleWave {
  std::array<double, 4> knots{};
  double eval(double s) const;
};

double windowed_mean(const std::vector<double>& per_stride_values, int window);

}  // namespace regait
