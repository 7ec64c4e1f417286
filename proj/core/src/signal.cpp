#include "regait/signal.hpp"

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "regait/error.hpp"

namespace regait {

using nlohmann::json;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vec to_vec(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())); }
std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }
}  // namespace

double FourierSeries::eval(double phase) const {
  double s = a0;
  for (int k = 1; k <= order; ++k) s += a(k - 1) * std::cos(k * phase) + b(k - 1) * std::sin(k * phase);
  return s;
}

double FourierSeries::deriv(double phase) const {
  double s = 0.0;
  for (int k = 1; k <= order; ++k) s += k * (b(k - 1) * std::cos(k * phase) - a(k - 1) * std::sin(k * phase));
  return s;
}

FourierSeries FourierSeries::derivative() const {
  FourierSeries d;
  d.order = order;
  d.a.resize(order);
  d.b.resize(order);
  for (int k = 1; k <= order; ++k) {
    d.a(k - 1) = k * b(k - 1);
    d.b(k - 1) = -k * a(k - 1);
  }
  return d;
}

std::string FourierSeries::to_json() const {
  json j{{"order", order}, {"a0", a0}, {"a", to_std(a)}, {"b", to_std(b)}, {"residual_rms", residual_rms}};
  return j.dump();
}

FourierSeries FourierSeries::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), 0);
  }
  FourierSeries fs;
  try {
    fs.order = j.at("order").get<int>();
    fs.a0 = j.at("a0").get<double>();
    fs.a = to_vec(j.at("a").get<std::vector<double>>());
    fs.b = to_vec(j.at("b").get<std::vector<double>>());
    fs.residual_rms = j.value("residual_rms", 0.0);
  } catch (const json::exception& e) {
    throw ParseError(std::string("fourier series: ") + e.what(), 0);
  }
  if (fs.a.size() != fs.order || fs.b.size() != fs.order) throw ParseError("fourier series: coefficient count != order", 0);
  return fs;
}

FourierSeries fit_fourier(const Vec& phases, const Vec& values, int order) {
  if (order < 0) throw Error("fit_fourier: negative order");
  if (phases.size() != values.size()) throw DimensionError("fit_fourier: phases and values differ in length");
  const auto n = phases.size();
  const int ncoef = 2 * order + 1;
  if (n < ncoef) throw Error("fit_fourier: " + std::to_string(n) + " samples for " + std::to_string(ncoef) + " coefficients");

  Mat design(n, ncoef);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    for (int k = 1; k <= order; ++k) {
      design(i, 2 * k - 1) = std::cos(k * phases(i));
      design(i, 2 * k) = std::sin(k * phases(i));
    }
  }
  Eigen::ColPivHouseholderQR<Mat> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < ncoef) throw NumericError("fit_fourier: degenerate phase sampling (rank-deficient design)");
  Vec c = qr.solve(values);

  FourierSeries fs;
  fs.order = order;
  fs.a0 = c(0);
  fs.a.resize(order);
  fs.b.resize(order);
  for (int k = 1; k <= order; ++k) {
    fs.a(k - 1) = c(2 * k - 1);
    fs.b(k - 1) = c(2 * k);
  }
  fs.residual_rms = std::sqrt((design * c - values).squaredNorm() / static_cast<double>(n));
  return fs;
}

PcaResult pca_fit(const Mat& data) {
  if (data.rows() < 2) throw Error("pca_fit: need at least 2 samples");
  PcaResult r;
  r.center = data.colwise().mean().transpose();
  Mat centered = data.rowwise() - r.center.transpose();
  Eigen::JacobiSVD<Mat> svd(centered, Eigen::ComputeThinV);
  r.singular_values = svd.singularValues();
  r.basis = svd.matrixV().transpose();
  return r;
}

double wrap_to_2pi(double angle) {
  double w = std::fmod(angle, kTwoPi);
  if (w < 0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

double wrap_to_pi(double angle) { return wrap_to_2pi(angle + std::numbers::pi) - std::numbers::pi; }

Vec unwrap(const Vec& angles) {
  Vec out = angles;
  for (Eigen::Index i = 1; i < angles.size(); ++i) out(i) = out(i - 1) + wrap_to_pi(angles(i) - angles(i - 1));
  return out;
}

PhaseEstimator PhaseEstimator::train(const Mat& data) {
  if (data.cols() < 2) throw DimensionError("PhaseEstimator: need at least 2 features");
  PcaResult pca = pca_fit(data);
  PhaseEstimator est;
  est.basis_ = pca.basis.topRows(2);
  est.center_ = pca.center;

  Vec raw(data.rows());
  double radius = 0.0;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    Vec x = data.row(i).transpose();
    raw(i) = est.raw_angle(x);
    radius += (est.basis_ * (x - est.center_)).norm();
  }
  radius /= static_cast<double>(data.rows());
  est.center_eps_ = 1e-9 * std::max(radius, 1e-300);
  Vec u = unwrap(raw);
  est.sign_ = (u(u.size() - 1) >= u(0)) ? 1.0 : -1.0;
  est.offset_ = est.sign_ * raw(0);
  return est;
}

double PhaseEstimator::raw_angle(const Vec& x) const {
  if (x.size() != center_.size()) throw DimensionError("PhaseEstimator: feature dimension mismatch");
  Eigen::Vector2d p = basis_ * (x - center_);
  return std::atan2(p(1), p(0));
}

double PhaseEstimator::phase_unchecked(const Vec& x) const { return wrap_to_2pi(sign_ * raw_angle(x) - offset_); }

double PhaseEstimator::phase(const Vec& x) const {
  if ((basis_ * (x - center_)).norm() <= center_eps_) throw NumericError("PhaseEstimator: point at PCA center, phase undefined");
  return phase_unchecked(x);
}

Vec PhaseEstimator::unwrapped(const Mat& data) const {
  Vec p(data.rows());
  for (Eigen::Index i = 0; i < data.rows(); ++i) p(i) = phase_unchecked(data.row(i).transpose());
  return unwrap(p);
}

std::string PhaseEstimator::to_json() const {
  json j;
  j["basis"] = {to_std(basis_.row(0).transpose()), to_std(basis_.row(1).transpose())};
  j["center"] = to_std(center_);
  j["direction_sign"] = sign_;
  j["offset"] = offset_;
  j["center_eps"] = center_eps_;
  return j.dump();
}

PhaseEstimator PhaseEstimator::from_json(const std::string& text) {
  PhaseEstimator est;
  try {
    json j = json::parse(text);
    auto rows = j.at("basis").get<std::vector<std::vector<double>>>();
    est.center_ = to_vec(j.at("center").get<std::vector<double>>());
    if (rows.size() != 2) throw ParseError("phase estimator: basis must have 2 rows", 0);
    est.basis_.resize(2, est.center_.size());
    for (int r = 0; r < 2; ++r) {
      if (rows[r].size() != static_cast<size_t>(est.center_.size())) throw ParseError("phase estimator: basis width mismatch", 0);
      est.basis_.row(r) = to_vec(rows[r]).transpose();
    }
    est.sign_ = j.at("direction_sign").get<double>();
    est.offset_ = j.at("offset").get<double>();
    est.center_eps_ = j.value("center_eps", 0.0);
  } catch (const json::exception& e) {
    throw ParseError(std::string("phase estimator: ") + e.what(), 0);
  }
  return est;
}

double TriangleWave::eval(double s) const {
  double u = s - std::floor(s);
  double pos = u * 4.0;
  int i = std::min(static_cast<int>(pos), 3);
  double f = pos - i;
  return knots[i] + f * (knots[(i + 1) % 4] - knots[i]);
}

double windowed_mean(const std::vector<double>& v, int window) {
  if (window <= 0) throw Error("windowed_mean: window must be positive");
  if (static_cast<int>(v.size()) < window)
    throw Error("windowed_mean: " + std::to_string(v.size()) + " strides for window " + std::to_string(window));
  double s = 0.0;
  for (size_t i = v.size() - window; i < v.size(); ++i) s += v[i];
  return s / window;
}

}  // namespace regait
