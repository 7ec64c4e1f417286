#include "regait/encoding.hpp"

#include <cmath>

#include <json.hpp>

#include "regait/error.hpp"

namespace regait {

using nlohmann::json;

Mat finite_difference_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x) {
  const double h = 1e-6 * std::max(1.0, x.norm());
  Vec f0 = f(x);
  Mat j(f0.size(), x.size());
  Vec xp = x, xm = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp(i) = x(i) + h;
    xm(i) = x(i) - h;
    j.col(i) = (f(xp) - f(xm)) / (2.0 * h);
    xp(i) = xm(i) = x(i);
  }
  return j;
}

Mat EncodingMap::jac(const Vec& x) const { return jacobian ? jacobian(x) : finite_difference_jacobian(outputs, x); }

Vec pullback(const EncodingMap& map, const Vec& omega, const Vec& x) {
  if (omega.size() != map.output_dim) throw DimensionError("pullback: form length != output dimension");
  Mat d = map.jac(x);
  if (numerical_rank(d) < map.output_dim) throw NumericError("pullback: encoding Jacobian is rank deficient");
  return d.transpose() * omega;
}

Mat record_eta(const EncodingMap& map, const std::vector<TemplateForm>& forms, const Trajectory& traj) {
  if (traj.size() < 3) throw Error("record_eta: trajectory shorter than 3 samples");
  Mat v = velocities(traj);
  Mat eta(traj.size(), forms.size());
  for (Eigen::Index k = 0; k < traj.size(); ++k) {
    Vec x = traj.state(k);
    Vec y = map(x);
    Vec ydot = map.jac(x) * v.row(k).transpose();
    for (size_t j = 0; j < forms.size(); ++j) eta(k, j) = forms[j].at(y).dot(ydot);
  }
  return eta;
}

Vec LearnedConstraints::gamma(double phase) const {
  Vec g(eta_models.size());
  for (size_t j = 0; j < eta_models.size(); ++j) g(j) = eta_models[j].eval(phase);
  return g;
}

Vec learned_gamma(const LearnedConstraints& lc, double phase) { return lc.gamma(phase); }

LearnedConstraints learn_constraints(const EncodingMap& map, const std::vector<TemplateForm>& forms,
                                     const Trajectory& traj, const Vec& phases, int order, std::string phase_model) {
  if (order < 1) throw Error("learn_constraints: order must be >= 1");
  if (phases.size() != traj.size()) throw DimensionError("learn_constraints: one phase per sample required");
  for (Eigen::Index i = 1; i < phases.size(); ++i)
    if (!(phases(i) > phases(i - 1))) throw Error("learn_constraints: phase not strictly increasing at sample " + std::to_string(i));
  Mat eta = record_eta(map, forms, traj);
  LearnedConstraints lc;
  lc.forms = forms;
  lc.phase_model = std::move(phase_model);
  for (size_t j = 0; j < forms.size(); ++j) lc.eta_models.push_back(fit_fourier(phases, eta.col(j), order));
  return lc;
}

ConstraintBlock learned_block(const EncodingMap& map, const LearnedConstraints& lc,
                              std::function<double(double, const Vec&)> phase, std::string name) {
  ConstraintBlock b;
  b.priority = Priority::Learned;
  b.name = std::move(name);
  b.rows = [map, lc, phase](double t, const Vec& x) {
    Vec y = map(x);
    Mat d = map.jac(x);
    BlockValue bv;
    bv.omega.resize(lc.forms.size(), x.size());
    for (size_t j = 0; j < lc.forms.size(); ++j) bv.omega.row(j) = (d.transpose() * lc.forms[j].at(y)).transpose();
    bv.gamma = lc.gamma(wrap_to_2pi(phase(t, x)));
    return bv;
  };
  return b;
}

std::string LearnedConstraints::to_json() const {
  json j;
  j["forms"] = json::array();
  for (const auto& f : forms) {
    if (f.field) throw Error("LearnedConstraints: state-dependent forms are not serializable");
    j["forms"].push_back(std::vector<double>(f.constant.data(), f.constant.data() + f.constant.size()));
  }
  j["eta_models"] = json::array();
  for (const auto& m : eta_models) j["eta_models"].push_back(json::parse(m.to_json()));
  j["phase_model"] = phase_model;
  return j.dump(2);
}

LearnedConstraints LearnedConstraints::from_json(const std::string& text) {
  LearnedConstraints lc;
  try {
    json j = json::parse(text);
    for (const auto& f : j.at("forms")) {
      auto v = f.get<std::vector<double>>();
      lc.forms.push_back(TemplateForm::fixed(Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()))));
    }
    for (const auto& m : j.at("eta_models")) lc.eta_models.push_back(FourierSeries::from_json(m.dump()));
    lc.phase_model = j.value("phase_model", std::string{});
  } catch (const json::exception& e) {
    throw ParseError(std::string("learned constraints: ") + e.what(), 0);
  }
  if (lc.forms.size() != lc.eta_models.size()) throw ParseError("learned constraints: forms and eta_models differ in count", 0);
  return lc;
}

}  // namespace regait
