#include "rfbm/drift_extension.hpp"

#include <cmath>
#include <sstream>

namespace rfbm {

VectorFieldSpec::VectorFieldSpec(Kind kind, double p, double c, Mat a)
    : kind_(kind), p_(p), c_(c), a_(std::move(a)) {}

VectorFieldSpec VectorFieldSpec::zero() { return {Kind::Zero, 1.0, 0.0, Mat()}; }

VectorFieldSpec VectorFieldSpec::radial(double c) { return {Kind::Radial, 1.0, c, Mat()}; }

VectorFieldSpec VectorFieldSpec::linear(Mat a) {
  if (a.rows() != a.cols() || a.rows() < 2) throw ConfigError("linear field needs a square matrix");
  return {Kind::Linear, 1.0, 0.0, std::move(a)};
}

VectorFieldSpec VectorFieldSpec::rho_power(double p, double c) {
  if (!(p >= 1.0)) throw ConfigError("rho-power field needs p >= 1");
  return {Kind::RhoPower, p, c, Mat()};
}

std::string VectorFieldSpec::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Zero: os << "zero"; break;
    case Kind::Radial: os << "radial(c=" << c_ << ")"; break;
    case Kind::Linear: {
      os << "linear(";
      for (int i = 0; i < a_.rows(); ++i)
        for (int j = 0; j < a_.cols(); ++j) os << (i || j ? "," : "") << a_(i, j);
      os << ")";
      break;
    }
    case Kind::RhoPower: os << "rho_power(p=" << p_ << ",c=" << c_ << ")"; break;
  }
  return os.str();
}

void VectorFieldSpec::profile(const EvolvingMetricModel& model, double t, double r, double& phi,
                              double& dphi) const {
  const double a = model.scale().a(t);
  if (kind_ == Kind::Radial) {
    phi = c_ / std::sqrt(a);
    dphi = 0.0;
    return;
  }
  const double s = c_ * p_ * std::pow(a, 0.5 * (p_ - 2.0));
  phi = s * std::pow(r, p_ - 1.0);
  dphi = p_ == 1.0 ? 0.0 : s * (p_ - 1.0) * std::pow(r, p_ - 2.0);
}

Vec VectorFieldSpec::chart_field(const EvolvingMetricModel& model, double t,
                                 const Vec& chart_x) const {
  const int d = static_cast<int>(chart_x.size());
  switch (kind_) {
    case Kind::Zero: return Vec::Zero(d);
    case Kind::Linear:
      if (a_.rows() != d) throw ConfigError("linear field dimension does not match the model");
      return a_ * chart_x;
    case Kind::Radial:
    case Kind::RhoPower: {
      const double r = chart_x.norm();
      if (r < 1e-12) return Vec::Zero(d);
      double phi = 0.0, dphi = 0.0;
      profile(model, t, r, phi, dphi);
      return phi / r * chart_x;
    }
  }
  return Vec::Zero(d);
}

Mat VectorFieldSpec::chart_jacobian(const EvolvingMetricModel& model, double t,
                                    const Vec& chart_x) const {
  const int d = static_cast<int>(chart_x.size());
  switch (kind_) {
    case Kind::Zero: return Mat::Zero(d, d);
    case Kind::Linear: return a_.transpose();
    case Kind::Radial:
    case Kind::RhoPower: {
      const double r = chart_x.norm();
      if (r < 1e-12) throw ChartSingularityError("radial field jacobian at the pole");
      double phi = 0.0, dphi = 0.0;
      profile(model, t, r, phi, dphi);
      const Vec n = chart_x / r;
      const Mat nn = n * n.transpose();
      return dphi * nn + phi / r * (Mat::Identity(d, d) - nn);
    }
  }
  return Mat::Zero(d, d);
}

Vec VectorFieldSpec::state_field(const EvolvingMetricModel& model, double t, const Vec& x) const {
  if (model.representation() == Representation::Chart) return chart_field(model, t, x);
  const int n = model.coord_dim();
  switch (kind_) {
    case Kind::Zero: return Vec::Zero(n);
    case Kind::Linear:
      throw ConfigError("linear fields are defined in a chart; not available on the sphere");
    case Kind::Radial:
    case Kind::RhoPower: {
      const Vec p = x.normalized();
      const Vec o = model.pole();
      const double c = o.dot(p);
      const Vec tangential_o = o - c * p;
      const double s = tangential_o.norm();
      if (s < 1e-300) return Vec::Zero(n);
      const double sa = std::sqrt(model.scale().a(t));
      const Vec grad = -tangential_o / (s * sa);
      double scale = c_;
      if (kind_ == Kind::RhoPower) {
        const double rho = sa * std::atan2(s, c);
        scale = c_ * p_ * std::pow(rho, p_ - 1.0);
      }
      return scale * grad;
    }
  }
  return Vec::Zero(n);
}

Mat nabla_flat(const EvolvingMetricModel& model, const VectorFieldSpec& spec, double t,
               const Vec& chart_x) {
  const MetricJet jet = metric_jet(model, t, chart_x);
  const int d = static_cast<int>(chart_x.size());
  const Vec z = spec.chart_field(model, t, chart_x);
  Mat nabla = spec.chart_jacobian(model, t, chart_x);  // (i, k) = nabla_i Z^k
  for (int k = 0; k < d; ++k) nabla.col(k) += jet.christoffel[k] * z;
  const Mat lowered = nabla * jet.g;
  return 0.5 * (lowered + lowered.transpose());
}

std::vector<SpaceTimeSample> space_time_grid(const EvolvingMetricModel& model, double radius,
                                             int n_t, int n_r, int n_dir) {
  const int d = model.dim();
  double reach = radius;
  const double limit = model.warp().domain_limit();
  if (std::isfinite(limit)) reach = std::min(reach, limit * (1.0 - 1e-3));

  std::vector<Vec> dirs;
  for (int k = 0; k < n_dir; ++k) {
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = std::cos(1.0 + 0.7 * k + 1.3 * i * (k + 1));
    if (k == 0) v = Vec::Unit(d, 0);
    dirs.push_back(v.normalized());
  }
  std::vector<SpaceTimeSample> out;
  for (int i = 0; i < n_t; ++i) {
    const double t = n_t == 1 ? 0.0 : model.horizon() * i / (n_t - 1);
    for (int j = 0; j < n_r; ++j) {
      const double r = reach * (j + 0.5) / n_r;
      for (const Vec& u : dirs) out.push_back({t, r * u});
    }
  }
  return out;
}

AssumptionCheck check_assumption(const EvolvingMetricModel& model, const VectorFieldSpec& spec,
                                 const std::function<double(double)>& b,
                                 const std::vector<SpaceTimeSample>& grid) {
  AssumptionCheck out;
  out.holds = true;
  for (const SpaceTimeSample& s : grid) {
    const MetricJet jet = metric_jet(model, s.t, s.chart_x);
    const double rho = std::sqrt(model.scale().a(s.t)) * s.chart_x.norm();
    const Mat m = jet.ricci + b(rho) * jet.g - nabla_flat(model, spec, s.t, s.chart_x) - jet.dg_dt;
    const double margin = pencil_min_eigenvalue(m, jet.g);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(jet.g),
                                                      Eigen::EigenvaluesOnly);
    const double gmax = es.eigenvalues().maxCoeff();
    if (margin < out.margin) {
      out.margin = margin;
      out.worst = s;
    }
    if (margin < -kTolPsd * gmax) out.holds = false;
  }
  return out;
}

Vec lift_drift(const EvolvingMetricModel& model, double t, const Vec& x, const Mat& frame,
               const VectorFieldSpec& spec) {
  const Mat g = model.state_metric(t, x);
  const Mat gram = frame.transpose() * g * frame;
  const double defect =
      (gram - Mat::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  if (defect > 10.0 * kTolFrame)
    throw DegenerateFrameError("lift_drift: frame orthonormality defect " +
                               std::to_string(defect));
  return frame.transpose() * (g * spec.state_field(model, t, x));
}

double drift_constant(const EvolvingMetricModel& model, const VectorFieldSpec& spec, int n_t) {
  // Z may be discontinuous at o (radial fields); take the value just off the pole.
  const Vec x = model.state_point_at(10.0 * model.pole_epsilon());
  double sup = 0.0;
  for (int i = 0; i < n_t; ++i) {
    const double t = n_t == 1 ? 0.0 : model.horizon() * i / (n_t - 1);
    const Vec z = spec.state_field(model, t, x);
    sup = std::max(sup, std::sqrt(z.dot(model.state_metric(t, x) * z)));
  }
  return sup;
}

}  // namespace rfbm
