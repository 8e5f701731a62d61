#include "rfbm/manifold_models.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace rfbm {

namespace {

// Third derivative of the warp at the pole; fixes the curvature there.
double warp_third_derivative_at_pole(const Warp& w) {
  switch (w.kind()) {
    case Warp::Kind::Sinh: return w.parameter() * w.parameter();
    case Warp::Kind::Sin: return -w.parameter() * w.parameter();
    case Warp::Kind::Linear: return 0.0;
    case Warp::Kind::GaussExp: return 6.0 * w.parameter();
    case Warp::Kind::Polynomial: {
      const auto& c = w.coefficients();
      return c.size() > 2 ? 6.0 * c[2] : 0.0;
    }
  }
  return 0.0;
}

// Coefficients of Gamma^k_ij = alpha (n_i P_kj + n_j P_ki) + beta n_k P_ij for
// g0 = n n^T + (f/r)^2 P in geodesic-normal coordinates.
struct ConnectionCoefficients {
  double alpha = 0.0;
  double beta = 0.0;
};

ConnectionCoefficients connection_coefficients(const Warp& warp, double r) {
  if (r < 1e-10) return {};
  const WarpValues w = warp.eval(r);
  return {w.df / w.f - 1.0 / r, (r - w.f * w.df) / (r * r)};
}

Mat base_metric(const Warp& warp, const Vec& x) {
  const int d = static_cast<int>(x.size());
  const double r = x.norm();
  Mat g = Mat::Identity(d, d);
  if (r < 1e-12) return g;
  const Vec n = x / r;
  const double f = warp.f(r);
  const double A = (f / r) * (f / r);
  g = A * Mat::Identity(d, d) + (1.0 - A) * (n * n.transpose());
  return g;
}

double angle_between_unit(const Vec& p, const Vec& q) {
  return 2.0 * std::atan2((p - q).norm(), (p + q).norm());
}

}  // namespace

EvolvingMetricModel::EvolvingMetricModel(Kind kind, int dim, double horizon, Warp warp,
                                         ScaleCurve scale, Representation rep)
    : kind_(kind), dim_(dim), horizon_(horizon), warp_(std::move(warp)), scale_(scale),
      representation_(rep) {
  if (dim_ < 2 || dim_ > kMaxDim)
    throw ConfigError("model dimension must be in [2, " + std::to_string(kMaxDim) + "]");
  if (!(horizon_ > 0.0)) throw ConfigError("model horizon must be > 0");
  if (!(scale_.min_over(horizon_) > 0.0))
    throw ConfigError("scale curve a(t) must stay positive on [0, T]");
}

EvolvingMetricModel EvolvingMetricModel::euclidean(int dim, double horizon) {
  return {Kind::Euclidean, dim, horizon, Warp::linear(), ScaleCurve::constant(1.0),
          Representation::Chart};
}

EvolvingMetricModel EvolvingMetricModel::sphere(int dim, double horizon, double r0) {
  if (!(r0 > 0.0)) throw ConfigError("sphere needs r0 > 0");
  return {Kind::Sphere, dim, horizon, Warp::sin(1.0),
          ScaleCurve::linear(r0 * r0, static_cast<double>(dim - 1)), Representation::Ambient};
}

EvolvingMetricModel EvolvingMetricModel::warped(int dim, double horizon, Warp warp) {
  return {Kind::WarpedProduct, dim, horizon, std::move(warp), ScaleCurve::constant(1.0),
          Representation::Chart};
}

EvolvingMetricModel EvolvingMetricModel::homothetic(const EvolvingMetricModel& base,
                                                    ScaleCurve scale) {
  if (base.kind_ == Kind::Sphere || base.kind_ == Kind::Homothetic || !base.scale_.is_static())
    throw ConfigError("homothetic family needs a static base (euclidean or warped)");
  const double a0 = base.scale_.a0();
  ScaleCurve combined = scale;
  if (a0 != 1.0) {
    switch (scale.kind()) {
      case ScaleCurve::Kind::Constant: combined = ScaleCurve::constant(a0 * scale.a0()); break;
      case ScaleCurve::Kind::Linear:
        combined = ScaleCurve::linear(a0 * scale.a0(), a0 * scale.rate());
        break;
      case ScaleCurve::Kind::Exponential:
        combined = ScaleCurve::exponential(a0 * scale.a0(), scale.rate());
        break;
    }
  }
  return {Kind::Homothetic, base.dim_, base.horizon_, base.warp_, combined,
          Representation::Chart};
}

std::string EvolvingMetricModel::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Euclidean: os << "euclidean"; break;
    case Kind::Sphere: os << "sphere"; break;
    case Kind::Homothetic: os << "homothetic"; break;
    case Kind::WarpedProduct: os << "warped"; break;
  }
  os << "(d=" << dim_ << ", T=" << horizon_ << ", warp=" << warp_.describe()
     << ", scale=" << scale_.describe() << ")";
  return os.str();
}

Vec EvolvingMetricModel::pole() const {
  Vec o = Vec::Zero(coord_dim());
  if (representation_ == Representation::Ambient) o[0] = 1.0;
  return o;
}

Vec EvolvingMetricModel::chart_to_state(const Vec& chart) const {
  if (representation_ == Representation::Chart) return chart;
  Vec p = Vec::Zero(dim_ + 1);
  const double theta = chart.norm();
  p[0] = std::cos(theta);
  if (theta > 0.0) p.tail(dim_) = std::sin(theta) / theta * chart;
  return p;
}

Vec EvolvingMetricModel::state_to_chart(const Vec& x) const {
  if (representation_ == Representation::Chart) return x;
  const Vec tail = x.tail(dim_);
  const double s = tail.norm();
  const double theta = std::atan2(s, x[0]);
  if (s == 0.0) return Vec::Zero(dim_);
  return theta / s * tail;
}

Vec EvolvingMetricModel::state_point_at(double base_radius) const {
  Vec chart = Vec::Zero(dim_);
  chart[0] = base_radius;
  return chart_to_state(chart);
}

double EvolvingMetricModel::base_radius(const Vec& x) const {
  if (representation_ == Representation::Chart) return x.norm();
  return std::atan2(x.tail(dim_).norm(), x[0]);
}

double EvolvingMetricModel::distance(double t, const Vec& x) const {
  return std::sqrt(scale_.a(t)) * base_radius(x);
}

double EvolvingMetricModel::distance_between(double t, const Vec& x, const Vec& y) const {
  const double s = std::sqrt(scale_.a(t));
  if (representation_ == Representation::Ambient)
    return s * angle_between_unit(x.normalized(), y.normalized());
  const double r1 = x.norm();
  const double r2 = y.norm();
  // sin^2(phi/2) between the two directions
  double half_sin2 = 0.0;
  if (r1 > 0.0 && r2 > 0.0) half_sin2 = 0.25 * (x / r1 - y / r2).squaredNorm();
  switch (warp_.kind()) {
    case Warp::Kind::Linear:
      return s * (x - y).norm();
    case Warp::Kind::Sinh: {
      const double k = warp_.parameter();
      const double a = std::sinh(0.5 * k * (r1 - r2));
      const double v = a * a + std::sinh(k * r1) * std::sinh(k * r2) * half_sin2;
      return s * 2.0 / k * std::asinh(std::sqrt(v));
    }
    case Warp::Kind::Sin: {
      const double k = warp_.parameter();
      const double a = std::sin(0.5 * k * (r1 - r2));
      const double v = a * a + std::sin(k * r1) * std::sin(k * r2) * half_sin2;
      return s * 2.0 / k * std::asin(std::min(1.0, std::sqrt(v)));
    }
    default:
      throw Error("distance_between: no closed-form two-point distance for warp " +
                  warp_.describe());
  }
}

Mat EvolvingMetricModel::state_metric(double t, const Vec& x) const {
  const double a = scale_.a(t);
  if (representation_ == Representation::Ambient) return a * Mat::Identity(dim_ + 1, dim_ + 1);
  return a * base_metric(warp_, x);
}

Mat EvolvingMetricModel::state_metric_dot(double t, const Vec& x) const {
  const double da = scale_.da(t);
  if (representation_ == Representation::Ambient) return da * Mat::Identity(dim_ + 1, dim_ + 1);
  return da * base_metric(warp_, x);
}

Mat EvolvingMetricModel::transport(double /*t*/, const Vec& x, const Vec& v,
                                   const Mat& frame) const {
  if (representation_ == Representation::Ambient) {
    // Levi-Civita of the round sphere: the normal part of d(U_j) is -p <dp, U_j>.
    return x * (v.transpose() * frame);
  }
  const double r = x.norm();
  const ConnectionCoefficients cc = connection_coefficients(warp_, r);
  if (cc.alpha == 0.0 && cc.beta == 0.0) return Mat::Zero(frame.rows(), frame.cols());
  const Vec n = x / r;
  const double nv = n.dot(v);
  const Vec pv = v - nv * n;
  Mat out(frame.rows(), frame.cols());
  for (int j = 0; j < frame.cols(); ++j) {
    const Vec u = frame.col(j);
    const double nu = n.dot(u);
    const Vec pu = u - nu * n;
    out.col(j) = cc.alpha * (nv * pu + nu * pv) + cc.beta * pv.dot(pu) * n;
  }
  return out;
}

Vec EvolvingMetricModel::ito_drift(double t, const Vec& x) const {
  const double a = scale_.a(t);
  if (representation_ == Representation::Ambient) {
    return -(static_cast<double>(dim_) / (2.0 * a)) * x;
  }
  const double r = x.norm();
  if (r < 1e-10) return Vec::Zero(dim_);
  const WarpValues w = warp_.eval(r);
  const double A = (w.f / r) * (w.f / r);
  const double beta = (r - w.f * w.df) / (r * r);
  return -0.5 / a * (dim_ - 1) * beta / A * (x / r);
}

bool EvolvingMetricModel::in_domain(const Vec& x) const {
  if (!x.allFinite()) return false;
  if (representation_ == Representation::Ambient) return x.norm() > 0.0;
  return x.norm() < warp_.domain_limit() - chart_epsilon();
}

void EvolvingMetricModel::project_point(Vec& x) const {
  if (representation_ == Representation::Ambient) x.normalize();
}

void EvolvingMetricModel::project_tangent(const Vec& x, Mat& frame) const {
  if (representation_ != Representation::Ambient) return;
  const Vec p = x.normalized();
  frame -= p * (p.transpose() * frame);
}

MetricJet metric_jet(const EvolvingMetricModel& model, double t, const Vec& chart_x) {
  const int d = model.dim();
  if (chart_x.size() != d) throw Error("metric_jet: chart point has wrong dimension");
  const double r = chart_x.norm();
  if (r < model.pole_epsilon())
    throw ChartSingularityError("metric_jet: chart point at the pole");
  if (r >= model.warp().domain_limit() - model.chart_epsilon())
    throw ChartSingularityError("metric_jet: chart point at the coordinate boundary");

  const Warp& warp = model.warp();
  const double a = model.scale().a(t);
  const double da = model.scale().da(t);
  const WarpValues w = warp.eval(r);
  const Vec n = chart_x / r;
  const Mat nn = n * n.transpose();
  const Mat P = Mat::Identity(d, d) - nn;
  const double A = (w.f / r) * (w.f / r);

  MetricJet jet;
  const Mat g0 = nn + A * P;
  jet.g = a * g0;
  jet.dg_dt = da * g0;

  const ConnectionCoefficients cc = connection_coefficients(warp, r);
  for (int k = 0; k < d; ++k) {
    Mat gk(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        gk(i, j) = cc.alpha * (n[i] * P(k, j) + n[j] * P(k, i)) + cc.beta * n[k] * P(i, j);
    jet.christoffel[k] = gk;
  }

  const double radial = -w.d2f / w.f;
  const double tangential = (1.0 - w.df * w.df) / (w.f * w.f);
  const double ric_r = (d - 1) * radial;
  const double ric_t = radial + (d - 2) * tangential;
  jet.ricci = ric_r * nn + ric_t * A * P;
  return jet;
}

DistanceJet distance_jet(const EvolvingMetricModel& model, double t, const Vec& x) {
  const double a = model.scale().a(t);
  const double sa = std::sqrt(a);
  const double da = model.scale().da(t);
  const int d = model.dim();
  DistanceJet jet;

  if (model.representation() == Representation::Ambient) {
    const Vec p = x.normalized();
    const Vec o = model.pole();
    const double c = o.dot(p);
    const Vec tangential_o = o - c * p;
    const double s = tangential_o.norm();
    const double theta = std::atan2(s, c);
    if (sa * theta < model.pole_epsilon())
      throw ChartSingularityError("distance_jet: point at the pole");
    if (s == 0.0 || cutlocus_distance(model, t, x) <= 0.0)
      throw CutLocusError("distance_jet: point on the cut locus");
    jet.rho = sa * theta;
    jet.drho_dt = da / (2.0 * a) * jet.rho;
    jet.grad = -tangential_o / (s * sa);
    jet.laplacian = (d - 1) * (c / s) / sa;
    return jet;
  }

  const double r = x.norm();
  if (sa * r < model.pole_epsilon())
    throw ChartSingularityError("distance_jet: point at the pole");
  if (model.has_cut_locus() && cutlocus_distance(model, t, x) <= 0.0)
    throw CutLocusError("distance_jet: point on the cut locus");
  jet.rho = sa * r;
  jet.drho_dt = da / (2.0 * a) * jet.rho;
  jet.grad = x / (r * sa);
  jet.laplacian = (d - 1) * model.warp().log_derivative(r) / sa;
  return jet;
}

double cutlocus_distance(const EvolvingMetricModel& model, double t, const Vec& x) {
  if (!model.has_cut_locus()) return kInfinity;
  const double reach = model.warp().domain_limit();
  return std::max(0.0, std::sqrt(model.scale().a(t)) * (reach - model.base_radius(x)));
}

SuperRicciCheck check_super_ricci(const EvolvingMetricModel& model, double t,
                                  const Vec& chart_x) {
  const MetricJet jet = metric_jet(model, t, chart_x);
  const Mat m = jet.ricci - jet.dg_dt;
  SuperRicciCheck out;
  out.margin = pencil_min_eigenvalue(m, jet.g);
  const double scale = std::max(1.0, jet.ricci.cwiseAbs().maxCoeff() / jet.g.norm());
  out.holds = out.margin >= -1e-12 * scale;
  return out;
}

RadialCurvature radial_curvature(const EvolvingMetricModel& model, double t,
                                 double base_radius) {
  const double a = model.scale().a(t);
  const int d = model.dim();
  RadialCurvature c;
  if (base_radius < 1e-8 * model.length_scale()) {
    const double k = -warp_third_derivative_at_pole(model.warp()) / a;
    c.radial_sectional = c.tangential_sectional = k;
  } else {
    const WarpValues w = model.warp().eval(base_radius);
    c.radial_sectional = -w.d2f / w.f / a;
    c.tangential_sectional = (1.0 - w.df * w.df) / (w.f * w.f) / a;
  }
  c.ricci_radial = (d - 1) * c.radial_sectional;
  c.ricci_tangential = c.radial_sectional + (d - 2) * c.tangential_sectional;
  return c;
}

double pencil_min_eigenvalue(const Mat& m, const Mat& g) {
  const Eigen::MatrixXd mm = 0.5 * (m + m.transpose());
  const Eigen::MatrixXd gg = 0.5 * (g + g.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(mm, gg, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error("pencil eigenproblem failed (g not SPD?)");
  return es.eigenvalues().minCoeff();
}

}  // namespace rfbm
