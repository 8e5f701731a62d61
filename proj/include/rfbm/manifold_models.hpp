#pragma once

#include <string>

#include "rfbm/types.hpp"
#include "rfbm/warp.hpp"

namespace rfbm {

/// How simulation states store a point. Chart models use Cartesian
/// geodesic-normal coordinates centred at the pole o; the sphere keeps the
/// point on the unit sphere in R^{d+1} and carries the radius in a(t).
enum class Representation { Chart, Ambient };

struct MetricJet {
  Mat g;
  Mat dg_dt;
  Christoffel christoffel;
  Mat ricci;
};

struct DistanceJet {
  double rho = 0.0;
  double drho_dt = 0.0;
  Vec grad;  // in state coordinates
  double laplacian = 0.0;
};

struct SuperRicciCheck {
  bool holds = false;
  double margin = 0.0;  // smallest eigenvalue of Ric - dg/dt relative to g(t)
};

/// Sectional/Ricci curvature of g(t) at base radius r (rotational symmetry
/// makes them depend only on r). Values are in g(t) units.
struct RadialCurvature {
  double radial_sectional = 0.0;      // planes containing d/dr
  double tangential_sectional = 0.0;  // planes orthogonal to d/dr (d >= 3)
  double ricci_radial = 0.0;
  double ricci_tangential = 0.0;
};

/// A manifold with a time-dependent metric g(t) = a(t) g0, where g0 is a
/// rotationally symmetric warped product around the pole o.
class EvolvingMetricModel {
 public:
  enum class Kind { Euclidean, Sphere, Homothetic, WarpedProduct };

  static EvolvingMetricModel euclidean(int dim, double horizon);
  /// Round sphere under backwards Ricci flow, radius r(t)^2 = r0^2 + (d-1) t.
  static EvolvingMetricModel sphere(int dim, double horizon, double r0);
  static EvolvingMetricModel warped(int dim, double horizon, Warp warp);
  /// a(t) times the metric of `base`; the base must be static.
  static EvolvingMetricModel homothetic(const EvolvingMetricModel& base, ScaleCurve scale);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  double horizon() const { return horizon_; }
  Representation representation() const { return representation_; }
  int coord_dim() const { return representation_ == Representation::Ambient ? dim_ + 1 : dim_; }
  const Warp& warp() const { return warp_; }
  const ScaleCurve& scale() const { return scale_; }
  double length_scale() const { return warp_.length_scale(); }
  bool has_cut_locus() const { return warp_.kind() == Warp::Kind::Sin; }
  double pole_epsilon() const { return 1e-6 * length_scale(); }
  double chart_epsilon() const { return 1e-9 * length_scale(); }
  std::string describe() const;

  /// Reference point o in state coordinates.
  Vec pole() const;
  /// Base (g0) geodesic-normal coordinates <-> state coordinates.
  Vec chart_to_state(const Vec& chart) const;
  Vec state_to_chart(const Vec& x) const;
  /// State point at base distance r from o along the first axis.
  Vec state_point_at(double base_radius) const;
  /// d_{g0}(o, x).
  double base_radius(const Vec& x) const;

  /// rho(t, x) = d_{g(t)}(o, x); valid at the pole (unlike distance_jet).
  double distance(double t, const Vec& x) const;
  /// d_{g(t)}(x, y) for the catalog warps with a closed-form law of cosines
  /// (linear, sinh, sin).
  double distance_between(double t, const Vec& x, const Vec& y) const;

  // ---- state-coordinate geometry used by the frame integrator ----
  Mat state_metric(double t, const Vec& x) const;
  Mat state_metric_dot(double t, const Vec& x) const;
  /// Matrix whose column j is the horizontal transport rate Gamma(v, U_j)
  /// (the frame moves by minus this along v).
  Mat transport(double t, const Vec& x, const Vec& v, const Mat& frame) const;
  /// Ito correction -1/2 g^{ij} Gamma^k_ij (chart) or -d/(2a) p (ambient).
  Vec ito_drift(double t, const Vec& x) const;
  bool in_domain(const Vec& x) const;
  /// Pull the point back onto the model (ambient normalisation; no-op in charts).
  void project_point(Vec& x) const;
  /// Tangential part of a frame (ambient); no-op in charts.
  void project_tangent(const Vec& x, Mat& frame) const;

 private:
  EvolvingMetricModel(Kind kind, int dim, double horizon, Warp warp, ScaleCurve scale,
                      Representation rep);
  Kind kind_;
  int dim_;
  double horizon_;
  Warp warp_;
  ScaleCurve scale_;
  Representation representation_;
};

/// Metric, its time derivative, Christoffel symbols and Ricci tensor at a
/// chart point (base geodesic-normal coordinates).
MetricJet metric_jet(const EvolvingMetricModel& model, double t, const Vec& chart_x);

/// rho and its derivatives at a state point. Throws at the pole and on the cut locus.
DistanceJet distance_jet(const EvolvingMetricModel& model, double t, const Vec& x);

/// d_{g(t)}(x, Cut_{g(t)}(o)); +infinity when the cut locus is empty.
double cutlocus_distance(const EvolvingMetricModel& model, double t, const Vec& x);

SuperRicciCheck check_super_ricci(const EvolvingMetricModel& model, double t,
                                  const Vec& chart_x);

RadialCurvature radial_curvature(const EvolvingMetricModel& model, double t,
                                 double base_radius);

/// Smallest eigenvalue of the symmetric pencil (m, g), i.e. min over
/// g-unit vectors of m(v, v).
double pencil_min_eigenvalue(const Mat& m, const Mat& g);

}  // namespace rfbm
