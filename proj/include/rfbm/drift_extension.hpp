#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rfbm/manifold_models.hpp"
#include "rfbm/types.hpp"

namespace rfbm {

/// Time-dependent vector field Z(t) from the named catalog.
class VectorFieldSpec {
 public:
  enum class Kind { Zero, Radial, Linear, RhoPower };

  static VectorFieldSpec zero();
  /// Z = c grad rho
  static VectorFieldSpec radial(double c);
  /// Z(x) = A x in chart coordinates (chart models only)
  static VectorFieldSpec linear(Mat a);
  /// Z = grad(c rho^p) = c p rho^(p-1) grad rho
  static VectorFieldSpec rho_power(double p, double c);

  Kind kind() const { return kind_; }
  bool is_zero() const { return kind_ == Kind::Zero; }
  std::string describe() const;

  /// Z in base geodesic-normal chart components.
  Vec chart_field(const EvolvingMetricModel& model, double t, const Vec& chart_x) const;
  /// J(i, k) = d_i Z^k in the chart.
  Mat chart_jacobian(const EvolvingMetricModel& model, double t, const Vec& chart_x) const;
  /// Z in state coordinates (ambient vectors on the sphere).
  Vec state_field(const EvolvingMetricModel& model, double t, const Vec& x) const;

 private:
  VectorFieldSpec(Kind kind, double p, double c, Mat a);
  // radial profile phi(r) with Z = phi(r) n in the chart, and phi'(r)
  void profile(const EvolvingMetricModel& model, double t, double r, double& phi,
               double& dphi) const;
  Kind kind_;
  double p_ = 1.0;
  double c_ = 0.0;
  Mat a_;
};

/// Symmetrised covariant derivative of Z lowered by g(t), chart components.
Mat nabla_flat(const EvolvingMetricModel& model, const VectorFieldSpec& spec, double t,
               const Vec& chart_x);

struct SpaceTimeSample {
  double t = 0.0;
  Vec chart_x;
};

/// (t, x) samples on a t-grid times radial shells (several directions per shell),
/// avoiding the pole and the chart boundary.
std::vector<SpaceTimeSample> space_time_grid(const EvolvingMetricModel& model, double radius,
                                             int n_t, int n_r, int n_dir = 3);

struct AssumptionCheck {
  bool holds = false;
  double margin = kInfinity;
  SpaceTimeSample worst;
};

inline constexpr double kTolPsd = 1e-9;

/// Smallest pencil eigenvalue of Ric + b(rho) g - (nabla Z)^flat - dg/dt
/// over the samples; holds iff it is >= -kTolPsd * lambda_max(g).
AssumptionCheck check_assumption(const EvolvingMetricModel& model, const VectorFieldSpec& spec,
                                 const std::function<double(double)>& b,
                                 const std::vector<SpaceTimeSample>& grid);

inline constexpr double kTolFrame = 1e-9;

/// Frame coefficients c_i = <Z, U e_i>_{g(t)} of the drift at the state.
Vec lift_drift(const EvolvingMetricModel& model, double t, const Vec& x, const Mat& frame,
               const VectorFieldSpec& spec);

/// sup over t-grid of |Z(t, o)|_{g(t)}.
double drift_constant(const EvolvingMetricModel& model, const VectorFieldSpec& spec,
                      int n_t = 64);

}  // namespace rfbm
