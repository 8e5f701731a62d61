#pragma once

#include <string>
#include <vector>

namespace rfbm {

struct WarpValues {
  double f = 0.0;
  double df = 0.0;
  double d2f = 0.0;
};

/// Warp function f of a rotationally symmetric metric dr^2 + f(r)^2 dsigma^2.
/// Every catalog entry satisfies f(0) = 0 and f'(0) = 1.
class Warp {
 public:
  enum class Kind { Sinh, Sin, Linear, GaussExp, Polynomial };

  static Warp sinh(double k = 1.0);
  static Warp sin(double k = 1.0);
  static Warp linear();
  // f(r) = r exp(c r^2)
  static Warp gauss_exp(double c);
  // f(r) = sum_i coeffs[i] r^(i+1); coeffs[0] must be 1.
  static Warp polynomial(std::vector<double> coeffs);

  WarpValues eval(double r) const;
  double f(double r) const { return eval(r).f; }
  /// f'(r) / f(r), without forming f (stable where f overflows)
  double log_derivative(double r) const;

  Kind kind() const { return kind_; }
  double parameter() const { return param_; }
  const std::vector<double>& coefficients() const { return coeffs_; }

  /// Upper end of the radial coordinate range where f > 0.
  double domain_limit() const { return domain_limit_; }
  double length_scale() const;

  /// True when every sectional curvature is <= 0 for r in (0, radius]
  /// (checked in closed form for sinh/linear/gauss_exp, on a grid otherwise).
  bool nonpositively_curved(double radius, int dim) const;

  /// f''(0) == 0, so the metric and its Christoffels extend smoothly to the pole.
  bool smooth_pole() const;

  std::string describe() const;

 private:
  Warp(Kind kind, double param, std::vector<double> coeffs);
  Kind kind_;
  double param_;
  std::vector<double> coeffs_;
  double domain_limit_;
};

/// Positive scale curve a(t) of a homothetic family a(t) g0.
class ScaleCurve {
 public:
  enum class Kind { Constant, Linear, Exponential };

  static ScaleCurve constant(double a0 = 1.0);
  // a(t) = a0 + slope t
  static ScaleCurve linear(double a0, double slope);
  // a(t) = a0 exp(rate t)
  static ScaleCurve exponential(double a0, double rate);

  double a(double t) const;
  double da(double t) const;
  // Extremes over [0, T]; every catalog curve is monotone.
  double min_over(double T) const;
  double max_over(double T) const;

  Kind kind() const { return kind_; }
  double a0() const { return a0_; }
  double rate() const { return rate_; }
  bool is_static() const { return kind_ == Kind::Constant || rate_ == 0.0; }
  std::string describe() const;

 private:
  ScaleCurve(Kind kind, double a0, double rate) : kind_(kind), a0_(a0), rate_(rate) {}
  Kind kind_;
  double a0_;
  double rate_;
};

}  // namespace rfbm
