#include "rfbm/warp.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "rfbm/types.hpp"

namespace rfbm {

namespace {

double polynomial_root(const std::vector<double>& c) {
  auto f = [&](double r) {
    double acc = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * r + c[i];
    return acc * r;
  };
  const double step = 1e-3;
  double prev = step;
  for (double r = 2 * step; r < 1e3; r += step) {
    if (f(r) <= 0.0) {
      double lo = prev, hi = r;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? lo : hi) = mid;
      }
      return lo;
    }
    prev = r;
  }
  return kInfinity;
}

}  // namespace

Warp::Warp(Kind kind, double param, std::vector<double> coeffs)
    : kind_(kind), param_(param), coeffs_(std::move(coeffs)), domain_limit_(kInfinity) {
  if (kind_ == Kind::Sin) domain_limit_ = std::numbers::pi / param_;
  if (kind_ == Kind::Polynomial) domain_limit_ = polynomial_root(coeffs_);
}

Warp Warp::sinh(double k) {
  if (!(k > 0.0)) throw ConfigError("sinh warp needs k > 0");
  return Warp(Kind::Sinh, k, {});
}

Warp Warp::sin(double k) {
  if (!(k > 0.0)) throw ConfigError("sin warp needs k > 0");
  return Warp(Kind::Sin, k, {});
}

Warp Warp::linear() { return Warp(Kind::Linear, 0.0, {}); }

Warp Warp::gauss_exp(double c) { return Warp(Kind::GaussExp, c, {}); }

Warp Warp::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty() || coeffs[0] != 1.0)
    throw ConfigError("polynomial warp needs leading r^1 coefficient 1 (f'(0) = 1)");
  return Warp(Kind::Polynomial, 0.0, std::move(coeffs));
}

WarpValues Warp::eval(double r) const {
  switch (kind_) {
    case Kind::Sinh: {
      const double k = param_;
      return {std::sinh(k * r) / k, std::cosh(k * r), k * std::sinh(k * r)};
    }
    case Kind::Sin: {
      const double k = param_;
      return {std::sin(k * r) / k, std::cos(k * r), -k * std::sin(k * r)};
    }
    case Kind::Linear:
      return {r, 1.0, 0.0};
    case Kind::GaussExp: {
      const double c = param_;
      const double e = std::exp(c * r * r);
      return {r * e, e * (1.0 + 2.0 * c * r * r), e * (6.0 * c * r + 4.0 * c * c * r * r * r)};
    }
    case Kind::Polynomial: {
      WarpValues v;
      double pw = 1.0;  // r^(i)
      for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        v.f += coeffs_[i] * pw * r;
        v.df += coeffs_[i] * n * pw;
        if (i >= 1) v.d2f += coeffs_[i] * n * (n - 1.0) * pw / r;
        pw *= r;
      }
      if (r == 0.0 && coeffs_.size() > 1) v.d2f = 2.0 * coeffs_[1];
      return v;
    }
  }
  return {};
}

double Warp::log_derivative(double r) const {
  switch (kind_) {
    case Kind::Sinh: return param_ / std::tanh(param_ * r);
    case Kind::Sin: return param_ / std::tan(param_ * r);
    case Kind::Linear: return 1.0 / r;
    case Kind::GaussExp: return 1.0 / r + 2.0 * param_ * r;
    case Kind::Polynomial: {
      const WarpValues w = eval(r);
      return w.df / w.f;
    }
  }
  return 0.0;
}

double Warp::length_scale() const {
  if (kind_ == Kind::Sinh || kind_ == Kind::Sin) return 1.0 / param_;
  return 1.0;
}

bool Warp::smooth_pole() const {
  if (kind_ == Kind::Polynomial) return coeffs_.size() < 2 || coeffs_[1] == 0.0;
  return true;
}

bool Warp::nonpositively_curved(double radius, int dim) const {
  switch (kind_) {
    case Kind::Sinh:
    case Kind::Linear:
      return true;
    case Kind::Sin:
      return false;
    case Kind::GaussExp:
      if (param_ >= 0.0) return true;
      break;
    case Kind::Polynomial:
      break;
  }
  const int n = 512;
  for (int i = 1; i <= n; ++i) {
    const double r = std::min(radius, 0.999 * domain_limit_) * i / n;
    const WarpValues w = eval(r);
    if (w.d2f < -1e-14) return false;
    if (dim >= 3 && std::abs(w.df) < 1.0 - 1e-14) return false;
  }
  return true;
}

std::string Warp::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Sinh: os << "sinh(k=" << param_ << ")"; break;
    case Kind::Sin: os << "sin(k=" << param_ << ")"; break;
    case Kind::Linear: os << "r"; break;
    case Kind::GaussExp: os << "r*exp(c*r^2)(c=" << param_ << ")"; break;
    case Kind::Polynomial: {
      os << "polynomial(";
      for (std::size_t i = 0; i < coeffs_.size(); ++i) os << (i ? "," : "") << coeffs_[i];
      os << ")";
      break;
    }
  }
  return os.str();
}

ScaleCurve ScaleCurve::constant(double a0) {
  if (!(a0 > 0.0)) throw ConfigError("scale curve needs a0 > 0");
  return {Kind::Constant, a0, 0.0};
}

ScaleCurve ScaleCurve::linear(double a0, double slope) {
  if (!(a0 > 0.0)) throw ConfigError("scale curve needs a0 > 0");
  return {Kind::Linear, a0, slope};
}

ScaleCurve ScaleCurve::exponential(double a0, double rate) {
  if (!(a0 > 0.0)) throw ConfigError("scale curve needs a0 > 0");
  return {Kind::Exponential, a0, rate};
}

double ScaleCurve::a(double t) const {
  switch (kind_) {
    case Kind::Constant: return a0_;
    case Kind::Linear: return a0_ + rate_ * t;
    case Kind::Exponential: return a0_ * std::exp(rate_ * t);
  }
  return a0_;
}

double ScaleCurve::da(double t) const {
  switch (kind_) {
    case Kind::Constant: return 0.0;
    case Kind::Linear: return rate_;
    case Kind::Exponential: return rate_ * a0_ * std::exp(rate_ * t);
  }
  return 0.0;
}

double ScaleCurve::min_over(double T) const { return std::min(a(0.0), a(T)); }
double ScaleCurve::max_over(double T) const { return std::max(a(0.0), a(T)); }

std::string ScaleCurve::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Constant: os << "constant(a0=" << a0_ << ")"; break;
    case Kind::Linear: os << "linear(a0=" << a0_ << ",slope=" << rate_ << ")"; break;
    case Kind::Exponential: os << "exponential(a0=" << a0_ << ",rate=" << rate_ << ")"; break;
  }
  return os.str();
}

}  // namespace rfbm
