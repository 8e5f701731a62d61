#include "rfbm/comparison.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>

#include <boost/math/quadrature/gauss.hpp>

namespace rfbm {

namespace {

std::vector<double> time_grid(double horizon, int n) {
  std::vector<double> t;
  for (int i = 0; i < n; ++i) t.push_back(n == 1 ? 0.0 : horizon * i / (n - 1));
  return t;
}

double coth(double x) { return 1.0 / std::tanh(x); }

}  // namespace

ComparisonProfile constants(const EvolvingMetricModel& model, double window, int n_t, int n_r) {
  if (n_t < 1 || n_r < 1) throw ConfigError("constants: grids must be non-empty");
  ComparisonProfile p;
  p.dim = model.dim();
  p.grid_t = n_t;
  p.grid_r = n_r;
  const int d = model.dim();
  const ScaleCurve& sc = model.scale();
  const double T = model.horizon();
  const double a_min = sc.min_over(T), a_max = sc.max_over(T);
  const Warp& warp = model.warp();
  const std::vector<double> ts = time_grid(T, n_t);

  p.compact = model.has_cut_locus();
  double reach;  // base radius covered by the grids
  if (p.compact) {
    reach = warp.domain_limit();
    p.window = reach;
  } else {
    if (!(window > 0.0) || !std::isfinite(window))
      throw ConfigError("constants: a noncompact model needs a finite window radius R_w > 0");
    if (window >= warp.domain_limit())
      throw ConfigError("constants: window reaches the coordinate boundary of the warp");
    reach = window;
    p.window = window;
  }

  auto radii = [&](double r_max) {
    std::vector<double> r;
    for (int j = 0; j < n_r; ++j) r.push_back(r_max * j / n_r);
    r.push_back(r_max * (p.compact ? 1.0 - 1e-6 : 1.0));
    return r;
  };

  double k2 = 0.0;
  for (double t : ts)
    for (double r : radii(reach)) {
      const RadialCurvature c = radial_curvature(model, t, r);
      k2 = std::max(k2, std::abs(c.radial_sectional));
      if (d >= 3) k2 = std::max(k2, std::abs(c.tangential_sectional));
    }
  p.k = std::sqrt(k2);

  const bool cartan_hadamard = !p.compact && warp.nonpositively_curved(reach, d);
  if (p.compact) {
    p.i_m = std::sqrt(a_min) * warp.domain_limit();
    p.r1 = 0.999 * p.i_m;
  } else {
    p.i_m = cartan_hadamard ? kInfinity : (p.k > 0.0 ? std::numbers::pi / p.k : kInfinity);
    p.r1 = std::sqrt(a_min) * window;
  }

  // k_1 over the ball sup_t d_{g(t)}(o, x) <= r_1
  const double ball = p.r1 / std::sqrt(a_max);
  double min_ric = kInfinity;
  for (double t : ts)
    for (double r : radii(std::min(ball, reach))) {
      const RadialCurvature c = radial_curvature(model, t, r);
      min_ric = std::min(min_ric, c.ricci_radial);
      min_ric = std::min(min_ric, c.ricci_tangential);
    }
  p.k1 = std::max(1.0, std::sqrt(std::max(0.0, -min_ric / (d - 1))));

  // |d/dt d_{g(t)}(x, y)| = |a'| / (2 sqrt a) d_{g0}(x, y) <= that times the diameter
  const double diameter = p.compact ? warp.domain_limit() : 2.0 * window;
  double c1 = 0.0;
  for (double t : ts) c1 = std::max(c1, std::abs(sc.da(t)) / (2.0 * std::sqrt(sc.a(t))));
  p.c1 = c1 * diameter;

  // d(A, Cut_ST): a point y at g(t)-distance i_M/3 from o stays at least half its
  // base angle (measured in dbar) away from the cut locus of any point
  if (std::isfinite(p.i_m)) {
    double best = kInfinity;
    for (double t : ts) {
      const double base = p.i_m / (3.0 * std::sqrt(sc.a(t)));
      best = std::min(best, std::sqrt(a_max) * 0.5 * base);
    }
    p.a_set_distance = best;
  }
  p.delta1 = std::min(p.a_set_distance, p.i_m / (3.0 * (p.c1 + 1.0)));
  return p;
}

double v_of(double r, const ComparisonProfile& p) {
  if (!(r > 0.0)) return kInfinity;
  const double capped = std::min(r, p.i_m / 3.0);
  const double lead = p.k > 0.0 ? p.k * coth(p.k * capped) : 1.0 / capped;
  return 0.5 * (p.dim - 1) * lead + 2.0 * p.c1;
}

std::function<double(double)> v_function(const ComparisonProfile& p) {
  return [p](double r) { return v_of(r, p); };
}

double fbar(double s, const ComparisonProfile& p) {
  if (!(s > 0.0)) return kInfinity;
  const double capped = std::min(s, p.r1);
  return p.k1 * coth(p.k1 * capped) + p.k1 * capped;
}

namespace {

// One RK4 step of (G, G') under G'' = -q(s) G.
void rk4(const std::function<double(double)>& ric, double inv, double s, double h, double& g,
         double& dg) {
  auto acc = [&](double x, double gv) { return -ric(x) * inv * gv; };
  const double k1g = dg, k1v = acc(s, g);
  const double k2g = dg + 0.5 * h * k1v, k2v = acc(s + 0.5 * h, g + 0.5 * h * k1g);
  const double k3g = dg + 0.5 * h * k2v, k3v = acc(s + 0.5 * h, g + 0.5 * h * k2g);
  const double k4g = dg + h * k3v, k4v = acc(s + h, g + h * k3g);
  g += h / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
  dg += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
}

}  // namespace

JacobiSolution solve_jacobi(const std::function<double(double)>& ric, double b, double step,
                            int dim) {
  if (!(b > 0.0) || !(step > 0.0)) throw ConfigError("solve_jacobi: need b > 0 and step > 0");
  if (dim < 2) throw ConfigError("solve_jacobi: dimension must be >= 2");
  JacobiSolution j;
  j.dim = dim;
  j.profile = ric;
  const auto n = static_cast<std::size_t>(std::ceil(b / step - 1e-9));
  j.step = b / static_cast<double>(n);
  const double inv = 1.0 / (dim - 1);
  double g = 0.0, dg = 1.0;
  j.s.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double s = j.step * static_cast<double>(i);
    j.s.push_back(s);
    j.g.push_back(g);
    j.dg.push_back(dg);
    j.ric.push_back(ric(s));
    if (i > 0 && g <= 0.0 && !j.conjugate) {
      j.conjugate = true;
      j.conjugate_at = s;
    }
    if (i < n) rk4(ric, inv, s, j.step, g, dg);
  }
  return j;
}

void jacobi_eval(const JacobiSolution& j, double r, double& g, double& dg) {
  if (r < 0.0 || r > j.s.back() * (1.0 + 1e-12)) throw Error("jacobi_eval: r outside [0, b]");
  auto i = static_cast<std::size_t>(std::floor(r / j.step));
  if (i >= j.s.size() - 1) i = j.s.size() - 1;
  g = j.g[i];
  dg = j.dg[i];
  const double rest = r - j.s[i];
  if (rest > 0.0) rk4(j.profile, 1.0 / (j.dim - 1), j.s[i], rest, g, dg);
}

double index_f(const JacobiSolution& j, double r) {
  if (!(r > 0.0)) throw Error("index_F: r must be positive");
  if (j.conjugate && r >= j.conjugate_at)
    throw ConjugatePointError("index_F: r is past the first conjugate point");
  double g = 0.0, dg = 0.0;
  jacobi_eval(j, r, g, dg);
  if (!(g > 0.0)) throw ConjugatePointError("index_F: G vanishes at r");
  // int_0^r Ric ds cell by cell; G''/G = -Ric/(d-1) has no singularity at s = 0
  using Quad = boost::math::quadrature::gauss<double, 10>;
  double integral = 0.0;
  const auto full = static_cast<std::size_t>(std::floor(r / j.step));
  for (std::size_t i = 0; i < full && i + 1 < j.s.size(); ++i)
    integral += Quad::integrate(j.profile, j.s[i], j.s[i + 1]);
  const double start = j.step * static_cast<double>(full);
  if (r > start) integral += Quad::integrate(j.profile, start, r);
  return (j.dim - 1) * dg / g + integral;
}

std::vector<double> index_f_on_grid(const JacobiSolution& j) {
  using Quad = boost::math::quadrature::gauss<double, 10>;
  std::vector<double> out(j.s.size(), std::numeric_limits<double>::quiet_NaN());
  double integral = 0.0;
  for (std::size_t i = 1; i < j.s.size(); ++i) {
    integral += Quad::integrate(j.profile, j.s[i - 1], j.s[i]);
    if (j.conjugate && j.s[i] >= j.conjugate_at) break;
    if (j.g[i] > 0.0) out[i] = (j.dim - 1) * j.dg[i] / j.g[i] + integral;
  }
  return out;
}

std::function<double(double)> radial_ricci_profile(const EvolvingMetricModel& model, double t) {
  const double sa = std::sqrt(model.scale().a(t));
  return [&model, t, sa](double s) { return radial_curvature(model, t, s / sa).ricci_radial; };
}

std::vector<DriftBoundSample> drift_bound_grid(const EvolvingMetricModel& model,
                                               const ComparisonProfile& p, int n_t, int n_rho) {
  std::vector<DriftBoundSample> out;
  const std::vector<double> ts = time_grid(model.horizon(), n_t);
  const double reach = p.compact ? model.warp().domain_limit() : p.window;
  for (double t : ts) {
    for (int j = 1; j <= n_rho; ++j) {
      // open interval (0, reach): skips the pole and the cut locus
      const double r = reach * j / (n_rho + 1);
      out.push_back({t, model.state_point_at(r)});
    }
  }
  return out;
}

DriftBoundResult drift_bound_check(const EvolvingMetricModel& model, const ComparisonProfile& p,
                                   const std::vector<DriftBoundSample>& samples) {
  DriftBoundResult out;
  for (const DriftBoundSample& s : samples) {
    if (model.has_cut_locus() && cutlocus_distance(model, s.t, s.x) <= 0.0)
      throw CutLocusError("drift_bound_check: sample on the cut locus");
    const DistanceJet jet = distance_jet(model, s.t, s.x);
    const double margin = fbar(jet.rho, p) - (jet.laplacian + 2.0 * jet.drho_dt);
    if (margin < out.margin) {
      out.margin = margin;
      out.worst = s;
    }
    ++out.samples;
  }
  return out;
}

void write_profile(std::ostream& os, const ComparisonProfile& p) {
  os << std::setprecision(17);
  os << "profile.dim = " << p.dim << "\n"
     << "profile.i_M = " << p.i_m << "\n"
     << "profile.K = " << p.k << "\n"
     << "profile.C1 = " << p.c1 << "\n"
     << "profile.r1 = " << p.r1 << "\n"
     << "profile.k1 = " << p.k1 << "\n"
     << "profile.delta1 = " << p.delta1 << "\n"
     << "profile.A_distance_lower_bound = " << p.a_set_distance << "\n"
     << "profile.window_base_radius = " << p.window << "\n"
     << "profile.compact = " << (p.compact ? "true" : "false") << "\n"
     << "profile.grid_t = " << p.grid_t << "\n"
     << "profile.grid_r = " << p.grid_r << "\n";
}

}  // namespace rfbm
