#include <cmath>
#include <numbers>

#include <doctest.h>

#include "rfbm/comparison.hpp"
#include "rfbm/ensemble.hpp"
#include "rfbm/explosion_lab.hpp"
#include "rfbm/frame_sde.hpp"
#include "rfbm/rng.hpp"

using namespace rfbm;

namespace {

// composite Simpson on [a, b] with n (even) panels
template <class F>
double simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

// phi(y) = int_1^y exp(-2 int_z^y b) dz, brute force; the inner integral is
// truncated where the integrand has dropped below e^-60
double brute_phi(const std::function<double(double)>& b, double y) {
  const double lo = std::max(1.0, y - 30.0 / std::max(1.0, std::abs(b(y))));
  auto integrand = [&](double z) { return std::exp(-2.0 * simpson(b, z, y, 200)); };
  return simpson(integrand, lo, y, 2000);
}

ComparisonProfile unit_profile() {
  ComparisonProfile p;
  p.k1 = 1.0;
  p.r1 = 1.0;
  return p;
}

}  // namespace

TEST_CASE("drift catalog values") {
  CHECK(DriftSpec::bessel(3)(2.0) == doctest::Approx(0.5));
  CHECK(DriftSpec::radial_model(Warp::sinh(1.0), 2)(1.0) == doctest::Approx(0.5 / std::tanh(1.0)));
  CHECK(DriftSpec::radial_model(Warp::sinh(1.0), 2)(1e4) == doctest::Approx(0.5));
  CHECK(DriftSpec::power(2.0, 1.5)(4.0) == doctest::Approx(16.0));
  CHECK(DriftSpec::shifted(DriftSpec::bessel(3), 0.5)(1.0) == doctest::Approx(1.5));
  CHECK(DriftSpec::power(1.0, 2.0).integral(0.0, 3.0) == doctest::Approx(9.0));
}

TEST_CASE("comparison drift: closed-form integrals of b") {
  const ComparisonProfile p = unit_profile();
  const DriftSpec c = comparison_drift_polynomial(p, {0.7});  // b = c
  CHECK(c(0.5) == doctest::Approx(fbar(0.5, p) + 0.35));
  const DriftSpec lin = comparison_drift_polynomial(p, {0.0, 1.0});  // b = s
  CHECK(lin(3.0) == doctest::Approx(fbar(3.0, p) + 4.5));
  const DriftSpec generic = comparison_drift(p, [](double s) { return std::cos(s); });
  for (double y : {0.3, 1.0, 7.5, 250.0})
    CHECK(generic(y) == doctest::Approx(fbar(y, p) + std::sin(y)).epsilon(1e-10));
}

TEST_CASE("feller phi against closed forms and brute-force quadrature") {
  // Bessel(3): exp(-2 int_z^y 1/s) = (z/y)^2
  for (double y : {2.0, 10.0, 1e3})
    CHECK(feller_phi(DriftSpec::bessel(3), y) ==
          doctest::Approx((y * y * y - 1.0) / (3.0 * y * y)).epsilon(1e-8));
  // zero drift: phi = y - 1
  CHECK(feller_phi(DriftSpec::zero(), 5.0) == doctest::Approx(4.0));
  // b = y and b = y^2 by dense Simpson
  for (const DriftSpec& d : {DriftSpec::power(1.0, 1.0), DriftSpec::power(1.0, 2.0)})
    for (double y : {1.5, 4.0, 20.0})
      CHECK(feller_phi(d, y) == doctest::Approx(brute_phi(d, y)).epsilon(1e-6));
  CHECK(feller_log_phi(DriftSpec::zero(), 1.0) == -kInfinity);
}

TEST_CASE("feller classification of the catalog") {
  CHECK(feller_test(DriftSpec::zero()).classification == Classification::DoesNotExplode);
  CHECK(feller_test(DriftSpec::bessel(3)).classification == Classification::DoesNotExplode);
  CHECK(feller_test(DriftSpec::radial_model(Warp::sinh(1.0), 2)).classification ==
        Classification::DoesNotExplode);
  CHECK(feller_test(DriftSpec::power(1.0, 1.0)).classification == Classification::DoesNotExplode);
  CHECK(feller_test(DriftSpec::power(1.0, 1.5)).classification == Classification::Explodes);
  const ExplosionVerdict sq = feller_test(DriftSpec::power(1.0, 2.0));
  CHECK(sq.classification == Classification::Explodes);
  CHECK(sq.tail_exponent == doctest::Approx(2.0).epsilon(0.01));
  CHECK(std::isfinite(feller_test(DriftSpec::radial_model(Warp::sinh(1.0), 2)).feller_value));
  // Fbar alone: phi tends to a constant
  CHECK(feller_test(comparison_drift_polynomial(unit_profile(), {})).classification ==
        Classification::DoesNotExplode);
}

TEST_CASE("b(s) = s gives Fbar + y^2/2, which explodes") {
  // independent check: phi ~ 1/y^2 on the tail, so int_1^inf phi converges
  const ComparisonProfile p = unit_profile();
  const DriftSpec drift = comparison_drift(p, [](double s) { return s; });
  auto bfun = [&](double y) { return drift(y); };
  auto outer = [&](double u) {  // y = e^u
    const double y = std::exp(u);
    return brute_phi(bfun, y) * y;
  };
  const double upto_1e3 = simpson(outer, 1e-9, std::log(1e3), 400);
  const double upto_1e2 = simpson(outer, 1e-9, std::log(1e2), 400);
  CHECK(upto_1e3 - upto_1e2 < 0.03);  // ~ int_100^1000 2/y^2
  const ExplosionVerdict v = feller_test(drift);
  CHECK(v.classification == Classification::Explodes);
  CHECK(v.feller_value == doctest::Approx(upto_1e3).epsilon(0.01));
}

TEST_CASE("simulate_1d: squared Bessel moment and explosion of y^2") {
  const std::size_t n = 4000;
  const auto y2 = map_paths<double>(n, [](std::size_t i) {
    Sim1dOptions o;
    o.horizon = 1.0;
    o.stream = i;
    const double y = simulate_1d(DriftSpec::bessel(3), o).y_final;
    return y * y;
  });
  const MeanSe ms = mean_se(y2);
  CHECK(std::abs(ms.mean - 4.0) < 4.0 * ms.se);  // E y_T^2 = y0^2 + d T

  Sim1dOptions o;
  o.y0 = 5.0;
  o.horizon = 2.0;
  o.record_path = true;
  const Sim1dResult r = simulate_1d(DriftSpec::power(1.0, 2.0), o, {10.0, 100.0});
  CHECK(r.exploded);
  CHECK(r.explosion_time < 0.5);
  CHECK(r.exit_times[0] <= r.exit_times[1]);
  CHECK(r.path.back() == o.y_max);
}

TEST_CASE("simulate_1d stays positive and is reproducible") {
  Sim1dOptions o;
  o.y0 = 0.05;
  o.horizon = 1.0;
  o.record_path = true;
  o.stream = 3;
  const Sim1dResult a = simulate_1d(DriftSpec::zero(), o);
  for (double y : a.path) CHECK(y > 0.0);
  const Sim1dResult b = simulate_1d(DriftSpec::zero(), o);
  CHECK(a.path == b.path);
}

TEST_CASE("explosion table: Wilson bounds and verdicts") {
  std::vector<std::vector<double>> none(1000, {kInfinity, kInfinity});
  ExplosionTable t = explosion_probability(none, {5.0, 10.0}, {5.0, 10.0}, 1.0);
  CHECK(t.verdict == ExplosionCall::NonExplosion);
  CHECK(t.ci.back().upper < 0.004);

  std::vector<std::vector<double>> all(1000, {0.1, 0.2});
  t = explosion_probability(all, {5.0, 10.0}, {5.0, 10.0}, 1.0);
  CHECK(t.verdict == ExplosionCall::ExplosionDetected);
  // exits after the horizon do not count
  t = explosion_probability(all, {5.0, 10.0}, {10.0}, 0.15);
  CHECK(t.exits[0] == 0);

  std::vector<std::vector<double>> few(100, {kInfinity, kInfinity});
  t = explosion_probability(few, {5.0, 10.0}, {5.0, 10.0}, 1.0);
  CHECK(t.verdict == ExplosionCall::Inconclusive);

  CHECK_THROWS_AS(explosion_probability(none, {5.0, 10.0}, {20.0}, 1.0), ConfigError);
}

TEST_CASE("explosion table is monotone in R and T") {
  const std::vector<double> ladder = {2.0, 4.0, 8.0};
  const auto exits = map_paths<std::vector<double>>(500, [&](std::size_t i) {
    Sim1dOptions o;
    o.horizon = 2.0;
    o.stream = i;
    return simulate_1d(DriftSpec::power(0.5, 2.0), o, ladder).exit_times;
  });
  double prev_top = -1.0;
  for (double T : {0.5, 1.0, 2.0}) {
    const ExplosionTable t = explosion_probability(exits, ladder, ladder, T);
    for (std::size_t k = 1; k < t.p_hat.size(); ++k) CHECK(t.p_hat[k] <= t.p_hat[k - 1]);
    CHECK(t.p_hat.back() >= prev_top);
    prev_top = t.p_hat.back();
  }
}

TEST_CASE("the comparison diffusion dominates the radial process") {
  const auto m = EvolvingMetricModel::homothetic(
      EvolvingMetricModel::warped(2, 1.0, Warp::sinh(1.0)), ScaleCurve::linear(4.0, -1.0));
  const ComparisonProfile p = constants(m, 3.0);
  const DriftSpec comparison = comparison_drift_polynomial(p, {});
  const Vec x0 = m.state_point_at(0.5);
  const double rho0 = m.distance(0.0, x0);
  const Mat u0 = orthonormal_frame(m, 0.0, x0);
  const std::size_t n = 2000;
  const std::vector<std::size_t> idx = {250, 500, 1000};
  const auto manifold = map_paths<std::vector<double>>(n, [&](std::size_t i) {
    SimulationOptions o;
    o.stream = i;
    const PathRecord rec = simulate_path(m, x0, u0, o);
    std::vector<double> out;
    for (std::size_t k : idx) out.push_back(rec.rho[k]);
    return out;
  });
  const auto oned = map_paths<std::vector<double>>(n, [&](std::size_t i) {
    Sim1dOptions o;
    o.y0 = rho0;
    o.seed = 77;
    o.stream = i;
    o.record_path = true;
    const Sim1dResult r = simulate_1d(comparison, o);
    std::vector<double> out;
    for (std::size_t k : idx) out.push_back(r.path[k]);
    return out;
  });
  for (std::size_t j = 0; j < idx.size(); ++j) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < n; ++i) {
      x.push_back(manifold[i][j]);
      y.push_back(oned[i][j]);
    }
    CHECK(quantile_excess(x, y, {0.1, 0.25, 0.5, 0.75, 0.9}) <= 3.0);
  }
}

TEST_CASE("quantile excess of identical samples is small") {
  std::vector<double> a;
  RandomStream rng(1, 0);
  for (int i = 0; i < 1000; ++i) a.push_back(rng.normal());
  CHECK(std::abs(quantile_excess(a, a, {0.1, 0.5, 0.9})) < 0.2);  // only the 1/n grid offset
  std::vector<double> shifted = a;
  for (double& v : shifted) v += 1.0;
  CHECK(quantile_excess(shifted, a, {0.5}) > 3.0);
}
