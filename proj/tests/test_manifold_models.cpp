#include <cmath>
#include <numbers>

#include <doctest.h>

#include "rfbm/manifold_models.hpp"

using namespace rfbm;

namespace {

// Christoffels and Ricci rebuilt from the metric alone by central differences.
struct FdGeometry {
  const EvolvingMetricModel& m;
  double t;
  double e = 1e-4;

  Mat g(const Vec& x) const { return metric_jet(m, t, x).g; }

  // Gamma[k](i, j)
  std::vector<Mat> christoffel(const Vec& x) const {
    const int d = static_cast<int>(x.size());
    std::vector<Mat> dg(d);
    for (int l = 0; l < d; ++l) {
      Vec xp = x, xm = x;
      xp[l] += e;
      xm[l] -= e;
      dg[l] = (g(xp) - g(xm)) / (2 * e);
    }
    const Mat gi = g(x).inverse();
    std::vector<Mat> out(d, Mat::Zero(d, d));
    for (int k = 0; k < d; ++k)
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          double s = 0.0;
          for (int l = 0; l < d; ++l)
            s += gi(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
          out[k](i, j) = 0.5 * s;
        }
    return out;
  }

  Mat ricci(const Vec& x) const {
    const int d = static_cast<int>(x.size());
    const auto G = christoffel(x);
    std::vector<std::vector<Mat>> dG(d);  // dG[l][k](i, j) = d_l Gamma^k_ij
    for (int l = 0; l < d; ++l) {
      Vec xp = x, xm = x;
      xp[l] += e;
      xm[l] -= e;
      const auto p = christoffel(xp), q = christoffel(xm);
      for (int k = 0; k < d; ++k) dG[l].push_back((p[k] - q[k]) / (2 * e));
    }
    Mat ric = Mat::Zero(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double s = 0.0;
        for (int k = 0; k < d; ++k) {
          s += dG[k][k](i, j) - dG[j][k](i, k);
          for (int l = 0; l < d; ++l) s += G[k](k, l) * G[l](i, j) - G[k](j, l) * G[l](i, k);
        }
        ric(i, j) = s;
      }
    return ric;
  }
};

Vec vec(std::initializer_list<double> v) {
  Vec x(static_cast<int>(v.size()));
  int i = 0;
  for (double a : v) x[i++] = a;
  return x;
}

}  // namespace

TEST_CASE("Euclidean jet is flat") {
  const auto m = EvolvingMetricModel::euclidean(3, 1.0);
  const MetricJet j = metric_jet(m, 0.5, vec({0.3, -0.2, 0.9}));
  CHECK((j.g - Mat::Identity(3, 3)).norm() < 1e-14);
  CHECK(j.ricci.norm() < 1e-14);
  CHECK(j.dg_dt.norm() == 0.0);
  for (const auto& c : j.christoffel) CHECK(c.norm() < 1e-14);
}

TEST_CASE("Christoffels and Ricci match finite differences of the metric") {
  const std::vector<EvolvingMetricModel> models = {
      EvolvingMetricModel::warped(3, 1.0, Warp::sinh(1.0)),
      EvolvingMetricModel::warped(2, 1.0, Warp::gauss_exp(0.2)),
      EvolvingMetricModel::warped(3, 1.0, Warp::polynomial({1.0, 0.0, 0.05})),
      EvolvingMetricModel::warped(4, 1.0, Warp::sin(1.0)),
      EvolvingMetricModel::homothetic(EvolvingMetricModel::warped(3, 1.0, Warp::sinh(1.0)),
                                      ScaleCurve::linear(4.0, -2.0)),
  };
  for (const auto& m : models) {
    const int d = m.dim();
    Vec x(d);
    for (int i = 0; i < d; ++i) x[i] = 0.35 + 0.2 * i * (i % 2 ? -1 : 1);
    const double t = 0.4;
    const MetricJet j = metric_jet(m, t, x);
    FdGeometry fd{m, t};
    const auto G = fd.christoffel(x);
    for (int k = 0; k < d; ++k) CHECK((j.christoffel[k] - G[k]).norm() < 1e-7);
    CHECK((j.ricci - fd.ricci(x)).norm() < 2e-5);
    // dg/dt by differences in t
    const double e = 1e-6;
    const Mat dgt = (metric_jet(m, t + e, x).g - metric_jet(m, t - e, x).g) / (2 * e);
    CHECK((j.dg_dt - dgt).norm() < 1e-7);
  }
}

TEST_CASE("hyperbolic sectional curvature is -1, scaled by 1/a") {
  const auto m = EvolvingMetricModel::homothetic(
      EvolvingMetricModel::warped(3, 1.0, Warp::sinh(1.0)), ScaleCurve::constant(2.0));
  for (double r : {0.0, 0.5, 3.0}) {
    const RadialCurvature c = radial_curvature(m, 0.0, r);
    CHECK(c.radial_sectional == doctest::Approx(-0.5));
    CHECK(c.tangential_sectional == doctest::Approx(-0.5));
    CHECK(c.ricci_radial == doctest::Approx(-1.0));
  }
}

TEST_CASE("pole limits of the curvature") {
  const auto gx = EvolvingMetricModel::warped(2, 1.0, Warp::gauss_exp(0.3));
  CHECK(radial_curvature(gx, 0.0, 0.0).radial_sectional == doctest::Approx(-1.8));
  CHECK(radial_curvature(gx, 0.0, 1e-5).radial_sectional ==
        doctest::Approx(-1.8).epsilon(1e-6));
  const auto s = EvolvingMetricModel::sphere(3, 1.0, 2.0);
  CHECK(radial_curvature(s, 0.0, 0.0).radial_sectional == doctest::Approx(0.25));
}

TEST_CASE("sphere under backwards Ricci flow is an exact solution") {
  const auto s = EvolvingMetricModel::sphere(3, 2.0, 1.0);
  for (double t : {0.0, 1.0, 2.0}) {
    const SuperRicciCheck c = check_super_ricci(s, t, vec({0.4, 0.3, -0.2}));
    CHECK(c.holds);
    CHECK(std::abs(c.margin) < 1e-10);
  }
  // a static round sphere is strictly super-Ricci
  const auto st = EvolvingMetricModel::warped(2, 1.0, Warp::sin(1.0));
  CHECK(check_super_ricci(st, 0.0, vec({0.5, 0.1})).margin == doctest::Approx(1.0));
  // expanding hyperbolic space is not
  const auto hyp = EvolvingMetricModel::homothetic(
      EvolvingMetricModel::warped(2, 1.0, Warp::sinh(1.0)), ScaleCurve::linear(1.0, 1.0));
  CHECK_FALSE(check_super_ricci(hyp, 0.0, vec({0.5, 0.1})).holds);
}

TEST_CASE("distance jets: unit gradient and closed-form Laplacians") {
  const auto hyp = EvolvingMetricModel::warped(3, 1.0, Warp::sinh(1.0));
  const Vec x = vec({0.6, -0.8, 0.5});
  const DistanceJet j = distance_jet(hyp, 0.0, x);
  const double r = x.norm();
  CHECK(j.rho == doctest::Approx(r));
  CHECK(j.laplacian == doctest::Approx(2.0 / std::tanh(r)));
  CHECK(std::sqrt(j.grad.dot(metric_jet(hyp, 0.0, x).g * j.grad)) == doctest::Approx(1.0));

  const auto s = EvolvingMetricModel::sphere(2, 1.0, 1.0);
  const double theta = 1.1, t = 0.5, a = 1.5;
  const Vec p = s.state_point_at(theta);
  const DistanceJet js = distance_jet(s, t, p);
  CHECK(js.rho == doctest::Approx(std::sqrt(a) * theta));
  CHECK(js.laplacian == doctest::Approx(1.0 / std::tan(theta) / std::sqrt(a)));
  CHECK(js.drho_dt == doctest::Approx(0.5 / std::sqrt(a) * theta));
  CHECK(a * js.grad.squaredNorm() == doctest::Approx(1.0));
  CHECK(cutlocus_distance(s, t, p) == doctest::Approx(std::sqrt(a) * (std::numbers::pi - theta)));
}

TEST_CASE("distance jet refuses the pole and the cut locus") {
  const auto hyp = EvolvingMetricModel::warped(2, 1.0, Warp::sinh(1.0));
  CHECK_THROWS_AS(distance_jet(hyp, 0.0, Vec::Zero(2)), ChartSingularityError);
  CHECK_THROWS_AS(metric_jet(hyp, 0.0, Vec::Zero(2)), ChartSingularityError);
  const auto s = EvolvingMetricModel::sphere(2, 1.0, 1.0);
  Vec antipode = Vec::Zero(3);
  antipode[0] = -1.0;
  CHECK_THROWS_AS(distance_jet(s, 0.0, antipode), CutLocusError);
  CHECK(cutlocus_distance(hyp, 0.0, vec({1.0, 0.0})) == kInfinity);
}

TEST_CASE("two-point distances") {
  const auto hyp = EvolvingMetricModel::warped(2, 1.0, Warp::sinh(1.0));
  // same ray
  CHECK(hyp.distance_between(0.0, vec({0.5, 0.0}), vec({2.0, 0.0})) == doctest::Approx(1.5));
  // hyperbolic law of cosines
  const Vec x = vec({1.0, 0.0}), y = vec({0.0, 2.0});
  const double c = std::cosh(1.0) * std::cosh(2.0);
  CHECK(hyp.distance_between(0.0, x, y) == doctest::Approx(std::acosh(c)));
  CHECK(hyp.distance_between(0.0, x, y) == doctest::Approx(hyp.distance_between(0.0, y, x)));

  const auto s = EvolvingMetricModel::sphere(2, 1.0, 2.0);
  const Vec p = s.state_point_at(0.3), q = s.state_point_at(1.0);
  CHECK(s.distance_between(0.0, p, q) == doctest::Approx(2.0 * 0.7));
}

TEST_CASE("factories validate their inputs") {
  CHECK_THROWS_AS(EvolvingMetricModel::euclidean(1, 1.0), ConfigError);
  CHECK_THROWS_AS(EvolvingMetricModel::euclidean(5, 1.0), ConfigError);
  CHECK_THROWS_AS(EvolvingMetricModel::sphere(2, 1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(EvolvingMetricModel::homothetic(EvolvingMetricModel::euclidean(2, 2.0),
                                                  ScaleCurve::linear(1.0, -1.0)),
                  ConfigError);
  CHECK_THROWS_AS(EvolvingMetricModel::homothetic(EvolvingMetricModel::sphere(2, 1.0, 1.0),
                                                  ScaleCurve::constant(1.0)),
                  ConfigError);
}

TEST_CASE("pencil eigenvalue is the minimum of m(v, v) over g-unit vectors") {
  Mat g(2, 2), m(2, 2);
  g << 2.0, 0.0, 0.0, 0.5;
  m << 1.0, 0.0, 0.0, 1.0;
  CHECK(pencil_min_eigenvalue(m, g) == doctest::Approx(0.5));
}
