#include <cmath>
#include <numbers>
#include <sstream>

#include <doctest.h>

#include "rfbm/frame_sde.hpp"

using namespace rfbm;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec x(static_cast<int>(v.size()));
  int i = 0;
  for (double a : v) x[i++] = a;
  return x;
}

double max_defect(const EvolvingMetricModel& m, const PathRecord& rec) {
  double worst = 0.0;
  for (const FrameState& s : rec.states) worst = std::max(worst, orthonormality_defect(m, s));
  return worst;
}

void check_generator(const EvolvingMetricModel& m, const TestFunction& f, const Vec& x0,
                     Scheme scheme, const VectorFieldSpec* drift = nullptr) {
  SimulationOptions o;
  o.horizon = m.horizon();
  o.h = 2e-3;
  o.seed = 11;
  o.step.scheme = scheme;
  o.step.drift = drift;
  const GeneratorCheck g = generator_check(m, f, x0, o, 2000);
  INFO("discrepancy " << g.discrepancy << " se " << g.se);
  CHECK(std::abs(g.discrepancy) <= 4.0 * g.se + 1e-3);
}

}  // namespace

TEST_CASE("Euclidean paths are the sum of their increments") {
  const auto m = EvolvingMetricModel::euclidean(3, 1.0);
  const Vec x0 = vec({1.0, 0.0, 0.0});
  SimulationOptions o;
  o.h = 0.01;
  const auto inc = brownian_increments(3, 100, o.h, 5, 0);
  const PathRecord rec = simulate_path_with_increments(m, x0, Mat::Identity(3, 3), o, inc);
  Vec sum = x0;
  for (const Vec& dw : inc) sum += dw;
  CHECK((rec.states.back().x - sum).norm() < 1e-12);
  CHECK((rec.states.back().frame - Mat::Identity(3, 3)).norm() < 1e-14);
  CHECK(rec.size() == 101);
  CHECK(rec.times.back() == doctest::Approx(1.0));
}

TEST_CASE("simulate_path draws the documented increments") {
  const auto m = EvolvingMetricModel::warped(2, 0.5, Warp::sinh(1.0));
  SimulationOptions o;
  o.horizon = 0.5;
  o.h = 0.01;
  o.seed = 3;
  o.stream = 7;
  const Vec x0 = vec({0.4, 0.3});
  const Mat u0 = orthonormal_frame(m, 0.0, x0);
  const PathRecord a = simulate_path(m, x0, u0, o);
  const PathRecord b =
      simulate_path_with_increments(m, x0, u0, o, brownian_increments(2, 50, 0.01, 3, 7));
  CHECK((a.states.back().x - b.states.back().x).norm() == 0.0);
}

TEST_CASE("paths are reproducible and streams are independent") {
  const auto m = EvolvingMetricModel::sphere(2, 1.0, 1.0);
  const Vec x0 = m.state_point_at(1.0);
  const Mat u0 = orthonormal_frame(m, 0.0, x0);
  SimulationOptions o;
  o.seed = 99;
  o.stream = 4;
  const PathRecord a = simulate_path(m, x0, u0, o);
  const PathRecord b = simulate_path(m, x0, u0, o);
  CHECK(a.rho == b.rho);
  o.stream = 5;
  const PathRecord c = simulate_path(m, x0, u0, o);
  CHECK(a.rho.back() != c.rho.back());
}

TEST_CASE("projected frames stay orthonormal on every model") {
  const std::vector<EvolvingMetricModel> models = {
      EvolvingMetricModel::sphere(3, 1.0, 1.0),
      EvolvingMetricModel::warped(3, 1.0, Warp::sinh(1.0)),
      EvolvingMetricModel::warped(2, 1.0, Warp::gauss_exp(0.1)),
      EvolvingMetricModel::homothetic(EvolvingMetricModel::warped(2, 1.0, Warp::sinh(1.0)),
                                      ScaleCurve::linear(4.0, -1.0)),
  };
  for (const auto& m : models) {
    const Vec x0 = m.state_point_at(0.8);
    const Mat u0 = orthonormal_frame(m, 0.0, x0);
    for (Scheme s : {Scheme::EulerHeun, Scheme::ItoEuler}) {
      SimulationOptions o;
      o.step.scheme = s;
      o.stream = 1;
      const PathRecord rec = simulate_path(m, x0, u0, o);
      CHECK_FALSE(rec.invalid);
      CHECK(max_defect(m, rec) <= 1e-9);
    }
  }
}

TEST_CASE("ambient sphere points stay on the unit sphere") {
  const auto m = EvolvingMetricModel::sphere(2, 1.0, 1.0);
  const Vec x0 = m.state_point_at(2.0);
  SimulationOptions o;
  o.stream = 2;
  const PathRecord rec = simulate_path(m, x0, orthonormal_frame(m, 0.0, x0), o);
  for (const FrameState& s : rec.states) CHECK(std::abs(s.x.norm() - 1.0) < 1e-12);
}

TEST_CASE("unprojected frame defect shrinks with the step") {
  const auto m = EvolvingMetricModel::sphere(2, 1.0, 1.0);
  const Vec x0 = m.state_point_at(1.0);
  const Mat u0 = orthonormal_frame(m, 0.0, x0);
  double coarse = 0.0, fine = 0.0;
  for (std::uint64_t i = 0; i < 40; ++i) {
    const auto inc = brownian_increments(2, 1000, 1e-3, 8, i);
    std::vector<Vec> paired;
    for (std::size_t k = 0; k + 1 < inc.size(); k += 2) paired.push_back(inc[k] + inc[k + 1]);
    SimulationOptions o;
    o.step.project = false;
    o.stream = i;
    fine += max_defect(m, simulate_path_with_increments(m, x0, u0, o, inc));
    o.h = 2e-3;
    coarse += max_defect(m, simulate_path_with_increments(m, x0, u0, o, paired));
  }
  CHECK(fine < 0.7 * coarse);
  CHECK(fine > 0.0);
}

TEST_CASE("generator check: E f(X_T) matches the generator") {
  SUBCASE("Euclidean |x|^2") {
    const auto m = EvolvingMetricModel::euclidean(3, 0.5);
    TestFunction f;
    f.value = [](double, const Vec& x) { return x.squaredNorm(); };
    f.laplacian = [](double, const Vec&) { return 6.0; };
    f.differential = [](double, const Vec& x) { return Vec(2.0 * x); };
    check_generator(m, f, vec({1.0, 0.0, 0.0}), Scheme::EulerHeun);
    // Z(x) = x adds 2 |x|^2
    const VectorFieldSpec z = VectorFieldSpec::linear(Mat::Identity(3, 3));
    check_generator(m, f, vec({1.0, 0.0, 0.0}), Scheme::EulerHeun, &z);
  }
  SUBCASE("hyperbolic cosh(rho)") {
    const auto m = EvolvingMetricModel::warped(3, 0.5, Warp::sinh(1.0));
    TestFunction f;
    f.value = [](double, const Vec& x) { return std::cosh(x.norm()); };
    f.laplacian = [](double, const Vec& x) { return 3.0 * std::cosh(x.norm()); };
    f.differential = [](double, const Vec& x) {
      const double r = x.norm();
      return Vec(std::sinh(r) / r * x);
    };
    check_generator(m, f, vec({0.5, 0.5, 0.0}), Scheme::EulerHeun);
    check_generator(m, f, vec({0.5, 0.5, 0.0}), Scheme::ItoEuler);
  }
  SUBCASE("evolving sphere height function") {
    const auto m = EvolvingMetricModel::sphere(2, 1.0, 1.0);
    TestFunction f;
    f.value = [](double, const Vec& p) { return p[0]; };
    // Delta cos(theta) = -d cos(theta) / a on the sphere of radius sqrt(a)
    f.laplacian = [&m](double t, const Vec& p) { return -2.0 * p[0] / m.scale().a(t); };
    f.differential = [](double, const Vec& p) { return Vec(Vec::Unit(p.size(), 0)); };
    check_generator(m, f, m.state_point_at(0.7), Scheme::EulerHeun);
    check_generator(m, f, m.state_point_at(0.7), Scheme::ItoEuler);
  }
}

TEST_CASE("ball exits and explosion sentinel") {
  const auto m = EvolvingMetricModel::warped(2, 20.0, Warp::sinh(1.0));
  const Vec x0 = m.state_point_at(1.0);
  SimulationOptions o;
  o.horizon = 20.0;
  o.h = 1e-2;
  o.exit_radii = {2.0, 3.0, 50.0};
  o.step.blowup_radius = 4.0;
  const PathRecord rec = simulate_path(m, x0, orthonormal_frame(m, 0.0, x0), o);
  REQUIRE(rec.exploded);
  CHECK(rec.exit_times[0] <= rec.exit_times[1]);
  CHECK(rec.exit_times[1] <= rec.explosion_time);
  // the unreached radius is marked at the explosion time
  CHECK(rec.exit_times[2] == doctest::Approx(rec.explosion_time));
  CHECK(rec.rho.back() < 4.0 + 1.0);
}

TEST_CASE("path CSV layout") {
  const auto m = EvolvingMetricModel::sphere(2, 0.01, 1.0);
  const Vec x0 = m.state_point_at(1.0);
  SimulationOptions o;
  o.horizon = 0.01;
  const PathRecord rec = simulate_path(m, x0, orthonormal_frame(m, 0.0, x0), o);
  std::ostringstream os;
  write_path_csv(os, m, rec);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  CHECK(header == "t,x0,x1,x2,rho,defect");
  std::size_t lines = 0;
  for (std::string line; std::getline(is, line);) ++lines;
  CHECK(lines == rec.size());
}

TEST_CASE("metric Gram-Schmidt repairs a skewed frame") {
  const auto m = EvolvingMetricModel::warped(3, 1.0, Warp::sinh(1.0));
  const Vec x = vec({0.3, 0.4, 0.5});
  Mat u = orthonormal_frame(m, 0.0, x);
  u(0, 1) += 0.1;
  u(2, 2) *= 1.3;
  FrameState s{0.0, x, u};
  CHECK(orthonormality_defect(m, s) > 1e-3);
  metric_gram_schmidt(m, 0.0, x, s.frame);
  CHECK(orthonormality_defect(m, s) < 1e-13);
}
