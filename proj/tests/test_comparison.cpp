#include <cmath>
#include <numbers>
#include <sstream>

#include <doctest.h>

#include "rfbm/comparison.hpp"

using namespace rfbm;

TEST_CASE("constants of the sphere under backwards flow (d=2, r0=1, T=2)") {
  const auto m = EvolvingMetricModel::sphere(2, 2.0, 1.0);
  const ComparisonProfile p = constants(m, 0.0);
  const double pi = std::numbers::pi;
  CHECK(p.compact);
  CHECK(p.i_m == doctest::Approx(pi));          // sqrt(a_min) pi
  CHECK(p.k == doctest::Approx(1.0));           // curvature 1/a is largest at t=0
  CHECK(p.c1 == doctest::Approx(pi / 2.0));     // max |a'|/(2 sqrt a) = 1/2, times diameter pi
  CHECK(p.r1 == doctest::Approx(0.999 * pi));
  CHECK(p.k1 == doctest::Approx(1.0));          // Ricci is positive
  // d(A, Cut) bound: min_t sqrt(a_max) (i_M / (3 sqrt a_t)) / 2 = pi / 6
  CHECK(p.a_set_distance == doctest::Approx(pi / 6.0));
  CHECK(p.delta1 == doctest::Approx(std::min(pi / 6.0, pi / (3.0 * (pi / 2.0 + 1.0)))));
}

TEST_CASE("constants of homothetic hyperbolic space (a = 4 - t)") {
  const auto m = EvolvingMetricModel::homothetic(
      EvolvingMetricModel::warped(2, 1.0, Warp::sinh(1.0)), ScaleCurve::linear(4.0, -1.0));
  const ComparisonProfile p = constants(m, 3.0);
  CHECK_FALSE(p.compact);
  CHECK(p.i_m == kInfinity);
  CHECK(p.delta1 == kInfinity);
  CHECK(p.k == doctest::Approx(1.0 / std::sqrt(3.0)));  // |K| = 1/a_min
  CHECK(p.r1 == doctest::Approx(std::sqrt(3.0) * 3.0));
  CHECK(p.k1 == doctest::Approx(1.0));                  // -Ric/(d-1) = 1/a <= 1/3
  CHECK(p.c1 == doctest::Approx(1.0 / (2.0 * std::sqrt(3.0)) * 6.0));
  CHECK_THROWS_AS(constants(m, 0.0), ConfigError);
}

TEST_CASE("k1 picks up strong negative curvature") {
  const auto m = EvolvingMetricModel::warped(3, 1.0, Warp::sinh(2.0));
  const ComparisonProfile p = constants(m, 2.0);
  CHECK(p.k1 == doctest::Approx(2.0));
}

TEST_CASE("V and Fbar closed forms") {
  ComparisonProfile p;
  p.dim = 3;
  p.k = 0.0;
  p.c1 = 0.25;
  p.i_m = kInfinity;
  CHECK(v_of(0.5, p) == doctest::Approx(1.0 / 0.5 + 0.5));  // (d-1)/(2r) + 2 C1
  p.k = 2.0;
  p.i_m = 3.0;
  CHECK(v_of(0.3, p) == doctest::Approx(2.0 / std::tanh(0.6) + 0.5));
  CHECK(v_of(5.0, p) == doctest::Approx(v_of(1.0, p)));  // capped at i_M / 3

  p.k1 = 1.5;
  p.r1 = 2.0;
  CHECK(fbar(0.4, p) == doctest::Approx(1.5 / std::tanh(0.6) + 0.6));
  CHECK(fbar(7.0, p) == doctest::Approx(fbar(2.0, p)));
  CHECK(fbar(0.0, p) == kInfinity);
}

TEST_CASE("Jacobi solver reproduces constant-curvature fields") {
  for (int d : {2, 4}) {
    const JacobiSolution h = solve_jacobi([d](double) { return -(d - 1.0); }, 3.0, 1e-3, d);
    const JacobiSolution s = solve_jacobi([d](double) { return d - 1.0; }, 3.0, 1e-3, d);
    for (std::size_t k = 0; k < h.s.size(); k += 97) {
      CHECK(h.g[k] == doctest::Approx(std::sinh(h.s[k])).epsilon(1e-10));
      CHECK(s.g[k] == doctest::Approx(std::sin(s.s[k])).epsilon(1e-9));
    }
    CHECK_FALSE(s.conjugate);
    double g = 0.0, dg = 0.0;
    jacobi_eval(h, 1.2345, g, dg);
    CHECK(g == doctest::Approx(std::sinh(1.2345)).epsilon(1e-11));
    CHECK(dg == doctest::Approx(std::cosh(1.2345)).epsilon(1e-11));
  }
}

TEST_CASE("index F closed forms") {
  // hyperbolic: (d-1) coth s - (d-1) s; flat: (d-1)/s
  const JacobiSolution h = solve_jacobi([](double) { return -2.0; }, 3.0, 1e-3, 3);
  CHECK(index_f(h, 1.3) == doctest::Approx(2.0 / std::tanh(1.3) - 2.0 * 1.3).epsilon(1e-9));
  const JacobiSolution e = solve_jacobi([](double) { return 0.0; }, 3.0, 1e-3, 2);
  CHECK(index_f(e, 0.7) == doctest::Approx(1.0 / 0.7));
  const std::vector<double> grid = index_f_on_grid(h);
  CHECK(std::isnan(grid[0]));
  CHECK(grid[1300] == doctest::Approx(index_f(h, h.s[1300])).epsilon(1e-12));
}

TEST_CASE("conjugate points stop the index form") {
  const JacobiSolution s = solve_jacobi([](double) { return 1.0; }, 4.0, 1e-3, 2);
  REQUIRE(s.conjugate);
  CHECK(s.conjugate_at == doctest::Approx(std::numbers::pi).epsilon(1e-3));
  CHECK_THROWS_AS(index_f(s, 3.5), ConjugatePointError);
  const std::vector<double> grid = index_f_on_grid(s);
  CHECK(std::isnan(grid.back()));
}

TEST_CASE("radial Ricci profile is in g(t) arclength") {
  const auto m = EvolvingMetricModel::homothetic(
      EvolvingMetricModel::warped(2, 1.0, Warp::sinh(1.0)), ScaleCurve::constant(4.0));
  const auto ric = radial_ricci_profile(m, 0.0);
  CHECK(ric(1.0) == doctest::Approx(-0.25));
}

TEST_CASE("drift bound holds on the 2D sphere under backwards flow") {
  const auto m = EvolvingMetricModel::sphere(2, 2.0, 1.0);
  const ComparisonProfile p = constants(m, 0.0);
  const auto grid = drift_bound_grid(m, p, 16, 16);
  CHECK(grid.size() == 256);
  const DriftBoundResult r = drift_bound_check(m, p, grid);
  CHECK(r.margin >= 0.0);
  CHECK(r.samples == 256);
}

TEST_CASE("Fbar without a (d-1) factor is too small for d=3 near the pole") {
  // (d-1)/s exceeds coth(s) + s for small s once d >= 3
  const auto m = EvolvingMetricModel::euclidean(3, 1.0);
  const ComparisonProfile p = constants(m, 2.0);
  CHECK(drift_bound_check(m, p, drift_bound_grid(m, p, 4, 64)).margin < 0.0);
}

TEST_CASE("profile block") {
  const auto m = EvolvingMetricModel::sphere(2, 1.0, 1.0);
  std::ostringstream os;
  write_profile(os, constants(m, 0.0));
  CHECK(os.str().find("profile.delta1 = ") != std::string::npos);
  CHECK(os.str().find("profile.compact = true") != std::string::npos);
}
