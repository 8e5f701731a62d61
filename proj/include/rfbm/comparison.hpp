#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "rfbm/manifold_models.hpp"

namespace rfbm {

/// Barrier constants of a model over [0, T] and, for noncompact models, a
/// window of base radius R_w around o.
struct ComparisonProfile {
  int dim = 2;
  double i_m = kInfinity;  // injectivity-radius lower bound
  double k = 0.0;          // sqrt of the largest |sectional curvature|
  double c1 = 0.0;         // time-Lipschitz constant of the distance
  double r1 = kInfinity;   // below min_t d(o, Cut)
  double k1 = 1.0;         // Ricci lower-bound constant, >= 1
  double delta1 = kInfinity;
  double a_set_distance = kInfinity;  // grid lower bound for d(A, Cut_ST)
  double window = kInfinity;          // base radius of the window
  bool compact = false;
  int grid_t = 64;
  int grid_r = 64;
};

ComparisonProfile constants(const EvolvingMetricModel& model, double window, int n_t = 64,
                            int n_r = 64);

/// V(r) = ((d-1)/2) K coth(K (r ^ i_M/3)) + 2 C_1, with the K -> 0 limit.
double v_of(double r, const ComparisonProfile& p);
std::function<double(double)> v_function(const ComparisonProfile& p);

/// Fbar(s) = k_1 coth(k_1 (s ^ r_1)) + k_1 (s ^ r_1).
double fbar(double s, const ComparisonProfile& p);

struct JacobiSolution {
  int dim = 2;
  double step = 1e-3;
  std::vector<double> s;
  std::vector<double> g;
  std::vector<double> dg;
  std::vector<double> ric;                // Ric(gamma', gamma') at s
  std::function<double(double)> profile;  // the Ricci profile itself
  bool conjugate = false;
  double conjugate_at = kInfinity;        // first grid point with G <= 0
};

/// RK4 for G'' = -Ric G / (d-1), G(0) = 0, G'(0) = 1 on [0, b].
JacobiSolution solve_jacobi(const std::function<double(double)>& ric, double b, double step,
                            int dim);

/// G and G' at any r in [0, b] (partial RK4 step from the grid point below).
void jacobi_eval(const JacobiSolution& j, double r, double& g, double& dg);

/// F(r) = (d-1) [G'/G - int_0^r G''/G] = (d-1) G'/G + int_0^r Ric.
double index_f(const JacobiSolution& j, double r);

/// F at every grid node of the solution (NaN at s = 0 and from the first
/// conjugate point on), with one Gauss rule per cell for the Ricci integral.
std::vector<double> index_f_on_grid(const JacobiSolution& j);

/// Ricci of g(t) along the radial geodesic from o, as a function of g(t)-arclength.
std::function<double(double)> radial_ricci_profile(const EvolvingMetricModel& model, double t);

struct DriftBoundSample {
  double t = 0.0;
  Vec x;
};

/// (t, rho) grid off the pole and off the cut locus, inside the window.
std::vector<DriftBoundSample> drift_bound_grid(const EvolvingMetricModel& model,
                                               const ComparisonProfile& p, int n_t = 64,
                                               int n_rho = 64);

struct DriftBoundResult {
  double margin = kInfinity;  // min of Fbar(rho) - (Delta rho + 2 d rho/dt)
  DriftBoundSample worst;
  std::size_t samples = 0;
};

DriftBoundResult drift_bound_check(const EvolvingMetricModel& model, const ComparisonProfile& p,
                                   const std::vector<DriftBoundSample>& samples);

/// Key-value block for run reports.
void write_profile(std::ostream& os, const ComparisonProfile& p);

}  // namespace rfbm
