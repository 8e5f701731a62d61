#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

#include "rfbm/drift_extension.hpp"
#include "rfbm/frame_sde.hpp"
#include "rfbm/manifold_models.hpp"

namespace rfbm {

/// Grid-step indices [start, end) of one excursion started near the cut locus.
struct Excursion {
  std::size_t start = 0;
  std::size_t end = 0;
  double deficit = 0.0;  // sum over the excursion of (drift h + martingale - d rho)
};

/// Radial semimartingale split of one path. Series are sampled at every
/// `stride`-th grid point; cumulative quantities include all steps.
struct RadialDecomposition {
  double delta = 0.0;
  double eps_hit = 0.0;
  std::size_t stride = 1;
  std::vector<double> times;
  std::vector<double> rho;
  std::vector<double> drift;           // 1/2 Delta rho + d rho/dt (+ Z rho)
  std::vector<double> drift_integral;  // cumulative sum of drift h
  std::vector<double> martingale;      // cumulative martingale part
  std::vector<double> qv;              // cumulative sum of squared martingale increments
  std::vector<double> local_time;      // drift-deficit estimate, non-decreasing
  std::vector<double> increments;      // per-step martingale increments (keep_increments)
  std::vector<Excursion> excursions;
  double deficit_residual = 0.0;       // rho_T - rho_0 - int drift - M_T + L_T
  // L^delta_T = sum over excursion steps of (-d rho + martingale + V h), and the
  // error of the identity it closes: int over the excursions of (V - drift)
  double excursion_local_time = 0.0;
  double residual = 0.0;
  double excursion_time = 0.0;         // sum of |T_n - S_n|
  double downcrossing_local_time = 0.0;
  std::size_t pole_steps = 0;          // steps started within pole_epsilon of o
};

struct DecomposeOptions {
  double delta = 0.1;
  double eps_hit = 0.0;     // 0: default_eps_hit(h, d)
  double delta1 = kInfinity;
  std::size_t stride = 1;
  bool keep_increments = false;
  const VectorFieldSpec* drift = nullptr;
  std::function<double(double)> v;  // dominating drift V(rho); zero when empty
};

/// One-step reachability radius 2 sqrt(h d).
double default_eps_hit(double h, int dim);

RadialDecomposition decompose(const PathRecord& path, const EvolvingMetricModel& model,
                              const DecomposeOptions& opts);

struct SeriesBand {
  std::vector<double> times;
  std::vector<double> mean;
  std::vector<double> se;
};

/// Mean of a per-path series over the ensemble, with standard errors.
SeriesBand ensemble_band(const std::vector<std::vector<double>>& per_path,
                         const std::vector<double>& times);

struct QvResult {
  SeriesBand curve;   // mean realised quadratic variation
  double slope = 0.0; // least squares through the origin
};

QvResult qv_martingale(const std::vector<RadialDecomposition>& ensemble);

/// Time spent with cutlocus_distance <= eps for each eps of the ladder (left Riemann sum).
std::vector<double> occupation_sample(const PathRecord& path, const EvolvingMetricModel& model,
                                      const std::vector<double>& eps_ladder);

struct OccupationResult {
  std::vector<double> eps;
  std::vector<double> mean;
  std::vector<double> se;
};

OccupationResult occupation_time_cutlocus(const std::vector<std::vector<double>>& samples,
                                          const std::vector<double>& eps_ladder);

/// rho_k - rho_0 - int_0^{t_k} V(rho) ds at every `stride`-th grid point.
std::vector<double> supermartingale_sample(const PathRecord& path,
                                           const std::function<double(double)>& v,
                                           std::size_t stride);

struct SupermartingaleResult {
  SeriesBand m;
  std::vector<std::size_t> checkpoints;  // indices into m used for successive differences
  std::vector<double> differences;
  std::vector<double> difference_se;
  double worst_z = -kInfinity;           // max of difference / se
  bool holds = false;                    // every difference <= 3 se
};

/// Successive differences of m are tested at `n_checkpoints` evenly spaced times.
SupermartingaleResult supermartingale_check(const std::vector<std::vector<double>>& samples,
                                            const std::vector<double>& times,
                                            std::size_t n_checkpoints = 10);

/// t, mean rho, mean drift, realised QV, mean L (and their standard errors).
void write_radial_csv(std::ostream& os, const std::vector<RadialDecomposition>& ensemble);

}  // namespace rfbm
