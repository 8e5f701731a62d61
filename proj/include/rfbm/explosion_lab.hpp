#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "rfbm/comparison.hpp"
#include "rfbm/stats.hpp"
#include "rfbm/warp.hpp"

namespace rfbm {

/// Drift bold-b(y) of a one-dimensional diffusion dy = d beta + bold-b(y) dt on (0, inf).
class DriftSpec {
 public:
  enum class Provenance { Explicit, Comparison, RadialModel };

  DriftSpec(std::string name, Provenance provenance, std::function<double(double)> b);

  static DriftSpec zero();
  /// (d-1) / (2 y)
  static DriftSpec bessel(int dim);
  /// (d-1) f'(y) / (2 f(y)) of a warped model
  static DriftSpec radial_model(const Warp& warp, int dim);
  /// c y^p
  static DriftSpec power(double c, double p);
  /// radial_model(...) + c, the radial drift of Z = c grad rho
  static DriftSpec shifted(const DriftSpec& base, double c);

  double operator()(double y) const { return b_(y); }
  /// int_lo^hi bold-b, by Gauss-Kronrod on [lo, hi]
  double integral(double lo, double hi) const;
  const std::string& name() const { return name_; }
  Provenance provenance() const { return provenance_; }

 private:
  std::string name_;
  Provenance provenance_;
  std::function<double(double)> b_;
};

/// bold-b(y) = Fbar(y) + int_0^y b(s) ds. `b` is integrated once on a cached
/// grid (uniform on [0, 1], geometric beyond); evaluation adds the partial cell.
DriftSpec comparison_drift(const ComparisonProfile& p, const std::function<double(double)>& b);
/// Exact branch for polynomial b(s) = sum_i coeffs[i] s^i.
DriftSpec comparison_drift_polynomial(const ComparisonProfile& p, std::vector<double> coeffs);

enum class Classification { Explodes, DoesNotExplode, Inconclusive };
std::string to_string(Classification c);

struct ExplosionVerdict {
  Classification classification = Classification::Inconclusive;
  double feller_value = 0.0;   // int_1^{Y_max} phi(y) dy
  double cutoff = 0.0;         // Y_max
  double tail_exponent = 0.0;  // largest local -d log phi / d log y on [Y_max/16, Y_max]
  double tail_exponent_min = 0.0;
  double growth_lower_bound = 0.0;  // c with phi(y) >= c / y on the tail (divergence)
  double tail_majorant = 0.0;       // bound on int_{Y_max}^inf phi (convergence)
};

struct FellerOptions {
  double y_ref = 1.0;
  double y_max = 1e6;
  double tol = 1e-8;
  double diverge_exponent = 1.02;   // p <= this: c/y lower bound, does not explode
  double converge_exponent = 1.25;  // p >= this: integrable majorant, explodes
};

/// phi(y) = exp(-2 int_1^y b) int_1^y exp(2 int_1^z b) dz = int_1^y exp(-2 int_z^y b) dz,
/// accumulated locally in log space (no global primitive of b is formed).
double feller_phi(const DriftSpec& drift, double y, double y_ref = 1.0);
double feller_log_phi(const DriftSpec& drift, double y, double y_ref = 1.0);

ExplosionVerdict feller_test(const DriftSpec& drift, const FellerOptions& opts = {});

struct Sim1dOptions {
  double y0 = 1.0;
  double horizon = 1.0;
  double h = 1e-3;
  double y_max = 1e6;
  std::uint64_t seed = 42;
  std::uint64_t stream = 0;
  bool record_path = false;
  int refine_steps = 16;  // steps re-run at h/4 to confirm an explosion
};

struct Sim1dResult {
  bool exploded = false;
  double explosion_time = kInfinity;
  double y_final = 0.0;                // last value (at T when not exploded)
  std::vector<double> path;            // grid values when requested
  std::vector<double> exit_times;      // first passage of each requested level
  std::size_t unconfirmed_crossings = 0;
};

Sim1dResult simulate_1d(const DriftSpec& drift, const Sim1dOptions& opts,
                        const std::vector<double>& levels = {});

enum class ExplosionCall { NonExplosion, ExplosionDetected, Inconclusive };
std::string to_string(ExplosionCall c);

struct ExplosionTable {
  std::vector<double> radii;
  std::vector<std::size_t> exits;
  std::size_t paths = 0;
  std::vector<double> p_hat;
  std::vector<Interval> ci;
  ExplosionCall verdict = ExplosionCall::Inconclusive;
};

struct ExplosionCriteria {
  double confidence = 0.95;
  double threshold = 1e-2;  // upper bound at the largest radius for non-explosion
  double detect = 0.5;      // lower bound at the largest radius for explosion
};

/// P(tau_R <= T) per ladder radius from per-path exit times aligned with
/// `configured` radii. Throws if a ladder radius was not configured.
ExplosionTable explosion_probability(const std::vector<std::vector<double>>& exit_times,
                                     const std::vector<double>& configured,
                                     const std::vector<double>& ladder, double horizon,
                                     const ExplosionCriteria& crit = {});

/// Largest standardised excess of the quantiles of `x` over those of `y`
/// (order-statistic bands); <= 3 means x is dominated within 3 s.e.
double quantile_excess(std::vector<double> x, std::vector<double> y,
                       const std::vector<double>& probs);

}  // namespace rfbm
