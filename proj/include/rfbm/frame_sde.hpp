#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "rfbm/drift_extension.hpp"
#include "rfbm/manifold_models.hpp"
#include "rfbm/rng.hpp"
#include "rfbm/stats.hpp"
#include "rfbm/types.hpp"

namespace rfbm {

/// Space-time point plus a candidate g(t)-orthonormal frame (columns U e_i).
struct FrameState {
  double t = 0.0;
  Vec x;
  Mat frame;
};

enum class Scheme {
  EulerHeun,  // Stratonovich predictor-corrector on (x, U)
  ItoEuler,   // Euler-Maruyama on x with the explicit Gamma-trace correction
};

struct StepOptions {
  Scheme scheme = Scheme::EulerHeun;
  bool project = true;                  // ambient projection + metric Gram-Schmidt
  double blowup_radius = kInfinity;     // in rho(t, x)
  const VectorFieldSpec* drift = nullptr;
};

/// One step of the horizontal frame SDE with Brownian increment dW.
/// Throws StepRejected when the point leaves the chart domain and
/// ExplosionSentinel when rho exceeds the blow-up radius.
FrameState step(const EvolvingMetricModel& model, const FrameState& state, double h,
                const Vec& dw, const StepOptions& opts = {});

/// max_ij |U^T g(t, x) U - I|_ij
double orthonormality_defect(const EvolvingMetricModel& model, const FrameState& state);

/// A g(t)-orthonormal frame at x (g^{-1/2} in charts, a tangent basis on the sphere).
Mat orthonormal_frame(const EvolvingMetricModel& model, double t, const Vec& x);

/// Modified Gram-Schmidt of the frame columns w.r.t. g(t, x).
void metric_gram_schmidt(const EvolvingMetricModel& model, double t, const Vec& x, Mat& frame);

enum class EventKind { BallExit, Explosion, StepRejection, StepFloor };

struct PathEvent {
  EventKind kind;
  double t = 0.0;
  double value = 0.0;  // exit radius, rho at explosion, or substep size
};

struct PathRecord {
  std::vector<double> times;
  std::vector<FrameState> states;
  std::vector<double> rho;          // rho(t_k, X_k)
  std::vector<Vec> increments;      // Brownian increment of grid step k
  std::vector<PathEvent> events;
  std::vector<double> exit_radii;
  std::vector<double> exit_times;   // +inf when the radius was not reached
  bool exploded = false;
  double explosion_time = kInfinity;
  bool invalid = false;             // hit the step-halving floor

  std::size_t size() const { return times.size(); }
};

struct SimulationOptions {
  double horizon = 1.0;
  double h = 1e-3;
  std::uint64_t seed = 42;
  std::uint64_t stream = 0;           // path index
  StepOptions step;
  std::vector<double> exit_radii;     // ball-exit radii in rho
  bool stop_at_last_exit = false;
  std::size_t max_steps = 0;          // 0: ceil(horizon / h)
  int max_halvings = 10;
};

/// Simulates one path; U0 is Gram-Schmidt projected first if it is not orthonormal.
PathRecord simulate_path(const EvolvingMetricModel& model, const Vec& x0, const Mat& u0,
                         const SimulationOptions& opts);

/// Same, driven by prescribed grid increments (no randomness except for bridge
/// refinements during step halving).
PathRecord simulate_path_with_increments(const EvolvingMetricModel& model, const Vec& x0,
                                         const Mat& u0, const SimulationOptions& opts,
                                         const std::vector<Vec>& increments);

/// Brownian increments for one path (d-vectors of variance h), as simulate_path draws them.
std::vector<Vec> brownian_increments(int dim, std::size_t steps, double h, std::uint64_t seed,
                                     std::uint64_t stream);

/// Smooth test function with its analytic derivatives, in state coordinates.
struct TestFunction {
  std::function<double(double, const Vec&)> value;
  std::function<double(double, const Vec&)> time_derivative;
  std::function<double(double, const Vec&)> laplacian;     // Delta_{g(t)} f
  std::function<Vec(double, const Vec&)> differential;     // df as a covector
};

/// f(T, X_T) - f(0, X_0) - int (df/ds + 1/2 Delta f + Z f) ds (trapezoid) for one path.
double generator_statistic(const EvolvingMetricModel& model, const TestFunction& f,
                           const PathRecord& path, const VectorFieldSpec* drift = nullptr);

struct GeneratorCheck {
  double discrepancy = 0.0;
  double se = 0.0;
  std::size_t paths = 0;
};

GeneratorCheck generator_check(const EvolvingMetricModel& model, const TestFunction& f,
                               const Vec& x0, const SimulationOptions& opts,
                               std::size_t n_paths);

/// One CSV row per grid point: t, coordinates, rho, orthonormality defect.
void write_path_csv(std::ostream& os, const EvolvingMetricModel& model, const PathRecord& path);

}  // namespace rfbm
