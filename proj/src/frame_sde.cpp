#include "rfbm/frame_sde.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "rfbm/ensemble.hpp"

namespace rfbm {

namespace {

struct Increment {
  Vec dx;
  Mat dframe;
};

// Right-hand side of the Stratonovich system over a step of length h:
// dx = U (dW + c h),  dU = -Gamma(dx, U) - 1/2 h U (U^T dg/dt U).
Increment increment(const EvolvingMetricModel& model, double t, const Vec& x, const Mat& u,
                    double h, const Vec& dw, const VectorFieldSpec* drift) {
  Vec coeff = dw;
  if (drift && !drift->is_zero()) {
    const Vec z = drift->state_field(model, t, x);
    coeff += h * (u.transpose() * (model.state_metric(t, x) * z));
  }
  Increment inc;
  inc.dx = u * coeff;
  inc.dframe = -model.transport(t, x, inc.dx, u);
  if (!model.scale().is_static())
    inc.dframe -= 0.5 * h * u * (u.transpose() * model.state_metric_dot(t, x) * u);
  return inc;
}

void check_explosion(const EvolvingMetricModel& model, const FrameState& s,
                     const StepOptions& opts) {
  if (std::isfinite(opts.blowup_radius) && model.distance(s.t, s.x) > opts.blowup_radius)
    throw ExplosionSentinel("rho exceeded the blow-up radius");
}

FrameState ito_step(const EvolvingMetricModel& model, const FrameState& s, double h,
                    const Vec& dw, const StepOptions& opts) {
  const Mat u = orthonormal_frame(model, s.t, s.x);
  Vec drift = model.ito_drift(s.t, s.x);
  if (opts.drift && !opts.drift->is_zero()) drift += opts.drift->state_field(model, s.t, s.x);
  FrameState out;
  out.t = s.t + h;
  out.x = s.x + u * dw + h * drift;
  if (!model.in_domain(out.x)) throw StepRejected("step left the chart domain");
  model.project_point(out.x);
  out.frame = orthonormal_frame(model, out.t, out.x);
  check_explosion(model, out, opts);
  return out;
}

}  // namespace

Mat orthonormal_frame(const EvolvingMetricModel& model, double t, const Vec& x) {
  if (model.representation() == Representation::Ambient) {
    const int n = model.coord_dim();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Eigen::MatrixXd(x.normalized()));
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    return Mat(q.rightCols(n - 1)) / std::sqrt(model.scale().a(t));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(model.state_metric(t, x))};
  return Mat(es.operatorInverseSqrt());
}

void metric_gram_schmidt(const EvolvingMetricModel& model, double t, const Vec& x, Mat& frame) {
  const Mat g = model.state_metric(t, x);
  for (int j = 0; j < frame.cols(); ++j) {
    for (int i = 0; i < j; ++i) {
      const double c = frame.col(j).dot(g * frame.col(i));
      frame.col(j) -= c * frame.col(i);
    }
    const double len = std::sqrt(frame.col(j).dot(g * frame.col(j)));
    if (!(len > 0.0)) throw DegenerateFrameError("Gram-Schmidt met a degenerate frame");
    frame.col(j) /= len;
  }
}

double orthonormality_defect(const EvolvingMetricModel& model, const FrameState& s) {
  const Mat gram = s.frame.transpose() * model.state_metric(s.t, s.x) * s.frame;
  return (gram - Mat::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

FrameState step(const EvolvingMetricModel& model, const FrameState& s, double h, const Vec& dw,
                const StepOptions& opts) {
  if (!(h > 0.0)) throw Error("step: h must be positive");
  if (opts.scheme == Scheme::ItoEuler) return ito_step(model, s, h, dw, opts);

  const Increment k1 = increment(model, s.t, s.x, s.frame, h, dw, opts.drift);
  Vec xp = s.x + k1.dx;
  if (!model.in_domain(xp)) throw StepRejected("predictor left the chart domain");
  const Mat up = s.frame + k1.dframe;
  const Increment k2 = increment(model, s.t + h, xp, up, h, dw, opts.drift);

  FrameState out;
  out.t = s.t + h;
  out.x = s.x + 0.5 * (k1.dx + k2.dx);
  out.frame = s.frame + 0.5 * (k1.dframe + k2.dframe);
  if (!model.in_domain(out.x)) throw StepRejected("step left the chart domain");
  if (opts.project) {
    model.project_point(out.x);
    model.project_tangent(out.x, out.frame);
    metric_gram_schmidt(model, out.t, out.x, out.frame);
  }
  check_explosion(model, out, opts);
  return out;
}

std::vector<Vec> brownian_increments(int dim, std::size_t steps, double h, std::uint64_t seed,
                                     std::uint64_t stream) {
  RandomStream rng(seed, stream);
  std::vector<Vec> out;
  out.reserve(steps);
  for (std::size_t k = 0; k < steps; ++k) out.push_back(rng.normal_vector(dim, h));
  return out;
}

namespace {

class PathIntegrator {
 public:
  PathIntegrator(const EvolvingMetricModel& model, const SimulationOptions& opts,
                 RandomStream& bridge_rng, PathRecord& rec)
      : model_(model), opts_(opts), rng_(bridge_rng), rec_(rec) {}

  // Advances over [s.t, s.t + h] with increment dw, halving on rejection.
  FrameState advance(const FrameState& s, double h, const Vec& dw, int depth) {
    try {
      return step(model_, s, h, dw, opts_.step);
    } catch (const StepRejected&) {
      rec_.events.push_back({EventKind::StepRejection, s.t, h});
      if (depth >= opts_.max_halvings) {
        rec_.events.push_back({EventKind::StepFloor, s.t, h});
        throw;
      }
      // Brownian bridge: W(h/2) | W(h) = dw ~ N(dw/2, h/4)
      const Vec first = 0.5 * dw + rng_.normal_vector(static_cast<int>(dw.size()), 0.25 * h);
      const FrameState mid = advance(s, 0.5 * h, first, depth + 1);
      return advance(mid, 0.5 * h, dw - first, depth + 1);
    }
  }

 private:
  const EvolvingMetricModel& model_;
  const SimulationOptions& opts_;
  RandomStream& rng_;
  PathRecord& rec_;
};

PathRecord run_path(const EvolvingMetricModel& model, const Vec& x0, const Mat& u0,
                    const SimulationOptions& opts, const std::vector<Vec>* given) {
  if (!(opts.h > 0.0) || !(opts.horizon > 0.0)) throw ConfigError("simulation needs h, T > 0");
  const int d = model.dim();
  std::size_t steps = opts.max_steps;
  if (steps == 0) steps = static_cast<std::size_t>(std::ceil(opts.horizon / opts.h - 1e-9));

  PathRecord rec;
  rec.exit_radii = opts.exit_radii;
  rec.exit_times.assign(opts.exit_radii.size(), kInfinity);
  rec.times.reserve(steps + 1);
  rec.states.reserve(steps + 1);
  rec.rho.reserve(steps + 1);
  rec.increments.reserve(steps);

  FrameState s{0.0, x0, u0};
  model.project_point(s.x);
  if (orthonormality_defect(model, s) > kTolFrame) {
    model.project_tangent(s.x, s.frame);
    metric_gram_schmidt(model, s.t, s.x, s.frame);
  }

  RandomStream rng(opts.seed, opts.stream);
  // bridge refinements use their own stream so prescribed increments stay comparable
  RandomStream bridge(derive_seed(opts.seed, opts.stream), 0x6272696467650000ULL);
  PathIntegrator integ(model, opts, bridge, rec);

  auto record = [&](const FrameState& st) {
    rec.times.push_back(st.t);
    rec.rho.push_back(model.distance(st.t, st.x));
    rec.states.push_back(st);
    for (std::size_t r = 0; r < opts.exit_radii.size(); ++r) {
      if (!std::isfinite(rec.exit_times[r]) && rec.rho.back() >= opts.exit_radii[r]) {
        rec.exit_times[r] = st.t;
        rec.events.push_back({EventKind::BallExit, st.t, opts.exit_radii[r]});
      }
    }
  };
  record(s);

  for (std::size_t k = 0; k < steps; ++k) {
    if (opts.stop_at_last_exit && !rec.exit_times.empty() &&
        std::isfinite(rec.exit_times.back()))
      break;
    // a full step unless the remainder is genuinely shorter (not just rounding in t)
    const double remaining = opts.horizon - s.t;
    const double h = remaining < opts.h * (1.0 - 1e-9) ? remaining : opts.h;
    if (!(h > 1e-15)) break;
    Vec dw = given ? (*given)[k] : rng.normal_vector(d, opts.h);
    if (given == nullptr && h != opts.h) dw *= std::sqrt(h / opts.h);
    try {
      s = integ.advance(s, h, dw, 0);
    } catch (const StepRejected&) {
      rec.invalid = true;
      break;
    } catch (const ExplosionSentinel&) {
      rec.exploded = true;
      rec.explosion_time = s.t + h;
      rec.events.push_back({EventKind::Explosion, s.t + h, opts.step.blowup_radius});
      for (std::size_t r = 0; r < opts.exit_radii.size(); ++r)
        if (!std::isfinite(rec.exit_times[r])) {
          rec.exit_times[r] = s.t + h;
          rec.events.push_back({EventKind::BallExit, s.t + h, opts.exit_radii[r]});
        }
      break;
    }
    rec.increments.push_back(dw);
    record(s);
  }
  return rec;
}

}  // namespace

PathRecord simulate_path(const EvolvingMetricModel& model, const Vec& x0, const Mat& u0,
                         const SimulationOptions& opts) {
  return run_path(model, x0, u0, opts, nullptr);
}

PathRecord simulate_path_with_increments(const EvolvingMetricModel& model, const Vec& x0,
                                         const Mat& u0, const SimulationOptions& opts,
                                         const std::vector<Vec>& increments) {
  std::size_t steps = opts.max_steps;
  if (steps == 0) steps = static_cast<std::size_t>(std::ceil(opts.horizon / opts.h - 1e-9));
  if (increments.size() < steps) throw Error("not enough prescribed increments");
  return run_path(model, x0, u0, opts, &increments);
}

double generator_statistic(const EvolvingMetricModel& model, const TestFunction& f,
                           const PathRecord& path, const VectorFieldSpec* drift) {
  auto generator = [&](const FrameState& s) {
    double v = 0.5 * f.laplacian(s.t, s.x);
    if (f.time_derivative) v += f.time_derivative(s.t, s.x);
    if (drift && !drift->is_zero()) v += f.differential(s.t, s.x).dot(drift->state_field(model, s.t, s.x));
    return v;
  };
  CompensatedSum integral;
  double prev = generator(path.states.front());
  for (std::size_t k = 1; k < path.size(); ++k) {
    const double cur = generator(path.states[k]);
    integral.add(0.5 * (prev + cur) * (path.times[k] - path.times[k - 1]));
    prev = cur;
  }
  const FrameState& a = path.states.front();
  const FrameState& b = path.states.back();
  return f.value(b.t, b.x) - f.value(a.t, a.x) - integral.value();
}

GeneratorCheck generator_check(const EvolvingMetricModel& model, const TestFunction& f,
                               const Vec& x0, const SimulationOptions& opts,
                               std::size_t n_paths) {
  const Mat u0 = orthonormal_frame(model, 0.0, x0);
  const std::vector<double> stats = map_paths<double>(n_paths, [&](std::size_t i) {
    SimulationOptions o = opts;
    o.stream = i;
    const PathRecord rec = simulate_path(model, x0, u0, o);
    return generator_statistic(model, f, rec, opts.step.drift);
  });
  const MeanSe ms = mean_se(stats);
  return {ms.mean, ms.se, ms.n};
}

void write_path_csv(std::ostream& os, const EvolvingMetricModel& model, const PathRecord& path) {
  const int n = model.coord_dim();
  os << "t";
  for (int i = 0; i < n; ++i) os << ",x" << i;
  os << ",rho,defect\n";
  os << std::setprecision(17);
  for (std::size_t k = 0; k < path.size(); ++k) {
    const FrameState& s = path.states[k];
    os << s.t;
    for (int i = 0; i < n; ++i) os << "," << s.x[i];
    os << "," << path.rho[k] << "," << orthonormality_defect(model, s) << "\n";
  }
}

}  // namespace rfbm
