#include "rfbm/radial_analysis.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "rfbm/stats.hpp"

namespace rfbm {

double default_eps_hit(double h, int dim) { return 2.0 * std::sqrt(h * dim); }

namespace {

bool sampled(std::size_t k, std::size_t n, std::size_t stride) {
  return k % stride == 0 || k + 1 == n;
}

}  // namespace

RadialDecomposition decompose(const PathRecord& path, const EvolvingMetricModel& model,
                              const DecomposeOptions& opts) {
  if (!(opts.delta > 0.0)) throw ConfigError("decompose: delta must be positive");
  if (opts.delta >= opts.delta1)
    throw ConfigError("decompose: delta must be below delta_1 = " + std::to_string(opts.delta1));
  const std::size_t n = path.size();
  if (n < 2) throw Error("decompose: path has fewer than two grid points");

  RadialDecomposition out;
  out.delta = opts.delta;
  out.stride = std::max<std::size_t>(1, opts.stride);
  const double h = path.times[1] - path.times[0];
  out.eps_hit = opts.eps_hit > 0.0 ? opts.eps_hit : default_eps_hit(h, model.dim());

  std::vector<double> drift(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const FrameState& s = path.states[k];
    if (path.rho[k] < model.pole_epsilon()) continue;
    try {
      const DistanceJet jet = distance_jet(model, s.t, s.x);
      double v = 0.5 * jet.laplacian + jet.drho_dt;
      if (opts.drift && !opts.drift->is_zero())
        v += jet.grad.dot(model.state_metric(s.t, s.x) * opts.drift->state_field(model, s.t, s.x));
      drift[k] = v;
    } catch (const CutLocusError&) {
      drift[k] = 0.0;
    }
  }

  // excursions: S = first grid time with cutlocus_distance <= eps_hit, T = first
  // of displacement delta, elapsed time delta, or the end of the path
  std::vector<char> on_excursion(n, 0);
  if (model.has_cut_locus()) {
    std::size_t k = 0;
    while (k + 1 < n) {
      if (cutlocus_distance(model, path.times[k], path.states[k].x) > out.eps_hit) {
        ++k;
        continue;
      }
      const FrameState& start = path.states[k];
      std::size_t j = k + 1;
      while (j + 1 < n && path.times[j] < start.t + opts.delta &&
             model.distance_between(path.times[j], start.x, path.states[j].x) < opts.delta)
        ++j;
      out.excursions.push_back({k, j, 0.0});
      for (std::size_t i = k; i < j; ++i) on_excursion[i] = 1;
      out.excursion_time += path.times[j] - path.times[k];
      k = j;
    }
  }

  std::vector<double> m(n - 1, 0.0);
  CompensatedSum drift_sum, mart_sum, qv_sum, lt_sum;
  CompensatedSum excursion_lt, residual;
  std::size_t next_exc = 0;
  double exc_deficit = 0.0;

  auto push_sample = [&](std::size_t k) {
    out.times.push_back(path.times[k]);
    out.rho.push_back(path.rho[k]);
    out.drift.push_back(drift[k]);
    out.drift_integral.push_back(drift_sum.value());
    out.martingale.push_back(mart_sum.value());
    out.qv.push_back(qv_sum.value());
    out.local_time.push_back(lt_sum.value());
  };
  push_sample(0);

  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double dt = path.times[k + 1] - path.times[k];
    const double drho = path.rho[k + 1] - path.rho[k];
    if (path.rho[k] < model.pole_epsilon()) ++out.pole_steps;
    double inc = drho - drift[k] * dt;
    if (on_excursion[k]) {
      // Ito sum <grad rho, U dW> in place of the (singular) increment identity
      const FrameState& s = path.states[k];
      inc = 0.0;
      try {
        const DistanceJet jet = distance_jet(model, s.t, s.x);
        inc = jet.grad.dot(model.state_metric(s.t, s.x) * (s.frame * path.increments[k]));
      } catch (const CutLocusError&) {
      } catch (const ChartSingularityError&) {
      }
      exc_deficit += drift[k] * dt + inc - drho;
      const double v = opts.v ? opts.v(path.rho[k]) : 0.0;
      excursion_lt.add(-drho + inc + v * dt);
      residual.add((v - drift[k]) * dt);
    }
    m[k] = inc;
    drift_sum.add(drift[k] * dt);
    mart_sum.add(inc);
    qv_sum.add(inc * inc);
    if (next_exc < out.excursions.size() && out.excursions[next_exc].end == k + 1) {
      out.excursions[next_exc].deficit = exc_deficit;
      lt_sum.add(std::max(0.0, exc_deficit));
      exc_deficit = 0.0;
      ++next_exc;
    }
    if (sampled(k + 1, n, out.stride)) push_sample(k + 1);
  }

  out.deficit_residual = path.rho.back() - path.rho.front() - drift_sum.value() -
                         mart_sum.value() + lt_sum.value();
  out.excursion_local_time = excursion_lt.value();
  out.residual = residual.value();
  if (opts.keep_increments) out.increments = std::move(m);

  if (model.has_cut_locus()) {
    // upcrossings of the cut-locus distance from eps_hit to eps_hit + delta
    bool below = cutlocus_distance(model, path.times[0], path.states[0].x) <= out.eps_hit;
    std::size_t crossings = 0;
    for (std::size_t k = 1; k < n; ++k) {
      const double z = cutlocus_distance(model, path.times[k], path.states[k].x);
      if (below && z >= out.eps_hit + opts.delta) {
        ++crossings;
        below = false;
      } else if (!below && z <= out.eps_hit) {
        below = true;
      }
    }
    out.downcrossing_local_time = opts.delta * static_cast<double>(crossings);
  }
  return out;
}

SeriesBand ensemble_band(const std::vector<std::vector<double>>& per_path,
                         const std::vector<double>& times) {
  SeriesBand band;
  band.times = times;
  const std::size_t m = times.size();
  band.mean.assign(m, 0.0);
  band.se.assign(m, 0.0);
  std::vector<double> column;
  column.reserve(per_path.size());
  for (std::size_t k = 0; k < m; ++k) {
    column.clear();
    for (const auto& p : per_path)
      if (k < p.size()) column.push_back(p[k]);
    const MeanSe ms = mean_se(column);
    band.mean[k] = ms.mean;
    band.se[k] = ms.se;
  }
  return band;
}

QvResult qv_martingale(const std::vector<RadialDecomposition>& ensemble) {
  if (ensemble.empty()) throw Error("qv_martingale: empty ensemble");
  std::vector<std::vector<double>> qv;
  qv.reserve(ensemble.size());
  for (const auto& r : ensemble) qv.push_back(r.qv);
  QvResult out;
  const std::vector<double>& t = ensemble.front().times;
  out.curve = ensemble_band(qv, t);
  std::vector<double> shifted(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) shifted[k] = t[k] - t.front();
  out.slope = slope_through_origin(shifted, out.curve.mean);
  return out;
}

std::vector<double> occupation_sample(const PathRecord& path, const EvolvingMetricModel& model,
                                      const std::vector<double>& eps_ladder) {
  std::vector<double> out(eps_ladder.size(), 0.0);
  if (!model.has_cut_locus()) return out;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const double z = cutlocus_distance(model, path.times[k], path.states[k].x);
    const double dt = path.times[k + 1] - path.times[k];
    for (std::size_t e = 0; e < eps_ladder.size(); ++e)
      if (z <= eps_ladder[e]) out[e] += dt;
  }
  return out;
}

OccupationResult occupation_time_cutlocus(const std::vector<std::vector<double>>& samples,
                                          const std::vector<double>& eps_ladder) {
  OccupationResult out;
  out.eps = eps_ladder;
  const SeriesBand band = ensemble_band(samples, eps_ladder);
  out.mean = band.mean;
  out.se = band.se;
  return out;
}

std::vector<double> supermartingale_sample(const PathRecord& path,
                                           const std::function<double(double)>& v,
                                           std::size_t stride) {
  stride = std::max<std::size_t>(1, stride);
  std::vector<double> out;
  CompensatedSum integral;
  const std::size_t n = path.size();
  out.push_back(0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    integral.add(v(path.rho[k]) * (path.times[k + 1] - path.times[k]));
    if (sampled(k + 1, n, stride))
      out.push_back(path.rho[k + 1] - path.rho[0] - integral.value());
  }
  return out;
}

SupermartingaleResult supermartingale_check(const std::vector<std::vector<double>>& samples,
                                            const std::vector<double>& times,
                                            std::size_t n_checkpoints) {
  SupermartingaleResult out;
  out.m = ensemble_band(samples, times);
  const std::size_t m = times.size();
  n_checkpoints = std::max<std::size_t>(1, std::min(n_checkpoints, m - 1));
  for (std::size_t i = 0; i <= n_checkpoints; ++i)
    out.checkpoints.push_back(i * (m - 1) / n_checkpoints);
  out.holds = true;
  std::vector<double> diff;
  diff.reserve(samples.size());
  for (std::size_t i = 0; i + 1 < out.checkpoints.size(); ++i) {
    const std::size_t a = out.checkpoints[i], b = out.checkpoints[i + 1];
    diff.clear();
    for (const auto& s : samples)
      if (b < s.size()) diff.push_back(s[b] - s[a]);
    const MeanSe ms = mean_se(diff);
    out.differences.push_back(ms.mean);
    out.difference_se.push_back(ms.se);
    const double z = ms.se > 0.0 ? ms.mean / ms.se : (ms.mean > 0.0 ? kInfinity : -kInfinity);
    out.worst_z = std::max(out.worst_z, z);
    if (ms.mean > 3.0 * ms.se) out.holds = false;
  }
  return out;
}

void write_radial_csv(std::ostream& os, const std::vector<RadialDecomposition>& ensemble) {
  if (ensemble.empty()) return;
  std::vector<std::vector<double>> rho, drift, qv, lt;
  for (const auto& r : ensemble) {
    rho.push_back(r.rho);
    drift.push_back(r.drift);
    qv.push_back(r.qv);
    lt.push_back(r.local_time);
  }
  const std::vector<double>& t = ensemble.front().times;
  const SeriesBand br = ensemble_band(rho, t), bd = ensemble_band(drift, t),
                   bq = ensemble_band(qv, t), bl = ensemble_band(lt, t);
  os << "t,rho_mean,rho_se,drift_mean,drift_se,qv_mean,qv_se,L_mean,L_se\n";
  os << std::setprecision(17);
  for (std::size_t k = 0; k < t.size(); ++k)
    os << t[k] << "," << br.mean[k] << "," << br.se[k] << "," << bd.mean[k] << "," << bd.se[k]
       << "," << bq.mean[k] << "," << bq.se[k] << "," << bl.mean[k] << "," << bl.se[k] << "\n";
}

}  // namespace rfbm
