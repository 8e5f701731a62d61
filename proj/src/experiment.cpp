#include "rfbm/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "rfbm/comparison.hpp"
#include "rfbm/explosion_lab.hpp"
#include "rfbm/frame_sde.hpp"
#include "rfbm/radial_analysis.hpp"
#include "rfbm/stats.hpp"

namespace fs = std::filesystem;

namespace rfbm {

namespace {

constexpr const char* kVersion = "rfbm-1";

double comparison_window(const ExperimentConfig& cfg, const EvolvingMetricModel& model) {
  if (model.has_cut_locus()) return 0.0;
  if (cfg.model.window > 0.0) return cfg.model.window;
  return std::min(10.0 * model.length_scale(), 0.5 * model.warp().domain_limit());
}

std::vector<double> delta_ladder(const ExperimentConfig& cfg, const ComparisonProfile& p) {
  if (!cfg.run.deltas.empty()) return cfg.run.deltas;
  return {p.delta1 / 2.0, p.delta1 / 4.0, p.delta1 / 8.0};
}

std::function<double(double)> polynomial(const std::vector<double>& c) {
  return [c](double s) {
    double acc = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * s + c[i];
    return acc;
  };
}

// super-Ricci flow inequality on a (t, r) grid inside the comparison reach
bool super_ricci_on_grid(const EvolvingMetricModel& model, double reach) {
  for (int i = 0; i < 16; ++i) {
    const double t = model.horizon() * i / 15.0;
    for (int j = 1; j <= 16; ++j) {
      Vec x = Vec::Zero(model.dim());
      x[0] = reach * j / 17.0;
      if (!check_super_ricci(model, t, x).holds) return false;
    }
  }
  return true;
}

struct PathSummary {
  std::vector<double> times;  // sampled grid times
  std::vector<double> rho;
  std::vector<double> qv;
  std::vector<double> m;      // supermartingale series
  std::vector<double> lt_deficit, lt_excursion_sum, lt_downcross, residual, deficit_residual,
      excursion_time;        // per delta
  std::vector<double> occupation;
  std::vector<double> exit_times;
  bool invalid = false;
};

class Artifacts {
 public:
  explicit Artifacts(fs::path root) : root_(std::move(root)) {
    fs::create_directories(root_ / "plotdata");
  }
  std::ofstream open(const std::string& name) {
    std::ofstream os(root_ / name);
    if (!os) throw Error("cannot write " + (root_ / name).string());
    os << std::setprecision(17);
    files.push_back(name);
    return os;
  }
  std::vector<std::string> files;

 private:
  fs::path root_;
};

void write_band(std::ostream& os, const std::string& name, const SeriesBand& band) {
  os << "t," << name << "_mean," << name << "_se\n";
  for (std::size_t k = 0; k < band.times.size(); ++k)
    os << band.times[k] << "," << band.mean[k] << "," << band.se[k] << "\n";
}

}  // namespace

void print_constants(const ExperimentConfig& cfg, std::ostream& os) {
  const EvolvingMetricModel model = build_model(cfg);
  const ComparisonProfile p = constants(model, comparison_window(cfg, model));
  os << "model = " << model.describe() << "\n";
  write_profile(os, p);
}

RunOutcome run_experiment(const ExperimentConfig& cfg, Execution ex) {
  validate(cfg);
  RunOutcome out;
  out.run_hash = fnv1a_hex(std::string(kVersion) + "\n" + cfg.source);

  const EvolvingMetricModel model = build_model(cfg);
  const VectorFieldSpec drift = build_drift(cfg);
  const ComparisonProfile profile = constants(model, comparison_window(cfg, model));
  const Vec x0 = start_point(cfg, model);
  const Mat u0 = orthonormal_frame(model, 0.0, x0);
  const int d = model.dim();
  const RunConfig& run = cfg.run;

  const bool needs_paths = cfg.wants(Analysis::Qv) || cfg.wants(Analysis::Supermartingale) ||
                           cfg.wants(Analysis::LocalTime) || cfg.wants(Analysis::Explosion);
  const std::vector<double> deltas =
      cfg.wants(Analysis::LocalTime) ? delta_ladder(cfg, profile) : std::vector<double>{};
  for (double delta : deltas)
    if (!(delta < profile.delta1))
      throw ConfigError("run.deltas: " + std::to_string(delta) + " is not below delta_1 = " +
                        std::to_string(profile.delta1));
  const double eps_hit = run.eps_hit > 0.0 ? run.eps_hit : default_eps_hit(run.h, d);
  const std::vector<double> eps_ladder = {8.0 * eps_hit, 4.0 * eps_hit, 2.0 * eps_hit, eps_hit};

  // V bound for the supermartingale; Z = c grad rho adds exactly c to the radial drift
  std::function<double(double)> v = v_function(profile);
  if (drift.kind() == VectorFieldSpec::Kind::Radial) {
    const double c = cfg.drift.c;
    v = [profile, c](double r) { return v_of(r, profile) + c; };
  } else if (!drift.is_zero() && cfg.wants(Analysis::Supermartingale)) {
    throw ConfigError("incompatible analysis: supermartingale with drift '" + cfg.drift.kind +
                      "' (only zero or radial drifts have a radial bound)");
  }

  SimulationOptions sim;
  sim.horizon = run.horizon;
  sim.h = run.h;
  sim.seed = run.seed;
  sim.step.scheme = run.scheme == "ito" ? Scheme::ItoEuler : Scheme::EulerHeun;
  sim.step.project = run.project;
  sim.step.drift = drift.is_zero() ? nullptr : &drift;
  if (cfg.wants(Analysis::Explosion)) {
    sim.exit_radii = run.radii;
    double top = 0.0;
    for (double R : run.radii) top = std::max(top, R);
    sim.step.blowup_radius = 10.0 * top;
  }

  std::vector<PathSummary> paths;
  PathRecord first_path;
  if (needs_paths) {
    auto summarise = [&](std::size_t i) {
      SimulationOptions o = sim;
      o.stream = i;
      PathRecord rec = simulate_path(model, x0, u0, o);
      PathSummary s;
      s.invalid = rec.invalid;
      s.exit_times = rec.exit_times;
      DecomposeOptions dopt;
      dopt.eps_hit = eps_hit;
      dopt.stride = run.stride;
      dopt.drift = sim.step.drift;
      dopt.v = v;
      dopt.delta = deltas.empty() ? (std::isfinite(profile.delta1) ? profile.delta1 / 2.0 : 0.1)
                                  : deltas.back();
      dopt.delta1 = profile.delta1;
      if (rec.size() >= 2) {
        const RadialDecomposition base = decompose(rec, model, dopt);
        s.times = base.times;
        s.rho = base.rho;
        s.qv = base.qv;
        for (double delta : deltas) {
          dopt.delta = delta;
          const RadialDecomposition r = decompose(rec, model, dopt);
          s.lt_deficit.push_back(r.local_time.back());
          s.lt_excursion_sum.push_back(r.excursion_local_time);
          s.lt_downcross.push_back(r.downcrossing_local_time);
          s.residual.push_back(r.residual);
          s.deficit_residual.push_back(r.deficit_residual);
          s.excursion_time.push_back(r.excursion_time);
        }
        if (cfg.wants(Analysis::Supermartingale)) s.m = supermartingale_sample(rec, v, run.stride);
        if (cfg.wants(Analysis::LocalTime)) s.occupation = occupation_sample(rec, model, eps_ladder);
      }
      return s;
    };
    paths = map_paths<PathSummary>(run.paths, summarise, ex);
    SimulationOptions o = sim;
    o.stream = 0;
    first_path = simulate_path(model, x0, u0, o);
  }

  Artifacts art(cfg.output);
  std::ostringstream report;
  report << std::setprecision(17);
  report << "scenario = " << cfg.scenario << "\n"
         << "run_hash = " << out.run_hash << "\n"
         << "model = " << model.describe() << "\n"
         << "drift = " << drift.describe() << "\n"
         << "run.T = " << run.horizon << "\n"
         << "run.h = " << run.h << "\n"
         << "run.paths = " << run.paths << "\n"
         << "run.seed = " << run.seed << "\n"
         << "run.scheme = " << run.scheme << (run.project ? " (projected)" : " (unprojected)")
         << "\n"
         << "run.start_rho = " << model.distance(0.0, x0) << "\n";
  std::string analyses;
  for (Analysis a : cfg.analyses) analyses += (analyses.empty() ? "" : ", ") + to_string(a);
  report << "analyses = " << analyses << "\n";
  write_profile(report, profile);
  report << "convention.generator = 1/2 Delta_g(t) + Z\n"
         << "convention.drift_bound = 1/2 Delta rho + d rho/dt <= 1/2 Fbar(rho); drift-check "
            "margin is Fbar - (Delta rho + 2 d rho/dt)\n"
         << "convention.comparison_drift = bold-b(y) = Fbar(y) + int_0^y b(s) ds with Fbar "
            "un-halved\n"
         << "convention.v_bound = V(r) = ((d-1)/2) K coth(K min(r, i_M/3)) + 2 C1"
         << (drift.kind() == VectorFieldSpec::Kind::Radial ? " + c (Z = c grad rho)" : "")
         << "\n"
         << "convention.units = rho and radii in g(t) distance; window in base (g0) radius\n";

  std::size_t invalid = 0;
  for (const auto& p : paths) invalid += p.invalid ? 1 : 0;
  if (needs_paths) report << "paths.invalid = " << invalid << "\n";

  auto violation = [&](const std::string& what) {
    out.violations.push_back(what);
    report << "VIOLATION: " << what << "\n";
  };

  const std::vector<double> times = paths.empty() ? std::vector<double>{} : paths.front().times;
  auto series = [&](auto member) {
    std::vector<std::vector<double>> s;
    s.reserve(paths.size());
    for (const auto& p : paths) s.push_back(p.*member);
    return s;
  };

  if (needs_paths) {
    auto os = art.open("plotdata/rho_band.csv");
    write_band(os, "rho", ensemble_band(series(&PathSummary::rho), times));
    auto ps = art.open("plotdata/path_0.csv");
    ps << std::setprecision(17);
    write_path_csv(ps, model, first_path);
  }

  if (cfg.wants(Analysis::Constants)) {
    auto os = art.open("constants.csv");
    os << "key,value\n"
       << "dim," << profile.dim << "\n"
       << "i_M," << profile.i_m << "\n"
       << "K," << profile.k << "\n"
       << "C1," << profile.c1 << "\n"
       << "r1," << profile.r1 << "\n"
       << "k1," << profile.k1 << "\n"
       << "delta1," << profile.delta1 << "\n"
       << "A_distance_lower_bound," << profile.a_set_distance << "\n"
       << "window_base_radius," << profile.window << "\n";
  }

  if (cfg.wants(Analysis::Qv)) {
    std::vector<RadialDecomposition> shells;
    shells.reserve(paths.size());
    for (const auto& p : paths) {
      RadialDecomposition r;
      r.times = p.times;
      r.qv = p.qv;
      shells.push_back(std::move(r));
    }
    const QvResult qv = qv_martingale(shells);
    auto os = art.open("qv.csv");
    write_band(os, "qv", qv.curve);
    auto plot = art.open("plotdata/qv_curve.csv");
    write_band(plot, "qv", qv.curve);
    report << "qv.slope = " << qv.slope << "\n";
  }

  if (cfg.wants(Analysis::Supermartingale)) {
    const SupermartingaleResult sm = supermartingale_check(series(&PathSummary::m), times);
    auto os = art.open("supermartingale.csv");
    write_band(os, "m", sm.m);
    auto diffs = art.open("plotdata/supermartingale_differences.csv");
    diffs << "t_start,t_end,difference,se\n";
    for (std::size_t i = 0; i < sm.differences.size(); ++i)
      diffs << times[sm.checkpoints[i]] << "," << times[sm.checkpoints[i + 1]] << ","
            << sm.differences[i] << "," << sm.difference_se[i] << "\n";
    report << "supermartingale.worst_z = " << sm.worst_z << "\n"
           << "supermartingale.verdict = " << (sm.holds ? "holds" : "fails") << "\n";
    if (!sm.holds) violation("supermartingale: a successive difference of m exceeds 3 s.e.");
  }

  if (cfg.wants(Analysis::LocalTime)) {
    auto os = art.open("local_time.csv");
    os << "delta,L_deficit_mean,L_deficit_se,L_excursion_mean,L_excursion_se,L_downcross_mean,"
          "L_downcross_se,residual_mean,residual_se,deficit_residual_mean,deficit_residual_se,"
          "excursion_time_mean\n";
    std::vector<double> res_means;
    for (std::size_t j = 0; j < deltas.size(); ++j) {
      std::vector<double> a, b, c, r, dr, et;
      for (const auto& p : paths) {
        if (j >= p.lt_deficit.size()) continue;
        a.push_back(p.lt_deficit[j]);
        b.push_back(p.lt_excursion_sum[j]);
        c.push_back(p.lt_downcross[j]);
        r.push_back(p.residual[j]);
        dr.push_back(p.deficit_residual[j]);
        et.push_back(p.excursion_time[j]);
      }
      const MeanSe ma = mean_se(a), mb = mean_se(b), mc = mean_se(c), mr = mean_se(r),
                   md = mean_se(dr), me = mean_se(et);
      os << deltas[j] << "," << ma.mean << "," << ma.se << "," << mb.mean << "," << mb.se << ","
         << mc.mean << "," << mc.se << "," << mr.mean << "," << mr.se << "," << md.mean << ","
         << md.se << "," << me.mean << "\n";
      res_means.push_back(std::abs(mr.mean));
      if (j + 1 == deltas.size()) {
        const double rel = std::abs(ma.mean - mc.mean) / std::max(std::abs(mc.mean), 1e-300);
        report << "local_time.finest_delta = " << deltas[j] << "\n"
               << "local_time.estimator_relative_gap = " << rel << "\n";
      }
    }
    bool monotone = true;
    for (std::size_t j = 1; j < res_means.size(); ++j)
      monotone = monotone && res_means[j] < res_means[j - 1];
    report << "local_time.residual_monotone = " << (monotone ? "true" : "false") << "\n";
    const OccupationResult occ =
        occupation_time_cutlocus(series(&PathSummary::occupation), eps_ladder);
    auto oc = art.open("plotdata/cutlocus_occupation.csv");
    oc << "eps,occupation_mean,occupation_se\n";
    for (std::size_t k = 0; k < occ.eps.size(); ++k)
      oc << occ.eps[k] << "," << occ.mean[k] << "," << occ.se[k] << "\n";
  }

  if (cfg.wants(Analysis::Explosion)) {
    std::vector<std::vector<double>> exits;
    exits.reserve(paths.size());
    for (const auto& p : paths) exits.push_back(p.exit_times);
    const ExplosionTable table =
        explosion_probability(exits, run.radii, run.radii, run.horizon);
    auto os = art.open("explosion.csv");
    os << "R,exits,paths,p_hat,ci_lower,ci_upper\n";
    for (std::size_t k = 0; k < table.radii.size(); ++k)
      os << table.radii[k] << "," << table.exits[k] << "," << table.paths << ","
         << table.p_hat[k] << "," << table.ci[k].lower << "," << table.ci[k].upper << "\n";
    report << "explosion.verdict = " << to_string(table.verdict) << "\n";
    const double reach = profile.compact ? model.warp().domain_limit() : profile.window;
    if (table.verdict == ExplosionCall::ExplosionDetected && super_ricci_on_grid(model, reach))
      violation("explosion: detected on a model satisfying the super-Ricci flow inequality");
  }

  if (cfg.wants(Analysis::DriftCheck)) {
    const std::vector<DriftBoundSample> grid = drift_bound_grid(model, profile, 64, 64);
    auto os = art.open("drift_check.csv");
    os << "t,rho,lhs,fbar,margin\n";
    for (const DriftBoundSample& s : grid) {
      const DistanceJet jet = distance_jet(model, s.t, s.x);
      const double lhs = jet.laplacian + 2.0 * jet.drho_dt;
      const double fb = fbar(jet.rho, profile);
      os << s.t << "," << jet.rho << "," << lhs << "," << fb << "," << fb - lhs << "\n";
    }
    const DriftBoundResult res = drift_bound_check(model, profile, grid);
    const double reach = profile.compact ? model.warp().domain_limit() : profile.window;
    const bool super_ricci = super_ricci_on_grid(model, reach);
    report << "drift_check.margin = " << res.margin << "\n"
           << "drift_check.super_ricci = " << (super_ricci ? "true" : "false") << "\n"
           << "drift_check.note = drift bound checked for the Brownian part; Z is not included\n";
    if (super_ricci && res.margin < 0.0)
      violation("drift-check: negative margin on a super-Ricci model");
  }

  if (cfg.wants(Analysis::Feller)) {
    const DriftSpec bb = comparison_drift_polynomial(profile, cfg.drift.b);
    const ExplosionVerdict v = feller_test(bb);
    auto os = art.open("feller.csv");
    os << "y,b,log_phi\n";
    for (int k = 0; k <= 60; ++k) {
      const double y = std::pow(10.0, 0.1 * k) * (1.0 + 1e-9);
      os << y << "," << bb(y) << "," << feller_log_phi(bb, y) << "\n";
    }
    report << "feller.drift = " << bb.name() << "\n"
           << "feller.classification = " << to_string(v.classification) << "\n"
           << "feller.value = " << v.feller_value << "\n"
           << "feller.cutoff = " << v.cutoff << "\n"
           << "feller.tail_exponent = " << v.tail_exponent_min << " .. " << v.tail_exponent
           << "\n";
  }

  if (cfg.wants(Analysis::AssumptionCheck)) {
    const double reach = profile.compact ? model.warp().domain_limit() : profile.window;
    const std::vector<SpaceTimeSample> grid = space_time_grid(model, reach, 16, 16);
    const AssumptionCheck ac = check_assumption(model, drift, polynomial(cfg.drift.b), grid);
    auto os = art.open("assumption_check.csv");
    os << "holds,margin,worst_t,worst_r\n"
       << (ac.holds ? "true" : "false") << "," << ac.margin << "," << ac.worst.t << ","
       << (ac.worst.chart_x.size() ? ac.worst.chart_x.norm() : 0.0) << "\n";
    report << "assumption.holds = " << (ac.holds ? "true" : "false") << "\n"
           << "assumption.margin = " << ac.margin << "\n";
    if (!model.has_cut_locus() && !drift.is_zero())
      report << "assumption.note = noncompact drifted run; cut-locus occupation check skipped\n";
  }

  out.exit_code = out.violations.empty() ? kExitOk : kExitContract;
  report << "exit_code = " << out.exit_code << "\n";
  auto rs = art.open("report.txt");
  rs << report.str();
  out.files = art.files;
  return out;
}

int run_config_file(const std::string& path, std::ostream& log) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(path);
  } catch (const ConfigError& e) {
    log << "validation error: " << e.what() << "\n";
    return kExitValidation;
  }
  try {
    const RunOutcome out = run_experiment(cfg);
    log << "run " << out.run_hash << ": wrote " << out.files.size() << " files to " << cfg.output
        << "\n";
    for (const std::string& v : out.violations) log << "contract violation: " << v << "\n";
    return out.exit_code;
  } catch (const ConfigError& e) {
    log << "validation error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace rfbm
