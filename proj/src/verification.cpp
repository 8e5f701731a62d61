#include "rfbm/verification.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include "rfbm/comparison.hpp"
#include "rfbm/drift_extension.hpp"
#include "rfbm/explosion_lab.hpp"
#include "rfbm/frame_sde.hpp"
#include "rfbm/radial_analysis.hpp"
#include "rfbm/rng.hpp"
#include "rfbm/stats.hpp"

namespace rfbm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

struct RhoSample {
  double rho_t = 0.0;
  bool invalid = false;
};

// rho(T, X_T) over an ensemble started at x0 with the canonical frame
std::vector<double> terminal_rho(const EvolvingMetricModel& model, const Vec& x0, double h,
                                 std::size_t n, std::uint64_t seed, const VectorFieldSpec* z,
                                 Execution ex, std::size_t& invalid) {
  const Mat u0 = orthonormal_frame(model, 0.0, x0);
  SimulationOptions opts;
  opts.horizon = model.horizon();
  opts.h = h;
  opts.seed = seed;
  opts.step.drift = z;
  const auto out = map_paths<RhoSample>(
      n,
      [&](std::size_t i) {
        SimulationOptions o = opts;
        o.stream = i;
        const PathRecord rec = simulate_path(model, x0, u0, o);
        return RhoSample{rec.rho.back(), rec.invalid};
      },
      ex);
  std::vector<double> rho;
  invalid = 0;
  for (const auto& s : out) {
    if (s.invalid) {
      ++invalid;
      continue;
    }
    rho.push_back(s.rho_t);
  }
  return rho;
}

std::vector<double> terminal_1d(const DriftSpec& drift, double y0, double horizon, double h,
                                std::size_t n, std::uint64_t seed, Execution ex) {
  return map_paths<double>(
      n,
      [&](std::size_t i) {
        Sim1dOptions o;
        o.y0 = y0;
        o.horizon = horizon;
        o.h = h;
        o.seed = seed;
        o.stream = i;
        return simulate_1d(drift, o).y_final;
      },
      ex);
}

struct CatalogModel {
  std::string name;
  EvolvingMetricModel model;
  double window;  // base radius, ignored for compact models
};

// models satisfying dg/dt <= Ric
std::vector<CatalogModel> super_ricci_catalog(int d) {
  std::vector<CatalogModel> out;
  out.push_back({"euclidean", EvolvingMetricModel::euclidean(d, 1.0), 3.0});
  out.push_back({"sphere backwards flow", EvolvingMetricModel::sphere(d, 2.0, 1.0), 0.0});
  const double a0 = 4.0;
  out.push_back({"homothetic hyperbolic",
                 EvolvingMetricModel::homothetic(
                     EvolvingMetricModel::warped(d, 0.9 * a0 / (d - 1), Warp::sinh(1.0)),
                     ScaleCurve::linear(a0, -(d - 1.0))),
                 3.0});
  out.push_back({"static sphere", EvolvingMetricModel::warped(d, 1.0, Warp::sin(1.0)), 0.0});
  return out;
}

// largest violation of F <= Fbar over t-grid and the Jacobi grid below r1
double fbar_excess(const CatalogModel& c) {
  const EvolvingMetricModel& m = c.model;
  const ComparisonProfile p = constants(m, c.window);
  double worst = -kInfinity;
  for (int i = 0; i < 8; ++i) {
    const double t = m.horizon() * i / 7.0;
    const double sa = std::sqrt(m.scale().a(t));
    const double reach = m.has_cut_locus() ? m.warp().domain_limit() : c.window;
    const double b = std::min(p.r1, sa * reach * (1.0 - 1e-3));
    const JacobiSolution j = solve_jacobi(radial_ricci_profile(m, t), b, 1e-3, m.dim());
    const std::vector<double> f = index_f_on_grid(j);
    for (std::size_t k = 1; k < f.size(); ++k)
      if (std::isfinite(f[k])) worst = std::max(worst, f[k] - fbar(j.s[k], p));
  }
  return worst;
}

double drift_margin(const CatalogModel& c) {
  const ComparisonProfile p = constants(c.model, c.window);
  return drift_bound_check(c.model, p, drift_bound_grid(c.model, p, 64, 64)).margin;
}

}  // namespace

Suite parse_suite(const std::string& name) {
  if (name == "fast") return Suite::Fast;
  if (name == "full") return Suite::Full;
  throw ConfigError("unknown suite '" + name + "' (expected fast or full)");
}

CriterionResult check_unit_qv(const VerifyOptions& o) {
  const auto t0 = Clock::now();
  CriterionResult r{1, "unit quadratic variation of the radial martingale", true, "", {}, 0.0};
  struct Case {
    std::string name;
    EvolvingMetricModel model;
    double start;
  };
  const std::vector<Case> cases = {
      {"euclidean d=3", EvolvingMetricModel::euclidean(3, 1.0), 1.0},
      {"hyperbolic d=2", EvolvingMetricModel::warped(2, 1.0, Warp::sinh(1.0)), 2.0}};
  for (const Case& c : cases) {
    const Vec x0 = c.model.state_point_at(c.start);
    const Mat u0 = orthonormal_frame(c.model, 0.0, x0);
    SimulationOptions opts;
    opts.horizon = 1.0;
    opts.h = 1e-3;
    opts.seed = o.seed + 1;
    auto shells = map_paths<RadialDecomposition>(
        o.paths,
        [&](std::size_t i) {
          SimulationOptions s = opts;
          s.stream = i;
          const PathRecord rec = simulate_path(c.model, x0, u0, s);
          DecomposeOptions d;
          d.stride = 10;
          RadialDecomposition full = decompose(rec, c.model, d);
          RadialDecomposition thin;
          thin.times = std::move(full.times);
          thin.qv = std::move(full.qv);
          return thin;
        },
        o.execution);
    const QvResult qv = qv_martingale(shells);
    const bool ok = qv.slope >= 0.98 && qv.slope <= 1.02;
    r.passed = r.passed && ok;
    r.detail += (r.detail.empty() ? "" : "; ") + c.name + " slope " + fmt(qv.slope, 5);
  }
  r.detail += " (target [0.98, 1.02], " + std::to_string(o.paths) + " paths)";
  r.seconds = seconds_since(t0);
  return r;
}

CriterionResult check_frame_orthonormality(const VerifyOptions& o) {
  const auto t0 = Clock::now();
  CriterionResult r{2, "frame orthonormality", true, "", {}, 0.0};
  const EvolvingMetricModel model = EvolvingMetricModel::sphere(2, 1.0, 1.0);
  const Vec x0 = model.state_point_at(1.0);
  const Mat u0 = orthonormal_frame(model, 0.0, x0);

  // projected mode: every step
  const std::size_t n_proj = std::min<std::size_t>(o.paths, 200);
  SimulationOptions opts;
  opts.horizon = 1.0;
  opts.h = 1e-3;
  opts.seed = o.seed + 2;
  const auto proj = map_paths<double>(
      n_proj,
      [&](std::size_t i) {
        SimulationOptions s = opts;
        s.stream = i;
        const PathRecord rec = simulate_path(model, x0, u0, s);
        double worst = 0.0;
        for (const FrameState& st : rec.states)
          worst = std::max(worst, orthonormality_defect(model, st));
        return worst;
      },
      o.execution);
  double proj_max = 0.0;
  for (double v : proj) proj_max = std::max(proj_max, v);
  const bool proj_ok = proj_max <= 1e-9;

  // unprojected mode: coupled increments, fine grid h = 1e-3 summed into coarser steps
  const std::size_t n_unproj = std::min<std::size_t>(o.paths, 400);
  const std::vector<int> factors = {4, 2, 1};
  const std::size_t fine_steps = 1000;
  const auto defects = map_paths<std::vector<double>>(
      n_unproj,
      [&](std::size_t i) {
        const std::vector<Vec> fine = brownian_increments(2, fine_steps, 1e-3, o.seed + 3, i);
        std::vector<double> out;
        for (int f : factors) {
          std::vector<Vec> coarse;
          for (std::size_t k = 0; k + static_cast<std::size_t>(f) <= fine.size();
               k += static_cast<std::size_t>(f)) {
            Vec sum = Vec::Zero(2);
            for (int q = 0; q < f; ++q) sum += fine[k + static_cast<std::size_t>(q)];
            coarse.push_back(sum);
          }
          SimulationOptions s = opts;
          s.h = 1e-3 * f;
          s.stream = i;
          s.step.project = false;
          const PathRecord rec = simulate_path_with_increments(model, x0, u0, s, coarse);
          double worst = 0.0;
          for (const FrameState& st : rec.states)
            worst = std::max(worst, orthonormality_defect(model, st));
          out.push_back(worst);
        }
        return out;
      },
      o.execution);
  std::vector<double> mean(factors.size(), 0.0);
  for (const auto& d : defects)
    for (std::size_t k = 0; k < factors.size(); ++k) mean[k] += d[k] / defects.size();
  const double ratio1 = mean[1] / mean[0], ratio2 = mean[2] / mean[1];
  const bool ratio_ok = ratio1 >= 0.4 && ratio1 <= 0.6 && ratio2 >= 0.4 && ratio2 <= 0.6;
  r.passed = proj_ok && ratio_ok;
  r.detail = "projected max defect " + fmt(proj_max, 3) + " (<= 1e-9); unprojected mean defect " +
             fmt(mean[0], 4) + " / " + fmt(mean[1], 4) + " / " + fmt(mean[2], 4) +
             " at h = 4e-3 / 2e-3 / 1e-3, ratios " + fmt(ratio1, 4) + ", " + fmt(ratio2, 4) +
             " (target [0.4, 0.6])";
  r.seconds = seconds_since(t0);
  return r;
}

CriterionResult check_radial_oracle(const VerifyOptions& o) {
  const auto t0 = Clock::now();
  CriterionResult r{3, "radial process vs 1D radial diffusion (hyperbolic)", true, "", {}, 0.0};
  for (int d : {2, 3}) {
    const EvolvingMetricModel model = EvolvingMetricModel::warped(d, 1.0, Warp::sinh(1.0));
    std::size_t invalid = 0;
    const std::vector<double> manifold = terminal_rho(
        model, model.state_point_at(1.0), 1e-3, o.paths, o.seed + 4 + d, nullptr, o.execution,
        invalid);
    const std::vector<double> oracle =
        terminal_1d(DriftSpec::radial_model(Warp::sinh(1.0), d), 1.0, 1.0, 1e-3, o.paths,
                    o.seed + 40 + d, o.execution);
    const KsResult ks = ks_two_sample(manifold, oracle);
    r.passed = r.passed && ks.p_value > 0.01 && invalid == 0;
    r.detail += (r.detail.empty() ? "" : "; ") + std::string("d=") + std::to_string(d) +
                " KS D " + fmt(ks.statistic, 3) + " p " + fmt(ks.p_value, 3);
    if (invalid) r.notes.push_back(std::to_string(invalid) + " invalid paths at d=" + std::to_string(d));
  }
  r.detail += " (p > 0.01, " + std::to_string(o.paths) + " paths each)";
  r.seconds = seconds_since(t0);
  return r;
}

std::vector<CriterionResult> check_decomposition_and_supermartingale(const VerifyOptions& o) {
  const auto t0 = Clock::now();
  CriterionResult c4{4, "radial decomposition residual and local-time estimators", true, "", {}, 0.0};
  CriterionResult c5{5, "supermartingale property of m(t)", true, "", {}, 0.0};

  // sphere backwards flow, d = 2, started on the equator
  const EvolvingMetricModel sphere = EvolvingMetricModel::sphere(2, 2.0, 1.0);
  const ComparisonProfile p = constants(sphere, 0.0);
  const std::vector<double> deltas = {p.delta1 / 2.0, p.delta1 / 4.0, p.delta1 / 8.0};
  const auto v = v_function(p);
  const Vec x0 = sphere.state_point_at(0.5 * std::numbers::pi);
  const Mat u0 = orthonormal_frame(sphere, 0.0, x0);
  struct SpherePath {
    std::vector<double> residual, deficit_residual, lt_deficit, lt_excursion, lt_down;
    std::vector<double> m;
  };
  SimulationOptions opts;
  opts.horizon = 2.0;
  opts.h = 1e-3;
  opts.seed = o.seed + 5;
  const std::size_t stride = 20;
  const auto sp = map_paths<SpherePath>(
      o.paths,
      [&](std::size_t i) {
        SimulationOptions s = opts;
        s.stream = i;
        const PathRecord rec = simulate_path(sphere, x0, u0, s);
        SpherePath out;
        DecomposeOptions d;
        d.delta1 = p.delta1;
        d.v = v;
        d.stride = stride;
        for (double delta : deltas) {
          d.delta = delta;
          const RadialDecomposition dec = decompose(rec, sphere, d);
          out.residual.push_back(dec.residual);
          out.deficit_residual.push_back(dec.deficit_residual);
          out.lt_deficit.push_back(dec.local_time.back());
          out.lt_excursion.push_back(dec.excursion_local_time);
          out.lt_down.push_back(dec.downcrossing_local_time);
        }
        out.m = supermartingale_sample(rec, v, stride);
        return out;
      },
      o.execution);

  std::vector<double> res_mean;
  MeanSe deficit_fine, down_fine;
  for (std::size_t j = 0; j < deltas.size(); ++j) {
    std::vector<double> res, dres, ld, le, ldn;
    for (const auto& s : sp) {
      res.push_back(s.residual[j]);
      dres.push_back(s.deficit_residual[j]);
      ld.push_back(s.lt_deficit[j]);
      le.push_back(s.lt_excursion[j]);
      ldn.push_back(s.lt_down[j]);
    }
    const MeanSe mr = mean_se(res), md = mean_se(dres), ml = mean_se(ld), me = mean_se(le),
                 mdn = mean_se(ldn);
    res_mean.push_back(std::abs(mr.mean));
    c4.notes.push_back("delta " + fmt(deltas[j], 4) + ": residual " + fmt(mr.mean, 4) + " +- " +
                       fmt(mr.se, 2) + ", deficit residual " + fmt(md.mean, 4) + ", L deficit " +
                       fmt(ml.mean, 4) + ", L excursion " + fmt(me.mean, 4) + ", L downcross " +
                       fmt(mdn.mean, 4));
    if (j + 1 == deltas.size()) {
      deficit_fine = ml;
      down_fine = mdn;
    }
  }
  bool monotone = true;
  for (std::size_t j = 1; j < res_mean.size(); ++j) monotone = monotone && res_mean[j] < res_mean[j - 1];
  const double gap =
      std::abs(deficit_fine.mean - down_fine.mean) / std::max(std::abs(down_fine.mean), 1e-300);
  c4.passed = monotone && gap <= 0.2;
  c4.detail = std::string("residual ") + (monotone ? "decreases" : "does not decrease") +
              " over delta_1/{2,4,8}; estimators at finest delta " + fmt(deficit_fine.mean, 4) +
              " vs " + fmt(down_fine.mean, 4) + " (relative gap " + fmt(gap, 3) + ", target 0.2)";

  std::vector<std::vector<double>> m_sphere;
  m_sphere.reserve(sp.size());
  for (const auto& s : sp) m_sphere.push_back(s.m);
  std::vector<double> times;
  for (std::size_t k = 0; k < m_sphere.front().size(); ++k)
    times.push_back(std::min(opts.horizon, static_cast<double>(k * stride) * opts.h));
  const SupermartingaleResult sm_sphere = supermartingale_check(m_sphere, times);

  // euclidean d = 3 from rho = 1: the drift equals V, so m is a martingale
  const EvolvingMetricModel flat = EvolvingMetricModel::euclidean(3, 1.0);
  const ComparisonProfile pf = constants(flat, 10.0);
  const auto vf = v_function(pf);
  const Vec y0 = flat.state_point_at(1.0);
  const Mat w0 = orthonormal_frame(flat, 0.0, y0);
  SimulationOptions fo;
  fo.horizon = 1.0;
  fo.h = 1e-3;
  fo.seed = o.seed + 6;
  const auto m_flat = map_paths<std::vector<double>>(
      o.paths,
      [&](std::size_t i) {
        SimulationOptions s = fo;
        s.stream = i;
        return supermartingale_sample(simulate_path(flat, y0, w0, s), vf, stride);
      },
      o.execution);
  std::vector<double> ftimes;
  for (std::size_t k = 0; k < m_flat.front().size(); ++k)
    ftimes.push_back(std::min(fo.horizon, static_cast<double>(k * stride) * fo.h));
  const SupermartingaleResult sm_flat = supermartingale_check(m_flat, ftimes);
  c5.passed = sm_sphere.holds && sm_flat.holds;
  c5.detail = "largest difference/se: sphere " + fmt(sm_sphere.worst_z, 3) + ", euclidean d=3 " +
              fmt(sm_flat.worst_z, 3) + " (<= 3, " + std::to_string(o.paths) + " paths)";
  c4.seconds = seconds_since(t0);
  c5.seconds = 0.0;
  return {c4, c5};
}

CriterionResult check_comparison_suite(const VerifyOptions& o) {
  const auto t0 = Clock::now();
  CriterionResult r{6, "comparison geometry suite", true, "", {}, 0.0};

  // Jacobi solver against constant-curvature closed forms
  double jac_err = 0.0;
  for (int d : {2, 3})
    for (double kappa : {1.0, -1.0, 0.25, -4.0}) {
      const double b = kappa > 0.0 ? 0.9 * std::numbers::pi / std::sqrt(kappa) : 3.0;
      const JacobiSolution j =
          solve_jacobi([kappa, d](double) { return (d - 1) * kappa; }, b, 1e-3, d);
      const double q = std::sqrt(std::abs(kappa));
      for (std::size_t k = 0; k < j.s.size(); ++k) {
        const double s = j.s[k];
        const double g = kappa > 0.0 ? std::sin(q * s) / q : std::sinh(q * s) / q;
        jac_err = std::max(jac_err, std::abs(j.g[k] - g));
      }
    }
  const bool jac_ok = jac_err <= 1e-8;

  // F' = -(d-1) (G'/G)^2 by central differences, and F decreasing, on random profiles
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::mt19937_64 gen(derive_seed(o.seed + 7, 1));
  double ident_err = 0.0;
  std::size_t decreasing = 0, profiles = 0;
  for (int n = 0; n < 100; ++n) {
    const int d = 2 + n % 3;
    const double c0 = -2.0 + 4.0 * unit(gen);
    double amp[3], om[3], ph[3];
    for (int q = 0; q < 3; ++q) {
      amp[q] = -1.0 + 2.0 * unit(gen);
      om[q] = 0.5 + 2.5 * unit(gen);
      ph[q] = 2.0 * std::numbers::pi * unit(gen);
    }
    auto ric = [=](double s) {
      double v = c0;
      for (int q = 0; q < 3; ++q) v += amp[q] * std::cos(om[q] * s + ph[q]);
      return v;
    };
    const JacobiSolution j = solve_jacobi(ric, 3.0, 1e-3, d);
    const std::vector<double> f = index_f_on_grid(j);
    bool dec = true;
    double prev = kInfinity;
    for (std::size_t k = 1; k < f.size(); ++k) {
      if (!std::isfinite(f[k])) break;
      if (f[k] >= prev) dec = false;
      prev = f[k];
    }
    ++profiles;
    if (dec) ++decreasing;
    const double limit = j.conjugate ? 0.9 * j.conjugate_at : 3.0 - 1e-3;
    for (double frac : {0.3, 0.6, 0.9}) {
      const double s = std::max(0.3, frac * limit);
      if (s + 1e-4 >= limit) continue;
      const double fd = (index_f(j, s + 1e-4) - index_f(j, s - 1e-4)) / 2e-4;
      double g = 0.0, dg = 0.0;
      jacobi_eval(j, s, g, dg);
      const double exact = -(d - 1) * (dg / g) * (dg / g);
      ident_err = std::max(ident_err, std::abs(fd - exact) / std::max(1.0, std::abs(exact)));
    }
  }
  const bool ident_ok = ident_err <= 1e-6;
  const bool dec_ok = decreasing == profiles;

  // F <= Fbar and the drift bound on the d = 2 super-Ricci catalog
  double worst_excess = -kInfinity, worst_margin = kInfinity;
  for (const CatalogModel& c : super_ricci_catalog(2)) {
    const double ex = fbar_excess(c);
    const double mg = drift_margin(c);
    worst_excess = std::max(worst_excess, ex);
    worst_margin = std::min(worst_margin, mg);
    r.notes.push_back("d=2 " + c.name + ": max(F - Fbar) " + fmt(ex, 4) + ", drift margin " +
                      fmt(mg, 4));
  }
  const bool fbar_ok = worst_excess <= 0.0;
  const bool margin_ok = worst_margin >= 0.0;

  // d = 3 for information: Fbar carries no (d-1) factor
  for (const CatalogModel& c : super_ricci_catalog(3))
    r.notes.push_back("info, d=3 " + c.name + ": max(F - Fbar) " + fmt(fbar_excess(c), 4) +
                      ", drift margin " + fmt(drift_margin(c), 4));

  r.passed = jac_ok && ident_ok && dec_ok && fbar_ok && margin_ok;
  r.detail = "Jacobi error " + fmt(jac_err, 3) + " (<= 1e-8); F' identity error " +
             fmt(ident_err, 3) + " (<= 1e-6); F decreasing on " + std::to_string(decreasing) +
             "/" + std::to_string(profiles) + " random profiles; max(F - Fbar) " +
             fmt(worst_excess, 3) + " (<= 0); drift-bound margin " + fmt(worst_margin, 3) +
             " (>= 0) on the d=2 super-Ricci catalog";
  r.seconds = seconds_since(t0);
  return r;
}

CriterionResult check_feller_catalog(const VerifyOptions& o) {
  const auto t0 = Clock::now();
  CriterionResult r{7, "Feller classification vs 1D simulation", true, "", {}, 0.0};
  const std::vector<DriftSpec> catalog = {
      DriftSpec::zero(),          DriftSpec::bessel(3),      DriftSpec::radial_model(Warp::sinh(1.0), 2),
      DriftSpec::power(1.0, 1.0), DriftSpec::power(1.0, 1.5), DriftSpec::power(1.0, 2.0)};
  std::size_t matches = 0;
  for (std::size_t k = 0; k < catalog.size(); ++k) {
    const DriftSpec& drift = catalog[k];
    const ExplosionVerdict v = feller_test(drift);
    const auto exploded = map_paths<int>(
        o.paths_1d,
        [&](std::size_t i) {
          Sim1dOptions s;
          s.y0 = 1.0;
          s.horizon = 10.0;
          s.h = 1e-3;
          s.seed = o.seed + 8 + k;
          s.stream = i;
          return simulate_1d(drift, s).exploded ? 1 : 0;
        },
        o.execution);
    double frac = 0.0;
    for (int e : exploded) frac += e;
    frac /= static_cast<double>(exploded.size());
    const Classification sim = frac >= 0.99   ? Classification::Explodes
                               : frac <= 0.01 ? Classification::DoesNotExplode
                                              : Classification::Inconclusive;
    const bool match = sim == v.classification;
    if (match) ++matches;
    r.notes.push_back(drift.name() + ": feller " + to_string(v.classification) +
                      ", simulated explosion fraction " + fmt(frac, 4));
  }
  ComparisonProfile p;  // k1 = 1; Fbar saturates at r1
  p.r1 = 2.0;
  const bool fbar_ok =
      feller_test(comparison_drift_polynomial(p, {})).classification == Classification::DoesNotExplode;
  const bool square_ok =
      feller_test(DriftSpec::power(1.0, 2.0)).classification == Classification::Explodes;
  r.passed = matches == catalog.size() && fbar_ok && square_ok;
  r.detail = std::to_string(matches) + "/" + std::to_string(catalog.size()) +
             " catalog drifts match simulation (y0 = 1, T = 10, " + std::to_string(o.paths_1d) +
             " paths); Fbar " + (fbar_ok ? "does-not-explode" : "misclassified") + "; y^2 " +
             (square_ok ? "explodes" : "misclassified");
  r.seconds = seconds_since(t0);
  return r;
}

CriterionResult check_explosion_table(const VerifyOptions& o) {
  const auto t0 = Clock::now();
  CriterionResult r{8, "non-explosion under backwards Ricci flow (homothetic hyperbolic)", true, "", {}, 0.0};
  const int d = 2;
  const double a0 = 4.0, T = 0.9 * a0 / (d - 1);
  const EvolvingMetricModel model = EvolvingMetricModel::homothetic(
      EvolvingMetricModel::warped(d, T, Warp::sinh(1.0)), ScaleCurve::linear(a0, -(d - 1.0)));
  const std::vector<double> ladder = {5.0, 10.0, 20.0};
  const Vec x0 = model.state_point_at(0.5);  // rho(0) = 1
  const Mat u0 = orthonormal_frame(model, 0.0, x0);
  SimulationOptions opts;
  opts.horizon = T;
  opts.h = 1e-3;
  opts.seed = o.seed + 9;
  opts.exit_radii = ladder;
  opts.step.blowup_radius = 200.0;
  const auto exits = map_paths<std::vector<double>>(
      o.paths,
      [&](std::size_t i) {
        SimulationOptions s = opts;
        s.stream = i;
        return simulate_path(model, x0, u0, s).exit_times;
      },
      o.execution);
  const ExplosionTable table = explosion_probability(exits, ladder, ladder, T);
  bool non_increasing = true;
  for (std::size_t k = 1; k < table.p_hat.size(); ++k)
    non_increasing = non_increasing && table.p_hat[k] <= table.p_hat[k - 1];
  const bool manifold_ok = table.ci.back().upper <= 1e-2 && non_increasing &&
                           table.verdict == ExplosionCall::NonExplosion;

  // the same pipeline on dy = d beta + y^2 dt
  const DriftSpec square = DriftSpec::power(1.0, 2.0);
  const auto exits_1d = map_paths<std::vector<double>>(
      o.paths,
      [&](std::size_t i) {
        Sim1dOptions s;
        s.y0 = 1.0;
        s.horizon = T;
        s.h = 1e-3;
        s.seed = o.seed + 10;
        s.stream = i;
        return simulate_1d(square, s, ladder).exit_times;
      },
      o.execution);
  const ExplosionTable proxy = explosion_probability(exits_1d, ladder, ladder, T);
  const bool proxy_ok = proxy.verdict == ExplosionCall::ExplosionDetected;

  r.passed = manifold_ok && proxy_ok;
  std::ostringstream os;
  os << std::setprecision(3);
  os << "manifold p_hat";
  for (std::size_t k = 0; k < ladder.size(); ++k)
    os << " R=" << ladder[k] << ":" << table.p_hat[k] << "[<=" << table.ci[k].upper << "]";
  os << " -> " << to_string(table.verdict) << "; y^2 proxy p_hat(R=20) " << proxy.p_hat.back()
     << "[>=" << proxy.ci.back().lower << "] -> " << to_string(proxy.verdict);
  r.detail = os.str();
  r.seconds = seconds_since(t0);
  return r;
}

CriterionResult check_drifted_extension(const VerifyOptions& o, bool monte_carlo) {
  const auto t0 = Clock::now();
  CriterionResult r{9, "drifted extension", true, "", {}, 0.0};

  // Euclidean algebra: Ric + b g - (nabla Z)^flat with b = 0, 1, 1 and Z = 0, x, 2x
  const EvolvingMetricModel flat = EvolvingMetricModel::euclidean(2, 1.0);
  const auto grid = space_time_grid(flat, 2.0, 4, 4);
  const Mat id = Mat::Identity(2, 2);
  struct Case {
    VectorFieldSpec z;
    double b;
    double margin;
  };
  const std::vector<Case> cases = {{VectorFieldSpec::zero(), 0.0, 0.0},
                                   {VectorFieldSpec::linear(id), 1.0, 0.0},
                                   {VectorFieldSpec::linear(2.0 * id), 1.0, -1.0}};
  bool algebra_ok = true;
  std::string margins;
  for (const Case& c : cases) {
    const double b = c.b;
    const AssumptionCheck ac = check_assumption(flat, c.z, [b](double) { return b; }, grid);
    algebra_ok = algebra_ok && std::abs(ac.margin - c.margin) <= 1e-12 &&
                 ac.holds == (c.margin >= 0.0);
    margins += (margins.empty() ? "" : ", ") + fmt(ac.margin, 6);
  }
  r.detail = "assumption margins " + margins + " (expected 0, 0, -1)";
  r.passed = algebra_ok;

  if (monte_carlo) {
    const double c = 0.5;
    const EvolvingMetricModel hyp = EvolvingMetricModel::warped(2, 1.0, Warp::sinh(1.0));
    const VectorFieldSpec z = VectorFieldSpec::radial(c);
    std::size_t invalid = 0;
    const std::vector<double> manifold = terminal_rho(hyp, hyp.state_point_at(1.0), 1e-3, o.paths,
                                                      o.seed + 11, &z, o.execution, invalid);
    const std::vector<double> oracle = terminal_1d(
        DriftSpec::shifted(DriftSpec::radial_model(Warp::sinh(1.0), 2), c), 1.0, 1.0, 1e-3,
        o.paths, o.seed + 12, o.execution);
    const KsResult ks = ks_two_sample(manifold, oracle);
    r.passed = r.passed && ks.p_value > 0.01 && invalid == 0;
    r.detail += "; Z = 0.5 grad rho on hyperbolic d=2 vs shifted 1D oracle: KS D " +
                fmt(ks.statistic, 3) + " p " + fmt(ks.p_value, 3) + " (p > 0.01)";
  }
  r.seconds = seconds_since(t0);
  return r;
}

std::vector<CriterionResult> run_suite(Suite suite, const VerifyOptions& o) {
  std::vector<CriterionResult> out;
  if (suite == Suite::Fast) {
    VerifyOptions small = o;
    small.paths = std::min<std::size_t>(o.paths, 200);
    out.push_back(check_frame_orthonormality(small));
    out.push_back(check_comparison_suite(o));
    out.push_back(check_feller_catalog(o));
    out.push_back(check_drifted_extension(o, false));
    return out;
  }
  out.push_back(check_unit_qv(o));
  out.push_back(check_frame_orthonormality(o));
  out.push_back(check_radial_oracle(o));
  for (CriterionResult& c : check_decomposition_and_supermartingale(o)) out.push_back(c);
  out.push_back(check_comparison_suite(o));
  out.push_back(check_feller_catalog(o));
  out.push_back(check_explosion_table(o));
  out.push_back(check_drifted_extension(o, true));
  return out;
}

void print_results(std::ostream& os, const std::vector<CriterionResult>& results) {
  for (const CriterionResult& r : results) {
    os << (r.passed ? "PASS" : "FAIL") << "  criterion " << r.id << ": " << r.name << " -- "
       << r.detail << " [" << std::fixed << std::setprecision(1) << r.seconds << " s]"
       << std::defaultfloat << "\n";
    for (const std::string& n : r.notes) os << "        " << n << "\n";
  }
}

}  // namespace rfbm
