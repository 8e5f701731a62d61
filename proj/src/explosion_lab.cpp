#include "rfbm/explosion_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rfbm/rng.hpp"

namespace rfbm {

namespace {

using Gauss10 = boost::math::quadrature::gauss<double, 10>;
using Kronrod15 = boost::math::quadrature::gauss_kronrod<double, 15>;

double log_add_exp(double a, double b) {
  if (a == -kInfinity) return b;
  if (b == -kInfinity) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace

DriftSpec::DriftSpec(std::string name, Provenance provenance, std::function<double(double)> b)
    : name_(std::move(name)), provenance_(provenance), b_(std::move(b)) {}

DriftSpec DriftSpec::zero() {
  return {"zero", Provenance::Explicit, [](double) { return 0.0; }};
}

DriftSpec DriftSpec::bessel(int dim) {
  const double c = 0.5 * (dim - 1);
  return {"bessel(d=" + std::to_string(dim) + ")", Provenance::Explicit,
          [c](double y) { return c / y; }};
}

DriftSpec DriftSpec::radial_model(const Warp& warp, int dim) {
  const double c = 0.5 * (dim - 1);
  return {"radial(" + warp.describe() + ",d=" + std::to_string(dim) + ")",
          Provenance::RadialModel, [warp, c](double y) { return c * warp.log_derivative(y); }};
}

DriftSpec DriftSpec::power(double c, double p) {
  return {"power(c=" + std::to_string(c) + ",p=" + std::to_string(p) + ")", Provenance::Explicit,
          [c, p](double y) { return c * std::pow(y, p); }};
}

DriftSpec DriftSpec::shifted(const DriftSpec& base, double c) {
  return {base.name() + "+" + std::to_string(c), base.provenance(),
          [base, c](double y) { return base(y) + c; }};
}

double DriftSpec::integral(double lo, double hi) const {
  if (hi == lo) return 0.0;
  return Kronrod15::integrate(b_, lo, hi, 10, 1e-13);
}

DriftSpec comparison_drift(const ComparisonProfile& p, const std::function<double(double)>& b) {
  // cumulative integral of b on [0, 1] (uniform) and beyond (ratio 1.01 up to 1e8)
  auto grid = std::make_shared<std::vector<double>>();
  auto cum = std::make_shared<std::vector<double>>();
  for (int i = 0; i <= 256; ++i) grid->push_back(i / 256.0);
  while (grid->back() < 1e8) grid->push_back(grid->back() * 1.01);
  cum->push_back(0.0);
  for (std::size_t i = 1; i < grid->size(); ++i)
    cum->push_back(cum->back() + Gauss10::integrate(b, (*grid)[i - 1], (*grid)[i]));
  // cumulative value at the grid node below y plus a Gauss rule on the rest of
  // the cell; keeps the drift smooth, so the adaptive Feller quadrature converges
  auto primitive = [grid, cum, b](double y) {
    if (y <= 0.0) return 0.0;
    std::size_t i = y < 1.0 ? static_cast<std::size_t>(y * 256.0)
                            : 256 + static_cast<std::size_t>(std::log(y) / std::log(1.01));
    i = std::min(i, grid->size() - 1);
    while (i > 0 && (*grid)[i] > y) --i;
    while (i + 1 < grid->size() && (*grid)[i + 1] <= y) ++i;
    const double rest = y - (*grid)[i];
    return (*cum)[i] + (rest > 0.0 ? Gauss10::integrate(b, (*grid)[i], y) : 0.0);
  };
  return {"comparison(Fbar+int b)", DriftSpec::Provenance::Comparison,
          [p, primitive](double y) { return fbar(y, p) + primitive(y); }};
}

DriftSpec comparison_drift_polynomial(const ComparisonProfile& p, std::vector<double> coeffs) {
  return {"comparison(Fbar+int poly)", DriftSpec::Provenance::Comparison,
          [p, coeffs = std::move(coeffs)](double y) {
            double acc = 0.0;
            for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * y + coeffs[i] / (i + 1.0);
            return fbar(y, p) + acc * y;
          }};
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::Explodes: return "explodes";
    case Classification::DoesNotExplode: return "does-not-explode";
    case Classification::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::string to_string(ExplosionCall c) {
  switch (c) {
    case ExplosionCall::NonExplosion: return "non-explosion";
    case ExplosionCall::ExplosionDetected: return "explosion-detected";
    case ExplosionCall::Inconclusive: return "inconclusive";
  }
  return "?";
}

double feller_log_phi(const DriftSpec& drift, double y, double y_ref) {
  if (!(y > y_ref)) return -kInfinity;
  // Panels are laid out by their offset s from y, so widths far below the
  // spacing of doubles near y stay representable.
  const double span = y - y_ref;
  double s = 0.0;
  double inner = 0.0;  // int_{y-s}^{y} b
  double log_sum = -kInfinity;
  auto b_at = [&](double off) { return drift(y - off); };
  while (s < span) {
    const double bz = std::abs(b_at(s));
    double w = std::min(span - s, 0.25 * (y - s));
    if (bz > 0.0) w = std::min(w, 1.0 / bz);
    if (span - s - w < 1e-12 * span) w = span - s;
    const double lo = s, hi = s + w;
    auto integrand = [&](double off) {
      const double j = off > lo ? Gauss10::integrate(b_at, lo, off) : 0.0;
      return std::exp(-2.0 * j);
    };
    const double panel = Gauss10::integrate(integrand, lo, hi);
    if (panel > 0.0) log_sum = log_add_exp(log_sum, std::log(panel) - 2.0 * inner);
    inner += Gauss10::integrate(b_at, lo, hi);
    if (-2.0 * inner > 700.0)
      throw OverflowGuardError("feller: exp(-2 int b) overflows in log-domain accumulation",
                               y - hi);
    s = hi;
    // the rest is bounded by exp(-2 inner) (span - s) while b >= 0
    if (b_at(s) >= 0.0 && -2.0 * inner + std::log(std::max(span - s, 1e-300)) < log_sum - 45.0)
      break;
  }
  return log_sum;
}

double feller_phi(const DriftSpec& drift, double y, double y_ref) {
  return std::exp(feller_log_phi(drift, y, y_ref));
}

ExplosionVerdict feller_test(const DriftSpec& drift, const FellerOptions& opts) {
  if (!(opts.tol > 0.0)) throw ConfigError("feller_test: tol must be positive");
  if (!(opts.y_max > 16.0 * opts.y_ref))
    throw ConfigError("feller_test: Y_max must exceed 16 y_ref");
  ExplosionVerdict v;
  v.cutoff = opts.y_max;

  // outer integral in u = log y
  auto outer = [&](double u) {
    const double y = opts.y_ref * std::exp(u);
    const double lp = feller_log_phi(drift, y, opts.y_ref);
    return lp == -kInfinity ? 0.0 : std::exp(lp + std::log(y));
  };
  v.feller_value = Kronrod15::integrate(outer, 0.0, std::log(opts.y_max / opts.y_ref), 12,
                                        opts.tol);

  // local exponents p = -d log phi / d log y on the tail [Y/16, Y]
  const int n = 9;
  std::vector<double> ys, lps;
  for (int j = 0; j < n; ++j) {
    const double y = opts.y_max * std::pow(16.0, static_cast<double>(j) / (n - 1) - 1.0);
    ys.push_back(y);
    lps.push_back(feller_log_phi(drift, y, opts.y_ref));
  }
  double p_max = -kInfinity, p_min = kInfinity;
  for (int j = 0; j + 1 < n; ++j) {
    const double p = -(lps[j + 1] - lps[j]) / (std::log(ys[j + 1]) - std::log(ys[j]));
    p_max = std::max(p_max, p);
    p_min = std::min(p_min, p);
  }
  v.tail_exponent = p_max;
  v.tail_exponent_min = p_min;

  if (p_max <= opts.diverge_exponent) {
    double c = kInfinity;
    for (int j = 0; j < n; ++j) c = std::min(c, ys[j] * std::exp(lps[j]));
    v.growth_lower_bound = c;
    v.classification = c > 0.0 ? Classification::DoesNotExplode : Classification::Inconclusive;
  } else if (p_min >= opts.converge_exponent) {
    v.tail_majorant = 2.0 * std::exp(lps.back()) * ys.back() / (p_min - 1.0);
    v.classification = Classification::Explodes;
  }
  return v;
}

namespace {

class OneDimIntegrator {
 public:
  OneDimIntegrator(const DriftSpec& drift, RandomStream& bridge) : drift_(drift), bridge_(bridge) {}

  // Euler-Maruyama step; a non-positive result is re-done on Brownian-bridge halves.
  double advance(double y, double h, double dw, int depth = 0) {
    const double next = y + drift_(y) * h + dw;
    if (next > 0.0 || !std::isfinite(next)) return next;
    if (depth >= 8) return 0.5 * y;
    const double first = 0.5 * dw + bridge_.normal() * std::sqrt(0.25 * h);
    const double mid = advance(y, 0.5 * h, first, depth + 1);
    return advance(mid, 0.5 * h, dw - first, depth + 1);
  }

 private:
  const DriftSpec& drift_;
  RandomStream& bridge_;
};

}  // namespace

Sim1dResult simulate_1d(const DriftSpec& drift, const Sim1dOptions& opts,
                        const std::vector<double>& levels) {
  if (!(opts.y0 > 0.0)) throw ConfigError("simulate_1d: y0 must be positive");
  if (!(opts.h > 0.0) || !(opts.horizon > 0.0)) throw ConfigError("simulate_1d: need h, T > 0");
  RandomStream rng(opts.seed, opts.stream);
  RandomStream bridge(derive_seed(opts.seed, opts.stream), 0x6272696467650001ULL);
  OneDimIntegrator integ(drift, bridge);

  Sim1dResult out;
  out.exit_times.assign(levels.size(), kInfinity);
  const auto steps = static_cast<std::size_t>(std::ceil(opts.horizon / opts.h - 1e-9));
  const double sqh = std::sqrt(opts.h);
  const std::size_t keep = static_cast<std::size_t>(std::max(1, opts.refine_steps));
  std::vector<std::pair<double, double>> history;  // (y before step, dW) ring
  history.reserve(keep);
  std::size_t head = 0;

  double y = opts.y0;
  if (opts.record_path) out.path.push_back(y);
  auto mark_levels = [&](double value, double t) {
    for (std::size_t i = 0; i < levels.size(); ++i)
      if (!std::isfinite(out.exit_times[i]) && value >= levels[i]) out.exit_times[i] = t;
  };
  mark_levels(y, 0.0);

  for (std::size_t k = 0; k < steps; ++k) {
    const double t = opts.h * static_cast<double>(k);
    const double dw = rng.normal() * sqh;
    const double next = integ.advance(y, opts.h, dw);

    if (history.size() < keep) {
      history.emplace_back(y, dw);
    } else {
      history[head] = {y, dw};
      head = (head + 1) % keep;
    }

    if (!std::isfinite(next) || next >= opts.y_max) {
      // confirm over the last steps at h/4 with bridge-refined increments
      const std::size_t m = history.size();
      const std::size_t first = history.size() < keep ? 0 : head;
      double yr = history[first].first;
      double tr = t - opts.h * static_cast<double>(m - 1);
      bool confirmed = false;
      for (std::size_t i = 0; i < m && !confirmed; ++i) {
        const double w = history[(first + i) % m].second;
        const double half = 0.5 * w + bridge.normal() * std::sqrt(0.25 * opts.h);
        const double parts[2] = {half, w - half};
        for (double part : parts) {
          const double q = 0.5 * part + bridge.normal() * std::sqrt(0.125 * opts.h);
          for (double piece : {q, part - q}) {
            yr = integ.advance(yr, 0.25 * opts.h, piece);
            tr += 0.25 * opts.h;
            if (!std::isfinite(yr) || yr >= opts.y_max) {
              confirmed = true;
              break;
            }
          }
          if (confirmed) break;
        }
      }
      if (confirmed) {
        out.exploded = true;
        out.explosion_time = tr;
        for (std::size_t i = 0; i < levels.size(); ++i)
          if (!std::isfinite(out.exit_times[i])) out.exit_times[i] = tr;
        out.y_final = opts.y_max;
        if (opts.record_path) out.path.push_back(opts.y_max);
        return out;
      }
      ++out.unconfirmed_crossings;
      y = yr;
    } else {
      y = next;
    }
    mark_levels(y, t + opts.h);
    if (opts.record_path) out.path.push_back(y);
  }
  out.y_final = y;
  return out;
}

ExplosionTable explosion_probability(const std::vector<std::vector<double>>& exit_times,
                                     const std::vector<double>& configured,
                                     const std::vector<double>& ladder, double horizon,
                                     const ExplosionCriteria& crit) {
  if (ladder.empty()) throw ConfigError("explosion_probability: empty radius ladder");
  ExplosionTable tab;
  tab.radii = ladder;
  tab.paths = exit_times.size();
  for (double r : ladder) {
    std::size_t idx = configured.size();
    for (std::size_t i = 0; i < configured.size(); ++i)
      if (std::abs(configured[i] - r) <= 1e-12 * std::max(1.0, std::abs(r))) idx = i;
    if (idx == configured.size())
      throw ConfigError("explosion_probability: radius " + std::to_string(r) +
                        " was not configured in the simulation stop rules");
    std::size_t count = 0;
    for (const auto& e : exit_times)
      if (idx < e.size() && e[idx] <= horizon) ++count;
    tab.exits.push_back(count);
    tab.p_hat.push_back(tab.paths ? static_cast<double>(count) / tab.paths : 0.0);
    tab.ci.push_back(wilson_interval(count, tab.paths, crit.confidence));
  }
  bool non_increasing = true;
  for (std::size_t i = 0; i + 1 < tab.p_hat.size(); ++i)
    if (tab.p_hat[i + 1] > tab.p_hat[i]) non_increasing = false;
  if (tab.ci.back().upper <= crit.threshold && non_increasing)
    tab.verdict = ExplosionCall::NonExplosion;
  else if (tab.ci.back().lower > crit.detect)
    tab.verdict = ExplosionCall::ExplosionDetected;
  return tab;
}

double quantile_excess(std::vector<double> x, std::vector<double> y,
                       const std::vector<double>& probs) {
  if (x.empty() || y.empty()) throw Error("quantile_excess: empty sample");
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
  double worst = -kInfinity;
  for (double p : probs) {
    const auto i = std::min(x.size() - 1, static_cast<std::size_t>(p * n));
    const double qx = x[i];
    const double fy = static_cast<double>(std::upper_bound(y.begin(), y.end(), qx) - y.begin()) / m;
    const double se = std::sqrt(p * (1.0 - p) * (1.0 / n + 1.0 / m));
    worst = std::max(worst, (fy - p) / se);
  }
  return worst;
}

}  // namespace rfbm
