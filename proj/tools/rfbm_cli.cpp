#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rfbm/comparison.hpp"
#include "rfbm/config.hpp"
#include "rfbm/ensemble.hpp"
#include "rfbm/experiment.hpp"
#include "rfbm/explosion_lab.hpp"
#include "rfbm/verification.hpp"

namespace {

rfbm::DriftSpec named_drift(const std::string& name, int dim, double c, double p, double k,
                            double k1, double r1, const std::vector<double>& b) {
  using rfbm::DriftSpec;
  if (name == "zero") return DriftSpec::zero();
  if (name == "bessel") return DriftSpec::bessel(dim);
  if (name == "coth") return DriftSpec::radial_model(rfbm::Warp::sinh(k), dim);
  if (name == "cot") return DriftSpec::radial_model(rfbm::Warp::sin(k), dim);
  if (name == "power") return DriftSpec::power(c, p);
  if (name == "comparison") {
    rfbm::ComparisonProfile prof;
    prof.dim = dim;
    prof.k1 = k1;
    prof.r1 = r1;
    return rfbm::comparison_drift_polynomial(prof, b);
  }
  throw rfbm::ConfigError("unknown drift '" + name +
                          "' (zero, bessel, coth, cot, power, comparison)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Brownian motion under evolving metrics: experiments and checks"};
  app.require_subcommand(1);
  int workers = 0;
  app.add_option("--workers", workers, "worker threads (overrides RFBM_WORKERS)");

  std::string config_path;
  auto* run = app.add_subcommand("run", "run the analyses of a config file");
  run->add_option("config", config_path, "config file")->required();

  std::string suite = "fast";
  std::size_t paths = 10000;
  auto* verify = app.add_subcommand("verify", "run the acceptance bundle (fast | full)");
  verify->add_option("suite", suite, "fast or full")->required();
  verify->add_option("--paths", paths, "Monte Carlo paths per ensemble");

  std::string drift_name;
  int dim = 3;
  double c = 1.0, p = 1.0, k = 1.0, k1 = 1.0, r1 = 1.0, y_max = 1e6;
  std::vector<double> b;
  auto* feller = app.add_subcommand("feller", "Feller test of a named 1D drift");
  feller->add_option("--drift", drift_name, "zero | bessel | coth | cot | power | comparison")
      ->required();
  feller->add_option("--dim", dim, "dimension (bessel, coth, cot)");
  feller->add_option("--c", c, "coefficient (power)");
  feller->add_option("--p", p, "exponent (power)");
  feller->add_option("--k", k, "curvature scale (coth, cot)");
  feller->add_option("--k1", k1, "k_1 (comparison)");
  feller->add_option("--r1", r1, "r_1 (comparison)");
  feller->add_option("--b", b, "polynomial coefficients of b(s) (comparison)")->delimiter(',');
  feller->add_option("--y-max", y_max, "cutoff Y_max");

  auto* consts = app.add_subcommand("constants", "print the comparison profile of a config");
  consts->add_option("config", config_path, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : rfbm::kExitValidation;
  }
  if (workers > 0) rfbm::set_worker_count(workers);

  try {
    if (*run) return rfbm::run_config_file(config_path, std::cerr);

    if (*verify) {
      rfbm::Suite s;
      try {
        s = rfbm::parse_suite(suite);
      } catch (const rfbm::ConfigError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return rfbm::kExitValidation;
      }
      rfbm::VerifyOptions opts;
      opts.paths = paths;
      const auto results = rfbm::run_suite(s, opts);
      rfbm::print_results(std::cout, results);
      bool all = true;
      for (const auto& r : results) all = all && r.passed;
      std::cout << (all ? "all criteria passed" : "some criteria failed") << "\n";
      return all ? 0 : 1;
    }

    if (*feller) {
      const rfbm::DriftSpec drift = named_drift(drift_name, dim, c, p, k, k1, r1, b);
      rfbm::FellerOptions opts;
      opts.y_max = y_max;
      const rfbm::ExplosionVerdict v = rfbm::feller_test(drift, opts);
      std::cout.precision(17);
      std::cout << "drift = " << drift.name() << "\n"
                << "classification = " << rfbm::to_string(v.classification) << "\n"
                << "feller_value = " << v.feller_value << "\n"
                << "cutoff = " << v.cutoff << "\n"
                << "tail_exponent = " << v.tail_exponent_min << " .. " << v.tail_exponent << "\n";
      return 0;
    }

    if (*consts) {
      rfbm::print_constants(rfbm::load_config(config_path), std::cout);
      return 0;
    }
  } catch (const rfbm::ConfigError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return rfbm::kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
