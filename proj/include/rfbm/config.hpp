#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rfbm/drift_extension.hpp"
#include "rfbm/manifold_models.hpp"

namespace rfbm {

enum class Analysis {
  Qv,
  DriftCheck,
  Supermartingale,
  LocalTime,
  Explosion,
  Feller,
  AssumptionCheck,
  Constants,
};

std::string to_string(Analysis a);
Analysis parse_analysis(const std::string& name);

struct ModelConfig {
  std::string kind = "euclidean";  // euclidean | sphere | hyperbolic | warped | homothetic
  int dim = 2;
  double r0 = 1.0;                 // sphere radius at t = 0
  std::string warp = "sinh";       // warped / homothetic base
  double k = 1.0;
  double c = 0.0;                  // gauss_exp parameter
  std::vector<double> coeffs;      // polynomial warp
  std::string base = "hyperbolic"; // homothetic base: euclidean | hyperbolic | warped
  std::string scale = "linear";    // constant | linear | exponential
  double a0 = 1.0;
  double rate = 0.0;
  double window = 0.0;             // base radius R_w of the comparison window (noncompact)
};

struct RunConfig {
  double horizon = 1.0;
  double h = 1e-3;
  std::size_t paths = 1000;
  std::uint64_t seed = 42;
  double start_radius = -1.0;      // base radius of X_0; < 0 picks the model default
  std::vector<double> radii;       // explosion ladder, in rho
  std::vector<double> deltas;      // empty: delta_1 / {2, 4, 8}
  double eps_hit = 0.0;            // 0: 2 sqrt(h d)
  std::size_t stride = 10;         // series sampling stride for CSVs
  std::string scheme = "euler_heun";
  bool project = true;
};

struct DriftConfig {
  std::string kind = "zero";       // zero | radial | linear | rho_power
  double c = 0.0;
  double p = 1.0;
  std::vector<double> matrix;      // row-major d x d for kind = linear
  std::vector<double> b;           // polynomial coefficients of b(s) (assumption, feller)
};

struct ExperimentConfig {
  std::string scenario = "unnamed";
  ModelConfig model;
  RunConfig run;
  DriftConfig drift;
  std::vector<Analysis> analyses;
  std::string output = "out";
  std::string source;              // canonical text, hashed into the report

  bool wants(Analysis a) const;
};

/// Parses the key-value format with nested `name { ... }` blocks. Unknown keys,
/// malformed values and incompatible analyses throw ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Checks parameter ranges and model/analysis compatibility (throws ConfigError).
void validate(const ExperimentConfig& cfg);

EvolvingMetricModel build_model(const ExperimentConfig& cfg);
VectorFieldSpec build_drift(const ExperimentConfig& cfg);
/// X_0 in state coordinates.
Vec start_point(const ExperimentConfig& cfg, const EvolvingMetricModel& model);

/// 64-bit FNV-1a of a string, printed as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

}  // namespace rfbm
