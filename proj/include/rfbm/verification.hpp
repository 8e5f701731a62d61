#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rfbm/ensemble.hpp"

namespace rfbm {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  std::vector<std::string> notes;  // informational lines, not part of the verdict
  double seconds = 0.0;
};

enum class Suite { Fast, Full };
/// "fast" or "full"; anything else throws ConfigError.
Suite parse_suite(const std::string& name);

struct VerifyOptions {
  std::size_t paths = 10000;  // Monte Carlo ensembles
  std::size_t paths_1d = 1000;  // per-drift 1D simulations of the Feller catalog
  std::uint64_t seed = 20240601;
  Execution execution = Execution::Parallel;
};

CriterionResult check_unit_qv(const VerifyOptions& o);
CriterionResult check_frame_orthonormality(const VerifyOptions& o);
CriterionResult check_radial_oracle(const VerifyOptions& o);
/// Criteria 4 and 5 share the sphere ensemble.
std::vector<CriterionResult> check_decomposition_and_supermartingale(const VerifyOptions& o);
CriterionResult check_comparison_suite(const VerifyOptions& o);
CriterionResult check_feller_catalog(const VerifyOptions& o);
CriterionResult check_explosion_table(const VerifyOptions& o);
CriterionResult check_drifted_extension(const VerifyOptions& o, bool monte_carlo = true);

/// Fast: criteria without large ensembles (2, 6, 7 and the algebra part of 9).
/// Full: all nine at the acceptance scale.
std::vector<CriterionResult> run_suite(Suite suite, const VerifyOptions& o = {});

/// One "PASS"/"FAIL" line per criterion, notes indented below.
void print_results(std::ostream& os, const std::vector<CriterionResult>& results);

}  // namespace rfbm
