#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rfbm/config.hpp"
#include "rfbm/ensemble.hpp"

namespace rfbm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitContract = 3;

struct RunOutcome {
  int exit_code = kExitOk;
  std::string run_hash;
  std::vector<std::string> violations;  // analysis contract violations
  std::vector<std::string> files;       // artifacts written, relative to the output dir
};

/// Runs every requested analysis and writes report.txt, one CSV per analysis
/// and plotdata/*.csv under cfg.output. Artifacts do not depend on the worker count.
RunOutcome run_experiment(const ExperimentConfig& cfg, Execution ex = Execution::Parallel);

/// Loads, validates and runs a config file; validation errors give exit code 2.
int run_config_file(const std::string& path, std::ostream& log);

/// Writes the comparison profile of the configured model.
void print_constants(const ExperimentConfig& cfg, std::ostream& os);

}  // namespace rfbm
