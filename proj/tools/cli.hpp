#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "qlab/report.hpp"

namespace qlab::cli {

/// Bad usage or malformed configuration; mapped to exit code 2.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Lemma verification suites. Known ids: binom, tracenorm, zerosplit,
/// zerosplit2, typeident, keylemma, hybrid. Throws ConfigError on unknown
/// ids or bad parameters.
Report run_verify(const std::string& lemma_id, const nlohmann::json& params);

/// Experiment runner. The config object carries: experiment (id), n, params
/// (object), trials, seed, and optionally distinguishers (array of names).
/// Known experiments: indiff, reflect, locc-states, locc-indiff, owsg-attack,
/// barrier-clone, barrier-phase, ke. Unknown keys are rejected.
Report run_experiment(const nlohmann::json& config);

/// Cartesian sweep: config carries experiment/base/grid/trials/seed; cells
/// run under `workers` threads with per-cell seeds derived from (seed, cell
/// index). Infeasible cells are reported as skipped rows.
Report run_sweep(const nlohmann::json& config, int workers);

/// Full command-line entry point. Exit code 0 = all rows pass, 1 =
/// verification or bound failure, 2 = usage/config error.
int run_cli(int argc, const char* const* argv);

}  // namespace qlab::cli
