#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mlenv/cli/flags.hpp"
#include "mlenv/cli/registry.hpp"

namespace mlenv::cli {

/// train: build the configured components, fit, score the test split, and
/// persist config.json, metrics.csv, checkpoint, log.txt (and plots.svg when
/// flagged) into a fresh run directory.
int cmd_train(const RunConfig& cfg, const Registry& registry, std::ostream& out,
              std::ostream& err);

/// test: rebuild the components, load the checkpoint from --load_path, score
/// the test split and persist the record into a fresh run directory.
int cmd_test(const RunConfig& cfg, const Registry& registry, std::ostream& out,
             std::ostream& err);

/// tune: run the search space from --config_file, one full training run per
/// trial, and report the best trial plus the leaderboard location.
int cmd_tune(const RunConfig& cfg, const Registry& registry, std::ostream& out,
             std::ostream& err);

/// Parses and dispatches; returns the process exit status.
int run_command(const std::string& command, const std::vector<std::string>& args,
                const Registry& registry, std::ostream& out, std::ostream& err);

}  // namespace mlenv::cli
