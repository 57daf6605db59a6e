#pragma once

#include <string>
#include <vector>

#include "mlenv/cli/flags.hpp"
#include "mlenv/cli/registry.hpp"

namespace mlenv::cli {

/// Two-phase parse: phase 1 resolves the component selections (--method,
/// --model, --datamodule, --loss, --regularizer), phase 2 validates the
/// remainder against the selected components' flag specs. Every default is
/// recorded into the result; unknown flags, missing required flags and type
/// mismatches are errors. --from_config seeds the values from an earlier
/// run's config.json before explicit flags are applied.
RunConfig parse_cli(const std::string& command, const std::vector<std::string>& args,
                    const Registry& registry);

/// Flag reference for one command, built from the registry.
std::string help_text(const std::string& command, const Registry& registry);

/// "[0]" -> {0}. Used for --trainer_devices.
std::vector<int> parse_device_list(const std::string& text);

}  // namespace mlenv::cli
