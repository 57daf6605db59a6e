#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "mlenv/methods/method.hpp"
#include "mlenv/models/model.hpp"

namespace mlenv::trainer {

struct Checkpoint {
    std::uint64_t epoch = 0;
    std::vector<models::NamedParam> params;
    methods::OptimizerState optimizer;
};

/// Writes a single binary file: magic, format version, epoch counter, named
/// parameter arrays with shapes, and the optimizer state.
void save_checkpoint(const std::filesystem::path& path, const models::Model& model,
                     const methods::OptimizerState& optimizer, std::uint64_t epoch);

Checkpoint read_checkpoint(const std::filesystem::path& path);

/// Copies checkpoint parameters into the model. Parameter names and shapes
/// are validated first; a mismatch names the offending parameter.
void load_checkpoint(const std::filesystem::path& path, models::Model& model,
                     methods::OptimizerState& optimizer, std::uint64_t* epoch = nullptr);

}  // namespace mlenv::trainer
