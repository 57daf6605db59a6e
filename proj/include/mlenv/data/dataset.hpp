#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mlenv/engine/tensor.hpp"

namespace mlenv::data {

enum class TaskKind { classification, regression };

/// Flat row-major sample storage. For classification each target is one class
/// index stored as a double; for regression each target is target_dim values.
struct Dataset {
    TaskKind task = TaskKind::classification;
    std::size_t input_dim = 0;
    std::size_t target_dim = 1;
    std::vector<double> inputs;
    std::vector<double> targets;

    std::size_t size() const { return input_dim == 0 ? 0 : inputs.size() / input_dim; }
};

struct Batch {
    engine::Tensor inputs;   // [B, input_dim]
    engine::Tensor targets;  // [B] class indices, or [B, target_dim] for regression
    std::size_t size() const { return inputs.dim(0); }
};

/// Gathers the given sample rows into tensors.
Batch make_batch(const Dataset& ds, std::span<const std::size_t> indices);

/// Fixed assignment of sample indices to batches for one epoch. Every index
/// in [0, count) appears exactly once; the last batch may be short.
class BatchPlan {
public:
    BatchPlan(std::size_t count, std::size_t batch_size, bool shuffle, std::uint64_t seed);

    std::size_t num_batches() const;
    std::size_t batch_size() const { return batch_size_; }
    std::span<const std::size_t> batch(std::size_t k) const;
    const std::vector<std::size_t>& order() const { return order_; }

private:
    std::vector<std::size_t> order_;
    std::size_t batch_size_;
};

}  // namespace mlenv::data
