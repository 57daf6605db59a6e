#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "mlenv/engine/tensor.hpp"
#include "mlenv/models/model.hpp"

namespace mlenv::transforms {

/// Evaluation-time model edits. When both are set, pruning runs first.
struct EvalTransformConfig {
    std::optional<double> prune_sparsity;  // fraction of weights to zero, in [0, 1]
    std::optional<int> quantize_bits;      // integer grid width, in [2, 8]

    bool enabled() const { return prune_sparsity.has_value() || quantize_bits.has_value(); }
};

/// Copy of the model with the floor(sparsity * N) smallest-magnitude entries
/// across all weight tensors set to zero. Biases are exempt. Magnitude ties
/// are broken by parameter order, then flat index.
std::unique_ptr<models::Model> prune_magnitude(const models::Model& model, double sparsity);

struct Quantized {
    std::vector<long long> q;
    double scale = 1.0;
    long long zero_point = 0;
};

/// Asymmetric affine quantization over [min, max] widened to include zero:
/// scale = (max-min)/(2^bits - 1), q = clamp(round(x/scale) + zero_point).
Quantized quantize_affine(const engine::Tensor& x, int bits);
std::vector<double> dequantize(const Quantized& q);

/// Clone with pruning and/or simulated quantization (quantize-dequantize of
/// each weight tensor) applied; the input model is never touched.
std::unique_ptr<models::Model> apply_eval_transforms(const models::Model& model,
                                                     const EvalTransformConfig& cfg);

}  // namespace mlenv::transforms
