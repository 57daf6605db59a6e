#include "mlenv/transforms/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include "mlenv/common/text.hpp"

namespace mlenv::transforms {

namespace {

std::vector<engine::Tensor> weight_tensors(const models::Model& model) {
    std::vector<engine::Tensor> out;
    for (const auto& [name, tensor] : model.named_parameters())
        if (name.ends_with(".weight")) out.push_back(tensor);
    return out;
}

}  // namespace

std::unique_ptr<models::Model> prune_magnitude(const models::Model& model, double sparsity) {
    if (!(sparsity >= 0.0 && sparsity <= 1.0)) {
        throw std::invalid_argument("prune sparsity must be in [0, 1], got " +
                                    format_double(sparsity));
    }

    auto copy = model.clone();
    auto weights = weight_tensors(*copy);

    std::size_t total = 0;
    for (const auto& w : weights) total += w.size();
    const auto to_zero =
        static_cast<std::size_t>(std::floor(sparsity * static_cast<double>(total)));
    if (to_zero == 0) return copy;

    struct Entry {
        double magnitude;
        std::size_t param;
        std::size_t flat;
    };
    std::vector<Entry> entries;
    entries.reserve(total);
    for (std::size_t p = 0; p < weights.size(); ++p) {
        auto data = weights[p].data();
        for (std::size_t i = 0; i < data.size(); ++i)
            entries.push_back({std::fabs(data[i]), p, i});
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return std::tie(a.magnitude, a.param, a.flat) < std::tie(b.magnitude, b.param, b.flat);
    });

    for (std::size_t k = 0; k < to_zero; ++k)
        weights[entries[k].param].mutable_data()[entries[k].flat] = 0.0;
    return copy;
}

Quantized quantize_affine(const engine::Tensor& x, int bits) {
    if (bits < 2 || bits > 8) {
        throw std::invalid_argument("quantize bits must be in [2, 8], got " +
                                    std::to_string(bits));
    }

    const long long qmax = (1LL << bits) - 1;
    auto data = x.data();
    double lo = 0.0, hi = 0.0;  // range always includes zero
    for (double v : data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }

    Quantized out;
    out.scale = hi == lo ? 1.0 : (hi - lo) / static_cast<double>(qmax);
    out.zero_point = std::clamp(std::llround(-lo / out.scale), 0LL, qmax);
    out.q.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        out.q[i] = std::clamp(std::llround(data[i] / out.scale) + out.zero_point, 0LL, qmax);
    return out;
}

std::vector<double> dequantize(const Quantized& q) {
    std::vector<double> out(q.q.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<double>(q.q[i] - q.zero_point) * q.scale;
    return out;
}

std::unique_ptr<models::Model> apply_eval_transforms(const models::Model& model,
                                                     const EvalTransformConfig& cfg) {
    auto copy = cfg.prune_sparsity.has_value() ? prune_magnitude(model, *cfg.prune_sparsity)
                                               : model.clone();
    if (cfg.quantize_bits.has_value()) {
        for (auto& w : weight_tensors(*copy)) {
            const auto deq = dequantize(quantize_affine(w, *cfg.quantize_bits));
            auto data = w.mutable_data();
            std::copy(deq.begin(), deq.end(), data.begin());
        }
    }
    return copy;
}

}  // namespace mlenv::transforms
