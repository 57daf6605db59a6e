#include "mlenv/data/dataset.hpp"

#include <stdexcept>

#include "mlenv/common/rng.hpp"

namespace mlenv::data {

Batch make_batch(const Dataset& ds, std::span<const std::size_t> indices) {
    const std::size_t b = indices.size();
    if (b == 0) throw std::invalid_argument("make_batch: empty index list");

    std::vector<double> in(b * ds.input_dim);
    for (std::size_t r = 0; r < b; ++r) {
        const double* src = &ds.inputs[indices[r] * ds.input_dim];
        std::copy(src, src + ds.input_dim, &in[r * ds.input_dim]);
    }

    Batch batch;
    batch.inputs = engine::Tensor::from_data({b, ds.input_dim}, std::move(in));
    if (ds.task == TaskKind::classification) {
        std::vector<double> t(b);
        for (std::size_t r = 0; r < b; ++r) t[r] = ds.targets[indices[r]];
        batch.targets = engine::Tensor::from_data({b}, std::move(t));
    } else {
        std::vector<double> t(b * ds.target_dim);
        for (std::size_t r = 0; r < b; ++r) {
            const double* src = &ds.targets[indices[r] * ds.target_dim];
            std::copy(src, src + ds.target_dim, &t[r * ds.target_dim]);
        }
        batch.targets = engine::Tensor::from_data({b, ds.target_dim}, std::move(t));
    }
    return batch;
}

BatchPlan::BatchPlan(std::size_t count, std::size_t batch_size, bool shuffle, std::uint64_t seed)
    : batch_size_(batch_size) {
    if (batch_size == 0) throw std::invalid_argument("batch size must be at least 1");
    if (shuffle) {
        order_ = Rng(seed).permutation(count);
    } else {
        order_.resize(count);
        for (std::size_t i = 0; i < count; ++i) order_[i] = i;
    }
}

std::size_t BatchPlan::num_batches() const {
    return (order_.size() + batch_size_ - 1) / batch_size_;
}

std::span<const std::size_t> BatchPlan::batch(std::size_t k) const {
    if (k >= num_batches()) {
        throw std::out_of_range("batch index " + std::to_string(k) + " out of range, plan has " +
                                std::to_string(num_batches()) + " batches");
    }
    const std::size_t begin = k * batch_size_;
    const std::size_t len = std::min(batch_size_, order_.size() - begin);
    return {order_.data() + begin, len};
}

}  // namespace mlenv::data
