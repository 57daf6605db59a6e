#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace mlenv::engine {

/// Dimension sizes, outermost first. An empty shape is a scalar (one element).
using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string shape_str(const Shape& shape);

namespace detail {

struct TensorImpl {
    Shape shape;
    std::vector<double> data;
    bool requires_grad = false;
    std::vector<double> grad;   // empty means "no gradient recorded yet"
    std::uint64_t tape_id = 0;  // nonzero when produced by an op on that tape

    void ensure_grad() {
        if (grad.empty()) grad.assign(data.size(), 0.0);
    }
};

}  // namespace detail

/// Shared handle to a dense row-major array of doubles. Copying a Tensor
/// aliases the same storage; use deep_copy() for an independent tensor.
/// Values are fixed once constructed except through mutable_data(), which
/// exists so optimizers can update parameters between forward passes.
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor full(Shape shape, double value, bool requires_grad = false);
    static Tensor scalar(double value, bool requires_grad = false);
    static Tensor from_data(Shape shape, std::vector<double> data, bool requires_grad = false);

    bool defined() const { return impl_ != nullptr; }
    const Shape& shape() const { return impl_->shape; }
    std::size_t rank() const { return impl_->shape.size(); }
    std::size_t dim(std::size_t i) const { return impl_->shape[i]; }
    std::size_t size() const { return impl_->data.size(); }
    bool is_scalar() const { return size() == 1; }

    /// Single element of a scalar tensor; throws otherwise.
    double value() const;

    std::span<const double> data() const { return impl_->data; }
    std::span<double> mutable_data() { return impl_->data; }

    bool requires_grad() const { return impl_->requires_grad; }
    bool has_grad() const { return !impl_->grad.empty(); }
    std::span<const double> grad() const { return impl_->grad; }

    /// Adds g elementwise into this tensor's gradient, allocating zeros first
    /// if no gradient exists. Building block for custom backward rules.
    void accumulate_grad(std::span<const double> g);
    void clear_grad() const { impl_->grad.clear(); }

    /// Independent copy of shape/data/requires_grad. No lineage, no gradient.
    Tensor deep_copy() const;

    detail::TensorImpl* impl() const { return impl_.get(); }
    std::shared_ptr<detail::TensorImpl> shared_impl() const { return impl_; }

    friend bool same_storage(const Tensor& a, const Tensor& b) { return a.impl_ == b.impl_; }

private:
    explicit Tensor(std::shared_ptr<detail::TensorImpl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<detail::TensorImpl> impl_;
};

}  // namespace mlenv::engine
