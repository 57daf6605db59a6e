#include "mlenv/engine/tensor.hpp"

#include <sstream>
#include <stdexcept>

namespace mlenv::engine {

std::size_t numel(const Shape& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
}

std::string shape_str(const Shape& shape) {
    std::ostringstream out;
    out << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) out << ", ";
        out << shape[i];
    }
    out << ']';
    return out.str();
}

namespace {

void check_dims(const Shape& shape) {
    for (std::size_t d : shape) {
        if (d == 0) {
            throw std::invalid_argument("tensor shape " + shape_str(shape) +
                                        " has a zero dimension; all dimensions must be positive");
        }
    }
}

}  // namespace

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
    return full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
    check_dims(shape);
    auto impl = std::make_shared<detail::TensorImpl>();
    impl->data.assign(numel(shape), value);
    impl->shape = std::move(shape);
    impl->requires_grad = requires_grad;
    return Tensor(std::move(impl));
}

Tensor Tensor::scalar(double value, bool requires_grad) {
    return full({}, value, requires_grad);
}

Tensor Tensor::from_data(Shape shape, std::vector<double> data, bool requires_grad) {
    check_dims(shape);
    if (data.size() != numel(shape)) {
        throw std::invalid_argument("tensor shape " + shape_str(shape) + " needs " +
                                    std::to_string(numel(shape)) + " values, got " +
                                    std::to_string(data.size()));
    }
    auto impl = std::make_shared<detail::TensorImpl>();
    impl->shape = std::move(shape);
    impl->data = std::move(data);
    impl->requires_grad = requires_grad;
    return Tensor(std::move(impl));
}

double Tensor::value() const {
    if (!is_scalar()) {
        throw std::logic_error("value() called on tensor of shape " + shape_str(shape()) +
                               "; only single-element tensors have a value");
    }
    return impl_->data[0];
}

void Tensor::accumulate_grad(std::span<const double> g) {
    if (g.size() != impl_->data.size()) {
        throw std::logic_error("gradient size " + std::to_string(g.size()) +
                               " does not match tensor of shape " + shape_str(shape()));
    }
    impl_->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) impl_->grad[i] += g[i];
}

Tensor Tensor::deep_copy() const {
    auto impl = std::make_shared<detail::TensorImpl>();
    impl->shape = impl_->shape;
    impl->data = impl_->data;
    impl->requires_grad = impl_->requires_grad;
    return Tensor(std::move(impl));
}

}  // namespace mlenv::engine
