#pragma once

#include <string>
#include <vector>

#include "mlenv/engine/tensor.hpp"

namespace mlenv::engine {

enum class EwOp { add, sub, mul };
enum class Activation { relu, tanh, sigmoid, identity };
enum class Reduce { sum, mean };

Activation activation_from_name(const std::string& name);
std::string activation_name(Activation act);

/// out[i,j] = sum_k a[i,k] * b[k,j]; both inputs rank 2 with matching inner dim.
Tensor matmul(const Tensor& a, const Tensor& b);

/// Elementwise op on same-shape tensors; either side may instead be a scalar,
/// which broadcasts against every element of the other.
Tensor ew_binary(EwOp op, const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor mul_scalar(const Tensor& a, double s);

/// out[i,j] = x[i,j] + bias[j]; x rank 2, bias rank 1 of matching width.
Tensor add_bias(const Tensor& x, const Tensor& bias);

Tensor activation(Activation act, const Tensor& x);
Tensor relu(const Tensor& x);
Tensor tanh_act(const Tensor& x);
Tensor sigmoid(const Tensor& x);

/// Row-wise softmax of a rank-2 tensor, computed with max subtraction.
Tensor softmax(const Tensor& x);

/// Reduces every element to one scalar.
Tensor reduce(Reduce kind, const Tensor& x);
Tensor reduce_sum(const Tensor& x);
Tensor reduce_mean(const Tensor& x);

/// |x| elementwise; the derivative at 0 is taken as 0.
Tensor absolute(const Tensor& x);

/// Mean negative log softmax probability of the target class. logits is
/// [batch, classes]; targets is a rank-1 tensor of integral class indices.
/// Fusing the chain keeps the backward pass exact: d(logits) = softmax - onehot.
Tensor cross_entropy_from_logits(const Tensor& logits, const Tensor& targets);

void zero_grad(const std::vector<Tensor>& tensors);

}  // namespace mlenv::engine
