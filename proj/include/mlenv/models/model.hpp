#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mlenv/common/rng.hpp"
#include "mlenv/engine/ops.hpp"
#include "mlenv/engine/tensor.hpp"

namespace mlenv::models {

struct Layer {
    engine::Tensor weight;  // [in, out]
    engine::Tensor bias;    // [out]
};

/// Glorot-uniform weight, zero bias; both marked as requiring gradients.
Layer make_layer(std::size_t in_dim, std::size_t out_dim, Rng& rng);

struct NamedParam {
    std::string name;
    engine::Tensor tensor;
};

/// Architecture plus forward pass. Input and output layers can be swapped out
/// so a method can retarget a trained trunk to new data dimensions.
class Model {
public:
    virtual ~Model() = default;

    const std::string& name() const { return name_; }
    virtual std::size_t input_dim() const = 0;
    virtual std::size_t output_dim() const = 0;

    /// [B, input_dim] -> [B, output_dim] logits (no softmax inside the model).
    virtual engine::Tensor forward(const engine::Tensor& inputs) const = 0;

    /// Deterministic order: input layer first, output layer last, weight
    /// before bias within a layer. Names follow `layer<i>.weight|bias`.
    virtual std::vector<engine::Tensor> parameters() const = 0;
    virtual std::vector<NamedParam> named_parameters() const = 0;

    /// Rebuilds the boundary layer with a fresh seeded init; every other
    /// layer keeps its exact tensors.
    virtual void replace_input_layer(std::size_t new_in_dim) = 0;
    virtual void replace_output_layer(std::size_t new_out_dim) = 0;

    virtual std::unique_ptr<Model> clone() const = 0;

protected:
    explicit Model(std::string name) : name_(std::move(name)) {}

private:
    std::string name_;
};

std::size_t parameter_count(const Model& model);

/// Multi-layer perceptron: input layer (input_dim -> hidden_dim), depth-1
/// hidden layers (hidden_dim -> hidden_dim), output layer (hidden_dim ->
/// output_dim), with the activation after every layer except the output.
class FcModel final : public Model {
public:
    FcModel(std::size_t input_dim, std::size_t output_dim, std::size_t hidden_dim,
            std::size_t depth, engine::Activation activation, std::uint64_t seed);

    std::size_t input_dim() const override { return layers_.front().weight.dim(0); }
    std::size_t output_dim() const override { return layers_.back().weight.dim(1); }
    std::size_t depth() const { return layers_.size() - 1; }
    engine::Activation activation() const { return activation_; }

    engine::Tensor forward(const engine::Tensor& inputs) const override;
    std::vector<engine::Tensor> parameters() const override;
    std::vector<NamedParam> named_parameters() const override;
    void replace_input_layer(std::size_t new_in_dim) override;
    void replace_output_layer(std::size_t new_out_dim) override;
    std::unique_ptr<Model> clone() const override;

private:
    FcModel(std::vector<Layer> layers, engine::Activation activation, std::uint64_t seed,
            std::uint64_t replacements);

    std::vector<Layer> layers_;
    engine::Activation activation_;
    std::uint64_t seed_;
    std::uint64_t replacements_ = 0;
};

std::unique_ptr<FcModel> build_fc(std::size_t input_dim, std::size_t output_dim,
                                  std::size_t hidden_dim, std::size_t depth,
                                  engine::Activation activation, std::uint64_t seed);

}  // namespace mlenv::models
