#include "mlenv/models/model.hpp"

#include <cmath>
#include <stdexcept>

namespace mlenv::models {

namespace {

constexpr std::uint64_t kInitStream = 0x696e6974;
constexpr std::uint64_t kReplaceStream = 0x7265706c;

}  // namespace

Layer make_layer(std::size_t in_dim, std::size_t out_dim, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(in_dim + out_dim));
    std::vector<double> w(in_dim * out_dim);
    for (auto& v : w) v = rng.uniform(-limit, limit);
    Layer layer;
    layer.weight = engine::Tensor::from_data({in_dim, out_dim}, std::move(w), true);
    layer.bias = engine::Tensor::zeros({out_dim}, true);
    return layer;
}

std::size_t parameter_count(const Model& model) {
    std::size_t n = 0;
    for (const auto& p : model.parameters()) n += p.size();
    return n;
}

FcModel::FcModel(std::size_t input_dim, std::size_t output_dim, std::size_t hidden_dim,
                 std::size_t depth, engine::Activation activation, std::uint64_t seed)
    : Model("fc"), activation_(activation), seed_(seed) {
    if (input_dim == 0 || output_dim == 0 || hidden_dim == 0) {
        throw std::invalid_argument("fc model dimensions must all be at least 1 (input " +
                                    std::to_string(input_dim) + ", hidden " +
                                    std::to_string(hidden_dim) + ", output " +
                                    std::to_string(output_dim) + ")");
    }
    if (depth == 0) throw std::invalid_argument("fc model depth must be at least 1");

    Rng rng(mix_seed(seed, kInitStream));
    layers_.push_back(make_layer(input_dim, hidden_dim, rng));
    for (std::size_t i = 1; i < depth; ++i) layers_.push_back(make_layer(hidden_dim, hidden_dim, rng));
    layers_.push_back(make_layer(hidden_dim, output_dim, rng));
}

FcModel::FcModel(std::vector<Layer> layers, engine::Activation activation, std::uint64_t seed,
                 std::uint64_t replacements)
    : Model("fc"),
      layers_(std::move(layers)),
      activation_(activation),
      seed_(seed),
      replacements_(replacements) {}

engine::Tensor FcModel::forward(const engine::Tensor& inputs) const {
    if (inputs.rank() != 2 || inputs.dim(1) != input_dim()) {
        throw std::invalid_argument("fc forward expects inputs [B, " +
                                    std::to_string(input_dim()) + "], got " +
                                    engine::shape_str(inputs.shape()));
    }
    engine::Tensor h = inputs;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        h = engine::add_bias(engine::matmul(h, layers_[i].weight), layers_[i].bias);
        if (i + 1 < layers_.size()) h = engine::activation(activation_, h);
    }
    return h;
}

std::vector<engine::Tensor> FcModel::parameters() const {
    std::vector<engine::Tensor> out;
    out.reserve(2 * layers_.size());
    for (const auto& layer : layers_) {
        out.push_back(layer.weight);
        out.push_back(layer.bias);
    }
    return out;
}

std::vector<NamedParam> FcModel::named_parameters() const {
    std::vector<NamedParam> out;
    out.reserve(2 * layers_.size());
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const std::string base = "layer" + std::to_string(i);
        out.push_back({base + ".weight", layers_[i].weight});
        out.push_back({base + ".bias", layers_[i].bias});
    }
    return out;
}

void FcModel::replace_input_layer(std::size_t new_in_dim) {
    if (new_in_dim == 0) throw std::invalid_argument("input dimension must be at least 1");
    Rng rng(mix_seed(seed_, kReplaceStream, ++replacements_));
    layers_.front() = make_layer(new_in_dim, layers_.front().weight.dim(1), rng);
}

void FcModel::replace_output_layer(std::size_t new_out_dim) {
    if (new_out_dim == 0) throw std::invalid_argument("output dimension must be at least 1");
    Rng rng(mix_seed(seed_, kReplaceStream, ++replacements_));
    layers_.back() = make_layer(layers_.back().weight.dim(0), new_out_dim, rng);
}

std::unique_ptr<Model> FcModel::clone() const {
    std::vector<Layer> copy;
    copy.reserve(layers_.size());
    for (const auto& layer : layers_)
        copy.push_back({layer.weight.deep_copy(), layer.bias.deep_copy()});
    return std::unique_ptr<Model>(new FcModel(std::move(copy), activation_, seed_, replacements_));
}

std::unique_ptr<FcModel> build_fc(std::size_t input_dim, std::size_t output_dim,
                                  std::size_t hidden_dim, std::size_t depth,
                                  engine::Activation activation, std::uint64_t seed) {
    return std::make_unique<FcModel>(input_dim, output_dim, hidden_dim, depth, activation, seed);
}

}  // namespace mlenv::models
