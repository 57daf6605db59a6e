#include "mlenv/data/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mlenv/common/rng.hpp"

namespace mlenv::data {

namespace {

// Stream tags keep the generators' random draws independent of each other.
constexpr std::uint64_t kClassificationSamples = 0x636c7362;
constexpr std::uint64_t kRegressionTruth = 0x74727574;
constexpr std::uint64_t kRegressionSamples = 0x72656773;

constexpr double kBlobRadius = 2.0;

}  // namespace

Dataset make_synthetic_classification(std::size_t n, std::size_t classes, std::uint64_t seed,
                                      double noise_sd, std::uint64_t sample_stream) {
    if (classes < 2) {
        throw std::invalid_argument("synthetic classification needs at least 2 classes, got " +
                                    std::to_string(classes));
    }
    if (n < classes) {
        throw std::invalid_argument("synthetic classification needs n >= classes, got n=" +
                                    std::to_string(n) + " for " + std::to_string(classes) +
                                    " classes");
    }
    if (noise_sd < 0.0) throw std::invalid_argument("noise_sd must be >= 0");

    Rng rng(mix_seed(seed, kClassificationSamples, sample_stream));
    Dataset ds;
    ds.task = TaskKind::classification;
    ds.input_dim = 2;
    ds.target_dim = 1;
    ds.inputs.reserve(2 * n);
    ds.targets.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = i % classes;
        const double angle =
            2.0 * std::numbers::pi * static_cast<double>(c) / static_cast<double>(classes);
        ds.inputs.push_back(kBlobRadius * std::cos(angle) + noise_sd * rng.normal());
        ds.inputs.push_back(kBlobRadius * std::sin(angle) + noise_sd * rng.normal());
        ds.targets.push_back(static_cast<double>(c));
    }
    return ds;
}

Dataset make_synthetic_regression(std::size_t n, double noise_sd, std::uint64_t seed,
                                  std::size_t input_dim, std::uint64_t sample_stream,
                                  std::vector<double>* truth_out) {
    if (n == 0) throw std::invalid_argument("synthetic regression needs n >= 1");
    if (input_dim == 0) throw std::invalid_argument("synthetic regression needs input_dim >= 1");
    if (noise_sd < 0.0) throw std::invalid_argument("noise_sd must be >= 0");

    std::vector<double> w(input_dim);
    double b;
    {
        Rng truth(mix_seed(seed, kRegressionTruth));
        for (auto& wi : w) wi = truth.uniform(-1.0, 1.0);
        b = truth.uniform(-1.0, 1.0);
    }
    if (truth_out != nullptr) {
        *truth_out = w;
        truth_out->push_back(b);
    }

    Rng rng(mix_seed(seed, kRegressionSamples, sample_stream));
    Dataset ds;
    ds.task = TaskKind::regression;
    ds.input_dim = input_dim;
    ds.target_dim = 1;
    ds.inputs.reserve(n * input_dim);
    ds.targets.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double y = b;
        for (std::size_t j = 0; j < input_dim; ++j) {
            const double x = rng.normal();
            ds.inputs.push_back(x);
            y += w[j] * x;
        }
        if (noise_sd > 0.0) y += noise_sd * rng.normal();
        ds.targets.push_back(y);
    }
    return ds;
}

}  // namespace mlenv::data
