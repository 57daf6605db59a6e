#pragma once

#include <cstdint>
#include <vector>

#include "mlenv/data/dataset.hpp"

namespace mlenv::data {

/// Gaussian blobs around `classes` centroids spaced evenly on a circle of
/// radius 2 in the plane. Sample i belongs to class i mod K, so classes are
/// balanced whenever K divides n. `sample_stream` selects an independent
/// draw (same blob layout) so train and test sets never share samples.
Dataset make_synthetic_classification(std::size_t n, std::size_t classes, std::uint64_t seed,
                                      double noise_sd = 0.35, std::uint64_t sample_stream = 0);

/// Linear ground truth y = w*.x + b* + gaussian(0, noise_sd). The truth
/// (w*, b*) depends only on the seed; `sample_stream` again selects an
/// independent sample draw under the same truth. When `truth_out` is given it
/// receives w* followed by b*.
Dataset make_synthetic_regression(std::size_t n, double noise_sd, std::uint64_t seed,
                                  std::size_t input_dim = 5, std::uint64_t sample_stream = 0,
                                  std::vector<double>* truth_out = nullptr);

}  // namespace mlenv::data
