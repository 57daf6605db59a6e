#include "mlenv/data/datamodule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mlenv/common/rng.hpp"
#include "mlenv/common/text.hpp"
#include "mlenv/data/idx.hpp"
#include "mlenv/data/synthetic.hpp"

namespace mlenv::data {

namespace {

constexpr std::uint64_t kSplitShuffle = 0x73706c74;

Dataset subset(const Dataset& pool, const std::vector<std::size_t>& indices) {
    Dataset out;
    out.task = pool.task;
    out.input_dim = pool.input_dim;
    out.target_dim = pool.target_dim;
    out.inputs.reserve(indices.size() * pool.input_dim);
    out.targets.reserve(indices.size() * pool.target_dim);
    for (std::size_t i : indices) {
        const double* in = &pool.inputs[i * pool.input_dim];
        out.inputs.insert(out.inputs.end(), in, in + pool.input_dim);
        const double* t = &pool.targets[i * pool.target_dim];
        out.targets.insert(out.targets.end(), t, t + pool.target_dim);
    }
    return out;
}

}  // namespace

std::size_t DataModule::input_dim() const {
    if (input_shape_.empty()) return 0;
    std::size_t d = 1;
    for (std::size_t s : input_shape_) d *= s;
    return d;
}

void DataModule::set_batch_size(std::size_t n) {
    if (n == 0) throw std::invalid_argument("batch size must be at least 1");
    batch_size_ = n;
}

void DataModule::prepare(const std::filesystem::path& data_root) {
    if (prepared_) return;
    do_prepare(data_root);
    prepared_ = true;
}

void DataModule::split(double validation_portion, std::uint64_t seed) {
    if (!prepared_) {
        throw std::logic_error("prepare() must run before split() on datamodule " + name_);
    }
    if (!(validation_portion >= 0.0 && validation_portion < 1.0)) {
        throw std::invalid_argument("validation portion must be in [0, 1), got " +
                                    format_double(validation_portion));
    }

    const std::size_t n = train_pool_.size();
    const std::size_t val_count =
        static_cast<std::size_t>(std::floor(validation_portion * static_cast<double>(n)));

    auto perm = Rng(mix_seed(seed, kSplitShuffle)).permutation(n);
    validation_indices_.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(val_count));
    train_indices_.assign(perm.begin() + static_cast<std::ptrdiff_t>(val_count), perm.end());
    std::sort(validation_indices_.begin(), validation_indices_.end());
    std::sort(train_indices_.begin(), train_indices_.end());

    train_ = subset(train_pool_, train_indices_);
    validation_ = subset(train_pool_, validation_indices_);
    split_done_ = true;
}

const Dataset& DataModule::train() const {
    if (!split_done_) throw std::logic_error("split() has not run on datamodule " + name_);
    return train_;
}

const Dataset& DataModule::validation() const {
    if (!split_done_) throw std::logic_error("split() has not run on datamodule " + name_);
    return validation_;
}

const Dataset& DataModule::test() const {
    if (!prepared_) throw std::logic_error("prepare() has not run on datamodule " + name_);
    return test_;
}

SyntheticClassificationModule::SyntheticClassificationModule(std::size_t num_samples,
                                                             std::size_t classes,
                                                             std::uint64_t seed, double noise_sd)
    : DataModule("synthetic_classification", TaskKind::classification),
      num_samples_(num_samples),
      classes_(classes),
      seed_(seed),
      noise_sd_(noise_sd) {
    input_shape_ = {2};
    output_dim_ = classes;
}

void SyntheticClassificationModule::do_prepare(const std::filesystem::path&) {
    train_pool_ = make_synthetic_classification(num_samples_, classes_, seed_, noise_sd_, 0);
    const std::size_t test_n = std::max(classes_, num_samples_ / 5);
    test_ = make_synthetic_classification(test_n, classes_, seed_, noise_sd_, 1);
}

SyntheticRegressionModule::SyntheticRegressionModule(std::size_t num_samples, double noise_sd,
                                                     std::uint64_t seed, std::size_t input_dim)
    : DataModule("synthetic_regression", TaskKind::regression),
      num_samples_(num_samples),
      noise_sd_(noise_sd),
      seed_(seed),
      in_dim_(input_dim) {
    input_shape_ = {input_dim};
    output_dim_ = 1;
}

void SyntheticRegressionModule::do_prepare(const std::filesystem::path&) {
    train_pool_ = make_synthetic_regression(num_samples_, noise_sd_, seed_, in_dim_, 0);
    const std::size_t test_n = std::max<std::size_t>(1, num_samples_ / 5);
    test_ = make_synthetic_regression(test_n, noise_sd_, seed_, in_dim_, 1);
}

MnistModule::MnistModule() : DataModule("mnist", TaskKind::classification) {}

namespace {

Dataset images_to_dataset(const IdxArray& images, const IdxArray& labels,
                          const std::filesystem::path& image_path) {
    if (images.shape.size() != 3) {
        throw std::runtime_error("expected rank-3 image data in " + image_path.string() +
                                 ", got rank " + std::to_string(images.shape.size()));
    }
    if (labels.shape.size() != 1 || labels.shape[0] != images.shape[0]) {
        throw std::runtime_error("label count does not match image count for " +
                                 image_path.string());
    }
    const std::size_t n = images.shape[0];
    const std::size_t d = images.shape[1] * images.shape[2];

    Dataset ds;
    ds.task = TaskKind::classification;
    ds.input_dim = d;
    ds.target_dim = 1;
    ds.inputs.resize(n * d);
    ds.targets.resize(n);
    for (std::size_t i = 0; i < n * d; ++i) ds.inputs[i] = images.data[i] / 255.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (labels.data[i] > 9) {
            throw std::runtime_error("label " + std::to_string(labels.data[i]) + " at index " +
                                     std::to_string(i) + " exceeds 9 for " + image_path.string());
        }
        ds.targets[i] = labels.data[i];
    }
    return ds;
}

}  // namespace

void MnistModule::do_prepare(const std::filesystem::path& data_root) {
    const auto dir = data_root / "mnist";
    {
        const auto images = load_idx(dir / "train-images-idx3-ubyte");
        const auto labels = load_idx(dir / "train-labels-idx1-ubyte");
        train_pool_ = images_to_dataset(images, labels, dir / "train-images-idx3-ubyte");
    }
    {
        const auto images = load_idx(dir / "t10k-images-idx3-ubyte");
        const auto labels = load_idx(dir / "t10k-labels-idx1-ubyte");
        test_ = images_to_dataset(images, labels, dir / "t10k-images-idx3-ubyte");
    }
    if (train_pool_.input_dim != test_.input_dim) {
        throw std::runtime_error("train and test image sizes disagree under " + dir.string());
    }

    input_shape_ = {train_pool_.input_dim};
    output_dim_ = 10;
}

}  // namespace mlenv::data
