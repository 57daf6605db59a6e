#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "mlenv/data/dataset.hpp"

namespace mlenv::data {

/// Owns the datasets for one task: prepare() materializes the train pool and
/// test set, split() carves a validation set out of the train pool with a
/// seeded shuffle. Dimensions are fixed after prepare() and size the model.
class DataModule {
public:
    virtual ~DataModule() = default;

    const std::string& name() const { return name_; }
    TaskKind task() const { return task_; }
    const std::vector<std::size_t>& input_shape() const { return input_shape_; }
    std::size_t input_dim() const;
    std::size_t output_dim() const { return output_dim_; }

    std::size_t batch_size() const { return batch_size_; }
    void set_batch_size(std::size_t n);

    void prepare(const std::filesystem::path& data_root);
    void split(double validation_portion, std::uint64_t seed);

    bool prepared() const { return prepared_; }
    const Dataset& train() const;
    const Dataset& validation() const;
    const Dataset& test() const;

    /// Positions in the original train pool, sorted; exposed so callers can
    /// verify disjointness and conservation.
    const std::vector<std::size_t>& train_indices() const { return train_indices_; }
    const std::vector<std::size_t>& validation_indices() const { return validation_indices_; }

protected:
    DataModule(std::string name, TaskKind task) : name_(std::move(name)), task_(task) {}

    /// Fills train_pool_ and test_ and sets input_shape_/output_dim_.
    virtual void do_prepare(const std::filesystem::path& data_root) = 0;

    std::vector<std::size_t> input_shape_;
    std::size_t output_dim_ = 0;
    Dataset train_pool_;
    Dataset test_;

private:
    std::string name_;
    TaskKind task_;
    std::size_t batch_size_ = 32;
    bool prepared_ = false;
    bool split_done_ = false;
    Dataset train_;
    Dataset validation_;
    std::vector<std::size_t> train_indices_;
    std::vector<std::size_t> validation_indices_;
};

class SyntheticClassificationModule final : public DataModule {
public:
    SyntheticClassificationModule(std::size_t num_samples, std::size_t classes,
                                  std::uint64_t seed, double noise_sd = 0.35);

protected:
    void do_prepare(const std::filesystem::path& data_root) override;

private:
    std::size_t num_samples_;
    std::size_t classes_;
    std::uint64_t seed_;
    double noise_sd_;
};

class SyntheticRegressionModule final : public DataModule {
public:
    SyntheticRegressionModule(std::size_t num_samples, double noise_sd, std::uint64_t seed,
                              std::size_t input_dim = 5);

protected:
    void do_prepare(const std::filesystem::path& data_root) override;

private:
    std::size_t num_samples_;
    double noise_sd_;
    std::uint64_t seed_;
    std::size_t in_dim_;
};

/// Reads the four standard IDX files from <data_root>/mnist/, scales pixels
/// to [0,1], and flattens each image.
class MnistModule final : public DataModule {
public:
    MnistModule();

protected:
    void do_prepare(const std::filesystem::path& data_root) override;
};

}  // namespace mlenv::data
