#include "mlenv/trainer/trainer.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "mlenv/common/rng.hpp"
#include "mlenv/trainer/checkpoint.hpp"

namespace mlenv::trainer {
namespace {

constexpr std::uint64_t kEpochStream = 0x65706f63;

methods::MetricRecord score_split(methods::Method& method, const models::Model& model,
                                  const data::Dataset& ds, methods::Split split,
                                  std::size_t epoch, std::size_t batch_size,
                                  const transforms::EvalTransformConfig& tf) {
    const models::Model* scored = &model;
    std::unique_ptr<models::Model> transformed;
    if (tf.enabled()) {
        transformed = transforms::apply_eval_transforms(model, tf);
        scored = transformed.get();
    }
    data::BatchPlan plan(ds.size(), batch_size, false, 0);
    methods::MetricAccumulator acc;
    for (std::size_t k = 0; k < plan.num_batches(); ++k) {
        auto batch = data::make_batch(ds, plan.batch(k));
        try {
            method.eval_step(*scored, batch, split, acc);
        } catch (const std::exception& e) {
            throw std::runtime_error("epoch " + std::to_string(epoch) + " " +
                                     methods::split_name(split) + " batch " + std::to_string(k) +
                                     ": " + e.what());
        }
    }
    return acc.finalize(split, epoch);
}

}  // namespace

void TrainerConfig::validate() const {
    if (devices.size() != 1)
        throw std::invalid_argument("exactly one device is supported, got " +
                                    std::to_string(devices.size()));
}

RunState fit(const TrainerConfig& cfg, methods::Method& method, models::Model& model,
             data::DataModule& dm, const Callbacks& callbacks) {
    cfg.validate();
    RunState state;

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto& train = dm.train();
        data::BatchPlan plan(train.size(), dm.batch_size(), true,
                             mix_seed(cfg.seed, kEpochStream, epoch));
        methods::MetricAccumulator train_acc;
        for (std::size_t k = 0; k < plan.num_batches(); ++k) {
            auto batch = data::make_batch(train, plan.batch(k));
            double loss = 0.0;
            try {
                loss = method.training_step(model, batch);
            } catch (const std::exception& e) {
                throw std::runtime_error("epoch " + std::to_string(epoch) + " batch " +
                                         std::to_string(k) + ": " + e.what());
            }
            auto weight = static_cast<double>(batch.size());
            train_acc.add("loss", loss * weight, weight);
        }
        auto train_record = train_acc.finalize(methods::Split::train, epoch);
        state.history.push_back(train_record);
        if (callbacks.on_epoch_end) callbacks.on_epoch_end(train_record);

        const auto& validation = dm.validation();
        if (validation.size() > 0) {
            auto record = score_split(method, model, validation, methods::Split::validation,
                                      epoch, dm.batch_size(), method.config().eval_transforms);
            state.history.push_back(record);
            if (callbacks.on_epoch_end) callbacks.on_epoch_end(record);
            if (!cfg.optimization_metric.empty()) {
                auto it = record.values.find(cfg.optimization_metric);
                if (it != record.values.end()) {
                    double v = it->second;
                    if (std::isnan(state.best_validation) ||
                        (cfg.optimization_minimize ? v < state.best_validation
                                                   : v > state.best_validation))
                        state.best_validation = v;
                }
            }
        }
        state.current_epoch = epoch;
    }

    if (!cfg.save_path.empty()) {
        std::filesystem::create_directories(cfg.save_path);
        save_checkpoint(std::filesystem::path(cfg.save_path) / "checkpoint", model,
                        method.optimizer_state(), cfg.epochs);
    }
    if (callbacks.on_fit_end) callbacks.on_fit_end(state);
    return state;
}

methods::MetricRecord evaluate(const TrainerConfig& cfg, methods::Method& method,
                               const models::Model& model, data::DataModule& dm,
                               const transforms::EvalTransformConfig& transforms) {
    cfg.validate();
    const auto& test = dm.test();
    if (test.size() == 0)
        throw std::runtime_error("test split of " + dm.name() + " is empty");
    return score_split(method, model, test, methods::Split::test, 0, dm.batch_size(), transforms);
}

}  // namespace mlenv::trainer
