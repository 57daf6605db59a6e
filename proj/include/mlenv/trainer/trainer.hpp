#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "mlenv/data/datamodule.hpp"
#include "mlenv/methods/method.hpp"
#include "mlenv/models/model.hpp"
#include "mlenv/transforms/transforms.hpp"

namespace mlenv::trainer {

struct TrainerConfig {
    std::size_t epochs = 1;
    std::vector<int> devices{0};  // parsed for compatibility; execution is host-only
    std::uint64_t seed = 42;
    std::string save_path;  // run directory; empty disables the checkpoint write
    std::string optimization_metric;  // e.g. validation_nll; empty disables best tracking
    bool optimization_minimize = true;

    void validate() const;  // exactly one device
};

struct RunState {
    std::size_t current_epoch = 0;
    std::vector<methods::MetricRecord> history;
    double best_validation = std::numeric_limits<double>::quiet_NaN();
};

struct Callbacks {
    std::function<void(const methods::MetricRecord&)> on_epoch_end;
    std::function<void(const RunState&)> on_fit_end;
};

/// Epoch loop: shuffled training batches through training_step, then a
/// validation pass through eval_step (skipped while the validation split is
/// empty), one train record and one validation record appended per epoch.
/// Eval-time transforms from the method config score a transformed copy;
/// the training model itself is never transformed. When save_path is set, a
/// `checkpoint` file is written there after the final epoch. Deterministic
/// for a fixed (config, data, seed).
RunState fit(const TrainerConfig& cfg, methods::Method& method, models::Model& model,
             data::DataModule& dm, const Callbacks& callbacks = {});

/// Scores the test split, applying the given transforms to a copy of the
/// model first. Keys carry the test_ prefix; the record's epoch is 0.
methods::MetricRecord evaluate(const TrainerConfig& cfg, methods::Method& method,
                               const models::Model& model, data::DataModule& dm,
                               const transforms::EvalTransformConfig& transforms);

}  // namespace mlenv::trainer
