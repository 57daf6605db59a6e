#pragma once

#include <map>
#include <string>
#include <vector>

#include "mlenv/data/dataset.hpp"
#include "mlenv/engine/ops.hpp"
#include "mlenv/engine/tensor.hpp"
#include "mlenv/models/model.hpp"
#include "mlenv/transforms/transforms.hpp"

namespace mlenv::methods {

enum class LossKind { crossentropy, mse };
enum class OptimizerKind { sgd, adam };
enum class RegularizerKind { none, l1, l2 };

LossKind loss_from_name(const std::string& name);
OptimizerKind optimizer_from_name(const std::string& name);
RegularizerKind regularizer_from_name(const std::string& name);
std::string loss_name(LossKind kind);
std::string optimizer_name(OptimizerKind kind);
std::string regularizer_name(RegularizerKind kind);

struct MethodConfig {
    std::string method_name = "base";
    LossKind loss = LossKind::crossentropy;
    OptimizerKind optimizer = OptimizerKind::adam;
    double learning_rate = 1e-3;
    RegularizerKind regularizer = RegularizerKind::none;
    double regularizer_weight = 0.0;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    transforms::EvalTransformConfig eval_transforms;

    void validate() const;  // learning_rate > 0, regularizer_weight >= 0
};

enum class Split { train, validation, test };
std::string split_name(Split split);

struct MetricRecord {
    Split split = Split::train;
    std::size_t epoch = 0;  // 1-based
    std::map<std::string, double> values;  // keys carry the split prefix
};

/// Collects weighted sums so metrics average exactly over a whole split
/// instead of averaging per-batch means.
class MetricAccumulator {
public:
    void add(const std::string& name, double weighted_sum, double weight);
    bool empty() const { return slots_.empty(); }
    MetricRecord finalize(Split split, std::size_t epoch) const;

private:
    struct Slot {
        double sum = 0.0;
        double weight = 0.0;
    };
    std::map<std::string, Slot> slots_;
};

/// classification -> {nll, accuracy}; regression -> {mse, mae}. Recorded
/// names gain a `<split>_` prefix, e.g. validation_nll.
std::vector<std::string> metrics_for_task(data::TaskKind task);

/// Fraction of rows whose argmax matches the target; ties go to the lowest
/// index.
double accuracy(const engine::Tensor& logits, const engine::Tensor& targets);

engine::Tensor compute_loss(LossKind kind, const engine::Tensor& predictions,
                            const engine::Tensor& targets);

/// l2 -> weight * sum(w^2), l1 -> weight * sum(|w|), none -> 0. Applied to
/// the training loss only, over weights and biases alike.
engine::Tensor regularizer_penalty(RegularizerKind kind,
                                   const std::vector<engine::Tensor>& params, double weight);

struct OptimizerState {
    std::size_t step_count = 0;
    std::vector<std::vector<double>> m;  // adam first moments, per parameter
    std::vector<std::vector<double>> v;  // adam second moments
};

/// One in-place update of every parameter from its populated gradient.
void optimizer_step(const MethodConfig& cfg, const std::vector<engine::Tensor>& params,
                    OptimizerState& state);

/// Owns the loss/optimizer/regularizer recipe. training_step and eval_step
/// are the override points for new methods; the base method implements plain
/// supervised learning.
class Method {
public:
    explicit Method(MethodConfig config);
    virtual ~Method() = default;

    const MethodConfig& config() const { return config_; }
    const std::string& name() const { return config_.method_name; }

    /// forward -> loss + penalty -> backward -> optimizer step -> zero_grad.
    /// Returns the pre-step total training loss.
    virtual double training_step(models::Model& model, const data::Batch& batch);

    /// Metric contributions for one batch; never mutates the model and must
    /// run outside any tape scope.
    virtual void eval_step(const models::Model& model, const data::Batch& batch, Split split,
                           MetricAccumulator& acc);

    OptimizerState& optimizer_state() { return state_; }
    const OptimizerState& optimizer_state() const { return state_; }

protected:
    MethodConfig config_;
    OptimizerState state_;
};

}  // namespace mlenv::methods
