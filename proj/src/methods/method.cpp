#include "mlenv/methods/method.hpp"

#include <cmath>
#include <stdexcept>

#include "mlenv/common/text.hpp"
#include "mlenv/engine/tape.hpp"

namespace mlenv::methods {

LossKind loss_from_name(const std::string& name) {
    if (name == "crossentropy") return LossKind::crossentropy;
    if (name == "mse") return LossKind::mse;
    throw std::invalid_argument("unknown loss \"" + name +
                                "\"; expected one of crossentropy, mse");
}

OptimizerKind optimizer_from_name(const std::string& name) {
    if (name == "sgd") return OptimizerKind::sgd;
    if (name == "adam") return OptimizerKind::adam;
    throw std::invalid_argument("unknown optimizer \"" + name + "\"; expected one of sgd, adam");
}

RegularizerKind regularizer_from_name(const std::string& name) {
    if (name == "none") return RegularizerKind::none;
    if (name == "l1") return RegularizerKind::l1;
    if (name == "l2") return RegularizerKind::l2;
    throw std::invalid_argument("unknown regularizer \"" + name +
                                "\"; expected one of none, l1, l2");
}

std::string loss_name(LossKind kind) {
    return kind == LossKind::crossentropy ? "crossentropy" : "mse";
}

std::string optimizer_name(OptimizerKind kind) {
    return kind == OptimizerKind::sgd ? "sgd" : "adam";
}

std::string regularizer_name(RegularizerKind kind) {
    switch (kind) {
        case RegularizerKind::none: return "none";
        case RegularizerKind::l1: return "l1";
        case RegularizerKind::l2: return "l2";
    }
    return "?";
}

void MethodConfig::validate() const {
    if (!(learning_rate > 0.0)) {
        throw std::invalid_argument("learning rate must be positive, got " +
                                    format_double(learning_rate));
    }
    if (!(regularizer_weight >= 0.0)) {
        throw std::invalid_argument("regularizer weight must be >= 0, got " +
                                    format_double(regularizer_weight));
    }
}

std::string split_name(Split split) {
    switch (split) {
        case Split::train: return "train";
        case Split::validation: return "validation";
        case Split::test: return "test";
    }
    return "?";
}

void MetricAccumulator::add(const std::string& name, double weighted_sum, double weight) {
    if (!(weight > 0.0)) throw std::invalid_argument("metric weight must be positive");
    auto& slot = slots_[name];
    slot.sum += weighted_sum;
    slot.weight += weight;
}

MetricRecord MetricAccumulator::finalize(Split split, std::size_t epoch) const {
    MetricRecord record;
    record.split = split;
    record.epoch = epoch;
    for (const auto& [name, slot] : slots_)
        record.values[split_name(split) + "_" + name] = slot.sum / slot.weight;
    return record;
}

std::vector<std::string> metrics_for_task(data::TaskKind task) {
    if (task == data::TaskKind::classification) return {"nll", "accuracy"};
    return {"mse", "mae"};
}

double accuracy(const engine::Tensor& logits, const engine::Tensor& targets) {
    if (logits.rank() != 2 || targets.rank() != 1 || logits.dim(0) != targets.dim(0)) {
        throw std::invalid_argument("accuracy expects logits [B, K] and targets [B], got " +
                                    engine::shape_str(logits.shape()) + " and " +
                                    engine::shape_str(targets.shape()));
    }
    const std::size_t rows = logits.dim(0), cols = logits.dim(1);
    auto lv = logits.data();
    auto tv = targets.data();
    std::size_t correct = 0;
    for (std::size_t i = 0; i < rows; ++i) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < cols; ++j)
            if (lv[i * cols + j] > lv[i * cols + best]) best = j;
        if (static_cast<double>(best) == tv[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(rows);
}

engine::Tensor compute_loss(LossKind kind, const engine::Tensor& predictions,
                            const engine::Tensor& targets) {
    if (kind == LossKind::crossentropy) {
        return engine::cross_entropy_from_logits(predictions, targets);
    }
    if (predictions.shape() != targets.shape()) {
        throw std::invalid_argument("mse needs matching shapes, got predictions " +
                                    engine::shape_str(predictions.shape()) + " and targets " +
                                    engine::shape_str(targets.shape()));
    }
    auto diff = engine::sub(predictions, targets);
    return engine::reduce_mean(engine::mul(diff, diff));
}

engine::Tensor regularizer_penalty(RegularizerKind kind,
                                   const std::vector<engine::Tensor>& params, double weight) {
    if (!(weight >= 0.0)) {
        throw std::invalid_argument("regularizer weight must be >= 0, got " +
                                    format_double(weight));
    }
    if (kind == RegularizerKind::none || params.empty()) return engine::Tensor::scalar(0.0);

    engine::Tensor total = engine::Tensor::scalar(0.0);
    for (const auto& p : params) {
        auto term = kind == RegularizerKind::l2 ? engine::reduce_sum(engine::mul(p, p))
                                                : engine::reduce_sum(engine::absolute(p));
        total = engine::add(total, term);
    }
    return engine::mul_scalar(total, weight);
}

void optimizer_step(const MethodConfig& cfg, const std::vector<engine::Tensor>& params,
                    OptimizerState& state) {
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (!params[i].has_grad()) {
            throw std::logic_error("parameter " + std::to_string(i) +
                                   " has no gradient; run backward before optimizer_step");
        }
    }

    ++state.step_count;
    if (cfg.optimizer == OptimizerKind::sgd) {
        for (engine::Tensor p : params) {  // copy of the shared handle
            auto w = p.mutable_data();
            auto g = p.grad();
            for (std::size_t j = 0; j < w.size(); ++j) w[j] -= cfg.learning_rate * g[j];
        }
        return;
    }

    if (state.m.empty()) {
        state.m.resize(params.size());
        state.v.resize(params.size());
        for (std::size_t i = 0; i < params.size(); ++i) {
            state.m[i].assign(params[i].size(), 0.0);
            state.v[i].assign(params[i].size(), 0.0);
        }
    }
    if (state.m.size() != params.size()) {
        throw std::logic_error("optimizer state tracks " + std::to_string(state.m.size()) +
                               " parameters but was given " + std::to_string(params.size()));
    }

    const double t = static_cast<double>(state.step_count);
    const double bias1 = 1.0 - std::pow(cfg.adam_beta1, t);
    const double bias2 = 1.0 - std::pow(cfg.adam_beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (state.m[i].size() != params[i].size()) {
            throw std::logic_error("optimizer moment shape mismatch at parameter " +
                                   std::to_string(i));
        }
        engine::Tensor p = params[i];
        auto w = p.mutable_data();
        auto g = p.grad();
        auto& m = state.m[i];
        auto& v = state.v[i];
        for (std::size_t j = 0; j < w.size(); ++j) {
            m[j] = cfg.adam_beta1 * m[j] + (1.0 - cfg.adam_beta1) * g[j];
            v[j] = cfg.adam_beta2 * v[j] + (1.0 - cfg.adam_beta2) * g[j] * g[j];
            w[j] -= cfg.learning_rate * (m[j] / bias1) / (std::sqrt(v[j] / bias2) + cfg.adam_eps);
        }
    }
}

Method::Method(MethodConfig config) : config_(std::move(config)) {
    config_.validate();
}

double Method::training_step(models::Model& model, const data::Batch& batch) {
    auto params = model.parameters();
    engine::Tape tape;
    auto predictions = model.forward(batch.inputs);
    auto loss = compute_loss(config_.loss, predictions, batch.targets);
    auto penalty = regularizer_penalty(config_.regularizer, params, config_.regularizer_weight);
    auto total = engine::add(loss, penalty);
    const double value = total.value();
    engine::backward(total, tape);
    optimizer_step(config_, params, state_);
    engine::zero_grad(params);
    return value;
}

void Method::eval_step(const models::Model& model, const data::Batch& batch, Split split,
                       MetricAccumulator& acc) {
    if (split == Split::train) {
        throw std::invalid_argument("eval_step expects the validation or test split");
    }
    if (engine::Tape::active() != nullptr) {
        throw std::logic_error("eval_step must run outside any tape scope");
    }

    auto predictions = model.forward(batch.inputs);
    const auto b = static_cast<double>(batch.size());
    if (batch.targets.rank() == 1) {
        const double nll = engine::cross_entropy_from_logits(predictions, batch.targets).value();
        acc.add("nll", nll * b, b);
        acc.add("accuracy", accuracy(predictions, batch.targets) * b, b);
    } else {
        auto pv = predictions.data();
        auto tv = batch.targets.data();
        if (pv.size() != tv.size()) {
            throw std::invalid_argument("eval_step shape mismatch: predictions " +
                                        engine::shape_str(predictions.shape()) + ", targets " +
                                        engine::shape_str(batch.targets.shape()));
        }
        double sq = 0.0, ab = 0.0;
        for (std::size_t i = 0; i < pv.size(); ++i) {
            const double e = pv[i] - tv[i];
            sq += e * e;
            ab += std::fabs(e);
        }
        const auto elems = static_cast<double>(pv.size());
        acc.add("mse", sq, elems);
        acc.add("mae", ab, elems);
    }
}

}  // namespace mlenv::methods
