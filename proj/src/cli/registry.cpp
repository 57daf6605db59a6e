#include "mlenv/cli/registry.hpp"

#include <stdexcept>

#include "mlenv/common/text.hpp"
#include "mlenv/engine/ops.hpp"

namespace mlenv::cli {
namespace {

void check_prefix(const std::string& component, const std::string& prefix,
                  const std::vector<FlagSpec>& flags) {
    for (const auto& f : flags)
        if (!starts_with(f.name, prefix))
            throw std::invalid_argument("flag --" + f.name + " of " + component +
                                        " must start with the " + prefix + " prefix");
}

template <typename Table>
std::vector<std::string> keys(const Table& table) {
    std::vector<std::string> names;
    names.reserve(table.size());
    for (const auto& [name, entry] : table) names.push_back(name);
    return names;
}

template <typename Table>
const auto& resolve(const Table& table, const std::string& kind, const std::string& name) {
    auto it = table.find(name);
    if (it == table.end())
        throw std::invalid_argument("unknown " + kind + " '" + name +
                                    "'; available: " + join(keys(table), ", "));
    return it->second;
}

template <typename Table, typename Entry>
void insert(Table& table, const std::string& kind, const std::string& name, Entry&& entry) {
    if (name.empty()) throw std::invalid_argument(kind + " name must not be empty");
    if (!table.emplace(name, std::forward<Entry>(entry)).second)
        throw std::invalid_argument(kind + " '" + name + "' is already registered");
}

FlagSpec int_flag(std::string name, std::string default_value, std::string help) {
    return {std::move(name), FlagType::integer, std::move(default_value), false, std::move(help)};
}

FlagSpec real_flag(std::string name, std::string default_value, std::string help) {
    return {std::move(name), FlagType::real, std::move(default_value), false, std::move(help)};
}

FlagSpec optional_real_flag(std::string name, std::string help) {
    return {std::move(name), FlagType::real, "", false, std::move(help)};
}

FlagSpec optional_int_flag(std::string name, std::string help) {
    return {std::move(name), FlagType::integer, "", false, std::move(help)};
}

std::size_t positive(const RunConfig& cfg, const std::string& name) {
    auto v = cfg.int_flag(name);
    if (v < 1)
        throw std::invalid_argument("flag --" + name + " must be at least 1, got " +
                                    std::to_string(v));
    return static_cast<std::size_t>(v);
}

std::vector<FlagSpec> common_datamodule_flags() {
    return {int_flag("datamodule_batch_size", "32", "samples per training batch"),
            real_flag("datamodule_validation_portion", "0.1",
                      "fraction of the train pool held out for validation")};
}

std::unique_ptr<methods::Method> make_base_method(const RunConfig& cfg) {
    methods::MethodConfig mc;
    mc.method_name = cfg.flag("method");
    mc.loss = methods::loss_from_name(cfg.flag("loss"));
    mc.optimizer = methods::optimizer_from_name(cfg.flag("method_optimizer"));
    mc.learning_rate = cfg.real_flag("method_learning_rate");
    mc.regularizer = methods::regularizer_from_name(cfg.flag("regularizer"));
    mc.regularizer_weight = cfg.real_flag("method_regularizer_weight");
    if (cfg.has("method_prune_sparsity")) {
        double s = cfg.real_flag("method_prune_sparsity");
        if (!(s >= 0.0 && s <= 1.0))
            throw std::invalid_argument("flag --method_prune_sparsity must lie in [0, 1], got " +
                                        format_double(s));
        mc.eval_transforms.prune_sparsity = s;
    }
    if (cfg.has("method_quantize_bits")) {
        auto b = cfg.int_flag("method_quantize_bits");
        if (b < 2 || b > 8)
            throw std::invalid_argument("flag --method_quantize_bits must lie in [2, 8], got " +
                                        std::to_string(b));
        mc.eval_transforms.quantize_bits = static_cast<int>(b);
    }
    mc.validate();
    return std::make_unique<methods::Method>(mc);
}

}  // namespace

void Registry::register_datamodule(const std::string& name, DataModuleEntry entry) {
    check_prefix(name, "datamodule_", entry.flags);
    insert(datamodules_, "datamodule", name, std::move(entry));
}

void Registry::register_model(const std::string& name, ModelEntry entry) {
    check_prefix(name, "model_", entry.flags);
    insert(models_, "model", name, std::move(entry));
}

void Registry::register_method(const std::string& name, MethodEntry entry) {
    check_prefix(name, "method_", entry.flags);
    insert(methods_, "method", name, std::move(entry));
}

void Registry::register_regularizer(const std::string& name, methods::RegularizerKind kind) {
    insert(regularizers_, "regularizer", name, kind);
}

const DataModuleEntry& Registry::datamodule(const std::string& name) const {
    return resolve(datamodules_, "datamodule", name);
}

const ModelEntry& Registry::model(const std::string& name) const {
    return resolve(models_, "model", name);
}

const MethodEntry& Registry::method(const std::string& name) const {
    return resolve(methods_, "method", name);
}

methods::RegularizerKind Registry::regularizer(const std::string& name) const {
    return resolve(regularizers_, "regularizer", name);
}

std::vector<std::string> Registry::datamodule_names() const { return keys(datamodules_); }
std::vector<std::string> Registry::model_names() const { return keys(models_); }
std::vector<std::string> Registry::method_names() const { return keys(methods_); }
std::vector<std::string> Registry::regularizer_names() const { return keys(regularizers_); }

Registry make_builtin_registry() {
    Registry r;

    r.register_datamodule("mnist",
                          {common_datamodule_flags(), [](const RunConfig&) {
                               return std::make_unique<data::MnistModule>();
                           }});

    {
        auto flags = common_datamodule_flags();
        flags.push_back(int_flag("datamodule_num_samples", "3000", "generated sample count"));
        flags.push_back(int_flag("datamodule_classes", "3", "number of blob classes"));
        flags.push_back(real_flag("datamodule_noise_sd", "0.35", "noise level of the blobs"));
        r.register_datamodule(
            "synthetic_classification",
            {std::move(flags), [](const RunConfig& cfg) {
                 return std::make_unique<data::SyntheticClassificationModule>(
                     positive(cfg, "datamodule_num_samples"), positive(cfg, "datamodule_classes"),
                     cfg.seed, cfg.real_flag("datamodule_noise_sd"));
             }});
    }

    {
        auto flags = common_datamodule_flags();
        flags.push_back(int_flag("datamodule_num_samples", "3000", "generated sample count"));
        flags.push_back(real_flag("datamodule_noise_sd", "0.1", "target noise level"));
        flags.push_back(int_flag("datamodule_input_dim", "5", "input feature count"));
        r.register_datamodule(
            "synthetic_regression",
            {std::move(flags), [](const RunConfig& cfg) {
                 return std::make_unique<data::SyntheticRegressionModule>(
                     positive(cfg, "datamodule_num_samples"), cfg.real_flag("datamodule_noise_sd"),
                     cfg.seed, positive(cfg, "datamodule_input_dim"));
             }});
    }

    r.register_model(
        "fc",
        {{int_flag("model_hidden_dim", "32", "width of every hidden layer"),
          int_flag("model_depth", "3", "number of non-output layers"),
          {"model_activation", FlagType::text, "relu", false, "relu, tanh, sigmoid or identity"}},
         [](const RunConfig& cfg, std::size_t input_dim, std::size_t output_dim) {
             return models::build_fc(input_dim, output_dim, positive(cfg, "model_hidden_dim"),
                                     positive(cfg, "model_depth"),
                                     engine::activation_from_name(cfg.flag("model_activation")),
                                     cfg.seed);
         }});

    r.register_method(
        "base",
        {{{"method_optimizer", FlagType::text, "adam", false, "adam or sgd"},
          real_flag("method_learning_rate", "1e-3", "optimizer step size"),
          real_flag("method_regularizer_weight", "0", "penalty multiplier"),
          optional_real_flag("method_prune_sparsity",
                             "weight fraction pruned before evaluation"),
          optional_int_flag("method_quantize_bits",
                            "evaluation-time weight quantization width (2 to 8)")},
         make_base_method});

    r.register_regularizer("none", methods::RegularizerKind::none);
    r.register_regularizer("l1", methods::RegularizerKind::l1);
    r.register_regularizer("l2", methods::RegularizerKind::l2);
    return r;
}

Registry& builtin_registry() {
    static Registry instance = make_builtin_registry();
    return instance;
}

}  // namespace mlenv::cli
