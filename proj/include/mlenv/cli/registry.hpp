#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "mlenv/cli/flags.hpp"
#include "mlenv/data/datamodule.hpp"
#include "mlenv/methods/method.hpp"
#include "mlenv/models/model.hpp"

namespace mlenv::cli {

/// A component registration: the prefixed flags it owns plus a factory that
/// reads them back out of the resolved RunConfig.
struct DataModuleEntry {
    std::vector<FlagSpec> flags;  // names must start with datamodule_
    std::function<std::unique_ptr<data::DataModule>(const RunConfig&)> make;
};

struct ModelEntry {
    std::vector<FlagSpec> flags;  // names must start with model_
    std::function<std::unique_ptr<models::Model>(const RunConfig&, std::size_t input_dim,
                                                 std::size_t output_dim)>
        make;
};

struct MethodEntry {
    std::vector<FlagSpec> flags;  // names must start with method_
    std::function<std::unique_ptr<methods::Method>(const RunConfig&)> make;
};

/// Name -> factory tables for the pluggable component kinds. Registering a
/// new component makes it selectable by name with no parser changes; flag
/// prefix discipline is enforced at registration time.
class Registry {
public:
    void register_datamodule(const std::string& name, DataModuleEntry entry);
    void register_model(const std::string& name, ModelEntry entry);
    void register_method(const std::string& name, MethodEntry entry);
    void register_regularizer(const std::string& name, methods::RegularizerKind kind);

    const DataModuleEntry& datamodule(const std::string& name) const;
    const ModelEntry& model(const std::string& name) const;
    const MethodEntry& method(const std::string& name) const;
    methods::RegularizerKind regularizer(const std::string& name) const;

    std::vector<std::string> datamodule_names() const;
    std::vector<std::string> model_names() const;
    std::vector<std::string> method_names() const;
    std::vector<std::string> regularizer_names() const;

private:
    std::map<std::string, DataModuleEntry> datamodules_;
    std::map<std::string, ModelEntry> models_;
    std::map<std::string, MethodEntry> methods_;
    std::map<std::string, methods::RegularizerKind> regularizers_;
};

/// Fresh registry holding the built-ins: datamodules {mnist,
/// synthetic_classification, synthetic_regression}, models {fc}, methods
/// {base}, regularizers {none, l1, l2}.
Registry make_builtin_registry();

/// Shared mutable instance used by the command-line entry point; extend it
/// to expose custom components.
Registry& builtin_registry();

}  // namespace mlenv::cli
