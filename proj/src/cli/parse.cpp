#include "mlenv/cli/parse.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "mlenv/common/text.hpp"
#include "mlenv/version.hpp"

namespace mlenv::cli {
namespace {

struct RawFlag {
    std::string name;
    std::optional<std::string> value;  // empty for bare boolean form
};

std::vector<RawFlag> tokenize(const std::vector<std::string>& args) {
    std::vector<RawFlag> raw;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const auto& token = args[i];
        if (!starts_with(token, "--") || token.size() == 2)
            throw std::invalid_argument("expected a --flag, got '" + token + "'");
        RawFlag flag{token.substr(2), std::nullopt};
        if (i + 1 < args.size() && !starts_with(args[i + 1], "--")) {
            flag.value = args[i + 1];
            ++i;
        }
        raw.push_back(std::move(flag));
    }
    return raw;
}

std::string data_root_default() {
    const char* env = std::getenv("MLENV_DATA_ROOT");
    return env && *env ? env : "./data";
}

FlagSpec text_flag(std::string name, std::string default_value, std::string help) {
    return {std::move(name), FlagType::text, std::move(default_value), false, std::move(help)};
}

FlagSpec required_flag(std::string name, FlagType type, std::string help) {
    return {std::move(name), type, "", true, std::move(help)};
}

std::vector<FlagSpec> shared_specs() {
    return {{"seed", FlagType::integer, "42", false, "root random seed"},
            text_flag("save_path", "./experiments", "directory receiving run directories"),
            text_flag("data_root", data_root_default(),
                      "dataset location (default honors MLENV_DATA_ROOT)"),
            text_flag("from_config", "", "config.json of an earlier run to replay")};
}

std::vector<FlagSpec> selection_specs(const std::string& command) {
    std::vector<FlagSpec> specs = {
        text_flag("method", "base", "method name from the registry"),
        text_flag("model", "fc", "model name from the registry"),
        required_flag("datamodule", FlagType::text, "datamodule name from the registry"),
        text_flag("loss", "crossentropy", "crossentropy or mse"),
        text_flag("regularizer", "none", "none, l1 or l2")};
    if (command == "test")
        specs.push_back(required_flag("load_path", FlagType::text,
                                      "run directory (or checkpoint file) to load"));
    return specs;
}

std::vector<FlagSpec> trainer_specs(const std::string& command) {
    std::vector<FlagSpec> specs = {
        text_flag("trainer_devices", "[0]", "device list; exactly one entry")};
    if (command == "train") {
        specs.push_back({"trainer_epochs", FlagType::integer, "1", false, "training epochs"});
        specs.push_back({"emit_plots", FlagType::boolean, "false", false,
                         "write metric curves as plots.svg"});
    }
    return specs;
}

std::vector<FlagSpec> tune_specs() {
    return {required_flag("config_file", FlagType::text, "search space definition"),
            text_flag("optimizer", "Grid Search", "Grid Search or Random Search"),
            text_flag("optimization_metric", "validation_nll", "objective, <split>_<metric>"),
            text_flag("optimization_mode", "", "min or max when the metric suffix is unknown"),
            required_flag("max_wallclock_time", FlagType::real, "trial launch budget, seconds"),
            {"num_samples", FlagType::integer, "10", false, "random-search trial count"},
            {"workers", FlagType::integer, "1", false, "trials running concurrently"}};
}

const FlagSpec* find_spec(const std::vector<FlagSpec>& specs, const std::string& name) {
    for (const auto& s : specs)
        if (s.name == name) return &s;
    return nullptr;
}

void check_value(const FlagSpec& spec, const std::string& value) {
    switch (spec.type) {
        case FlagType::integer:
            if (!parse_int(value))
                throw std::invalid_argument("flag --" + spec.name + " expects an integer, got '" +
                                            value + "'");
            break;
        case FlagType::real:
            if (!parse_double(value))
                throw std::invalid_argument("flag --" + spec.name + " expects a number, got '" +
                                            value + "'");
            break;
        case FlagType::boolean:
            if (value != "true" && value != "false")
                throw std::invalid_argument("flag --" + spec.name +
                                            " expects true or false, got '" + value + "'");
            break;
        case FlagType::text:
            break;
    }
}

std::string utc_now() {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buffer[32];
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buffer;
}

}  // namespace

RunConfig parse_cli(const std::string& command, const std::vector<std::string>& args,
                    const Registry& registry) {
    if (command != "train" && command != "test" && command != "tune")
        throw std::invalid_argument("unknown command '" + command +
                                    "'; expected train, test or tune");
    auto raw = tokenize(args);

    // Baseline from --from_config, if present.
    std::map<std::string, std::string> values;
    std::optional<std::uint64_t> config_seed;
    for (const auto& flag : raw) {
        if (flag.name != "from_config") continue;
        if (!flag.value) throw std::invalid_argument("flag --from_config expects a value");
        auto replay = RunConfig::load(*flag.value);
        if (replay.command != command)
            throw std::invalid_argument("config file was recorded for '" + replay.command +
                                        "', not '" + command + "'");
        values = replay.flags;
        config_seed = replay.seed;
        values["from_config"] = *flag.value;
    }
    if (config_seed) values["seed"] = std::to_string(*config_seed);

    // Phase 1: component selections decide the full flag set.
    auto lookup = [&](const std::string& name, const std::string& fallback) {
        std::string value = fallback;
        if (auto it = values.find(name); it != values.end()) value = it->second;
        for (const auto& flag : raw)
            if (flag.name == name && flag.value) value = *flag.value;
        return value;
    };

    std::vector<FlagSpec> specs = shared_specs();
    if (command == "tune") {
        auto extra = tune_specs();
        specs.insert(specs.end(), extra.begin(), extra.end());
    } else {
        auto selections = selection_specs(command);
        specs.insert(specs.end(), selections.begin(), selections.end());
        auto trains = trainer_specs(command);
        specs.insert(specs.end(), trains.begin(), trains.end());

        auto dm_name = lookup("datamodule", "");
        if (dm_name.empty()) throw std::invalid_argument("missing required flag --datamodule");
        const auto& dm = registry.datamodule(dm_name);
        specs.insert(specs.end(), dm.flags.begin(), dm.flags.end());
        const auto& model = registry.model(lookup("model", "fc"));
        specs.insert(specs.end(), model.flags.begin(), model.flags.end());
        const auto& method = registry.method(lookup("method", "base"));
        specs.insert(specs.end(), method.flags.begin(), method.flags.end());
        registry.regularizer(lookup("regularizer", "none"));
    }

    // Phase 2: defaults, then explicit flags in order; validate everything.
    for (const auto& spec : specs)
        if (spec.has_default() || spec.type == FlagType::boolean)
            if (!values.count(spec.name))
                values[spec.name] = spec.type == FlagType::boolean && spec.default_value.empty()
                                        ? "false"
                                        : spec.default_value;

    for (const auto& flag : raw) {
        const auto* spec = find_spec(specs, flag.name);
        if (!spec)
            throw std::invalid_argument("unknown flag --" + flag.name + " for command " +
                                        command);
        if (flag.value) {
            values[flag.name] = *flag.value;
        } else if (spec->type == FlagType::boolean) {
            values[flag.name] = "true";
        } else {
            throw std::invalid_argument("flag --" + flag.name + " expects a value");
        }
    }

    for (const auto& spec : specs) {
        if (spec.required && !values.count(spec.name))
            throw std::invalid_argument("missing required flag --" + spec.name);
        if (auto it = values.find(spec.name); it != values.end()) check_value(spec, it->second);
    }
    for (const auto& [name, value] : values)
        if (!find_spec(specs, name))
            throw std::invalid_argument("config flag '" + name +
                                        "' is not recognized for command " + command);
    // Drop empty optional placeholders so has() means "feature enabled".
    for (auto it = values.begin(); it != values.end();) {
        if (it->second.empty())
            it = values.erase(it);
        else
            ++it;
    }

    RunConfig cfg;
    cfg.command = command;
    cfg.flags = std::move(values);
    cfg.seed = static_cast<std::uint64_t>(cfg.int_flag("seed"));
    cfg.flags.erase("seed");
    cfg.timestamp = utc_now();
    cfg.version = kVersion;
    return cfg;
}

std::string help_text(const std::string& command, const Registry& registry) {
    std::ostringstream os;
    os << "usage: mlenv " << command << " [--flag value ...]\n";
    auto print = [&](const std::string& heading, const std::vector<FlagSpec>& specs) {
        if (specs.empty()) return;
        os << "\n" << heading << ":\n";
        for (const auto& spec : specs) {
            os << "  --" << spec.name;
            if (spec.required)
                os << " (required)";
            else if (spec.has_default() || spec.type == FlagType::boolean)
                os << " (default "
                   << (spec.default_value.empty() ? "false" : spec.default_value) << ")";
            os << "  " << spec.help << "\n";
        }
    };
    print("general", shared_specs());
    if (command == "tune") {
        print("tuning", tune_specs());
        os << "\nsearched and fixed component flags live in the --config_file; see the\n"
              "train command's help for their names\n";
        return os.str();
    }
    print("components", selection_specs(command));
    print("trainer", trainer_specs(command));
    for (const auto& name : registry.datamodule_names())
        print("datamodule " + name, registry.datamodule(name).flags);
    for (const auto& name : registry.model_names())
        print("model " + name, registry.model(name).flags);
    for (const auto& name : registry.method_names())
        print("method " + name, registry.method(name).flags);
    return os.str();
}

std::vector<int> parse_device_list(const std::string& text) {
    auto trimmed = trim(text);
    auto malformed = [&] {
        return std::invalid_argument("cannot parse device list '" + text +
                                     "'; expected e.g. \"[0]\"");
    };
    if (trimmed.size() < 2 || trimmed.front() != '[' || trimmed.back() != ']') throw malformed();
    auto inner = trim(trimmed.substr(1, trimmed.size() - 2));
    std::vector<int> devices;
    if (inner.empty()) return devices;
    for (const auto& part : split(inner, ',')) {
        auto id = parse_int(trim(part));
        if (!id) throw malformed();
        devices.push_back(static_cast<int>(*id));
    }
    return devices;
}

}  // namespace mlenv::cli
