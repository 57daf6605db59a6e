#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

namespace mlenv::cli {

enum class FlagType { integer, real, text, boolean };

/// One command-line flag. A flag is either required, defaulted, or optional
/// (no default: absence disables the feature, e.g. method_prune_sparsity).
struct FlagSpec {
    std::string name;  // bare name without the leading dashes
    FlagType type = FlagType::text;
    std::string default_value;
    bool required = false;
    std::string help;

    bool has_default() const { return !required && !default_value.empty(); }
};

/// Every resolved setting of one run. Serialized to config.json; replaying a
/// config file reproduces the run's metrics exactly.
struct RunConfig {
    std::string command;  // train, test, or tune
    std::map<std::string, std::string> flags;  // resolved values, defaults included
    std::uint64_t seed = 42;
    std::string timestamp;  // UTC, set when the run was configured
    std::string version;    // framework version stamp

    bool has(const std::string& name) const { return flags.count(name) != 0; }
    const std::string& flag(const std::string& name) const;
    long long int_flag(const std::string& name) const;
    double real_flag(const std::string& name) const;
    bool bool_flag(const std::string& name) const;

    std::string to_json() const;  // stable key order
    static RunConfig from_json_text(const std::string& text);
    static RunConfig load(const std::filesystem::path& path);
};

}  // namespace mlenv::cli
