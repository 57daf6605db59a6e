#include "mlenv/cli/flags.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "mlenv/common/text.hpp"

namespace mlenv::cli {

const std::string& RunConfig::flag(const std::string& name) const {
    auto it = flags.find(name);
    if (it == flags.end()) throw std::out_of_range("flag --" + name + " was not set");
    return it->second;
}

long long RunConfig::int_flag(const std::string& name) const {
    auto parsed = parse_int(flag(name));
    if (!parsed)
        throw std::invalid_argument("flag --" + name + " expects an integer, got '" +
                                    flag(name) + "'");
    return *parsed;
}

double RunConfig::real_flag(const std::string& name) const {
    auto parsed = parse_double(flag(name));
    if (!parsed)
        throw std::invalid_argument("flag --" + name + " expects a number, got '" + flag(name) +
                                    "'");
    return *parsed;
}

bool RunConfig::bool_flag(const std::string& name) const {
    const auto& v = flag(name);
    if (v == "true") return true;
    if (v == "false") return false;
    throw std::invalid_argument("flag --" + name + " expects true or false, got '" + v + "'");
}

std::string RunConfig::to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["flags"] = flags;
    j["seed"] = seed;
    j["timestamp"] = timestamp;
    j["version"] = version;
    return j.dump(2) + "\n";
}

RunConfig RunConfig::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("config file is not valid JSON: ") + e.what());
    }
    for (const char* field : {"command", "flags", "seed", "timestamp", "version"})
        if (!j.contains(field))
            throw std::runtime_error(std::string("config file missing field '") + field + "'");

    RunConfig cfg;
    if (!j["command"].is_string()) throw std::runtime_error("config field 'command' must be text");
    cfg.command = j["command"].get<std::string>();
    if (!j["flags"].is_object()) throw std::runtime_error("config field 'flags' must be an object");
    for (const auto& [key, value] : j["flags"].items()) {
        if (!value.is_string())
            throw std::runtime_error("config flag '" + key + "' must be text");
        cfg.flags[key] = value.get<std::string>();
    }
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
        throw std::runtime_error("config field 'seed' must be an integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
    cfg.timestamp = j["timestamp"].get<std::string>();
    cfg.version = j["version"].get<std::string>();
    return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file: " + path.string());
    std::ostringstream buffer;
    buffer << is.rdbuf();
    return from_json_text(buffer.str());
}

}  // namespace mlenv::cli
