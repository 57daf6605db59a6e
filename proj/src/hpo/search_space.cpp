#include "mlenv/hpo/search_space.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mlenv/common/rng.hpp"
#include "mlenv/common/text.hpp"

namespace mlenv::hpo {
namespace {

constexpr std::uint64_t kSampleStream = 0x73616d70;

[[noreturn]] void fail(std::size_t line, const std::string& message) {
    throw std::runtime_error("search space line " + std::to_string(line) + ": " + message);
}

std::vector<std::string> parse_list(std::size_t line, std::string_view body,
                                    const std::string& flag) {
    std::vector<std::string> items;
    for (const auto& raw : split(body, ',')) {
        auto item = trim(raw);
        if (item.empty()) fail(line, "empty element in the list for " + flag);
        items.push_back(item);
    }
    if (items.empty()) fail(line, "empty list for " + flag);
    return items;
}

std::pair<double, double> parse_bounds(std::size_t line, std::string_view body,
                                       const std::string& flag) {
    auto parts = split(body, ',');
    if (parts.size() != 2) fail(line, "expected two bounds for " + flag);
    auto lo = parse_double(trim(parts[0]));
    auto hi = parse_double(trim(parts[1]));
    if (!lo || !hi) fail(line, "non-numeric bound for " + flag);
    if (!(*lo < *hi))
        fail(line, "invalid range for " + flag + ": lo " + format_double(*lo) +
                       " must be below hi " + format_double(*hi));
    return {*lo, *hi};
}

Domain parse_domain(std::size_t line, const std::string& flag, const std::string& text) {
    Domain d;
    auto bracket_body = [&](std::string_view prefix) {
        return std::string(text.substr(prefix.size(), text.size() - prefix.size() - 1));
    };
    if (starts_with(text, "grid[") && ends_with(text, "]")) {
        d.kind = DomainKind::grid;
        d.values = parse_list(line, bracket_body("grid["), flag);
        for (const auto& v : d.values)
            if (!parse_double(v)) fail(line, "non-numeric grid point '" + v + "' for " + flag);
    } else if (starts_with(text, "categorical[") && ends_with(text, "]")) {
        d.kind = DomainKind::categorical;
        d.values = parse_list(line, bracket_body("categorical["), flag);
    } else if (starts_with(text, "uniform(") && ends_with(text, ")")) {
        d.kind = DomainKind::uniform;
        std::tie(d.lo, d.hi) = parse_bounds(line, bracket_body("uniform("), flag);
    } else if (starts_with(text, "loguniform(") && ends_with(text, ")")) {
        d.kind = DomainKind::loguniform;
        std::tie(d.lo, d.hi) = parse_bounds(line, bracket_body("loguniform("), flag);
        if (d.lo <= 0.0) fail(line, "loguniform for " + flag + " requires lo > 0");
    } else {
        fail(line, "unknown domain '" + text +
                       "' (expected grid[...], categorical[...], uniform(lo,hi), "
                       "loguniform(lo,hi))");
    }
    return d;
}

}  // namespace

SearchSpace parse_search_space(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open search space file: " + path.string());

    SearchSpace space;
    bool in_base = false;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        auto line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (line == "base:") {
            in_base = true;
            continue;
        }
        if (line == "search:") {
            in_base = false;
            continue;
        }
        auto colon = line.find(':');
        if (colon == std::string::npos) fail(line_no, "expected '<flag>: <value>', got '" + line + "'");
        auto flag = trim(line.substr(0, colon));
        auto rest = trim(line.substr(colon + 1));
        if (flag.empty()) fail(line_no, "missing flag name");
        if (rest.empty()) fail(line_no, "missing value for " + flag);
        if (in_base) {
            if (!space.base_args.emplace(flag, rest).second)
                fail(line_no, "duplicate base entry for " + flag);
        } else {
            if (space.entries.count(flag)) fail(line_no, "duplicate search entry for " + flag);
            space.entries.emplace(flag, parse_domain(line_no, flag, rest));
        }
    }
    if (space.entries.empty())
        throw std::runtime_error("search space file " + path.string() +
                                 " defines no search entries");
    return space;
}

std::string serialize_search_space(const SearchSpace& space) {
    std::ostringstream os;
    if (!space.base_args.empty()) {
        os << "base:\n";
        for (const auto& [flag, value] : space.base_args) os << "  " << flag << ": " << value << "\n";
    }
    os << "search:\n";
    for (const auto& [flag, d] : space.entries) {
        os << "  " << flag << ": ";
        switch (d.kind) {
            case DomainKind::grid:
                os << "grid[" << join(d.values, ", ") << "]";
                break;
            case DomainKind::categorical:
                os << "categorical[" << join(d.values, ", ") << "]";
                break;
            case DomainKind::uniform:
                os << "uniform(" << format_double(d.lo) << ", " << format_double(d.hi) << ")";
                break;
            case DomainKind::loguniform:
                os << "loguniform(" << format_double(d.lo) << ", " << format_double(d.hi) << ")";
                break;
        }
        os << "\n";
    }
    return os.str();
}

std::vector<Assignment> grid_enumerate(const SearchSpace& space) {
    std::vector<std::string> flags;
    std::vector<const Domain*> domains;
    std::size_t total = 1;
    for (const auto& [flag, d] : space.entries) {
        if (d.kind == DomainKind::uniform || d.kind == DomainKind::loguniform)
            throw std::invalid_argument("grid search cannot enumerate the continuous domain of " +
                                        flag + "; use grid[...] or categorical[...]");
        flags.push_back(flag);
        domains.push_back(&d);
        total *= d.values.size();
    }

    std::vector<Assignment> out;
    out.reserve(total);
    std::vector<std::size_t> odometer(flags.size(), 0);
    for (std::size_t k = 0; k < total; ++k) {
        Assignment a;
        for (std::size_t i = 0; i < flags.size(); ++i) a[flags[i]] = domains[i]->values[odometer[i]];
        out.push_back(std::move(a));
        for (std::size_t i = flags.size(); i-- > 0;) {
            if (++odometer[i] < domains[i]->values.size()) break;
            odometer[i] = 0;
        }
    }
    return out;
}

std::vector<Assignment> random_sample(const SearchSpace& space, std::size_t n,
                                      std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("random_sample requires n >= 1");
    Rng rng(mix_seed(seed, kSampleStream));
    std::vector<Assignment> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        Assignment a;
        for (const auto& [flag, d] : space.entries) {
            switch (d.kind) {
                case DomainKind::categorical:
                case DomainKind::grid:
                    a[flag] = d.values[rng.below(d.values.size())];
                    break;
                case DomainKind::uniform:
                    a[flag] = format_double(rng.uniform(d.lo, d.hi));
                    break;
                case DomainKind::loguniform:
                    a[flag] = format_double(std::exp(rng.uniform(std::log(d.lo), std::log(d.hi))));
                    break;
            }
        }
        out.push_back(std::move(a));
    }
    return out;
}

}  // namespace mlenv::hpo
