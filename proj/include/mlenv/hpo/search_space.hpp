#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace mlenv::hpo {

enum class DomainKind { categorical, grid, uniform, loguniform };

struct Domain {
    DomainKind kind = DomainKind::categorical;
    std::vector<std::string> values;  // categorical / grid points, in listed order
    double lo = 0.0;                  // uniform / loguniform bounds
    double hi = 0.0;

    bool operator==(const Domain&) const = default;
};

/// One value per searched flag, keyed by bare flag name (no leading dashes).
using Assignment = std::map<std::string, std::string>;

struct SearchSpace {
    std::map<std::string, Domain> entries;
    std::map<std::string, std::string> base_args;  // fixed flags shared by all trials

    bool operator==(const SearchSpace&) const = default;
};

/// Text format, one entry per line. A `search:` line (the initial mode)
/// introduces `<flag>: grid[...]` / `categorical[...]` / `uniform(lo,hi)` /
/// `loguniform(lo,hi)` entries; a `base:` line introduces fixed
/// `<flag>: <value>` pairs. Blank lines and #-comments are skipped.
SearchSpace parse_search_space(const std::filesystem::path& path);

/// Canonical text form; parsing it back yields an equal space.
std::string serialize_search_space(const SearchSpace& space);

/// Full Cartesian product over sorted flag names, rightmost varying fastest.
/// Every domain must be categorical or grid.
std::vector<Assignment> grid_enumerate(const SearchSpace& space);

/// Seeded i.i.d. draws: uniform over lists, uniform over [lo,hi], and
/// exp(uniform(ln lo, ln hi)) for loguniform.
std::vector<Assignment> random_sample(const SearchSpace& space, std::size_t n,
                                      std::uint64_t seed);

}  // namespace mlenv::hpo
