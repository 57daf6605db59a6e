#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace mlenv::data {

struct IdxArray {
    std::vector<std::size_t> shape;
    std::vector<std::uint8_t> data;
};

/// Reads an IDX file: two zero bytes, a type code (only 0x08, unsigned byte,
/// is supported), a rank byte, big-endian 32-bit dimension sizes, then the
/// row-major payload. Bad magic, an unsupported type code, and a truncated
/// payload each raise a distinct error naming the file.
IdxArray load_idx(const std::filesystem::path& path);

}  // namespace mlenv::data
