#include "mlenv/data/idx.hpp"

#include <fstream>
#include <stdexcept>
#include <string>

namespace mlenv::data {

IdxArray load_idx(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open IDX file " + path.string());
    }

    unsigned char magic[4];
    if (!in.read(reinterpret_cast<char*>(magic), 4)) {
        throw std::runtime_error("bad IDX magic in " + path.string() +
                                 ": file is shorter than the 4-byte header");
    }
    if (magic[0] != 0 || magic[1] != 0) {
        throw std::runtime_error("bad IDX magic in " + path.string() +
                                 ": first two bytes must be zero");
    }
    if (magic[2] != 0x08) {
        throw std::runtime_error("unsupported IDX type code 0x" +
                                 [](unsigned v) {
                                     const char* hex = "0123456789abcdef";
                                     return std::string{hex[v >> 4], hex[v & 0xf]};
                                 }(magic[2]) +
                                 " in " + path.string() + "; only 0x08 (unsigned byte) is read");
    }
    const unsigned rank = magic[3];

    IdxArray out;
    out.shape.reserve(rank);
    std::size_t total = 1;
    for (unsigned d = 0; d < rank; ++d) {
        unsigned char b[4];
        if (!in.read(reinterpret_cast<char*>(b), 4)) {
            throw std::runtime_error("truncated IDX header in " + path.string() +
                                     ": missing dimension " + std::to_string(d));
        }
        const std::size_t dim = (std::size_t(b[0]) << 24) | (std::size_t(b[1]) << 16) |
                                (std::size_t(b[2]) << 8) | std::size_t(b[3]);
        out.shape.push_back(dim);
        total *= dim;
    }

    out.data.resize(total);
    in.read(reinterpret_cast<char*>(out.data.data()), static_cast<std::streamsize>(total));
    if (static_cast<std::size_t>(in.gcount()) != total) {
        throw std::runtime_error("truncated IDX payload in " + path.string() + ": expected " +
                                 std::to_string(total) + " bytes, got " +
                                 std::to_string(in.gcount()));
    }
    return out;
}

}  // namespace mlenv::data
