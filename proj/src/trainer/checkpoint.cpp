#include "mlenv/trainer/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

namespace mlenv::trainer {
namespace {

constexpr char kMagic[4] = {'M', 'L', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint64_t kMaxElements = 1ULL << 32;

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof bits);
    put_u64(os, bits);
}

[[noreturn]] void truncated(const std::filesystem::path& path) {
    throw std::runtime_error("truncated checkpoint: " + path.string());
}

std::uint32_t get_u32(std::istream& is, const std::filesystem::path& path) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) truncated(path);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

std::uint64_t get_u64(std::istream& is, const std::filesystem::path& path) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) truncated(path);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& is, const std::filesystem::path& path) {
    std::uint64_t bits = get_u64(is, path);
    double d;
    std::memcpy(&d, &bits, sizeof d);
    return d;
}

std::vector<double> get_f64_array(std::istream& is, const std::filesystem::path& path,
                                  std::uint64_t count) {
    if (count > kMaxElements)
        throw std::runtime_error("corrupt checkpoint (implausible array size): " + path.string());
    std::vector<double> out(count);
    for (auto& x : out) x = get_f64(is, path);
    return out;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const models::Model& model,
                     const methods::OptimizerState& optimizer, std::uint64_t epoch) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open checkpoint for writing: " + path.string());

    os.write(kMagic, 4);
    put_u32(os, kVersion);
    put_u64(os, epoch);

    auto named = model.named_parameters();
    put_u32(os, static_cast<std::uint32_t>(named.size()));
    for (const auto& p : named) {
        put_u32(os, static_cast<std::uint32_t>(p.name.size()));
        os.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
        put_u32(os, static_cast<std::uint32_t>(p.tensor.rank()));
        for (std::size_t d : p.tensor.shape()) put_u64(os, d);
        for (double x : p.tensor.data()) put_f64(os, x);
    }

    put_u64(os, optimizer.step_count);
    put_u32(os, static_cast<std::uint32_t>(optimizer.m.size()));
    for (const auto& moments : optimizer.m) {
        put_u64(os, moments.size());
        for (double x : moments) put_f64(os, x);
    }
    put_u32(os, static_cast<std::uint32_t>(optimizer.v.size()));
    for (const auto& moments : optimizer.v) {
        put_u64(os, moments.size());
        for (double x : moments) put_f64(os, x);
    }

    os.flush();
    if (!os) throw std::runtime_error("failed writing checkpoint: " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open checkpoint: " + path.string());

    char magic[4];
    if (!is.read(magic, 4)) truncated(path);
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("not a checkpoint file: " + path.string());
    std::uint32_t version = get_u32(is, path);
    if (version != kVersion)
        throw std::runtime_error("unsupported checkpoint version " + std::to_string(version) +
                                 ": " + path.string());

    Checkpoint ck;
    ck.epoch = get_u64(is, path);

    std::uint32_t param_count = get_u32(is, path);
    ck.params.reserve(param_count);
    for (std::uint32_t i = 0; i < param_count; ++i) {
        std::uint32_t name_len = get_u32(is, path);
        if (name_len > 4096)
            throw std::runtime_error("corrupt checkpoint (implausible name length): " +
                                     path.string());
        std::string name(name_len, '\0');
        if (name_len > 0 && !is.read(name.data(), name_len)) truncated(path);
        std::uint32_t rank = get_u32(is, path);
        if (rank > 8)
            throw std::runtime_error("corrupt checkpoint (implausible rank): " + path.string());
        engine::Shape shape(rank);
        std::uint64_t numel = 1;
        for (auto& d : shape) {
            d = get_u64(is, path);
            if (d == 0 || d > kMaxElements)
                throw std::runtime_error("corrupt checkpoint (bad dimension): " + path.string());
            numel *= d;
            if (numel > kMaxElements)
                throw std::runtime_error("corrupt checkpoint (implausible array size): " +
                                         path.string());
        }
        auto data = get_f64_array(is, path, numel);
        ck.params.push_back({std::move(name), engine::Tensor::from_data(shape, data)});
    }

    ck.optimizer.step_count = get_u64(is, path);
    std::uint32_t m_count = get_u32(is, path);
    ck.optimizer.m.reserve(m_count);
    for (std::uint32_t i = 0; i < m_count; ++i)
        ck.optimizer.m.push_back(get_f64_array(is, path, get_u64(is, path)));
    std::uint32_t v_count = get_u32(is, path);
    ck.optimizer.v.reserve(v_count);
    for (std::uint32_t i = 0; i < v_count; ++i)
        ck.optimizer.v.push_back(get_f64_array(is, path, get_u64(is, path)));

    return ck;
}

void load_checkpoint(const std::filesystem::path& path, models::Model& model,
                     methods::OptimizerState& optimizer, std::uint64_t* epoch) {
    Checkpoint ck = read_checkpoint(path);
    auto named = model.named_parameters();
    if (ck.params.size() != named.size())
        throw std::runtime_error("checkpoint " + path.string() + " holds " +
                                 std::to_string(ck.params.size()) + " parameters, model has " +
                                 std::to_string(named.size()));
    for (std::size_t i = 0; i < named.size(); ++i) {
        if (ck.params[i].name != named[i].name)
            throw std::runtime_error("checkpoint parameter " + std::to_string(i) + " is named " +
                                     ck.params[i].name + ", model expects " + named[i].name);
        if (ck.params[i].tensor.shape() != named[i].tensor.shape())
            throw std::runtime_error(
                "shape mismatch for " + named[i].name + ": checkpoint " +
                engine::shape_str(ck.params[i].tensor.shape()) + ", model " +
                engine::shape_str(named[i].tensor.shape()));
    }
    for (std::size_t i = 0; i < named.size(); ++i) {
        auto src = ck.params[i].tensor.data();
        auto dst = named[i].tensor.mutable_data();
        std::copy(src.begin(), src.end(), dst.begin());
    }
    optimizer = std::move(ck.optimizer);
    if (epoch) *epoch = ck.epoch;
}

}  // namespace mlenv::trainer
