#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "mlenv/common/rng.hpp"
#include "mlenv/data/datamodule.hpp"
#include "mlenv/data/dataset.hpp"
#include "mlenv/data/idx.hpp"
#include "mlenv/data/synthetic.hpp"
#include "support/idx_writer.hpp"
#include "support/oracles.hpp"

using namespace mlenv::data;
using mlenv::Rng;

namespace fs = std::filesystem;

namespace {

/// Fresh directory under the system temp root, removed on destruction.
struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("mlenv_test_" + std::to_string(Rng(std::random_device{}()).next_u64()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("batch plan covers every index exactly once") {
    BatchPlan plan(10, 4, false, 0);
    REQUIRE(plan.num_batches() == 3);
    CHECK(plan.batch(0).size() == 4);
    CHECK(plan.batch(1).size() == 4);
    CHECK(plan.batch(2).size() == 2);
    for (std::size_t i = 0; i < 10; ++i) CHECK(plan.order()[i] == i);

    BatchPlan shuffled(10, 4, true, 7);
    std::multiset<std::size_t> seen(shuffled.order().begin(), shuffled.order().end());
    for (std::size_t i = 0; i < 10; ++i) CHECK(seen.count(i) == 1);

    BatchPlan again(10, 4, true, 7);
    CHECK(again.order() == shuffled.order());
    BatchPlan other(10, 4, true, 8);
    CHECK(other.order() != shuffled.order());

    CHECK_THROWS_AS(BatchPlan(10, 0, false, 0), std::invalid_argument);
    CHECK_THROWS_AS(plan.batch(3), std::out_of_range);
}

TEST_CASE("batch plan properties over random sizes") {
    Rng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t count = 1 + rng.below(200);
        const std::size_t bs = 1 + rng.below(40);
        BatchPlan plan(count, bs, rng.below(2) == 1, rng.next_u64());
        CHECK(plan.num_batches() == (count + bs - 1) / bs);
        std::multiset<std::size_t> seen;
        for (std::size_t k = 0; k < plan.num_batches(); ++k) {
            auto b = plan.batch(k);
            CHECK(b.size() <= bs);
            if (k + 1 < plan.num_batches()) CHECK(b.size() == bs);
            seen.insert(b.begin(), b.end());
        }
        CHECK(seen.size() == count);
        for (std::size_t i = 0; i < count; ++i) CHECK(seen.count(i) == 1);
    }
}

TEST_CASE("make_batch gathers rows and targets") {
    Dataset ds;
    ds.task = TaskKind::classification;
    ds.input_dim = 2;
    ds.inputs = {0, 1, 10, 11, 20, 21, 30, 31};
    ds.targets = {0, 1, 2, 0};
    REQUIRE(ds.size() == 4);

    std::vector<std::size_t> idx{3, 1};
    auto batch = make_batch(ds, idx);
    CHECK(batch.size() == 2);
    CHECK(batch.inputs.shape() == mlenv::engine::Shape{2, 2});
    CHECK(batch.inputs.data()[0] == 30.0);
    CHECK(batch.inputs.data()[3] == 11.0);
    CHECK(batch.targets.shape() == mlenv::engine::Shape{2});
    CHECK(batch.targets.data()[0] == 0.0);
    CHECK(batch.targets.data()[1] == 1.0);

    Dataset reg;
    reg.task = TaskKind::regression;
    reg.input_dim = 1;
    reg.target_dim = 2;
    reg.inputs = {1, 2, 3};
    reg.targets = {10, 11, 20, 21, 30, 31};
    auto rbatch = make_batch(reg, std::vector<std::size_t>{2});
    CHECK(rbatch.targets.shape() == mlenv::engine::Shape{1, 2});
    CHECK(rbatch.targets.data()[1] == 31.0);

    CHECK_THROWS_AS(make_batch(ds, std::vector<std::size_t>{}), std::invalid_argument);
}

TEST_CASE("idx round-trip for ranks 1 through 3") {
    TempDir tmp;
    Rng rng(5);
    for (int rank = 1; rank <= 3; ++rank) {
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<std::size_t> shape;
            std::size_t total = 1;
            for (int d = 0; d < rank; ++d) {
                shape.push_back(1 + rng.below(6));
                total *= shape.back();
            }
            std::vector<std::uint8_t> data(total);
            for (auto& b : data) b = static_cast<std::uint8_t>(rng.below(256));

            const auto file = tmp.path / ("rt" + std::to_string(rank) + ".idx");
            oracles::write_idx(file, shape, data);
            auto arr = load_idx(file);
            CHECK(arr.shape == shape);
            CHECK(arr.data == data);
        }
    }
}

TEST_CASE("idx fixture examples") {
    TempDir tmp;
    const auto vec = tmp.path / "v.idx";
    oracles::write_idx(vec, {3}, {7, 2, 1});
    auto arr = load_idx(vec);
    CHECK(arr.shape == std::vector<std::size_t>{3});
    CHECK(arr.data == std::vector<std::uint8_t>{7, 2, 1});

    const auto img = tmp.path / "img.idx";
    std::vector<std::uint8_t> pixels(2 * 28 * 28, 9);
    oracles::write_idx(img, {2, 28, 28}, pixels);
    auto images = load_idx(img);
    CHECK(images.shape == std::vector<std::size_t>{2, 28, 28});
    CHECK(images.data.size() == 1568);
}

TEST_CASE("idx errors are distinct and name the file") {
    TempDir tmp;

    const auto missing = tmp.path / "nope.idx";
    CHECK_THROWS_WITH_AS(load_idx(missing), doctest::Contains("nope.idx"), std::runtime_error);

    const auto bad_magic = tmp.path / "magic.idx";
    std::ofstream(bad_magic, std::ios::binary).write("\x01\x00\x08\x01", 4);
    CHECK_THROWS_WITH_AS(load_idx(bad_magic), doctest::Contains("bad IDX magic"),
                         std::runtime_error);

    const auto bad_type = tmp.path / "type.idx";
    {
        std::ofstream out(bad_type, std::ios::binary);
        out.write("\x00\x00\x0d\x01", 4);
        out.write("\x00\x00\x00\x01", 4);
        out.put('\x05');
    }
    CHECK_THROWS_WITH_AS(load_idx(bad_type), doctest::Contains("unsupported IDX type code 0x0d"),
                         std::runtime_error);

    const auto truncated = tmp.path / "short.idx";
    {
        std::ofstream out(truncated, std::ios::binary);
        out.write("\x00\x00\x08\x01", 4);
        out.write("\x00\x00\x00\x05", 4);
        out.write("\x01\x02", 2);
    }
    CHECK_THROWS_WITH_AS(load_idx(truncated), doctest::Contains("truncated IDX payload"),
                         std::runtime_error);

    const auto no_dims = tmp.path / "nodims.idx";
    std::ofstream(no_dims, std::ios::binary).write("\x00\x00\x08\x02", 4);
    CHECK_THROWS_WITH_AS(load_idx(no_dims), doctest::Contains("truncated IDX header"),
                         std::runtime_error);
}

TEST_CASE("synthetic classification is balanced, deterministic, separated") {
    auto ds = make_synthetic_classification(300, 3, 12345);
    REQUIRE(ds.size() == 300);
    CHECK(ds.input_dim == 2);
    std::vector<int> counts(3, 0);
    for (double t : ds.targets) ++counts[static_cast<int>(t)];
    for (int c : counts) CHECK(c == 100);

    auto again = make_synthetic_classification(300, 3, 12345);
    CHECK(again.inputs == ds.inputs);
    CHECK(again.targets == ds.targets);

    auto other_seed = make_synthetic_classification(300, 3, 54321);
    CHECK(other_seed.inputs != ds.inputs);

    auto other_stream = make_synthetic_classification(300, 3, 12345, 0.35, 1);
    CHECK(other_stream.inputs != ds.inputs);

    // centroid separation for the chosen radius and noise
    std::vector<double> cx(3, 0), cy(3, 0);
    for (std::size_t i = 0; i < 300; ++i) {
        const int c = static_cast<int>(ds.targets[i]);
        cx[c] += ds.inputs[2 * i] / 100.0;
        cy[c] += ds.inputs[2 * i + 1] / 100.0;
    }
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b) {
            const double dist = std::hypot(cx[a] - cx[b], cy[a] - cy[b]);
            CHECK(dist > 0.5);
        }

    CHECK_THROWS_AS(make_synthetic_classification(1, 2, 0), std::invalid_argument);
    CHECK_THROWS_AS(make_synthetic_classification(10, 1, 0), std::invalid_argument);
}

TEST_CASE("synthetic regression matches its linear ground truth") {
    std::vector<double> truth;
    auto ds = make_synthetic_regression(200, 0.0, 99, 5, 0, &truth);
    REQUIRE(truth.size() == 6);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        double y = truth[5];
        for (std::size_t j = 0; j < 5; ++j) y += truth[j] * ds.inputs[i * 5 + j];
        CHECK(ds.targets[i] == y);
    }

    auto beta = oracles::lstsq_with_intercept(ds.inputs, ds.targets, ds.size(), 5);
    for (std::size_t j = 0; j < 6; ++j) CHECK(std::fabs(beta[j] - truth[j]) < 1e-8);

    auto again = make_synthetic_regression(200, 0.0, 99, 5);
    CHECK(again.targets == ds.targets);

    std::vector<double> truth_b;
    make_synthetic_regression(10, 0.0, 100, 5, 0, &truth_b);
    CHECK(truth != truth_b);

    CHECK_THROWS_AS(make_synthetic_regression(0, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_synthetic_regression(10, -0.5, 1), std::invalid_argument);
}

TEST_CASE("datamodule split carves validation from the train pool") {
    SyntheticClassificationModule dm(100, 4, 7);
    CHECK_THROWS_WITH_AS(dm.split(0.1, 1), doctest::Contains("prepare()"), std::logic_error);

    dm.prepare(".");
    dm.split(0.1, 1);
    CHECK(dm.train().size() == 90);
    CHECK(dm.validation().size() == 10);
    CHECK(dm.test().size() == 20);

    dm.split(0.0, 1);
    CHECK(dm.train().size() == 100);
    CHECK(dm.validation().size() == 0);

    CHECK_THROWS_AS(dm.split(1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(dm.split(-0.1, 1), std::invalid_argument);
    CHECK_THROWS_AS(dm.split(std::nan(""), 1), std::invalid_argument);
}

TEST_CASE("same split seed gives the same assignment, different seeds differ") {
    SyntheticClassificationModule a(64, 2, 3), b(64, 2, 3), c(64, 2, 3);
    a.prepare(".");
    b.prepare(".");
    c.prepare(".");
    a.split(0.25, 11);
    b.split(0.25, 11);
    c.split(0.25, 12);
    CHECK(a.validation_indices() == b.validation_indices());
    CHECK(a.train_indices() == b.train_indices());
    CHECK(a.validation_indices() != c.validation_indices());
}

TEST_CASE("split disjointness and conservation over random configurations") {
    Rng rng(17);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t classes = 2 + rng.below(5);
        const std::size_t n = classes + rng.below(150);
        const double portion = rng.uniform(0.0, 0.95);
        SyntheticClassificationModule dm(n, classes, rng.next_u64());
        dm.prepare(".");
        dm.split(portion, rng.next_u64());

        const auto& tr = dm.train_indices();
        const auto& va = dm.validation_indices();
        CHECK(va.size() == static_cast<std::size_t>(std::floor(portion * double(n))));
        CHECK(tr.size() + va.size() == n);

        std::set<std::size_t> all(tr.begin(), tr.end());
        all.insert(va.begin(), va.end());
        CHECK(all.size() == n);  // no index in both sets, none lost
        CHECK(*all.rbegin() == n - 1);
    }
}

TEST_CASE("prepare is idempotent") {
    SyntheticClassificationModule dm(50, 2, 21);
    dm.prepare(".");
    const auto snapshot = dm.test().inputs;
    dm.prepare(".");
    CHECK(dm.test().inputs == snapshot);
}

TEST_CASE("mnist module reads standard idx files") {
    TempDir tmp;
    const auto dir = tmp.path / "mnist";
    fs::create_directories(dir);

    Rng rng(8);
    auto make_pair = [&](const std::string& image_name, const std::string& label_name,
                         std::size_t n) {
        std::vector<std::uint8_t> pixels(n * 28 * 28);
        for (auto& p : pixels) p = static_cast<std::uint8_t>(rng.below(256));
        std::vector<std::uint8_t> labels(n);
        for (auto& l : labels) l = static_cast<std::uint8_t>(rng.below(10));
        oracles::write_idx(dir / image_name, {n, 28, 28}, pixels);
        oracles::write_idx(dir / label_name, {n}, labels);
    };
    make_pair("train-images-idx3-ubyte", "train-labels-idx1-ubyte", 12);
    make_pair("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte", 5);

    MnistModule dm;
    dm.prepare(tmp.path);
    dm.split(0.25, 4);
    CHECK(dm.input_shape() == std::vector<std::size_t>{784});
    CHECK(dm.input_dim() == 784);
    CHECK(dm.output_dim() == 10);
    CHECK(dm.train().size() == 9);
    CHECK(dm.validation().size() == 3);
    CHECK(dm.test().size() == 5);
    for (double v : dm.test().inputs) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("mnist module errors name the offending file") {
    TempDir tmp;
    fs::create_directories(tmp.path / "mnist");
    MnistModule dm;
    CHECK_THROWS_WITH_AS(dm.prepare(tmp.path), doctest::Contains("train-images-idx3-ubyte"),
                         std::runtime_error);

    oracles::write_idx(tmp.path / "mnist" / "train-images-idx3-ubyte", {2, 28, 28},
                       std::vector<std::uint8_t>(1568, 0));
    oracles::write_idx(tmp.path / "mnist" / "train-labels-idx1-ubyte", {3},
                       std::vector<std::uint8_t>{1, 2, 3});
    MnistModule dm2;
    CHECK_THROWS_WITH_AS(dm2.prepare(tmp.path), doctest::Contains("label count"),
                         std::runtime_error);
}
