#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "mlenv/common/rng.hpp"
#include "mlenv/models/model.hpp"
#include "mlenv/transforms/transforms.hpp"

using namespace mlenv;
using namespace mlenv::transforms;
using engine::Tensor;

namespace {

std::unique_ptr<models::Model> random_model(Rng& rng) {
    const std::size_t in = 1 + rng.below(6);
    const std::size_t out = 1 + rng.below(5);
    const std::size_t hidden = 1 + rng.below(8);
    const std::size_t depth = 1 + rng.below(3);
    auto m = models::build_fc(in, out, hidden, depth, engine::Activation::relu, rng.next_u64());
    for (auto& p : m->parameters())
        for (auto& v : p.mutable_data()) v = rng.uniform(-3.0, 3.0);
    return m;
}

std::size_t zero_weight_count(const models::Model& m) {
    std::size_t zeros = 0;
    for (const auto& [name, t] : m.named_parameters())
        if (name.ends_with(".weight"))
            for (double v : t.data())
                if (v == 0.0) ++zeros;
    return zeros;
}

std::size_t weight_count(const models::Model& m) {
    std::size_t n = 0;
    for (const auto& [name, t] : m.named_parameters())
        if (name.ends_with(".weight")) n += t.size();
    return n;
}

}  // namespace

TEST_CASE("prune keeps the original untouched and hits exact counts") {
    auto m = models::build_fc(4, 3, 5, 2, engine::Activation::relu, 1);
    Rng rng(2);
    for (auto& p : m->parameters())
        for (auto& v : p.mutable_data()) v = rng.uniform(-1.0, 1.0);

    auto before = m->clone();
    auto pruned = prune_magnitude(*m, 0.5);

    auto pa = m->parameters(), pb = before->parameters();
    for (std::size_t i = 0; i < pa.size(); ++i)
        for (std::size_t j = 0; j < pa[i].size(); ++j)
            CHECK(pa[i].data()[j] == pb[i].data()[j]);

    const std::size_t n = weight_count(*m);
    CHECK(zero_weight_count(*pruned) ==
          static_cast<std::size_t>(std::floor(0.5 * static_cast<double>(n))));

    auto all = prune_magnitude(*m, 1.0);
    CHECK(zero_weight_count(*all) == n);
    auto all_params = all->named_parameters();
    auto orig_params = before->named_parameters();
    for (std::size_t i = 0; i < all_params.size(); ++i) {
        if (!all_params[i].name.ends_with(".bias")) continue;
        for (std::size_t j = 0; j < all_params[i].tensor.size(); ++j)
            CHECK(all_params[i].tensor.data()[j] == orig_params[i].tensor.data()[j]);
    }
}

TEST_CASE("prune sparsity 0 is the identity") {
    Rng rng(3);
    auto m = random_model(rng);
    auto copy = prune_magnitude(*m, 0.0);
    auto pa = m->parameters(), pc = copy->parameters();
    for (std::size_t i = 0; i < pa.size(); ++i)
        for (std::size_t j = 0; j < pa[i].size(); ++j)
            CHECK(pa[i].data()[j] == pc[i].data()[j]);
}

TEST_CASE("prune zeroes the smallest magnitudes") {
    auto m = models::build_fc(2, 2, 2, 1, engine::Activation::identity, 1);
    auto params = m->parameters();
    // layer0.weight 2x2, layer1.weight 2x2; set bias entries to tiny values
    // to prove biases are exempt even when their magnitudes rank smallest
    std::vector<double> w0{0.1, -0.5, 0.2, 0.05};
    std::vector<double> w1{3.0, -4.0, 5.0, -6.0};
    std::copy(w0.begin(), w0.end(), params[0].mutable_data().begin());
    std::copy(w1.begin(), w1.end(), params[2].mutable_data().begin());
    for (auto& b : params[1].mutable_data()) b = 1e-9;
    for (auto& b : params[3].mutable_data()) b = 1e-9;

    // 8 weights total, sparsity 0.25 zeroes the two smallest: 0.05 and 0.1
    auto pruned = prune_magnitude(*m, 0.25);
    auto out = pruned->parameters();
    CHECK(out[0].data()[0] == 0.0);
    CHECK(out[0].data()[1] == -0.5);
    CHECK(out[0].data()[2] == 0.2);
    CHECK(out[0].data()[3] == 0.0);
    for (std::size_t j = 0; j < 4; ++j) CHECK(out[2].data()[j] == w1[j]);
    for (double b : out[1].data()) CHECK(b == 1e-9);

    CHECK_THROWS_AS(prune_magnitude(*m, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(prune_magnitude(*m, 1.5), std::invalid_argument);
}

TEST_CASE("prune ties resolve deterministically by parameter order then index") {
    auto m = models::build_fc(2, 2, 2, 1, engine::Activation::identity, 1);
    auto params = m->parameters();
    for (auto& v : params[0].mutable_data()) v = 0.5;
    for (auto& v : params[2].mutable_data()) v = 0.5;

    auto pruned = prune_magnitude(*m, 0.5);  // zero 4 of 8 equal-magnitude weights
    auto out = pruned->parameters();
    for (std::size_t j = 0; j < 4; ++j) CHECK(out[0].data()[j] == 0.0);
    for (std::size_t j = 0; j < 4; ++j) CHECK(out[2].data()[j] == 0.5);
}

TEST_CASE("prune monotonicity: higher sparsity zeroes a superset") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        auto m = random_model(rng);
        const double s1 = rng.uniform(0.0, 0.5);
        const double s2 = s1 + rng.uniform(0.0, 1.0 - s1);
        auto p1 = prune_magnitude(*m, s1);
        auto p2 = prune_magnitude(*m, s2);
        auto w1 = p1->parameters(), w2 = p2->parameters();
        for (std::size_t i = 0; i < w1.size(); i += 2)  // weights sit at even slots
            for (std::size_t j = 0; j < w1[i].size(); ++j)
                if (w1[i].data()[j] == 0.0) CHECK(w2[i].data()[j] == 0.0);
    }
}

TEST_CASE("quantize_affine formula cases") {
    auto x = Tensor::from_data({3}, {-1.0, 0.0, 1.0});
    auto q = quantize_affine(x, 8);
    CHECK(q.scale == doctest::Approx(2.0 / 255.0).epsilon(1e-12));
    CHECK(q.zero_point == 128);  // round(1 / (2/255)) = round(127.5) away from zero

    auto zeros = quantize_affine(Tensor::zeros({4}), 4);
    CHECK(zeros.scale == 1.0);
    CHECK(zeros.zero_point == 0);
    for (long long v : zeros.q) CHECK(v == 0);
    for (double v : dequantize(zeros)) CHECK(v == 0.0);

    CHECK_THROWS_AS(quantize_affine(x, 1), std::invalid_argument);
    CHECK_THROWS_AS(quantize_affine(x, 9), std::invalid_argument);
}

TEST_CASE("quantization error bounded by half a step") {
    Rng rng(12);
    for (int trial = 0; trial < 200; ++trial) {
        const int bits = 2 + static_cast<int>(rng.below(7));
        const std::size_t n = 1 + rng.below(64);
        std::vector<double> v(n);
        const double span = rng.uniform(0.1, 10.0);
        for (auto& x : v) x = rng.uniform(-span, span);
        auto t = Tensor::from_data({n}, v);

        auto q = quantize_affine(t, bits);
        auto back = dequantize(q);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(std::fabs(back[i] - v[i]) <= q.scale / 2.0 + 1e-12);
    }
}

TEST_CASE("quantize of dequantized values reproduces the integer grid") {
    Rng rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        const int bits = 2 + static_cast<int>(rng.below(7));
        const std::size_t n = 1 + rng.below(32);
        std::vector<double> v(n);
        for (auto& x : v) x = rng.uniform(-4.0, 4.0);

        auto q1 = quantize_affine(Tensor::from_data({n}, v), bits);
        auto deq = dequantize(q1);
        auto q2 = quantize_affine(Tensor::from_data({n}, deq), bits);
        CHECK(q2.zero_point == q1.zero_point);
        CHECK(q2.q == q1.q);
    }
}

TEST_CASE("apply_eval_transforms composes prune then quantize on a copy") {
    Rng rng(14);
    auto m = random_model(rng);
    auto snapshot = m->clone();

    EvalTransformConfig cfg;
    CHECK(!cfg.enabled());
    auto unchanged = apply_eval_transforms(*m, cfg);
    auto pu = unchanged->parameters(), pm = m->parameters();
    for (std::size_t i = 0; i < pm.size(); ++i)
        for (std::size_t j = 0; j < pm[i].size(); ++j)
            CHECK(pu[i].data()[j] == pm[i].data()[j]);

    cfg.prune_sparsity = 1.0;
    cfg.quantize_bits = 4;
    CHECK(cfg.enabled());
    auto transformed = apply_eval_transforms(*m, cfg);
    for (const auto& [name, t] : transformed->named_parameters())
        if (name.ends_with(".weight"))
            for (double v : t.data()) CHECK(v == 0.0);

    // original untouched
    auto ps = snapshot->parameters();
    pm = m->parameters();
    for (std::size_t i = 0; i < pm.size(); ++i)
        for (std::size_t j = 0; j < pm[i].size(); ++j)
            CHECK(pm[i].data()[j] == ps[i].data()[j]);
}

TEST_CASE("partial transforms: prune only and quantize only") {
    Rng rng(15);
    auto m = random_model(rng);

    EvalTransformConfig prune_only;
    prune_only.prune_sparsity = 0.25;
    auto pruned = apply_eval_transforms(*m, prune_only);
    const std::size_t n = weight_count(*m);
    CHECK(zero_weight_count(*pruned) >=
          static_cast<std::size_t>(std::floor(0.25 * static_cast<double>(n))));

    EvalTransformConfig quant_only;
    quant_only.quantize_bits = 8;
    auto quantized = apply_eval_transforms(*m, quant_only);
    for (std::size_t i = 0; i < m->parameters().size(); i += 2) {
        auto orig = m->parameters()[i];
        auto qt = quantized->parameters()[i];
        auto q = quantize_affine(orig, 8);
        for (std::size_t j = 0; j < orig.size(); ++j)
            CHECK(std::fabs(qt.data()[j] - orig.data()[j]) <= q.scale / 2.0 + 1e-12);
    }
    // biases survive untouched
    for (std::size_t i = 1; i < m->parameters().size(); i += 2) {
        auto orig = m->parameters()[i];
        auto qt = quantized->parameters()[i];
        for (std::size_t j = 0; j < orig.size(); ++j) CHECK(qt.data()[j] == orig.data()[j]);
    }
}
