#include <cmath>
#include <random>

#include "doctest.h"
#include "steipcn/core.hpp"
#include "steipcn/errors.hpp"
#include "steipcn/gradcheck.hpp"

using namespace steipcn;

namespace {

Tensor<double> randn(ParamRegistry<double>& reg, const std::string& name, Shape dims, std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    auto t = tensor<double>(std::move(dims));
    for (auto& v : t->v) v = dist(rng);
    return reg.add(name, std::move(t));
}

}  // namespace

TEST_SUITE("core") {
    TEST_CASE("linear identity and scalar affine") {
        Tape<double> tape;
        auto x = tensor_of<double>({1, 2}, {1, 2});
        auto w = tensor_of<double>({2, 2}, {1, 0, 0, 1});
        auto b = tensor_of<double>({2}, {0, 0});
        auto y = linear(tape, x, w, b);
        CHECK(y->v == std::vector<double>{1, 2});

        auto x1 = tensor_of<double>({1, 1}, {1});
        auto w1 = tensor_of<double>({1, 1}, {3});
        auto b1 = tensor_of<double>({1}, {-1});
        CHECK(linear(tape, x1, w1, b1)->v[0] == doctest::Approx(2.0));
    }

    TEST_CASE("linear rejects shape mismatch") {
        Tape<double> tape;
        auto x = tensor<double>({3, 4});
        auto w = tensor<double>({2, 5});
        auto b = tensor<double>({2});
        CHECK_THROWS_AS(linear(tape, x, w, b), ContractError);
    }

    TEST_CASE("linear gradcheck vs central differences") {
        std::mt19937_64 rng(1);
        ParamRegistry<double> reg;
        auto x = randn(reg, "x", {4, 3}, rng);
        auto w = randn(reg, "w", {2, 3}, rng);
        auto b = randn(reg, "b", {2}, rng);
        auto report = check_gradients(reg, [&](Tape<double>& tape) {
            auto y = linear(tape, x, w, b);
            return sum_all(tape, elementwise_mul(tape, y, y));
        });
        CHECK(report.max_rel_err < 1e-4);
    }

    TEST_CASE("conv1d pointwise identity") {
        Tape<double> tape;
        auto x = tensor_of<double>({4, 1}, {1, 2, 3, 4});
        auto w = tensor_of<double>({1, 1, 1}, {1});
        auto b = tensor_of<double>({1}, {0});
        auto y = causal_dilated_conv1d(tape, x, w, b, 1);
        CHECK(y->v == x->v);
    }

    TEST_CASE("conv1d dilated impulse response") {
        // x = impulse at t=0, k=3, dilation=2, all-ones kernel:
        // out[t] = x[t] + x[t-2] + x[t-4]
        Tape<double> tape;
        auto x = tensor_of<double>({6, 1}, {1, 0, 0, 0, 0, 0});
        auto w = tensor_of<double>({1, 1, 3}, {1, 1, 1});
        auto b = tensor_of<double>({1}, {0});
        auto y = causal_dilated_conv1d(tape, x, w, b, 2);
        CHECK(y->v == std::vector<double>{1, 0, 1, 0, 1, 0});
    }

    TEST_CASE("conv1d zero padding at t=0 uses only the current tap") {
        std::mt19937_64 rng(2);
        std::normal_distribution<double> dist;
        Tape<double> tape;
        auto x = tensor<double>({5, 3});
        auto w = tensor<double>({2, 3, 3});
        for (auto& v : x->v) v = dist(rng);
        for (auto& v : w->v) v = dist(rng);
        auto b = tensor<double>({2});
        auto y = causal_dilated_conv1d(tape, x, w, b, 1);
        for (int co = 0; co < 2; ++co) {
            double want = 0;
            for (int ci = 0; ci < 3; ++ci) want += w->v[(co * 3 + ci) * 3 + 0] * x->v[ci];
            CHECK(y->v[co] == doctest::Approx(want).epsilon(1e-12));
        }
    }

    TEST_CASE("conv1d causality: future perturbation leaves prefix bitwise unchanged") {
        std::mt19937_64 rng(3);
        std::normal_distribution<double> dist;
        auto x = tensor<double>({8, 2, 3});
        auto w = tensor<double>({4, 3, 3});
        auto b = tensor<double>({4});
        for (auto& v : x->v) v = dist(rng);
        for (auto& v : w->v) v = dist(rng);
        for (auto& v : b->v) v = dist(rng);
        Tape<double> tape;
        auto y1 = causal_dilated_conv1d(tape, x, w, b, 2);
        const int t0 = 3;
        for (size_t i = static_cast<size_t>(t0 + 1) * 2 * 3; i < x->v.size(); ++i) x->v[i] += 7.5;
        auto y2 = causal_dilated_conv1d(tape, x, w, b, 2);
        for (size_t i = 0; i < static_cast<size_t>(t0 + 1) * 2 * 4; ++i) REQUIRE(y1->v[i] == y2->v[i]);
    }

    TEST_CASE("conv1d gradcheck including rank-3 batch axis") {
        std::mt19937_64 rng(4);
        ParamRegistry<double> reg;
        auto x = randn(reg, "x", {6, 2, 3}, rng);
        auto w = randn(reg, "w", {2, 3, 3}, rng);
        auto b = randn(reg, "b", {2}, rng);
        auto report = check_gradients(reg, [&](Tape<double>& tape) {
            auto y = causal_dilated_conv1d(tape, x, w, b, 2);
            return sum_all(tape, elementwise_mul(tape, y, y));
        });
        CHECK(report.max_rel_err < 1e-4);
    }

    TEST_CASE("sigmoid at zero") {
        Tape<double> tape;
        auto y = sigmoid(tape, tensor_of<double>({1}, {0.0}));
        CHECK(y->v[0] == doctest::Approx(0.5));
    }

    TEST_CASE("euclid_dist coincident point has zero value and zero subgradient") {
        Tape<double> tape;
        auto z = tensor_of<double>({3}, {1, 2, 3}, true);
        auto mu = tensor_of<double>({3}, {1, 2, 3}, true);
        auto dist = euclid_dist(tape, z, mu);
        CHECK(dist->v[0] == 0.0);
        tape.backward(dist);
        for (double g : z->g) CHECK(g == 0.0);
        for (double g : mu->g) CHECK(g == 0.0);
    }

    TEST_CASE("euclid_dist matches direct formula") {
        std::mt19937_64 rng(5);
        std::normal_distribution<double> dist;
        auto z = tensor<double>({3});
        auto mu = tensor<double>({3});
        for (auto& v : z->v) v = dist(rng);
        for (auto& v : mu->v) v = dist(rng);
        double want = 0;
        for (int i = 0; i < 3; ++i) want += (z->v[i] - mu->v[i]) * (z->v[i] - mu->v[i]);
        Tape<double> tape;
        CHECK(euclid_dist(tape, z, mu)->v[0] == doctest::Approx(std::sqrt(want)).epsilon(1e-15));
    }

    TEST_CASE("mean_abs_err hand case") {
        Tape<double> tape;
        auto p = tensor_of<double>({3}, {1, 2, 3});
        auto t = tensor_of<double>({3}, {2, 2, 5});
        CHECK(mean_abs_err(tape, p, t)->v[0] == doctest::Approx(1.0));
    }

    TEST_CASE("mean_abs_err gradient is sign/n") {
        Tape<double> tape;
        auto p = tensor_of<double>({4}, {1, 5, 2, 2}, true);
        auto t = tensor_of<double>({4}, {2, 2, 5, 2});
        auto loss = mean_abs_err(tape, p, t);
        tape.backward(loss);
        CHECK(p->g[0] == doctest::Approx(-0.25));
        CHECK(p->g[1] == doctest::Approx(0.25));
        CHECK(p->g[2] == doctest::Approx(-0.25));
        CHECK(p->g[3] == 0.0);  // tie, subgradient 0
    }

    TEST_CASE("gather and scatter round trip gradients") {
        std::mt19937_64 rng(6);
        ParamRegistry<double> reg;
        auto table = randn(reg, "table", {5, 3}, rng);
        auto weights = randn(reg, "weights", {4}, rng);
        std::vector<int> gather_idx = {0, 2, 2, 4};
        std::vector<int> scatter_idx = {1, 0, 1, 2};
        auto report = check_gradients(reg, [&](Tape<double>& tape) {
            auto rows = gather_rows(tape, table, gather_idx);
            auto out = scatter_add_weighted(tape, rows, weights, scatter_idx, 3);
            return sum_all(tape, elementwise_mul(tape, out, out));
        });
        CHECK(report.max_rel_err < 1e-4);
    }

    TEST_CASE("gather_rows rejects out-of-range index") {
        Tape<double> tape;
        auto t = tensor<double>({3, 2});
        CHECK_THROWS_AS(gather_rows(tape, t, {3}), ContractError);
        CHECK_THROWS_AS(gather_rows(tape, t, {-1}), ContractError);
    }

    TEST_CASE("scatter_add_weighted counts forward multiply-adds") {
        Tape<double> tape;
        auto src = tensor<double>({4, 5});
        auto w = tensor<double>({4});
        op_counters().reset();
        scatter_add_weighted(tape, src, w, {0, 1, 1, 2}, 3);
        CHECK(op_counters().scatter_macs == 20);
    }

    TEST_CASE("concat forward layout and gradients along both axes") {
        Tape<double> tape;
        auto a = tensor_of<double>({2, 2}, {1, 2, 3, 4});
        auto b = tensor_of<double>({2, 1}, {9, 8});
        auto cat1 = concat(tape, {a, b}, 1);
        CHECK(cat1->dims == Shape{2, 3});
        CHECK(cat1->v == std::vector<double>{1, 2, 9, 3, 4, 8});
        auto cat0 = concat(tape, {a, a}, 0);
        CHECK(cat0->dims == Shape{4, 2});

        std::mt19937_64 rng(7);
        ParamRegistry<double> reg;
        auto p = randn(reg, "p", {2, 2}, rng);
        auto q = randn(reg, "q", {2, 3}, rng);
        auto report = check_gradients(reg, [&](Tape<double>& t2) {
            auto c = concat(t2, {p, q}, 1);
            return sum_all(t2, elementwise_mul(t2, c, c));
        });
        CHECK(report.max_rel_err < 1e-4);
    }

    TEST_CASE("composite expression gradcheck: relu, sigmoid, exp, mul, scale, transpose") {
        std::mt19937_64 rng(8);
        ParamRegistry<double> reg;
        auto a = randn(reg, "a", {3, 4}, rng);
        auto b = randn(reg, "b", {3, 4}, rng);
        auto report = check_gradients(reg, [&](Tape<double>& tape) {
            auto h = elementwise_mul(tape, sigmoid(tape, a), relu(tape, add(tape, a, b)));
            auto e = expop(tape, scale(tape, h, -0.3));
            auto tr = transpose2d(tape, e);
            auto r = reshape(tape, tr, {12});
            return sum_all(tape, elementwise_mul(tape, r, r));
        });
        CHECK(report.max_rel_err < 1e-4);
    }

    TEST_CASE("backward on non-scalar rejected") {
        Tape<double> tape;
        auto x = tensor<double>({2});
        CHECK_THROWS_AS(tape.backward(x), ContractError);
    }

    TEST_CASE("unreachable parameter keeps zero grad") {
        Tape<double> tape;
        auto used = tensor_of<double>({1}, {2.0}, true);
        auto unused = tensor_of<double>({1}, {3.0}, true);
        auto loss = elementwise_mul(tape, used, used);
        tape.backward(loss);
        CHECK(used->g[0] == doctest::Approx(4.0));
        CHECK(unused->g[0] == 0.0);
    }

    TEST_CASE("loss = sum(W x) with x fixed gives grad(W) = x pattern") {
        Tape<double> tape;
        auto x = tensor_of<double>({1, 3}, {1, 2, 3});
        auto w = tensor_of<double>({2, 3}, {0, 0, 0, 0, 0, 0}, true);
        auto b = tensor_of<double>({2}, {0, 0}, true);
        auto loss = sum_all(tape, linear(tape, x, w, b));
        tape.backward(loss);
        CHECK(w->g == std::vector<double>{1, 2, 3, 1, 2, 3});
        CHECK(b->g == std::vector<double>{1, 1});
    }

    TEST_CASE("determinism: identical runs produce identical gradients") {
        auto run = [] {
            std::mt19937_64 rng(99);
            std::normal_distribution<double> dist;
            auto x = tensor<double>({5, 4});
            auto w = tensor<double>({3, 4});
            for (auto& v : x->v) v = dist(rng);
            for (auto& v : w->v) v = dist(rng);
            w->requires_grad = true;
            w->ensure_grad();
            auto b = tensor<double>({3}, 0.0, true);
            Tape<double> tape;
            auto y = sigmoid(tape, linear(tape, x, w, b));
            auto loss = sum_all(tape, y);
            tape.backward(loss);
            return std::make_pair(y->v, w->g);
        };
        auto [y1, g1] = run();
        auto [y2, g2] = run();
        CHECK(y1 == y2);
        CHECK(g1 == g2);
    }

    TEST_CASE("registry rejects duplicates and reports totals") {
        ParamRegistry<float> reg;
        reg.add("a", tensor<float>({2, 3}));
        CHECK_THROWS_AS(reg.add("a", tensor<float>({1})), ContractError);
        reg.add("b", tensor<float>({4}));
        CHECK(reg.total_elements() == 10);
        CHECK(reg.find("b")->dims == Shape{4});
        CHECK(reg.find("c") == nullptr);
    }
}
