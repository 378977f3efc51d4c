#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "numkit/adam.hpp"
#include "numkit/hash.hpp"
#include "numkit/ndarray.hpp"
#include "numkit/rng.hpp"
#include "numkit/tape.hpp"

#include "support/fd_check.hpp"
#include "support/graph_gen.hpp"

using namespace numkit;

TEST_CASE("ndarray shape/data invariant") {
    NDArray a({2, 3});
    CHECK(a.size() == 6);
    CHECK(a.rank() == 2);
    CHECK_THROWS_AS(NDArray({2, 3}, {1.0, 2.0}), std::invalid_argument);
    NDArray s = NDArray::scalar(4.5);
    CHECK(s.size() == 1);
    CHECK(s[0] == 4.5);
}

TEST_CASE("matmul identity leaves operand unchanged") {
    NDArray I({2, 2}, {1, 0, 0, 1});
    NDArray A({2, 2}, {3.5, -1.25, 0.75, 2.0});
    NDArray C = matmul_values(I, A);
    for (std::size_t i = 0; i < 4; ++i) CHECK(C[i] == A[i]);
}

TEST_CASE("analytic fixed points of tanh and sigmoid") {
    Tape t;
    Var x = t.leaf(NDArray({1, 2}, {0.0, 0.0}));
    CHECK(t.value(tanh(x))[0] == 0.0);
    CHECK(t.value(sigmoid(x))[0] == doctest::Approx(0.5));
}

TEST_CASE("reduce_sum of small vector") {
    Tape t;
    Var x = t.leaf(NDArray({1, 3}, {1, 2, 3}));
    CHECK(t.value(reduce_sum(x))[0] == doctest::Approx(6.0));
}

TEST_CASE("gradient of x squared at 3 is 6") {
    Tape t;
    Var x = t.leaf(NDArray::scalar(3.0));
    Var loss = square(x);
    Gradients g = backward(t, loss);
    CHECK(g.at(x)[0] == doctest::Approx(6.0));
}

TEST_CASE("gradient of tanh at 0 is 1") {
    Tape t;
    Var x = t.leaf(NDArray::scalar(0.0));
    Gradients g = backward(t, tanh(x));
    CHECK(g.at(x)[0] == doctest::Approx(1.0));
}

TEST_CASE("gradients accumulate across fan-out") {
    // loss = x*x + x  (x used three times) -> d/dx = 2x + 1
    Tape t;
    Var x = t.leaf(NDArray::scalar(1.5));
    Var loss = add(mul(x, x), x);
    Gradients g = backward(t, loss);
    CHECK(g.at(x)[0] == doctest::Approx(4.0));
}

TEST_CASE("broadcast add over leading batch extent") {
    Tape t;
    Var a = t.leaf(NDArray({3, 2}, {1, 2, 3, 4, 5, 6}));
    Var b = t.leaf(NDArray({1, 2}, {10, 20}));
    Var s = add(a, b);
    CHECK(t.value(s)[0] == 11.0);
    CHECK(t.value(s)[5] == 26.0);
    // gradient of the broadcast operand sums over the batch
    Gradients g = backward(t, reduce_sum(s));
    CHECK(g.at(b)[0] == doctest::Approx(3.0));
    CHECK(g.at(b)[1] == doctest::Approx(3.0));
    CHECK(g.at(a)[4] == doctest::Approx(1.0));
}

TEST_CASE("finite differences agree on random composite graphs") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        graph_gen::RandomGraph g = graph_gen::make_graph(seed);
        fd::Report rep = fd::compare_grads(g.build, g.leaves);
        CAPTURE(seed);
        CHECK(rep.elements > 0);
        CHECK(rep.max_rel < 1e-4);
    }
}

TEST_CASE("backward is linear in the loss") {
    // grad(1.7*f + (-0.4)*g) == 1.7*grad(f) - 0.4*grad(g) on shared leaves
    NDArray x0({2, 3}, {0.3, -0.7, 1.1, 0.2, -0.1, 0.5});
    auto build_f = [](Tape&, const std::vector<Var>& xs) { return reduce_mean(tanh(xs[0])); };
    auto build_g = [](Tape&, const std::vector<Var>& xs) { return reduce_sum(square(xs[0])); };

    Tape tf;
    Var xf = tf.leaf(x0);
    Gradients gf = backward(tf, build_f(tf, {xf}));
    Tape tg;
    Var xg = tg.leaf(x0);
    Gradients gg = backward(tg, build_g(tg, {xg}));

    Tape tc;
    Var xc = tc.leaf(x0);
    Var combo = add(scale(build_f(tc, {xc}), 1.7), scale(build_g(tc, {xc}), -0.4));
    Gradients gc = backward(tc, combo);

    for (std::size_t i = 0; i < x0.size(); ++i)
        CHECK(gc.at(xc)[i] == doctest::Approx(1.7 * gf.at(xf)[i] - 0.4 * gg.at(xg)[i]));
}

TEST_CASE("tape replay is bitwise deterministic") {
    graph_gen::RandomGraph g = graph_gen::make_graph(99);
    auto run = [&]() {
        Tape t;
        std::vector<Var> xs;
        for (const auto& v : g.leaves) xs.push_back(t.leaf(v));
        Var loss = g.build(t, xs);
        Gradients gr = backward(t, loss);
        std::vector<double> out{t.value(loss)[0]};
        for (Var x : xs)
            for (std::size_t i = 0; i < gr.at(x).size(); ++i) out.push_back(gr.at(x)[i]);
        return out;
    };
    std::vector<double> a = run(), b = run();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]); // exact, not approx
}

TEST_CASE("shape errors name the offending shapes") {
    Tape t;
    Var a = t.leaf(NDArray({2, 3}));
    Var b = t.leaf(NDArray({2, 4}));
    try {
        add(a, b);
        FAIL("expected shape mismatch");
    } catch (const std::invalid_argument& e) {
        std::string msg = e.what();
        CHECK(msg.find("[2,3]") != std::string::npos);
        CHECK(msg.find("[2,4]") != std::string::npos);
    }
    CHECK_THROWS_AS(matmul(a, a), std::invalid_argument);
}

TEST_CASE("log of nonpositive input is rejected") {
    Tape t;
    Var x = t.leaf(NDArray({1, 2}, {1.0, -0.5}));
    CHECK_THROWS_AS(log(x), std::domain_error);
}

TEST_CASE("non-scalar loss is rejected") {
    Tape t;
    Var x = t.leaf(NDArray({2, 2}, {1, 2, 3, 4}));
    Var y = tanh(x);
    CHECK_THROWS_AS(backward(t, y), std::invalid_argument);
}

TEST_CASE("slice and concat round-trip") {
    Tape t;
    Var x = t.leaf(NDArray({2, 4}, {1, 2, 3, 4, 5, 6, 7, 8}));
    Var rejoined = concat(slice(x, 0, 1), slice(x, 1, 3));
    for (std::size_t i = 0; i < 8; ++i) CHECK(t.value(rejoined)[i] == t.value(x)[i]);
    Gradients g = backward(t, reduce_sum(mul(rejoined, rejoined)));
    CHECK(g.at(x)[2] == doctest::Approx(6.0)); // d(sum x^2)/dx = 2x
}

TEST_CASE("adam single step from fresh state") {
    std::vector<NDArray> params{NDArray::scalar(0.0)};
    std::vector<NDArray> grads{NDArray::scalar(1.0)};
    AdamConfig cfg;
    cfg.lr = 1e-3;
    cfg.epsilon = 1e-8;
    AdamState st = AdamState::init(params, cfg);
    adam_step(params, grads, st);
    // bias-corrected m̂=v̂=1 exactly; update = lr/(1+eps)
    CHECK(params[0][0] == doctest::Approx(-1e-3).epsilon(1e-6));
    CHECK(st.step == 1);
    CHECK(st.rejected == 0);
}

TEST_CASE("adam with zero gradient leaves params unchanged") {
    std::vector<NDArray> params{NDArray({2, 2}, {1, 2, 3, 4})};
    std::vector<NDArray> grads{NDArray({2, 2})};
    AdamState st = AdamState::init(params, AdamConfig{});
    adam_step(params, grads, st);
    CHECK(params[0][3] == 4.0);
    CHECK(st.step == 1);
}

TEST_CASE("adam rejects non-finite gradients per array") {
    std::vector<NDArray> params{NDArray::scalar(1.0), NDArray::scalar(2.0)};
    std::vector<NDArray> grads{NDArray::scalar(std::nan("")), NDArray::scalar(0.5)};
    AdamState st = AdamState::init(params, AdamConfig{});
    adam_step(params, grads, st);
    CHECK(params[0][0] == 1.0);   // rejected array untouched
    CHECK(params[1][0] < 2.0);    // healthy array still updated
    CHECK(st.rejected == 1);
    CHECK(st.step == 1);
    CHECK(st.m[0][0] == 0.0);     // moments of the rejected array untouched too
}

TEST_CASE("adam is deterministic") {
    auto run = []() {
        std::vector<NDArray> params{NDArray({1, 3}, {0.1, -0.2, 0.3})};
        AdamState st = AdamState::init(params, AdamConfig{});
        for (int k = 0; k < 5; ++k) {
            std::vector<NDArray> grads{NDArray({1, 3}, {0.4, -0.1, 0.2})};
            adam_step(params, grads, st);
        }
        return params[0];
    };
    NDArray a = run(), b = run();
    for (std::size_t i = 0; i < 3; ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("fnv1a64 known vectors") {
    CHECK(Fnv1a64{}.digest() == 0xcbf29ce484222325ULL);
    CHECK(Fnv1a64{}.update(std::string("a")).digest() == 0xaf63dc4c8601ec8cULL);
    CHECK(Fnv1a64{}.update(std::string("foobar")).digest() == 0x85944171f73967e8ULL);
}

TEST_CASE("seed derivation separates purposes and indices") {
    const std::uint64_t root = 12345;
    CHECK(derive_seed(root, "member", 0) == derive_seed(root, "member", 0));
    CHECK(derive_seed(root, "member", 0) != derive_seed(root, "member", 1));
    CHECK(derive_seed(root, "member", 0) != derive_seed(root, "rollout", 0));
    CHECK(derive_seed(root, "member", 0) != derive_seed(root + 1, "member", 0));
}

TEST_CASE("rng streams are reproducible") {
    Rng a(7), b(7);
    for (int i = 0; i < 10; ++i) CHECK(a.normal() == b.normal());
    Rng c(8);
    bool differs = false;
    Rng a2(7);
    for (int i = 0; i < 10; ++i) differs |= (a2.normal() != c.normal());
    CHECK(differs);
}
