#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mtae/errors.hpp"
#include "mtae/gradcheck.hpp"
#include "mtae/rng.hpp"
#include "mtae/tape.hpp"
#include "mtae/tensor.hpp"

using namespace mtae;
using namespace mtae::ad;

namespace {

Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
    Tensor t = Tensor::zeros(std::move(shape));
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
    return t;
}

// Runs finite_difference_check for d(sum-style scalar f)/d(one input tensor),
// where `build` maps a leaf for the perturbed tensor to the scalar loss.
double check_input_grad(const Tensor& input,
                        const std::function<Value(Tape&, Value)>& build,
                        double epsilon = 1e-5) {
    Tape tape;
    Value x = tape.leaf(input);
    Value loss = build(tape, x);
    Gradients g = tape.backward(loss);
    const Tensor& analytic = g.at(x.id());

    auto f = [&](std::span<const double> p) {
        Tape t2;
        Tensor moved = input;
        for (std::size_t i = 0; i < moved.size(); ++i) moved[i] = p[i];
        Value x2 = t2.leaf(moved);
        return build(t2, x2).tensor().item();
    };
    return finite_difference_check(f, input.values(), analytic.values(), epsilon);
}

}  // namespace

TEST_CASE("matmul identity") {
    Tape tape;
    Value i2 = tape.leaf(Tensor::mat(2, 2, {1, 0, 0, 1}));
    Value b = tape.leaf(Tensor::mat(2, 2, {5, 6, 7, 8}));
    Value c = tape.matmul(i2, b);
    CHECK(c.tensor().at(0, 0) == 5.0);
    CHECK(c.tensor().at(0, 1) == 6.0);
    CHECK(c.tensor().at(1, 0) == 7.0);
    CHECK(c.tensor().at(1, 1) == 8.0);
}

TEST_CASE("matmul 2x2 hand-computed") {
    Tape tape;
    Value a = tape.leaf(Tensor::mat(2, 2, {1, 2, 3, 4}));
    Value b = tape.leaf(Tensor::mat(2, 2, {5, 6, 7, 8}));
    Tensor c = tape.matmul(a, b).tensor();
    CHECK(c.at(0, 0) == 19.0);
    CHECK(c.at(0, 1) == 22.0);
    CHECK(c.at(1, 0) == 43.0);
    CHECK(c.at(1, 1) == 50.0);
}

TEST_CASE("matmul shape mismatch names both shapes") {
    Tape tape;
    Value a = tape.leaf(Tensor::mat(2, 3, std::vector<double>(6, 1.0)));
    Value b = tape.leaf(Tensor::mat(2, 2, {1, 2, 3, 4}));
    CHECK_THROWS_WITH_AS(tape.matmul(a, b),
                         doctest::Contains("2x3"), DimensionError);
    CHECK_THROWS_WITH_AS(tape.matmul(a, b),
                         doctest::Contains("2x2"), DimensionError);
}

TEST_CASE("matmul gradient matches finite differences") {
    Rng rng(7);
    Tensor a = random_tensor({3, 3}, rng);
    Tensor bfixed = random_tensor({3, 3}, rng);

    // d sum(A.B) / dA
    double err_a = check_input_grad(a, [&](Tape& t, Value x) {
        Value b = t.leaf(bfixed);
        return t.sum(t.matmul(x, b));
    });
    CHECK(err_a < 1e-6);

    // d sum(A.B) / dB
    double err_b = check_input_grad(bfixed, [&](Tape& t, Value x) {
        Value av = t.leaf(a);
        return t.sum(t.matmul(av, x));
    });
    CHECK(err_b < 1e-6);

    // rank-1 times rank-2 path
    Tensor v = random_tensor({3}, rng);
    double err_v = check_input_grad(v, [&](Tape& t, Value x) {
        Value b = t.leaf(bfixed);
        return t.sum(t.matmul(x, b));
    });
    CHECK(err_v < 1e-6);
}

TEST_CASE("elementwise add") {
    Tape tape;
    Value a = tape.leaf(Tensor::vec({1, 2}));
    Value b = tape.leaf(Tensor::vec({3, 4}));
    Tensor c = add(a, b).tensor();
    CHECK(c[0] == 4.0);
    CHECK(c[1] == 6.0);
}

TEST_CASE("mul by zeros gives zeros and zero gradient") {
    Tape tape;
    Value x = tape.leaf(Tensor::vec({1.5, -2.5, 3.0}));
    Value z = tape.leaf(Tensor::zeros({3}));
    Value prod = mul(x, z);
    for (std::size_t i = 0; i < 3; ++i) CHECK(prod.tensor()[i] == 0.0);
    Gradients g = tape.backward(tape.sum(prod));
    for (double d : g.at(x.id()).values()) CHECK(d == 0.0);
}

TEST_CASE("elementwise gradients match finite differences") {
    Rng rng(11);
    Tensor a = random_tensor({4}, rng);
    Tensor b = random_tensor({4}, rng);

    for (BinaryKind kind : {BinaryKind::add, BinaryKind::sub, BinaryKind::mul}) {
        double err = check_input_grad(a, [&](Tape& t, Value x) {
            Value bv = t.leaf(b);
            return t.sum(t.elementwise_binary(kind, x, bv));
        });
        CHECK(err < 1e-6);
        double err2 = check_input_grad(b, [&](Tape& t, Value x) {
            Value av = t.leaf(a);
            return t.sum(t.elementwise_binary(kind, av, x));
        });
        CHECK(err2 < 1e-6);
    }

    // hadamard_scale, gradient w.r.t. the vector and the scalar
    Tensor s = Tensor::scalar(0.75);
    double err = check_input_grad(a, [&](Tape& t, Value x) {
        Value sv = t.leaf(s);
        return t.sum(hadamard_scale(x, sv));
    });
    CHECK(err < 1e-6);
    double err_s = check_input_grad(s, [&](Tape& t, Value x) {
        Value av = t.leaf(a);
        return t.sum(hadamard_scale(av, x));
    });
    CHECK(err_s < 1e-6);
}

TEST_CASE("elementwise shape mismatch") {
    Tape tape;
    Value a = tape.leaf(Tensor::vec({1, 2}));
    Value b = tape.leaf(Tensor::vec({1, 2, 3}));
    CHECK_THROWS_AS(add(a, b), DimensionError);
    CHECK_THROWS_AS(hadamard_scale(a, b), DimensionError);
}

TEST_CASE("unary basics") {
    Tape tape;
    Value x = tape.leaf(Tensor::vec({0.0}));
    CHECK(sigmoid(x).tensor()[0] == 0.5);
    CHECK(ad::tanh(x).tensor()[0] == 0.0);
    CHECK(ad::exp(x).tensor()[0] == 1.0);
}

TEST_CASE("unary gradients match finite differences") {
    Rng rng(13);
    Tensor a = random_tensor({5}, rng, -2.0, 2.0);
    for (UnaryKind kind : {UnaryKind::sigmoid, UnaryKind::tanh, UnaryKind::exp}) {
        double err = check_input_grad(a, [&](Tape& t, Value x) {
            return t.sum(t.elementwise_unary(kind, x));
        });
        CHECK(err < 1e-6);
    }
}

TEST_CASE("concat") {
    Tape tape;
    Value a = tape.leaf(Tensor::vec({1}));
    Value b = tape.leaf(Tensor::vec({2, 3}));
    Tensor c = tape.concat(a, b).tensor();
    REQUIRE(c.size() == 3);
    CHECK(c[0] == 1.0);
    CHECK(c[1] == 2.0);
    CHECK(c[2] == 3.0);

    // concat with empty leaves the other side untouched
    Value e = tape.leaf(Tensor::zeros({0}));
    Tensor ce = tape.concat(b, e).tensor();
    REQUIRE(ce.size() == 2);
    CHECK(ce[0] == 2.0);
    CHECK(ce[1] == 3.0);

    // backward of sum(concat(a,b)) is all ones on each side
    Value both = tape.concat(a, b);
    Gradients g = tape.backward(tape.sum(both));
    for (double d : g.at(a.id()).values()) CHECK(d == 1.0);
    for (double d : g.at(b.id()).values()) CHECK(d == 1.0);

    Value m = tape.leaf(Tensor::mat(1, 1, {1}));
    CHECK_THROWS_AS(tape.concat(a, m), DimensionError);
}

TEST_CASE("slice forward and backward scatter") {
    Tape tape;
    Value a = tape.leaf(Tensor::vec({10, 20, 30, 40}));
    Value s = tape.slice(a, 1, 2);
    CHECK(s.tensor()[0] == 20.0);
    CHECK(s.tensor()[1] == 30.0);
    Gradients g = tape.backward(tape.sum(s));
    const Tensor& da = g.at(a.id());
    CHECK(da[0] == 0.0);
    CHECK(da[1] == 1.0);
    CHECK(da[2] == 1.0);
    CHECK(da[3] == 0.0);
    CHECK_THROWS_AS(tape.slice(a, 3, 2), DimensionError);
}

TEST_CASE("softmax cross entropy uniform logits") {
    Tape tape;
    Value logits = tape.leaf(Tensor::zeros({4}));
    for (std::size_t target = 0; target < 4; ++target) {
        double loss = tape.softmax_cross_entropy(logits, target).tensor().item();
        CHECK(loss == doctest::Approx(std::log(4.0)).epsilon(1e-12));
    }
}

TEST_CASE("softmax cross entropy saturated") {
    Tape tape;
    Value logits = tape.leaf(Tensor::vec({30.0, 0.0, 0.0, 0.0}));
    double loss = tape.softmax_cross_entropy(logits, 0).tensor().item();
    CHECK(loss >= 0.0);
    CHECK(loss < 1e-9);
}

TEST_CASE("softmax cross entropy matches the direct formula") {
    // independent oracle: -log(exp(l_t) / sum exp(l_i)) without max subtraction
    Rng rng(17);
    for (int iter = 0; iter < 50; ++iter) {
        std::size_t v = 2 + rng.below(8);
        Tensor logits = random_tensor({v}, rng, -4.0, 4.0);
        std::size_t target = rng.below(v);

        double z = 0.0;
        for (double l : logits.values()) z += std::exp(l);
        double expected = -std::log(std::exp(logits[target]) / z);

        Tape tape;
        double loss = tape.softmax_cross_entropy(tape.leaf(logits), target).tensor().item();
        CHECK(std::abs(loss - expected) < 1e-10);
        CHECK(loss >= 0.0);
        CHECK(std::isfinite(loss));
    }
}

TEST_CASE("softmax cross entropy backward is softmax minus one-hot") {
    Rng rng(19);
    Tensor logits = random_tensor({6}, rng, -3.0, 3.0);
    double err = check_input_grad(logits, [&](Tape& t, Value x) {
        return t.softmax_cross_entropy(x, 2);
    });
    CHECK(err < 1e-6);

    Tape tape;
    Value x = tape.leaf(logits);
    CHECK_THROWS_AS(tape.softmax_cross_entropy(x, 6), mtae::IndexError);
}

TEST_CASE("softmax cross entropy stays finite for extreme finite logits") {
    Tape tape;
    Value logits = tape.leaf(Tensor::vec({1e305, -1e305, 0.0}));
    for (std::size_t target = 0; target < 3; ++target) {
        double loss = tape.softmax_cross_entropy(logits, target).tensor().item();
        CHECK(std::isfinite(loss));
        CHECK(loss >= 0.0);
    }
}

TEST_CASE("backward of identity is one") {
    Tape tape;
    Value x = tape.leaf(Tensor::scalar(3.25));
    Gradients g = tape.backward(x);
    CHECK(g.at(x.id()).item() == 1.0);
}

TEST_CASE("fan-out accumulates additively") {
    Tape tape;
    Value x = tape.leaf(Tensor::vec({1.0, -2.0, 0.5}));
    Value doubled = add(x, x);
    Gradients g = tape.backward(tape.sum(doubled));
    for (double d : g.at(x.id()).values()) CHECK(d == 2.0);
}

TEST_CASE("backward rejects non-scalar loss") {
    Tape tape;
    Value x = tape.leaf(Tensor::vec({1.0, 2.0}));
    CHECK_THROWS_AS(tape.backward(x), ContractError);
}

TEST_CASE("cross-tape operands are rejected") {
    Tape t1, t2;
    Value a = t1.leaf(Tensor::vec({1.0}));
    Value b = t2.leaf(Tensor::vec({1.0}));
    CHECK_THROWS_AS(t1.elementwise_binary(BinaryKind::add, a, b), ContractError);
}

TEST_CASE("forward ops are pure") {
    Rng rng(23);
    Tensor a = random_tensor({4}, rng);
    Tensor b = random_tensor({4}, rng);
    for (int rep = 0; rep < 2; ++rep) {
        Tape t1, t2;
        Tensor r1 = ad::tanh(mul(t1.leaf(a), t1.leaf(b))).tensor();
        Tensor r2 = ad::tanh(mul(t2.leaf(a), t2.leaf(b))).tensor();
        for (std::size_t i = 0; i < 4; ++i) CHECK(r1[i] == r2[i]);
    }
}

TEST_CASE("finite_difference_check on sum of squares") {
    auto f = [](std::span<const double> p) {
        double acc = 0.0;
        for (double x : p) acc += x * x;
        return acc;
    };
    std::vector<double> params{1.0, 2.0};
    std::vector<double> analytic{2.0, 4.0};
    CHECK(finite_difference_check(f, params, analytic, 1e-5) < 1e-9);
}

TEST_CASE("finite_difference_check on a constant") {
    auto f = [](std::span<const double>) { return 42.0; };
    std::vector<double> params{0.3, -0.7, 2.0};
    std::vector<double> analytic{0.0, 0.0, 0.0};
    CHECK(finite_difference_check(f, params, analytic, 1e-5) == 0.0);
}

TEST_CASE("finite_difference_check flags non-finite f") {
    auto f = [](std::span<const double> p) { return std::log(p[0]); };
    std::vector<double> params{-1.0};  // log of a negative perturbation is NaN
    std::vector<double> analytic{0.0};
    CHECK_THROWS_AS(finite_difference_check(f, params, analytic, 1e-5), NumericError);
}

TEST_CASE("randomized op compositions pass gradient checks") {
    // property: every differentiable op composition matches finite differences
    for (std::uint64_t seed = 100; seed < 110; ++seed) {
        Rng rng(seed);
        Tensor x = random_tensor({6}, rng);
        Tensor w = random_tensor({6, 4}, rng);
        double err = check_input_grad(x, [&](Tape& t, Value v) {
            Value wv = t.leaf(w);
            Value lin = t.matmul(v, wv);
            Value s = sigmoid(t.slice(lin, 0, 2));
            Value u = ad::tanh(t.slice(lin, 2, 2));
            return t.sum(mul(s, u));
        });
        CHECK(err < 1e-4);
    }
}
