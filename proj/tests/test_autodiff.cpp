#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "gibbsnet/autodiff/dual.hpp"
#include "gibbsnet/autodiff/tape.hpp"
#include "gibbsnet/error.hpp"
#include "support/expr.hpp"

using gibbsnet::ad::Dual;
using gibbsnet::ad::Tape;
using gibbsnet::ad::Var;

TEST_CASE("dual arithmetic follows the calculus rules") {
    const Dual p = Dual{2, 1} * Dual{3, 0};
    CHECK(p.value == 6);
    CHECK(p.dx1 == 3);

    const Dual q = Dual{0.4, 1} * Dual{0.6, -1};
    CHECK(q.value == doctest::Approx(0.24).epsilon(1e-15));
    CHECK(q.dx1 == doctest::Approx(0.2).epsilon(1e-15));  // d/dx x(1-x) = 1 - 2x

    const Dual s = Dual{5, 2} + Dual{1, -2};
    CHECK(s.value == 6);
    CHECK(s.dx1 == 0);

    const Dual d = Dual{1, 2} / Dual{4, 1};
    CHECK(d.value == 0.25);
    CHECK(d.dx1 == doctest::Approx((2 * 4 - 1 * 1) / 16.0));

    CHECK_THROWS_AS((Dual{1, 0} / Dual{0, 1}), gibbsnet::DomainError);
}

TEST_CASE("silu values and slopes") {
    const Dual a = gibbsnet::ad::silu(Dual{0, 1});
    CHECK(a.value == 0);
    CHECK(a.dx1 == 0.5);

    const Dual b = gibbsnet::ad::silu(Dual{20, 0});
    CHECK(b.value == doctest::Approx(20).epsilon(1e-8));
    CHECK(b.dx1 == 0);

    // σ(1) = 1/(1+e⁻¹); silu'(1) = σ(1)(1 + 1·(1 − σ(1)))
    const double s1 = 1.0 / (1.0 + std::exp(-1.0));
    const Dual c = gibbsnet::ad::silu(Dual{1, 1});
    CHECK(c.value == doctest::Approx(0.731059).epsilon(1e-6));
    CHECK(c.dx1 == doctest::Approx(0.927671).epsilon(1e-6));
    CHECK(c.value == doctest::Approx(s1).epsilon(1e-15));
    CHECK(c.dx1 == doctest::Approx(s1 * (2.0 - s1)).epsilon(1e-15));
}

TEST_CASE("logistic is finite for large arguments") {
    CHECK(gibbsnet::ad::logistic(800.0) == 1.0);
    CHECK(gibbsnet::ad::logistic(-800.0) == 0.0);
    const Dual s = gibbsnet::ad::silu(Dual{-800, 1});
    CHECK(std::isfinite(s.value));
    CHECK(std::isfinite(s.dx1));
}

TEST_CASE("sqrt domain") {
    CHECK_THROWS_AS((gibbsnet::ad::sqrt(Dual{-1, 0})), gibbsnet::DomainError);
    CHECK(gibbsnet::ad::sqrt(Dual{4, 1}).dx1 == 0.25);
    Tape t;
    CHECK_THROWS_AS(t.sqrt(t.constant(0.0)), gibbsnet::DomainError);
}

TEST_CASE("backward of simple functions") {
    Tape t;
    Var th = t.parameter(3.0);
    Var loss = th * th;
    auto g = t.backward(loss);
    REQUIRE(g.size() == 1);
    CHECK(g[0] == 6.0);

    t.clear();
    t.parameter(1.0);
    t.parameter(2.0);
    Var c = t.constant(5.0);
    g = t.backward(c);
    CHECK(g == std::vector<double>{0.0, 0.0});
}

TEST_CASE("gradient flows through the composition derivative") {
    // g = θ·x1·x2, ln γ1 = g + x2·∂g/∂x1 = θ·x2²; ∂/∂θ at x1 = 0.3 is 0.49.
    Tape t;
    Var th = t.parameter(2.0);
    Var x1 = t.input({0.3, 1.0});
    Var x2 = t.input({0.7, -1.0});
    Var g = th * (x1 * x2);
    Var ln_gamma1 = g + x2 * t.derivative(g);
    CHECK(ln_gamma1.value() == doctest::Approx(2.0 * 0.49).epsilon(1e-15));
    auto grad = t.backward(ln_gamma1);
    CHECK(grad[0] == doctest::Approx(0.49).epsilon(1e-15));
}

TEST_CASE("seeded backward adds contributions of several outputs") {
    Tape t;
    Var a = t.parameter(1.5);
    Var b = t.parameter(-0.5);
    Var u = a * b;
    Var v = a + b;
    const std::vector<Tape::Seed> seeds{{u, {2.0, 0.0}}, {v, {-1.0, 0.0}}};
    auto g = t.backward(seeds);
    CHECK(g[0] == doctest::Approx(2.0 * -0.5 - 1.0));
    CHECK(g[1] == doctest::Approx(2.0 * 1.5 - 1.0));
}

TEST_CASE("variables from another tape are rejected") {
    Tape t1;
    Tape t2;
    Var a = t1.parameter(1.0);
    Var b = t2.parameter(1.0);
    CHECK_THROWS_AS(t1.add(a, b), gibbsnet::InternalError);
}

TEST_CASE("dot and l2 norm on the tape") {
    Tape t;
    std::vector<Var> a{t.parameter(1.0), t.parameter(2.0), t.parameter(2.0)};
    Var n = t.l2_norm(a);
    CHECK(n.value() == 3.0);
    auto g = t.backward(n);
    CHECK(g[0] == doctest::Approx(1.0 / 3.0));
    CHECK(g[1] == doctest::Approx(2.0 / 3.0));
    CHECK_THROWS_AS(t.dot(std::span<const Var>(a), std::span<const Var>(a).first(2)), gibbsnet::ShapeError);
}

TEST_CASE("composition derivative matches central differences on random programs") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const double h = 1e-6;
    for (int trial = 0; trial < 300; ++trial) {
        const auto prog = support::random_program(rng, 4, 12);
        std::vector<double> params(4);
        for (auto& p : params) p = u(rng);
        const double x = u(rng);
        const Dual f = support::eval_dual(prog, params, x);
        const double fd = (support::eval_dual(prog, params, x + h).value -
                           support::eval_dual(prog, params, x - h).value) / (2 * h);
        CAPTURE(trial);
        CHECK(support::close_rel(f.dx1, fd, 1e-6, 1e-8 * (1.0 + std::abs(f.value))));

        Tape t;
        const Var out = support::record(t, prog, params, x);
        CHECK(out.value() == f.value);
        CHECK(out.dx1() == f.dx1);
    }
}

TEST_CASE("parameter gradients match central differences, including through dx1") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const double h = 1e-5;
    for (int trial = 0; trial < 200; ++trial) {
        const auto prog = support::random_program(rng, 5, 14);
        std::vector<double> params(5);
        for (auto& p : params) p = u(rng);
        const double x = u(rng);
        const double w = 0.7;

        Tape t;
        const Var out = support::record(t, prog, params, x);
        const Var loss = out + t.derivative(out) * w;
        const auto grad = t.backward(loss);
        REQUIRE(grad.size() == params.size());
        t.check_topological_order();

        for (std::size_t k = 0; k < params.size(); ++k) {
            auto plus = params;
            auto minus = params;
            plus[k] += h;
            minus[k] -= h;
            const Dual fp = support::eval_dual(prog, plus, x);
            const Dual fm = support::eval_dual(prog, minus, x);
            const double fd = ((fp.value + w * fp.dx1) - (fm.value + w * fm.dx1)) / (2 * h);
            CAPTURE(trial);
            CAPTURE(k);
            CHECK(support::close_rel(grad[k], fd, 1e-4, 1e-7 * (1.0 + std::abs(loss.value()))));
        }
    }
}

TEST_CASE("recording the same program twice is bit-identical") {
    std::mt19937_64 rng(13);
    const auto prog = support::random_program(rng, 3, 20);
    const std::vector<double> params{0.3, -1.1, 1.7};
    Tape t;
    const Var a = support::record(t, prog, params, 0.42);
    const double v1 = a.value();
    const auto g1 = t.backward(a);
    const Var b = support::record(t, prog, params, 0.42);
    CHECK(b.value() == v1);
    CHECK(t.backward(b) == g1);
}
