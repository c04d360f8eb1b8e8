#pragma once

// Random straight-line programs over the autodiff primitive set, evaluable
// on plain Duals (forward mode only) and on a Tape (forward + reverse), so
// the two engines can be checked against finite differences and each other.

#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "gibbsnet/autodiff/dual.hpp"
#include "gibbsnet/autodiff/tape.hpp"

namespace support {

struct Instr {
    enum Kind { add, sub, mul, div, neg, silu, logistic, sqrt, dot3 } kind;
    int a;
    int b;
};

struct Program {
    std::size_t n_params = 0;
    std::vector<Instr> code;
};

// Pool layout: [params..., x, 1 - x, 0.75], then one slot per instruction.
inline Program random_program(std::mt19937_64& rng, std::size_t n_params, std::size_t length) {
    Program p;
    p.n_params = n_params;
    const int base = static_cast<int>(n_params) + 3;
    std::uniform_int_distribution<int> kind(0, 8);
    for (std::size_t i = 0; i < length; ++i) {
        const int pool = base + static_cast<int>(i);
        std::uniform_int_distribution<int> pick(0, pool - 1);
        // Favour recent nodes so the output depends on most of the program.
        std::uniform_int_distribution<int> recent(std::max(0, pool - 4), pool - 1);
        Instr in{static_cast<Instr::Kind>(kind(rng)), recent(rng), pick(rng)};
        if (in.kind == Instr::dot3 && pool < 3) {
            in.kind = Instr::add;
        }
        if (in.kind == Instr::dot3) {
            std::uniform_int_distribution<int> start(0, pool - 3);
            in.a = start(rng);
            in.b = start(rng);
        }
        p.code.push_back(in);
    }
    return p;
}

struct DualOps {
    using S = gibbsnet::ad::Dual;
    S constant(double v) const { return S::constant(v); }
    S silu(S a) const { return gibbsnet::ad::silu(a); }
    S logistic(S a) const { return gibbsnet::ad::logistic(a); }
    S sqrt(S a) const { return gibbsnet::ad::sqrt(a); }
    S dot(std::span<const S> a, std::span<const S> b) const { return gibbsnet::ad::dot(a, b); }
};

struct TapeOps {
    using S = gibbsnet::ad::Var;
    gibbsnet::ad::Tape* tape;
    S constant(double v) const { return tape->constant(v); }
    S silu(S a) const { return tape->silu(a); }
    S logistic(S a) const { return tape->logistic(a); }
    S sqrt(S a) const { return tape->sqrt(a); }
    S dot(std::span<const S> a, std::span<const S> b) const { return tape->dot(a, b); }
};

// Division and square root are applied to strictly positive arguments
// (b² + 0.5, a² + 0.25) so every program is smooth everywhere.
template <class Ops>
typename Ops::S run_program(const Program& p, std::vector<typename Ops::S> pool, const Ops& ops) {
    using S = typename Ops::S;
    for (const Instr& in : p.code) {
        const S a = pool[static_cast<std::size_t>(in.a)];
        const S b = pool[static_cast<std::size_t>(in.b)];
        S r;
        switch (in.kind) {
            case Instr::add: r = a + b; break;
            case Instr::sub: r = a - b; break;
            case Instr::mul: r = a * b; break;
            case Instr::div: r = a / (b * b + ops.constant(0.5)); break;
            case Instr::neg: r = -a; break;
            case Instr::silu: r = ops.silu(a); break;
            case Instr::logistic: r = ops.logistic(a); break;
            case Instr::sqrt: r = ops.sqrt(a * a + ops.constant(0.25)); break;
            case Instr::dot3: {
                const std::vector<S> u(pool.begin() + in.a, pool.begin() + in.a + 3);
                const std::vector<S> v(pool.begin() + in.b, pool.begin() + in.b + 3);
                r = ops.dot(u, v);
                break;
            }
        }
        pool.push_back(r);
    }
    return pool.back();
}

inline gibbsnet::ad::Dual eval_dual(const Program& p, std::span<const double> params, double x) {
    using gibbsnet::ad::Dual;
    std::vector<Dual> pool;
    for (const double v : params) pool.push_back(Dual::constant(v));
    pool.push_back({x, 1.0});
    pool.push_back({1.0 - x, -1.0});
    pool.push_back(Dual::constant(0.75));
    return run_program(p, pool, DualOps{});
}

/// Records the program on `tape` (cleared first); returns the output node.
inline gibbsnet::ad::Var record(gibbsnet::ad::Tape& tape, const Program& p, std::span<const double> params,
                                double x) {
    tape.clear();
    std::vector<gibbsnet::ad::Var> pool;
    for (const double v : params) pool.push_back(tape.parameter(v));
    pool.push_back(tape.input({x, 1.0}));
    pool.push_back(tape.input({1.0 - x, -1.0}));
    pool.push_back(tape.constant(0.75));
    return run_program(p, pool, TapeOps{&tape});
}

inline bool close_rel(double got, double want, double rel, double abs_floor) {
    return std::abs(got - want) <= rel * std::abs(want) + abs_floor;
}

}  // namespace support
