#pragma once

/**
 * @file dual.hpp
 * @brief Forward-mode scalar carrying a value and its derivative with respect
 * to the liquid mole fraction x1.
 *
 * A dual number a + b·ε with ε² = 0. Multiplication encodes the product rule:
 *   (a + bε)(c + dε) = ac + (ad + bc)ε
 * so evaluating a function on {x1, 1} yields {f(x1), f'(x1)}.
 */

#include <cmath>
#include <span>

#include "gibbsnet/error.hpp"

namespace gibbsnet::ad {

struct Dual {
    double value = 0.0;
    double dx1 = 0.0;  // d(value)/d(x1)

    constexpr Dual() = default;
    constexpr Dual(double v) : value(v) {}  // NOLINT(google-explicit-constructor): constants promote
    constexpr Dual(double v, double d) : value(v), dx1(d) {}

    static constexpr Dual constant(double v) { return {v, 0.0}; }

    constexpr bool operator==(const Dual&) const = default;
};

constexpr Dual operator+(Dual a, Dual b) { return {a.value + b.value, a.dx1 + b.dx1}; }
constexpr Dual operator-(Dual a, Dual b) { return {a.value - b.value, a.dx1 - b.dx1}; }
constexpr Dual operator-(Dual a) { return {-a.value, -a.dx1}; }
constexpr Dual operator*(Dual a, Dual b) {
    return {a.value * b.value, a.value * b.dx1 + b.value * a.dx1};
}

inline Dual operator/(Dual a, Dual b) {
    if (b.value == 0.0) {
        throw DomainError("dual division by zero");
    }
    const double q = a.value / b.value;
    return {q, (a.dx1 - q * b.dx1) / b.value};
}

inline Dual& operator+=(Dual& a, Dual b) { return a = a + b; }
inline Dual& operator-=(Dual& a, Dual b) { return a = a - b; }
inline Dual& operator*=(Dual& a, Dual b) { return a = a * b; }

/// Logistic function, evaluated branch-wise so exp never overflows.
inline double logistic(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

/// silu'(z) = σ(z)·(1 + z·(1 − σ(z)))
inline double silu_slope(double z) {
    const double s = logistic(z);
    return s * (1.0 + z * (1.0 - s));
}

/// d/dz silu'(z) = σ(z)(1 − σ(z))·(2 + z·(1 − 2σ(z)))
inline double silu_curvature(double z) {
    const double s = logistic(z);
    return s * (1.0 - s) * (2.0 + z * (1.0 - 2.0 * s));
}

inline Dual logistic(Dual a) {
    const double s = logistic(a.value);
    return {s, s * (1.0 - s) * a.dx1};
}

inline Dual silu(Dual a) {
    return {a.value * logistic(a.value), silu_slope(a.value) * a.dx1};
}

inline Dual sqrt(Dual a) {
    if (a.value < 0.0) {
        throw DomainError("dual sqrt of negative value");
    }
    const double r = std::sqrt(a.value);
    if (r == 0.0) {
        if (a.dx1 != 0.0) {
            throw DomainError("dual sqrt at zero with nonzero derivative");
        }
        return {0.0, 0.0};
    }
    return {r, a.dx1 / (2.0 * r)};
}

/// Σ a_i·b_i, accumulated in index order.
inline Dual dot(std::span<const Dual> a, std::span<const Dual> b) {
    if (a.size() != b.size()) {
        throw ShapeError("dot: operand lengths differ");
    }
    Dual acc;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

inline Dual l2_norm(std::span<const Dual> a) { return sqrt(dot(a, a)); }

}  // namespace gibbsnet::ad
