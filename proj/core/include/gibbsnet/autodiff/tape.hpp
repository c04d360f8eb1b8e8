#pragma once

/**
 * @file tape.hpp
 * @brief Reverse-mode tape whose recorded scalar type is a Dual.
 *
 * Forward-over-reverse nesting: every node carries {value, d/dx1} and every
 * local partial is itself a Dual. The reverse sweep keeps two adjoint
 * channels per node,
 *
 *   bar_v = dL/d(node.value)     bar_d = dL/d(node.dx1)
 *
 * and for an edge z <- a with local partial p = dz/da (a Dual):
 *
 *   a.bar_v += z.bar_v * p.value + z.bar_d * p.dx1
 *   a.bar_d += z.bar_d * p.value
 *
 * so parameter gradients flow through quantities such as ln γ that depend on
 * the composition derivative of the network output.
 *
 * Nodes are appended in evaluation order; parents always precede children.
 * A tape serves one forward/backward pass at a time and is not thread-safe.
 */

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gibbsnet/autodiff/dual.hpp"

namespace gibbsnet::ad {

using NodeId = std::uint32_t;

class Tape;

/// Handle to a node on a tape.
class Var {
public:
    Var() = default;
    Var(Tape* tape, NodeId id) : tape_(tape), id_(id) {}

    NodeId id() const noexcept { return id_; }
    Tape* tape() const noexcept { return tape_; }
    Dual dual() const;
    double value() const { return dual().value; }
    double dx1() const { return dual().dx1; }

private:
    Tape* tape_ = nullptr;
    NodeId id_ = 0;
};

class Tape {
public:
    enum class Op : std::uint8_t {
        parameter,
        input,
        add,
        sub,
        mul,
        div,
        neg,
        silu,
        logistic,
        sqrt,
        dot,
        derivative,
    };

    Tape() = default;

    /// Drops all nodes and parameters; keeps allocated capacity.
    void clear();

    /// Registers a trainable scalar. Parameter ids are dense, in registration
    /// order, and index the vector returned by backward().
    Var parameter(double value);
    /// Registers `values.size()` consecutive parameters; returns the first.
    Var parameters(std::span<const double> values);
    /// Leaf that is not trained (data, seeded composition, constants).
    Var input(Dual value);
    Var constant(double value) { return input(Dual::constant(value)); }

    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);
    Var div(Var a, Var b);
    Var neg(Var a);
    Var silu(Var a);
    Var logistic(Var a);
    Var sqrt(Var a);
    Var dot(std::span<const Var> a, std::span<const Var> b);
    /// Dot product of `b` with the consecutive nodes starting at `first`
    /// (typically one row of a parameter matrix).
    Var dot_contiguous(Var first, std::span<const Var> b);
    Var l2_norm(std::span<const Var> a) { return sqrt(dot(a, a)); }

    /// Promotes the composition derivative of `a` to the value channel:
    /// result.value = a.dx1. The result's own dx1 would be a second
    /// derivative, which is not tracked; it is set to 0 and the reverse sweep
    /// never reads it, so values built from this node are exact but their
    /// dx1 is not.
    Var derivative(Var a);

    std::size_t size() const noexcept { return nodes_.size(); }
    std::size_t parameter_count() const noexcept { return parameter_nodes_.size(); }
    Dual dual(NodeId id) const { return nodes_[id].value; }
    Op op(NodeId id) const { return nodes_[id].op; }

    /// Gradient of `output.value` with respect to every registered parameter.
    std::vector<double> backward(Var output) const;

    struct Seed {
        Var node;
        Dual adjoint;  // {dL/d value, dL/d dx1}
    };
    /// Reverse sweep from several seeded nodes at once, e.g. a loss that
    /// depends on both the value and the composition derivative of outputs.
    std::vector<double> backward(std::span<const Seed> seeds) const;

    /// Throws InternalError if any node references a parent at or after
    /// itself.
    void check_topological_order() const;

private:
    static constexpr NodeId kNone = ~NodeId{0};

    struct Node {
        Op op;
        NodeId a = kNone;
        NodeId b = kNone;
        std::uint32_t args_begin = 0;  // into dot_args_, for Op::dot
        std::uint32_t args_count = 0;
        Dual value{};
        Dual da{};  // dz/da
        Dual db{};  // dz/db
    };

    Var push(Node node);
    void check_owner(Var v) const;

    std::vector<Node> nodes_;
    std::vector<std::pair<NodeId, NodeId>> dot_args_;
    std::vector<NodeId> parameter_nodes_;
};

inline Dual Var::dual() const { return tape_->dual(id_); }

inline Var operator+(Var a, Var b) { return a.tape()->add(a, b); }
inline Var operator-(Var a, Var b) { return a.tape()->sub(a, b); }
inline Var operator*(Var a, Var b) { return a.tape()->mul(a, b); }
inline Var operator/(Var a, Var b) { return a.tape()->div(a, b); }
inline Var operator-(Var a) { return a.tape()->neg(a); }
inline Var operator+(Var a, double b) { return a + a.tape()->constant(b); }
inline Var operator+(double a, Var b) { return b.tape()->constant(a) + b; }
inline Var operator-(Var a, double b) { return a - a.tape()->constant(b); }
inline Var operator-(double a, Var b) { return b.tape()->constant(a) - b; }
inline Var operator*(Var a, double b) { return a * a.tape()->constant(b); }
inline Var operator*(double a, Var b) { return b.tape()->constant(a) * b; }
inline Var operator/(Var a, double b) { return a / a.tape()->constant(b); }

inline Var silu(Var a) { return a.tape()->silu(a); }
inline Var logistic(Var a) { return a.tape()->logistic(a); }
inline Var sqrt(Var a) { return a.tape()->sqrt(a); }

}  // namespace gibbsnet::ad
