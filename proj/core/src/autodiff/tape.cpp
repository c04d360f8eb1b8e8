#include "gibbsnet/autodiff/tape.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace gibbsnet::ad {

void Tape::clear() {
    nodes_.clear();
    dot_args_.clear();
    parameter_nodes_.clear();
}

Var Tape::push(Node node) {
    if (nodes_.size() >= std::numeric_limits<NodeId>::max() - 1) {
        throw InternalError("tape node limit exceeded");
    }
    nodes_.push_back(node);
    return {this, static_cast<NodeId>(nodes_.size() - 1)};
}

void Tape::check_owner(Var v) const {
    if (v.tape() != this || v.id() >= nodes_.size()) {
        throw InternalError("variable does not belong to this tape");
    }
}

Var Tape::parameter(double value) {
    Node n{.op = Op::parameter};
    n.value = Dual::constant(value);
    Var v = push(n);
    parameter_nodes_.push_back(v.id());
    return v;
}

Var Tape::parameters(std::span<const double> values) {
    if (values.empty()) {
        throw ShapeError("parameters: empty block");
    }
    Var first = parameter(values[0]);
    for (std::size_t i = 1; i < values.size(); ++i) {
        parameter(values[i]);
    }
    return first;
}

Var Tape::input(Dual value) {
    Node n{.op = Op::input};
    n.value = value;
    return push(n);
}

Var Tape::add(Var a, Var b) {
    check_owner(a);
    check_owner(b);
    Node n{.op = Op::add, .a = a.id(), .b = b.id()};
    n.value = a.dual() + b.dual();
    n.da = {1.0, 0.0};
    n.db = {1.0, 0.0};
    return push(n);
}

Var Tape::sub(Var a, Var b) {
    check_owner(a);
    check_owner(b);
    Node n{.op = Op::sub, .a = a.id(), .b = b.id()};
    n.value = a.dual() - b.dual();
    n.da = {1.0, 0.0};
    n.db = {-1.0, 0.0};
    return push(n);
}

Var Tape::mul(Var a, Var b) {
    check_owner(a);
    check_owner(b);
    const Dual x = a.dual();
    const Dual y = b.dual();
    Node n{.op = Op::mul, .a = a.id(), .b = b.id()};
    n.value = x * y;
    n.da = y;
    n.db = x;
    return push(n);
}

Var Tape::div(Var a, Var b) {
    check_owner(a);
    check_owner(b);
    const Dual x = a.dual();
    const Dual y = b.dual();
    if (y.value == 0.0) {
        throw DomainError("tape division by zero");
    }
    const double inv = 1.0 / y.value;
    const double inv2 = inv * inv;
    Node n{.op = Op::div, .a = a.id(), .b = b.id()};
    n.value = x / y;
    n.da = {inv, -y.dx1 * inv2};
    n.db = {-x.value * inv2, -x.dx1 * inv2 + 2.0 * x.value * y.dx1 * inv2 * inv};
    return push(n);
}

Var Tape::neg(Var a) {
    check_owner(a);
    Node n{.op = Op::neg, .a = a.id()};
    n.value = -a.dual();
    n.da = {-1.0, 0.0};
    return push(n);
}

Var Tape::silu(Var a) {
    check_owner(a);
    const Dual x = a.dual();
    Node n{.op = Op::silu, .a = a.id()};
    n.value = ad::silu(x);
    n.da = {silu_slope(x.value), silu_curvature(x.value) * x.dx1};
    return push(n);
}

Var Tape::logistic(Var a) {
    check_owner(a);
    const Dual x = a.dual();
    const double s = ad::logistic(x.value);
    const double ds = s * (1.0 - s);
    Node n{.op = Op::logistic, .a = a.id()};
    n.value = {s, ds * x.dx1};
    n.da = {ds, ds * (1.0 - 2.0 * s) * x.dx1};
    return push(n);
}

Var Tape::sqrt(Var a) {
    check_owner(a);
    const Dual x = a.dual();
    if (x.value <= 0.0) {
        throw DomainError("tape sqrt requires a positive argument");
    }
    const double r = std::sqrt(x.value);
    Node n{.op = Op::sqrt, .a = a.id()};
    n.value = {r, x.dx1 / (2.0 * r)};
    n.da = {0.5 / r, -x.dx1 / (4.0 * r * r * r)};
    return push(n);
}

Var Tape::dot(std::span<const Var> a, std::span<const Var> b) {
    if (a.size() != b.size()) {
        throw ShapeError("dot: operand lengths differ (" + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
    }
    Node n{.op = Op::dot};
    n.args_begin = static_cast<std::uint32_t>(dot_args_.size());
    n.args_count = static_cast<std::uint32_t>(a.size());
    Dual acc;
    for (std::size_t i = 0; i < a.size(); ++i) {
        check_owner(a[i]);
        check_owner(b[i]);
        acc += a[i].dual() * b[i].dual();
        dot_args_.emplace_back(a[i].id(), b[i].id());
    }
    n.value = acc;
    return push(n);
}

Var Tape::dot_contiguous(Var first, std::span<const Var> b) {
    check_owner(first);
    if (first.id() + b.size() > nodes_.size()) {
        throw ShapeError("dot_contiguous: range runs past the end of the tape");
    }
    Node n{.op = Op::dot};
    n.args_begin = static_cast<std::uint32_t>(dot_args_.size());
    n.args_count = static_cast<std::uint32_t>(b.size());
    Dual acc;
    for (std::size_t i = 0; i < b.size(); ++i) {
        check_owner(b[i]);
        const NodeId lhs = first.id() + static_cast<NodeId>(i);
        acc += nodes_[lhs].value * b[i].dual();
        dot_args_.emplace_back(lhs, b[i].id());
    }
    n.value = acc;
    return push(n);
}

Var Tape::derivative(Var a) {
    check_owner(a);
    Node n{.op = Op::derivative, .a = a.id()};
    n.value = {a.dual().dx1, 0.0};
    return push(n);
}

void Tape::check_topological_order() const {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const Node& n = nodes_[i];
        auto bad = [i](NodeId p) { return p != kNone && p >= i; };
        if (bad(n.a) || bad(n.b)) {
            throw InternalError("tape cycle: node " + std::to_string(i) +
                                " references a later node");
        }
        for (std::uint32_t k = 0; k < n.args_count; ++k) {
            const auto& [l, r] = dot_args_[n.args_begin + k];
            if (bad(l) || bad(r)) {
                throw InternalError("tape cycle: dot node " + std::to_string(i) +
                                    " references a later node");
            }
        }
    }
}

std::vector<double> Tape::backward(Var output) const {
    const Seed seed{output, {1.0, 0.0}};
    return backward(std::span<const Seed>(&seed, 1));
}

std::vector<double> Tape::backward(std::span<const Seed> seeds) const {
    std::vector<Dual> adj(nodes_.size());  // {bar_v, bar_d}
    NodeId last = 0;
    for (const Seed& s : seeds) {
        check_owner(s.node);
        adj[s.node.id()] += s.adjoint;
        last = std::max(last, s.node.id());
    }

    auto accumulate = [&adj](NodeId parent, Dual z_adj, Dual partial) {
        Dual& p = adj[parent];
        p.value += z_adj.value * partial.value + z_adj.dx1 * partial.dx1;
        p.dx1 += z_adj.dx1 * partial.value;
    };

    for (std::size_t k = seeds.empty() ? 0 : static_cast<std::size_t>(last) + 1; k-- > 0;) {
        const Node& n = nodes_[k];
        const Dual z = adj[k];
        if (z.value == 0.0 && z.dx1 == 0.0) {
            continue;
        }
        if ((n.a != kNone && n.a >= k) || (n.b != kNone && n.b >= k)) {
            throw InternalError("tape cycle detected during reverse sweep");
        }
        switch (n.op) {
            case Op::parameter:
            case Op::input:
                break;
            case Op::add:
            case Op::sub:
            case Op::mul:
            case Op::div:
                accumulate(n.a, z, n.da);
                accumulate(n.b, z, n.db);
                break;
            case Op::neg:
            case Op::silu:
            case Op::logistic:
            case Op::sqrt:
                accumulate(n.a, z, n.da);
                break;
            case Op::dot:
                for (std::uint32_t i = 0; i < n.args_count; ++i) {
                    const auto [l, r] = dot_args_[n.args_begin + i];
                    if (l >= k || r >= k) {
                        throw InternalError("tape cycle detected during reverse sweep");
                    }
                    accumulate(l, z, nodes_[r].value);
                    accumulate(r, z, nodes_[l].value);
                }
                break;
            case Op::derivative:
                // z.value = a.dx1, so only a's derivative channel receives
                // adjoint. z.dx1 is untracked; its adjoint is discarded.
                adj[n.a].dx1 += z.value;
                break;
        }
    }

    std::vector<double> grad(parameter_nodes_.size());
    for (std::size_t i = 0; i < parameter_nodes_.size(); ++i) {
        grad[i] = adj[parameter_nodes_[i]].value;
    }
    return grad;
}

}  // namespace gibbsnet::ad
