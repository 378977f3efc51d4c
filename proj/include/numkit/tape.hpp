#pragma once

#include <cstdint>
#include <vector>

#include "numkit/ndarray.hpp"

namespace numkit {

class Tape;

/// Handle to a node on a tape. Cheap to copy.
struct Var {
    Tape* tape{nullptr};
    std::int32_t id{-1};

    bool valid() const { return tape != nullptr && id >= 0; }
};

enum class OpKind : std::uint8_t {
    Leaf,
    MatMul,
    Add,
    Sub,
    Mul,
    Concat,
    Slice,
    Tanh,
    Sigmoid,
    Exp,
    Log,
    Square,
    ReduceSum,
    ReduceMean,
    Scale,
    AddConst,
    Clamp,
};

struct TapeNode {
    OpKind op{OpKind::Leaf};
    std::int32_t a{-1};
    std::int32_t b{-1};
    double c0{0.0}; // scale factor / added constant / clamp lo / slice start
    double c1{0.0}; // clamp hi / slice length
    NDArray value;
};

/// Append-only record of primitive operations. Node inputs always precede
/// the node itself, so reverse creation order is a valid reverse topological
/// order for the backward sweep. Single-owner; not shared across threads.
class Tape {
public:
    Var leaf(NDArray value);

    std::size_t size() const { return nodes_.size(); }
    const NDArray& value(std::int32_t id) const { return nodes_[static_cast<std::size_t>(id)].value; }
    const NDArray& value(Var v) const { return value(v.id); }
    const TapeNode& node(std::int32_t id) const { return nodes_[static_cast<std::size_t>(id)]; }

private:
    friend Var record_unary(Tape&, OpKind, Var, NDArray, double, double);
    friend Var record_binary(Tape&, OpKind, Var, Var, NDArray);

    Var push(TapeNode node);

    std::vector<TapeNode> nodes_;
};

// Primitive catalog. Every op validates operand shapes and records itself on
// the operands' tape. Elementwise binaries broadcast only over a leading
// batch extent: shapes must match exactly, or the second operand may have
// extent 1 on axis 0 with all trailing extents equal.
Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var concat(Var a, Var b);                       // along last axis
Var slice(Var a, std::size_t start, std::size_t len); // along last axis
Var tanh(Var a);
Var sigmoid(Var a);
Var exp(Var a);
Var log(Var a);
Var square(Var a);
Var reduce_sum(Var a);
Var reduce_mean(Var a);
Var scale(Var a, double c);
Var add_const(Var a, double c);
Var clamp(Var a, double lo, double hi);

/// Per-node gradient arrays produced by a backward sweep.
class Gradients {
public:
    explicit Gradients(std::size_t node_count) : grads_(node_count) {}

    const NDArray& at(Var v) const { return grads_[static_cast<std::size_t>(v.id)]; }
    const NDArray& at(std::int32_t id) const { return grads_[static_cast<std::size_t>(id)]; }
    NDArray& slot(std::int32_t id) { return grads_[static_cast<std::size_t>(id)]; }

private:
    std::vector<NDArray> grads_;
};

/// Reverse-mode sweep from a scalar-valued loss node. Gradients accumulate
/// across fan-out. Rejects non-scalar losses.
Gradients backward(const Tape& tape, Var loss);

} // namespace numkit
