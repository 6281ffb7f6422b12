#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "mtae/tensor.hpp"

namespace mtae::ad {

class Tape;
using NodeId = std::uint32_t;

// Handle to a tensor recorded on a tape. Cheap to copy; the tape owns the data.
class Value {
public:
    Value() = default;
    const Tensor& tensor() const;
    NodeId id() const { return id_; }
    Tape* tape() const { return tape_; }
    explicit operator bool() const { return tape_ != nullptr; }

private:
    friend class Tape;
    Value(Tape* tape, NodeId id) : tape_(tape), id_(id) {}
    Tape* tape_ = nullptr;
    NodeId id_ = 0;
};

enum class BinaryKind { add, sub, mul, hadamard_scale };
enum class UnaryKind { sigmoid, tanh, exp };

// d(loss)/d(node) for every node the loss depends on, keyed by node id.
class Gradients {
public:
    const Tensor* find(NodeId id) const;
    const Tensor& at(NodeId id) const;  // IndexError when the node has no gradient

private:
    friend class Tape;
    friend struct GradAccess;
    std::vector<std::optional<Tensor>> by_node_;
};

// Record-on-execute computation tape. Every operation appends its output
// node after its parents, so node order is a topological order by
// construction; backward() sweeps it in reverse, which guarantees a node's
// gradient is fully accumulated before its own backward rule runs.
//
// A tape and the values on it are confined to a single thread. Distinct
// tapes share nothing and may run in parallel.
class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    // Records a copy of `value` as an input node.
    Value leaf(Tensor value);

    Value matmul(Value a, Value b);
    Value elementwise_binary(BinaryKind kind, Value a, Value b);
    Value elementwise_unary(UnaryKind kind, Value a);
    Value concat(Value a, Value b);                              // rank-1 operands
    Value slice(Value a, std::size_t offset, std::size_t count); // rank-1 operand
    Value sum(Value a);
    Value softmax_cross_entropy(Value logits, std::size_t target);

    // Reverse sweep from a scalar loss. Gradients accumulate additively
    // across fan-out.
    Gradients backward(Value loss);

    const Tensor& value(NodeId id) const { return nodes_[id].value; }
    std::size_t node_count() const { return nodes_.size(); }

private:
    struct Node {
        Tensor value;
        std::array<NodeId, 2> parents{};
        std::uint8_t parent_count = 0;
        // Pushes this node's incoming gradient to its parents.
        std::function<void(Tape&, const Tensor& out_grad, Gradients&)> backprop;
    };

    Value push(Tensor value, std::initializer_list<NodeId> parents,
               std::function<void(Tape&, const Tensor&, Gradients&)> backprop);
    const Tensor& operand(Value v, const char* op) const;

    std::vector<Node> nodes_;
};

// Named wrappers over the kind-dispatched operations.
Value add(Value a, Value b);
Value sub(Value a, Value b);
Value mul(Value a, Value b);
Value hadamard_scale(Value a, Value scale);
Value sigmoid(Value a);
Value tanh(Value a);
Value exp(Value a);

inline Value operator+(Value a, Value b) { return add(a, b); }
inline Value operator-(Value a, Value b) { return sub(a, b); }
inline Value operator*(Value a, Value b) { return mul(a, b); }

}  // namespace mtae::ad
