#include "mtae/tape.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mtae/errors.hpp"

namespace mtae::ad {

const Tensor& Value::tensor() const {
    if (!tape_) throw ContractError("Value: handle is not bound to a tape");
    return tape_->value(id_);
}

const Tensor* Gradients::find(NodeId id) const {
    if (id >= by_node_.size() || !by_node_[id]) return nullptr;
    return &*by_node_[id];
}

const Tensor& Gradients::at(NodeId id) const {
    const Tensor* t = find(id);
    if (!t) throw IndexError("gradients: node " + std::to_string(id) + " has no gradient");
    return *t;
}

Value Tape::push(Tensor value, std::initializer_list<NodeId> parents,
                 std::function<void(Tape&, const Tensor&, Gradients&)> backprop) {
    Node n;
    n.value = std::move(value);
    n.parent_count = 0;
    for (NodeId p : parents) {
        // record-on-execute keeps the tape topologically ordered
        if (p >= nodes_.size())
            throw ContractError("tape: operation recorded before its parent");
        n.parents[n.parent_count++] = p;
    }
    n.backprop = std::move(backprop);
    nodes_.push_back(std::move(n));
    return Value(this, static_cast<NodeId>(nodes_.size() - 1));
}

const Tensor& Tape::operand(Value v, const char* op) const {
    if (v.tape() != this)
        throw ContractError(std::string(op) + ": operand belongs to a different tape");
    return nodes_[v.id()].value;
}

Value Tape::leaf(Tensor value) {
    return push(std::move(value), {}, nullptr);
}

struct GradAccess {
    static std::vector<std::optional<Tensor>>& slots(Gradients& g) { return g.by_node_; }
};

namespace {

// grads are stored as Tensors shaped like the node values, zero on first touch
Tensor& grad_slot(std::vector<std::optional<Tensor>>& by_node, NodeId id, const Tensor& like) {
    auto& slot = by_node[id];
    if (!slot) slot = Tensor::zeros(like.shape());
    return *slot;
}

}  // namespace

Value Tape::matmul(Value av, Value bv) {
    const Tensor& a = operand(av, "matmul");
    const Tensor& b = operand(bv, "matmul");
    if (b.rank() != 2 || (a.rank() != 1 && a.rank() != 2))
        throw DimensionError("matmul: unsupported ranks " + a.shape_str() + " x " + b.shape_str());
    const std::size_t k = b.rows(), n = b.cols();
    const std::size_t inner_a = a.rank() == 1 ? a.shape()[0] : a.cols();
    if (inner_a != k)
        throw DimensionError("matmul: inner dimensions disagree, " + a.shape_str() + " x " +
                             b.shape_str());

    Tensor out;
    if (a.rank() == 1) {
        out = Tensor::zeros({n});
        for (std::size_t i = 0; i < k; ++i) {
            const double ai = a[i];
            if (ai == 0.0) continue;  // one-hot inputs make this the common case
            const double* brow = b.values().data() + i * n;
            double* o = out.values().data();
            for (std::size_t j = 0; j < n; ++j) o[j] += ai * brow[j];
        }
    } else {
        const std::size_t m = a.rows();
        out = Tensor::zeros({m, n});
        for (std::size_t r = 0; r < m; ++r) {
            const double* arow = a.values().data() + r * k;
            double* orow = out.values().data() + r * n;
            for (std::size_t i = 0; i < k; ++i) {
                const double ai = arow[i];
                if (ai == 0.0) continue;
                const double* brow = b.values().data() + i * n;
                for (std::size_t j = 0; j < n; ++j) orow[j] += ai * brow[j];
            }
        }
    }

    NodeId aid = av.id(), bid = bv.id();
    return push(std::move(out), {aid, bid},
                [aid, bid](Tape& t, const Tensor& g, Gradients& gs) {
                    const Tensor& a = t.value(aid);
                    const Tensor& b = t.value(bid);
                    auto& slots = GradAccess::slots(gs);
                    Tensor& da = grad_slot(slots, aid, a);
                    Tensor& db = grad_slot(slots, bid, b);
                    const std::size_t k = b.rows(), n = b.cols();
                    if (a.rank() == 1) {
                        // da = g . B^T ; db += outer(a, g)
                        for (std::size_t i = 0; i < k; ++i) {
                            const double* brow = b.values().data() + i * n;
                            double acc = 0.0;
                            for (std::size_t j = 0; j < n; ++j) acc += g[j] * brow[j];
                            da[i] += acc;
                            const double ai = a[i];
                            if (ai == 0.0) continue;
                            double* dbrow = db.values().data() + i * n;
                            for (std::size_t j = 0; j < n; ++j) dbrow[j] += ai * g[j];
                        }
                    } else {
                        const std::size_t m = a.rows();
                        // dA = dC . B^T
                        for (std::size_t r = 0; r < m; ++r) {
                            const double* grow = g.values().data() + r * n;
                            double* darow = da.values().data() + r * k;
                            for (std::size_t i = 0; i < k; ++i) {
                                const double* brow = b.values().data() + i * n;
                                double acc = 0.0;
                                for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
                                darow[i] += acc;
                            }
                        }
                        // dB = A^T . dC
                        for (std::size_t r = 0; r < m; ++r) {
                            const double* arow = a.values().data() + r * k;
                            const double* grow = g.values().data() + r * n;
                            for (std::size_t i = 0; i < k; ++i) {
                                const double ai = arow[i];
                                if (ai == 0.0) continue;
                                double* dbrow = db.values().data() + i * n;
                                for (std::size_t j = 0; j < n; ++j) dbrow[j] += ai * grow[j];
                            }
                        }
                    }
                });
}

Value Tape::elementwise_binary(BinaryKind kind, Value av, Value bv) {
    const Tensor& a = operand(av, "elementwise_binary");
    const Tensor& b = operand(bv, "elementwise_binary");
    const bool scale = kind == BinaryKind::hadamard_scale;
    if (scale) {
        if (!b.is_scalar())
            throw DimensionError("hadamard_scale: scale must be a scalar, got " + b.shape_str());
    } else if (!a.same_shape(b)) {
        throw DimensionError("elementwise: shapes differ, " + a.shape_str() + " vs " +
                             b.shape_str());
    }

    Tensor out = Tensor::zeros(a.shape());
    const std::size_t n = a.size();
    switch (kind) {
        case BinaryKind::add:
            for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
            break;
        case BinaryKind::sub:
            for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
            break;
        case BinaryKind::mul:
            for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
            break;
        case BinaryKind::hadamard_scale: {
            const double s = b.item();
            for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * s;
            break;
        }
    }

    NodeId aid = av.id(), bid = bv.id();
    return push(std::move(out), {aid, bid},
                [aid, bid, kind](Tape& t, const Tensor& g, Gradients& gs) {
                    const Tensor& a = t.value(aid);
                    const Tensor& b = t.value(bid);
                    auto& slots = GradAccess::slots(gs);
                    Tensor& da = grad_slot(slots, aid, a);
                    Tensor& db = grad_slot(slots, bid, b);
                    const std::size_t n = a.size();
                    switch (kind) {
                        case BinaryKind::add:
                            for (std::size_t i = 0; i < n; ++i) {
                                da[i] += g[i];
                                db[i] += g[i];
                            }
                            break;
                        case BinaryKind::sub:
                            for (std::size_t i = 0; i < n; ++i) {
                                da[i] += g[i];
                                db[i] -= g[i];
                            }
                            break;
                        case BinaryKind::mul:
                            for (std::size_t i = 0; i < n; ++i) {
                                da[i] += g[i] * b[i];
                                db[i] += g[i] * a[i];
                            }
                            break;
                        case BinaryKind::hadamard_scale: {
                            const double s = b.item();
                            double acc = 0.0;
                            for (std::size_t i = 0; i < n; ++i) {
                                da[i] += g[i] * s;
                                acc += g[i] * a[i];
                            }
                            db[0] += acc;
                            break;
                        }
                    }
                });
}

Value Tape::elementwise_unary(UnaryKind kind, Value av) {
    const Tensor& a = operand(av, "elementwise_unary");
    Tensor out = Tensor::zeros(a.shape());
    const std::size_t n = a.size();
    switch (kind) {
        case UnaryKind::sigmoid:
            for (std::size_t i = 0; i < n; ++i) {
                const double x = a[i];
                // branch keeps exp() off large positive arguments
                out[i] = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                                  : std::exp(x) / (1.0 + std::exp(x));
            }
            break;
        case UnaryKind::tanh:
            for (std::size_t i = 0; i < n; ++i) out[i] = std::tanh(a[i]);
            break;
        case UnaryKind::exp:
            for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(a[i]);
            break;
    }

    NodeId aid = av.id();
    return push(std::move(out), {aid},
                [aid, kind](Tape& t, const Tensor& g, Gradients& gs) {
                    const Tensor& a = t.value(aid);
                    auto& slots = GradAccess::slots(gs);
                    Tensor& da = grad_slot(slots, aid, a);
                    const std::size_t n = a.size();
                    switch (kind) {
                        case UnaryKind::sigmoid:
                            for (std::size_t i = 0; i < n; ++i) {
                                const double x = a[i];
                                const double y = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                                                          : std::exp(x) / (1.0 + std::exp(x));
                                da[i] += g[i] * y * (1.0 - y);
                            }
                            break;
                        case UnaryKind::tanh:
                            for (std::size_t i = 0; i < n; ++i) {
                                const double y = std::tanh(a[i]);
                                da[i] += g[i] * (1.0 - y * y);
                            }
                            break;
                        case UnaryKind::exp:
                            for (std::size_t i = 0; i < n; ++i)
                                da[i] += g[i] * std::exp(a[i]);
                            break;
                    }
                });
}

Value Tape::concat(Value av, Value bv) {
    const Tensor& a = operand(av, "concat");
    const Tensor& b = operand(bv, "concat");
    if (a.rank() != 1 || b.rank() != 1)
        throw DimensionError("concat: rank-1 operands required, got " + a.shape_str() + " and " +
                             b.shape_str());
    const std::size_t m = a.size(), n = b.size();
    Tensor out = Tensor::zeros({m + n});
    for (std::size_t i = 0; i < m; ++i) out[i] = a[i];
    for (std::size_t i = 0; i < n; ++i) out[m + i] = b[i];

    NodeId aid = av.id(), bid = bv.id();
    return push(std::move(out), {aid, bid},
                [aid, bid, m, n](Tape& t, const Tensor& g, Gradients& gs) {
                    auto& slots = GradAccess::slots(gs);
                    Tensor& da = grad_slot(slots, aid, t.value(aid));
                    Tensor& db = grad_slot(slots, bid, t.value(bid));
                    for (std::size_t i = 0; i < m; ++i) da[i] += g[i];
                    for (std::size_t i = 0; i < n; ++i) db[i] += g[m + i];
                });
}

Value Tape::slice(Value av, std::size_t offset, std::size_t count) {
    const Tensor& a = operand(av, "slice");
    if (a.rank() != 1)
        throw DimensionError("slice: rank-1 operand required, got " + a.shape_str());
    if (offset + count > a.size())
        throw DimensionError("slice: [" + std::to_string(offset) + ", " +
                             std::to_string(offset + count) + ") exceeds " + a.shape_str());
    Tensor out = Tensor::zeros({count});
    for (std::size_t i = 0; i < count; ++i) out[i] = a[offset + i];

    NodeId aid = av.id();
    return push(std::move(out), {aid},
                [aid, offset, count](Tape& t, const Tensor& g, Gradients& gs) {
                    auto& slots = GradAccess::slots(gs);
                    Tensor& da = grad_slot(slots, aid, t.value(aid));
                    for (std::size_t i = 0; i < count; ++i) da[offset + i] += g[i];
                });
}

Value Tape::sum(Value av) {
    const Tensor& a = operand(av, "sum");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i];

    NodeId aid = av.id();
    return push(Tensor::scalar(acc), {aid},
                [aid](Tape& t, const Tensor& g, Gradients& gs) {
                    auto& slots = GradAccess::slots(gs);
                    Tensor& da = grad_slot(slots, aid, t.value(aid));
                    const double gv = g[0];
                    for (std::size_t i = 0; i < da.size(); ++i) da[i] += gv;
                });
}

Value Tape::softmax_cross_entropy(Value logits_v, std::size_t target) {
    const Tensor& logits = operand(logits_v, "softmax_cross_entropy");
    if (logits.rank() != 1)
        throw DimensionError("softmax_cross_entropy: rank-1 logits required, got " +
                             logits.shape_str());
    const std::size_t v = logits.size();
    if (target >= v)
        throw IndexError("softmax_cross_entropy: target " + std::to_string(target) +
                         " out of range for " + std::to_string(v) + " logits");

    // max subtraction keeps exp() bounded
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v; ++i) mx = std::max(mx, logits[i]);
    double z = 0.0;
    std::vector<double> softmax(v);
    for (std::size_t i = 0; i < v; ++i) {
        softmax[i] = std::exp(logits[i] - mx);
        z += softmax[i];
    }
    for (std::size_t i = 0; i < v; ++i) softmax[i] /= z;
    const double loss = std::log(z) - (logits[target] - mx);

    NodeId lid = logits_v.id();
    return push(Tensor::scalar(loss), {lid},
                [lid, target, softmax = std::move(softmax)](Tape& t, const Tensor& g,
                                                            Gradients& gs) {
                    auto& slots = GradAccess::slots(gs);
                    Tensor& dl = grad_slot(slots, lid, t.value(lid));
                    const double gv = g[0];
                    for (std::size_t i = 0; i < softmax.size(); ++i) {
                        double d = softmax[i];
                        if (i == target) d -= 1.0;
                        dl[i] += gv * d;
                    }
                });
}

Gradients Tape::backward(Value loss) {
    if (loss.tape() != this) throw ContractError("backward: loss lives on a different tape");
    if (!value(loss.id()).is_scalar())
        throw ContractError("backward: loss must be a scalar, got " +
                            value(loss.id()).shape_str());

    Gradients gs;
    GradAccess::slots(gs).resize(nodes_.size());
    GradAccess::slots(gs)[loss.id()] = Tensor::scalar(1.0);

    for (NodeId id = loss.id() + 1; id-- > 0;) {
        const Tensor* g = gs.find(id);
        if (!g) continue;
        Node& n = nodes_[id];
        if (n.backprop) {
            Tensor g_copy = *g;  // parents may alias the slots vector on resize
            n.backprop(*this, g_copy, gs);
        }
    }
    return gs;
}

Value add(Value a, Value b) { return a.tape()->elementwise_binary(BinaryKind::add, a, b); }
Value sub(Value a, Value b) { return a.tape()->elementwise_binary(BinaryKind::sub, a, b); }
Value mul(Value a, Value b) { return a.tape()->elementwise_binary(BinaryKind::mul, a, b); }
Value hadamard_scale(Value a, Value scale) {
    return a.tape()->elementwise_binary(BinaryKind::hadamard_scale, a, scale);
}
Value sigmoid(Value a) { return a.tape()->elementwise_unary(UnaryKind::sigmoid, a); }
Value tanh(Value a) { return a.tape()->elementwise_unary(UnaryKind::tanh, a); }
Value exp(Value a) { return a.tape()->elementwise_unary(UnaryKind::exp, a); }

}  // namespace mtae::ad
