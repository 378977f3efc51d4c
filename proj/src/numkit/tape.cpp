#include "numkit/tape.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace numkit {

namespace {

void require_same_tape(Var a, Var b, const char* op) {
    if (!a.valid() || !b.valid() || a.tape != b.tape) {
        throw std::invalid_argument(std::string(op) + ": operands must live on the same tape");
    }
}

// Exact shape match, or b broadcast over the leading batch extent of a.
enum class Broadcast { None, LeadB };

Broadcast broadcast_kind(const NDArray& a, const NDArray& b, const char* op) {
    if (a.same_shape(b)) return Broadcast::None;
    if (a.rank() == b.rank() && a.rank() >= 1 && b.extent(0) == 1) {
        bool rest_equal = true;
        for (std::size_t ax = 1; ax < a.rank(); ++ax) {
            if (a.extent(ax) != b.extent(ax)) rest_equal = false;
        }
        if (rest_equal) return Broadcast::LeadB;
    }
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " + b.shape_str());
}

} // namespace

Var Tape::push(TapeNode node) {
    nodes_.push_back(std::move(node));
    return Var{this, static_cast<std::int32_t>(nodes_.size() - 1)};
}

Var Tape::leaf(NDArray value) {
    TapeNode n;
    n.op = OpKind::Leaf;
    n.value = std::move(value);
    return push(std::move(n));
}

Var record_unary(Tape& tape, OpKind op, Var a, NDArray value, double c0, double c1) {
    TapeNode n;
    n.op = op;
    n.a = a.id;
    n.c0 = c0;
    n.c1 = c1;
    n.value = std::move(value);
    return tape.push(std::move(n));
}

Var record_binary(Tape& tape, OpKind op, Var a, Var b, NDArray value) {
    TapeNode n;
    n.op = op;
    n.a = a.id;
    n.b = b.id;
    n.value = std::move(value);
    return tape.push(std::move(n));
}

Var matmul(Var a, Var b) {
    require_same_tape(a, b, "matmul");
    NDArray out = matmul_values(a.tape->value(a), b.tape->value(b));
    return record_binary(*a.tape, OpKind::MatMul, a, b, std::move(out));
}

namespace {

template <typename F>
Var elementwise_binary(Var a, Var b, OpKind op, const char* name, F&& f) {
    require_same_tape(a, b, name);
    const NDArray& av = a.tape->value(a);
    const NDArray& bv = b.tape->value(b);
    const Broadcast bc = broadcast_kind(av, bv, name);
    NDArray out(av.shape());
    if (bc == Broadcast::None) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(av[i], bv[i]);
    } else {
        const std::size_t inner = bv.size();
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(av[i], bv[i % inner]);
    }
    return record_binary(*a.tape, op, a, b, std::move(out));
}

template <typename F>
Var elementwise_unary(Var a, OpKind op, F&& f, double c0 = 0.0, double c1 = 0.0) {
    const NDArray& av = a.tape->value(a);
    NDArray out(av.shape());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(av[i]);
    return record_unary(*a.tape, op, a, std::move(out), c0, c1);
}

} // namespace

Var add(Var a, Var b) {
    return elementwise_binary(a, b, OpKind::Add, "add", [](double x, double y) { return x + y; });
}

Var sub(Var a, Var b) {
    return elementwise_binary(a, b, OpKind::Sub, "sub", [](double x, double y) { return x - y; });
}

Var mul(Var a, Var b) {
    return elementwise_binary(a, b, OpKind::Mul, "multiply", [](double x, double y) { return x * y; });
}

Var concat(Var a, Var b) {
    require_same_tape(a, b, "concat");
    const NDArray& av = a.tape->value(a);
    const NDArray& bv = b.tape->value(b);
    if (av.rank() != bv.rank() || av.rank() < 1) {
        throw std::invalid_argument("concat: rank mismatch " + av.shape_str() + " vs " + bv.shape_str());
    }
    for (std::size_t ax = 0; ax + 1 < av.rank(); ++ax) {
        if (av.extent(ax) != bv.extent(ax)) {
            throw std::invalid_argument("concat: leading extents differ " + av.shape_str() + " vs " + bv.shape_str());
        }
    }
    const std::size_t last = av.rank() - 1;
    const std::size_t na = av.extent(last), nb = bv.extent(last);
    std::vector<std::size_t> shape = av.shape();
    shape[last] = na + nb;
    NDArray out(shape);
    const std::size_t rows = av.size() / na;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t j = 0; j < na; ++j) out[r * (na + nb) + j] = av[r * na + j];
        for (std::size_t j = 0; j < nb; ++j) out[r * (na + nb) + na + j] = bv[r * nb + j];
    }
    return record_binary(*a.tape, OpKind::Concat, a, b, std::move(out));
}

Var slice(Var a, std::size_t start, std::size_t len) {
    const NDArray& av = a.tape->value(a);
    if (av.rank() < 1) throw std::invalid_argument("slice: rank-0 operand");
    const std::size_t last = av.rank() - 1;
    const std::size_t n = av.extent(last);
    if (start + len > n) {
        throw std::invalid_argument("slice: range [" + std::to_string(start) + "," + std::to_string(start + len) +
                                    ") exceeds extent " + std::to_string(n) + " of " + av.shape_str());
    }
    std::vector<std::size_t> shape = av.shape();
    shape[last] = len;
    NDArray out(shape);
    const std::size_t rows = av.size() / n;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t j = 0; j < len; ++j) out[r * len + j] = av[r * n + start + j];
    }
    return record_unary(*a.tape, OpKind::Slice, a, std::move(out), static_cast<double>(start), static_cast<double>(len));
}

Var tanh(Var a) {
    return elementwise_unary(a, OpKind::Tanh, [](double x) { return std::tanh(x); });
}

Var sigmoid(Var a) {
    return elementwise_unary(a, OpKind::Sigmoid, [](double x) { return 1.0 / (1.0 + std::exp(-x)); });
}

Var exp(Var a) {
    return elementwise_unary(a, OpKind::Exp, [](double x) { return std::exp(x); });
}

Var log(Var a) {
    const NDArray& av = a.tape->value(a);
    for (std::size_t i = 0; i < av.size(); ++i) {
        if (!(av[i] > 0.0)) {
            throw std::domain_error("log: nonpositive element " + std::to_string(av[i]) + " at index " +
                                    std::to_string(i));
        }
    }
    return elementwise_unary(a, OpKind::Log, [](double x) { return std::log(x); });
}

Var square(Var a) {
    return elementwise_unary(a, OpKind::Square, [](double x) { return x * x; });
}

Var reduce_sum(Var a) {
    const NDArray& av = a.tape->value(a);
    double s = 0.0;
    for (std::size_t i = 0; i < av.size(); ++i) s += av[i];
    return record_unary(*a.tape, OpKind::ReduceSum, a, NDArray::scalar(s), 0.0, 0.0);
}

Var reduce_mean(Var a) {
    const NDArray& av = a.tape->value(a);
    if (av.size() == 0) throw std::invalid_argument("reduce_mean: empty operand");
    double s = 0.0;
    for (std::size_t i = 0; i < av.size(); ++i) s += av[i];
    return record_unary(*a.tape, OpKind::ReduceMean, a, NDArray::scalar(s / static_cast<double>(av.size())), 0.0, 0.0);
}

Var scale(Var a, double c) {
    return elementwise_unary(a, OpKind::Scale, [c](double x) { return c * x; }, c);
}

Var add_const(Var a, double c) {
    return elementwise_unary(a, OpKind::AddConst, [c](double x) { return x + c; }, c);
}

Var clamp(Var a, double lo, double hi) {
    if (!(lo <= hi)) throw std::invalid_argument("clamp: lo > hi");
    return elementwise_unary(
        a, OpKind::Clamp, [lo, hi](double x) { return x < lo ? lo : (x > hi ? hi : x); }, lo, hi);
}

namespace {

// out-of-place accumulating kernels for the matmul backward
void accumulate_matmul_nt(const NDArray& g, const NDArray& b, NDArray& ga) {
    // ga[i,p] += sum_j g[i,j] * b[p,j]
    const std::size_t m = g.extent(0), n = g.extent(1), k = b.extent(0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
            const double* grow = g.data() + i * n;
            const double* brow = b.data() + p * n;
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
            ga[i * k + p] += acc;
        }
    }
}

void accumulate_matmul_tn(const NDArray& a, const NDArray& g, NDArray& gb) {
    // gb[p,j] += sum_i a[i,p] * g[i,j]
    const std::size_t m = a.extent(0), k = a.extent(1), n = g.extent(1);
    for (std::size_t i = 0; i < m; ++i) {
        const double* grow = g.data() + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = a[i * k + p];
            if (aip == 0.0) continue;
            double* gbrow = gb.data() + p * n;
            for (std::size_t j = 0; j < n; ++j) gbrow[j] += aip * grow[j];
        }
    }
}

void ensure_grad(Gradients& grads, std::int32_t id, const NDArray& like) {
    if (grads.slot(id).size() == 0) grads.slot(id) = NDArray(like.shape());
}

// g has a's shape; accumulate into gb which may be batch-broadcast.
void accumulate_elementwise(Gradients& grads, std::int32_t id, const NDArray& operand, const NDArray& g,
                            const NDArray* weight) {
    ensure_grad(grads, id, operand);
    NDArray& dst = grads.slot(id);
    if (dst.size() == g.size()) {
        if (weight) {
            const std::size_t inner = weight->size();
            for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i] * (*weight)[i % inner];
        } else {
            for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
        }
    } else {
        // broadcast operand: reduce over the leading batch extent
        const std::size_t inner = dst.size();
        if (weight) {
            for (std::size_t i = 0; i < g.size(); ++i) dst[i % inner] += g[i] * (*weight)[i];
        } else {
            for (std::size_t i = 0; i < g.size(); ++i) dst[i % inner] += g[i];
        }
    }
}

} // namespace

Gradients backward(const Tape& tape, Var loss) {
    if (!loss.valid() || loss.tape != &tape) {
        throw std::invalid_argument("backward: loss node does not belong to this tape");
    }
    const NDArray& lv = tape.value(loss);
    if (lv.size() != 1) {
        throw std::invalid_argument("backward: loss must be scalar-valued, got shape " + lv.shape_str());
    }

    Gradients grads(tape.size());
    grads.slot(loss.id) = NDArray::scalar(1.0);

    for (std::int32_t id = loss.id; id >= 0; --id) {
        const TapeNode& n = tape.node(id);
        const NDArray& g = grads.at(id);
        if (g.size() == 0) continue; // node not on any path to the loss

        switch (n.op) {
            case OpKind::Leaf:
                break;
            case OpKind::MatMul: {
                const NDArray& a = tape.value(n.a);
                const NDArray& b = tape.value(n.b);
                ensure_grad(grads, n.a, a);
                ensure_grad(grads, n.b, b);
                accumulate_matmul_nt(g, b, grads.slot(n.a));
                accumulate_matmul_tn(a, g, grads.slot(n.b));
                break;
            }
            case OpKind::Add: {
                accumulate_elementwise(grads, n.a, tape.value(n.a), g, nullptr);
                accumulate_elementwise(grads, n.b, tape.value(n.b), g, nullptr);
                break;
            }
            case OpKind::Sub: {
                accumulate_elementwise(grads, n.a, tape.value(n.a), g, nullptr);
                NDArray neg(g.shape());
                for (std::size_t i = 0; i < g.size(); ++i) neg[i] = -g[i];
                accumulate_elementwise(grads, n.b, tape.value(n.b), neg, nullptr);
                break;
            }
            case OpKind::Mul: {
                const NDArray& a = tape.value(n.a);
                const NDArray& b = tape.value(n.b);
                accumulate_elementwise(grads, n.a, a, g, &b);
                accumulate_elementwise(grads, n.b, b, g, &a);
                break;
            }
            case OpKind::Concat: {
                const NDArray& a = tape.value(n.a);
                const NDArray& b = tape.value(n.b);
                ensure_grad(grads, n.a, a);
                ensure_grad(grads, n.b, b);
                const std::size_t last = a.rank() - 1;
                const std::size_t na = a.extent(last), nb = b.extent(last);
                NDArray& ga = grads.slot(n.a);
                NDArray& gb = grads.slot(n.b);
                const std::size_t rows = a.size() / na;
                for (std::size_t r = 0; r < rows; ++r) {
                    for (std::size_t j = 0; j < na; ++j) ga[r * na + j] += g[r * (na + nb) + j];
                    for (std::size_t j = 0; j < nb; ++j) gb[r * nb + j] += g[r * (na + nb) + na + j];
                }
                break;
            }
            case OpKind::Slice: {
                const NDArray& a = tape.value(n.a);
                ensure_grad(grads, n.a, a);
                NDArray& ga = grads.slot(n.a);
                const std::size_t last = a.rank() - 1;
                const std::size_t stride = a.extent(last);
                const std::size_t start = static_cast<std::size_t>(n.c0);
                const std::size_t len = static_cast<std::size_t>(n.c1);
                const std::size_t rows = a.size() / stride;
                for (std::size_t r = 0; r < rows; ++r) {
                    for (std::size_t j = 0; j < len; ++j) ga[r * stride + start + j] += g[r * len + j];
                }
                break;
            }
            case OpKind::Tanh: {
                const NDArray& y = n.value;
                NDArray w(y.shape());
                for (std::size_t i = 0; i < y.size(); ++i) w[i] = 1.0 - y[i] * y[i];
                accumulate_elementwise(grads, n.a, tape.value(n.a), g, &w);
                break;
            }
            case OpKind::Sigmoid: {
                const NDArray& y = n.value;
                NDArray w(y.shape());
                for (std::size_t i = 0; i < y.size(); ++i) w[i] = y[i] * (1.0 - y[i]);
                accumulate_elementwise(grads, n.a, tape.value(n.a), g, &w);
                break;
            }
            case OpKind::Exp: {
                accumulate_elementwise(grads, n.a, tape.value(n.a), g, &n.value);
                break;
            }
            case OpKind::Log: {
                const NDArray& x = tape.value(n.a);
                NDArray w(x.shape());
                for (std::size_t i = 0; i < x.size(); ++i) w[i] = 1.0 / x[i];
                accumulate_elementwise(grads, n.a, x, g, &w);
                break;
            }
            case OpKind::Square: {
                const NDArray& x = tape.value(n.a);
                NDArray w(x.shape());
                for (std::size_t i = 0; i < x.size(); ++i) w[i] = 2.0 * x[i];
                accumulate_elementwise(grads, n.a, x, g, &w);
                break;
            }
            case OpKind::ReduceSum: {
                const NDArray& x = tape.value(n.a);
                ensure_grad(grads, n.a, x);
                NDArray& ga = grads.slot(n.a);
                const double gv = g[0];
                for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += gv;
                break;
            }
            case OpKind::ReduceMean: {
                const NDArray& x = tape.value(n.a);
                ensure_grad(grads, n.a, x);
                NDArray& ga = grads.slot(n.a);
                const double gv = g[0] / static_cast<double>(x.size());
                for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += gv;
                break;
            }
            case OpKind::Scale: {
                const NDArray& x = tape.value(n.a);
                ensure_grad(grads, n.a, x);
                NDArray& ga = grads.slot(n.a);
                for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += n.c0 * g[i];
                break;
            }
            case OpKind::AddConst: {
                accumulate_elementwise(grads, n.a, tape.value(n.a), g, nullptr);
                break;
            }
            case OpKind::Clamp: {
                const NDArray& x = tape.value(n.a);
                ensure_grad(grads, n.a, x);
                NDArray& ga = grads.slot(n.a);
                for (std::size_t i = 0; i < ga.size(); ++i) {
                    if (x[i] >= n.c0 && x[i] <= n.c1) ga[i] += g[i];
                }
                break;
            }
        }
    }
    return grads;
}

} // namespace numkit
