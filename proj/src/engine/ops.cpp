#include "mlenv/engine/ops.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "mlenv/engine/tape.hpp"

namespace mlenv::engine {

namespace {

using detail::TensorImpl;
using ImplPtr = std::shared_ptr<TensorImpl>;

bool tracked(const Tensor& t, const Tape* tape) {
    if (t.requires_grad()) return true;
    return tape != nullptr && t.impl()->tape_id == tape->id();
}

/// Wraps freshly computed values in a tensor and, when recording, stamps it
/// with the active tape's id so downstream ops know it carries history.
Tensor finish(Shape shape, std::vector<double> data, Tape* tape, bool recording) {
    Tensor out = Tensor::from_data(std::move(shape), std::move(data));
    if (recording && tape != nullptr) out.impl()->tape_id = tape->id();
    return out;
}

void require_rank(const Tensor& t, std::size_t rank, const char* op, const char* arg) {
    if (t.rank() != rank) {
        throw std::invalid_argument(std::string(op) + ": " + arg + " must have rank " +
                                    std::to_string(rank) + ", got shape " + shape_str(t.shape()));
    }
}

}  // namespace

Activation activation_from_name(const std::string& name) {
    if (name == "relu") return Activation::relu;
    if (name == "tanh") return Activation::tanh;
    if (name == "sigmoid") return Activation::sigmoid;
    if (name == "identity") return Activation::identity;
    throw std::invalid_argument("unknown activation \"" + name +
                                "\"; expected one of relu, tanh, sigmoid, identity");
}

std::string activation_name(Activation act) {
    switch (act) {
        case Activation::relu: return "relu";
        case Activation::tanh: return "tanh";
        case Activation::sigmoid: return "sigmoid";
        case Activation::identity: return "identity";
    }
    return "?";
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    require_rank(a, 2, "matmul", "left operand");
    require_rank(b, 2, "matmul", "right operand");
    const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
    if (b.dim(0) != k) {
        throw std::invalid_argument("matmul: inner dimensions disagree, " + shape_str(a.shape()) +
                                    " x " + shape_str(b.shape()));
    }

    std::vector<double> out(m * n, 0.0);
    {
        auto av = a.data();
        auto bv = b.data();
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t p = 0; p < k; ++p) {
                const double aip = av[i * k + p];
                const double* brow = &bv[p * n];
                double* orow = &out[i * n];
                for (std::size_t j = 0; j < n; ++j) orow[j] += aip * brow[j];
            }
        }
    }

    Tape* tape = Tape::active();
    const bool track_a = tracked(a, tape);
    const bool track_b = tracked(b, tape);
    Tensor result = finish({m, n}, std::move(out), tape, track_a || track_b);
    if (tape != nullptr && (track_a || track_b)) {
        ImplPtr ai = a.shared_impl(), bi = b.shared_impl(), oi = result.shared_impl();
        tape->record("matmul", [ai, bi, oi, m, k, n, track_a, track_b] {
            if (oi->grad.empty()) return;
            const auto& g = oi->grad;
            if (track_a) {
                ai->ensure_grad();
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < n; ++j) {
                        const double gij = g[i * n + j];
                        for (std::size_t p = 0; p < k; ++p)
                            ai->grad[i * k + p] += gij * bi->data[p * n + j];
                    }
            }
            if (track_b) {
                bi->ensure_grad();
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < n; ++j) {
                        const double gij = g[i * n + j];
                        for (std::size_t p = 0; p < k; ++p)
                            bi->grad[p * n + j] += ai->data[i * k + p] * gij;
                    }
            }
        });
    }
    return result;
}

Tensor ew_binary(EwOp op, const Tensor& a, const Tensor& b) {
    const bool a_scalar = a.size() == 1;
    const bool b_scalar = b.size() == 1;
    if (!a_scalar && !b_scalar && a.shape() != b.shape()) {
        throw std::invalid_argument("elementwise op: shapes " + shape_str(a.shape()) + " and " +
                                    shape_str(b.shape()) +
                                    " differ and neither operand is a scalar");
    }
    if (a.size() == b.size() && a.shape() != b.shape()) {
        throw std::invalid_argument("elementwise op: shapes " + shape_str(a.shape()) + " and " +
                                    shape_str(b.shape()) + " differ");
    }

    const Tensor& big = (a.size() >= b.size()) ? a : b;
    const std::size_t n = big.size();
    auto av = a.data();
    auto bv = b.data();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = av[a_scalar ? 0 : i];
        const double y = bv[b_scalar ? 0 : i];
        switch (op) {
            case EwOp::add: out[i] = x + y; break;
            case EwOp::sub: out[i] = x - y; break;
            case EwOp::mul: out[i] = x * y; break;
        }
    }

    Tape* tape = Tape::active();
    const bool track_a = tracked(a, tape);
    const bool track_b = tracked(b, tape);
    Tensor result = finish(big.shape(), std::move(out), tape, track_a || track_b);
    if (tape != nullptr && (track_a || track_b)) {
        const char* name = op == EwOp::add ? "add" : op == EwOp::sub ? "sub" : "mul";
        ImplPtr ai = a.shared_impl(), bi = b.shared_impl(), oi = result.shared_impl();
        tape->record(name, [op, ai, bi, oi, n, a_scalar, b_scalar, track_a, track_b] {
            if (oi->grad.empty()) return;
            const auto& g = oi->grad;
            if (track_a) {
                ai->ensure_grad();
                for (std::size_t i = 0; i < n; ++i) {
                    double d;
                    switch (op) {
                        case EwOp::add:
                        case EwOp::sub: d = g[i]; break;
                        case EwOp::mul: d = g[i] * bi->data[b_scalar ? 0 : i]; break;
                        default: d = 0.0; break;
                    }
                    ai->grad[a_scalar ? 0 : i] += d;
                }
            }
            if (track_b) {
                bi->ensure_grad();
                for (std::size_t i = 0; i < n; ++i) {
                    double d;
                    switch (op) {
                        case EwOp::add: d = g[i]; break;
                        case EwOp::sub: d = -g[i]; break;
                        case EwOp::mul: d = g[i] * ai->data[a_scalar ? 0 : i]; break;
                        default: d = 0.0; break;
                    }
                    bi->grad[b_scalar ? 0 : i] += d;
                }
            }
        });
    }
    return result;
}

Tensor add(const Tensor& a, const Tensor& b) { return ew_binary(EwOp::add, a, b); }
Tensor sub(const Tensor& a, const Tensor& b) { return ew_binary(EwOp::sub, a, b); }
Tensor mul(const Tensor& a, const Tensor& b) { return ew_binary(EwOp::mul, a, b); }

Tensor mul_scalar(const Tensor& a, double s) {
    const std::size_t n = a.size();
    auto av = a.data();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = av[i] * s;

    Tape* tape = Tape::active();
    const bool track_a = tracked(a, tape);
    Tensor result = finish(a.shape(), std::move(out), tape, track_a);
    if (tape != nullptr && track_a) {
        ImplPtr ai = a.shared_impl(), oi = result.shared_impl();
        tape->record("mul_scalar", [ai, oi, n, s] {
            if (oi->grad.empty()) return;
            ai->ensure_grad();
            for (std::size_t i = 0; i < n; ++i) ai->grad[i] += oi->grad[i] * s;
        });
    }
    return result;
}

Tensor add_bias(const Tensor& x, const Tensor& bias) {
    require_rank(x, 2, "add_bias", "input");
    require_rank(bias, 1, "add_bias", "bias");
    const std::size_t rows = x.dim(0), cols = x.dim(1);
    if (bias.dim(0) != cols) {
        throw std::invalid_argument("add_bias: bias of shape " + shape_str(bias.shape()) +
                                    " does not match input columns of " + shape_str(x.shape()));
    }

    auto xv = x.data();
    auto bv = bias.data();
    std::vector<double> out(rows * cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) out[i * cols + j] = xv[i * cols + j] + bv[j];

    Tape* tape = Tape::active();
    const bool track_x = tracked(x, tape);
    const bool track_b = tracked(bias, tape);
    Tensor result = finish(x.shape(), std::move(out), tape, track_x || track_b);
    if (tape != nullptr && (track_x || track_b)) {
        ImplPtr xi = x.shared_impl(), bi = bias.shared_impl(), oi = result.shared_impl();
        tape->record("add_bias", [xi, bi, oi, rows, cols, track_x, track_b] {
            if (oi->grad.empty()) return;
            const auto& g = oi->grad;
            if (track_x) {
                xi->ensure_grad();
                for (std::size_t i = 0; i < rows * cols; ++i) xi->grad[i] += g[i];
            }
            if (track_b) {
                bi->ensure_grad();
                for (std::size_t i = 0; i < rows; ++i)
                    for (std::size_t j = 0; j < cols; ++j) bi->grad[j] += g[i * cols + j];
            }
        });
    }
    return result;
}

Tensor activation(Activation act, const Tensor& x) {
    const std::size_t n = x.size();
    auto xv = x.data();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        switch (act) {
            case Activation::relu: out[i] = xv[i] > 0.0 ? xv[i] : 0.0; break;
            case Activation::tanh: out[i] = std::tanh(xv[i]); break;
            case Activation::sigmoid: out[i] = 1.0 / (1.0 + std::exp(-xv[i])); break;
            case Activation::identity: out[i] = xv[i]; break;
        }
    }

    Tape* tape = Tape::active();
    const bool track_x = tracked(x, tape);
    Tensor result = finish(x.shape(), std::move(out), tape, track_x);
    if (tape != nullptr && track_x) {
        ImplPtr xi = x.shared_impl(), oi = result.shared_impl();
        tape->record(activation_name(act), [act, xi, oi, n] {
            if (oi->grad.empty()) return;
            xi->ensure_grad();
            for (std::size_t i = 0; i < n; ++i) {
                const double y = oi->data[i];
                double d;
                switch (act) {
                    case Activation::relu: d = y > 0.0 ? 1.0 : 0.0; break;
                    case Activation::tanh: d = 1.0 - y * y; break;
                    case Activation::sigmoid: d = y * (1.0 - y); break;
                    case Activation::identity: d = 1.0; break;
                    default: d = 0.0; break;
                }
                xi->grad[i] += oi->grad[i] * d;
            }
        });
    }
    return result;
}

Tensor relu(const Tensor& x) { return activation(Activation::relu, x); }
Tensor tanh_act(const Tensor& x) { return activation(Activation::tanh, x); }
Tensor sigmoid(const Tensor& x) { return activation(Activation::sigmoid, x); }

Tensor softmax(const Tensor& x) {
    require_rank(x, 2, "softmax", "input");
    const std::size_t rows = x.dim(0), cols = x.dim(1);
    auto xv = x.data();
    std::vector<double> out(rows * cols);
    for (std::size_t i = 0; i < rows; ++i) {
        const double* row = &xv[i * cols];
        double m = row[0];
        for (std::size_t j = 1; j < cols; ++j) m = std::max(m, row[j]);
        double s = 0.0;
        for (std::size_t j = 0; j < cols; ++j) {
            const double e = std::exp(row[j] - m);
            out[i * cols + j] = e;
            s += e;
        }
        for (std::size_t j = 0; j < cols; ++j) out[i * cols + j] /= s;
    }

    Tape* tape = Tape::active();
    const bool track_x = tracked(x, tape);
    Tensor result = finish(x.shape(), std::move(out), tape, track_x);
    if (tape != nullptr && track_x) {
        ImplPtr xi = x.shared_impl(), oi = result.shared_impl();
        tape->record("softmax", [xi, oi, rows, cols] {
            if (oi->grad.empty()) return;
            xi->ensure_grad();
            const auto& g = oi->grad;
            const auto& y = oi->data;
            for (std::size_t i = 0; i < rows; ++i) {
                double dot = 0.0;
                for (std::size_t j = 0; j < cols; ++j) dot += g[i * cols + j] * y[i * cols + j];
                for (std::size_t j = 0; j < cols; ++j)
                    xi->grad[i * cols + j] += y[i * cols + j] * (g[i * cols + j] - dot);
            }
        });
    }
    return result;
}

Tensor reduce(Reduce kind, const Tensor& x) {
    const std::size_t n = x.size();
    auto xv = x.data();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += xv[i];
    if (kind == Reduce::mean) s /= static_cast<double>(n);

    Tape* tape = Tape::active();
    const bool track_x = tracked(x, tape);
    Tensor result = finish({}, {s}, tape, track_x);
    if (tape != nullptr && track_x) {
        ImplPtr xi = x.shared_impl(), oi = result.shared_impl();
        const double scale = kind == Reduce::mean ? 1.0 / static_cast<double>(n) : 1.0;
        tape->record(kind == Reduce::mean ? "reduce_mean" : "reduce_sum", [xi, oi, n, scale] {
            if (oi->grad.empty()) return;
            xi->ensure_grad();
            const double g = oi->grad[0] * scale;
            for (std::size_t i = 0; i < n; ++i) xi->grad[i] += g;
        });
    }
    return result;
}

Tensor reduce_sum(const Tensor& x) { return reduce(Reduce::sum, x); }
Tensor reduce_mean(const Tensor& x) { return reduce(Reduce::mean, x); }

Tensor absolute(const Tensor& x) {
    const std::size_t n = x.size();
    auto xv = x.data();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::fabs(xv[i]);

    Tape* tape = Tape::active();
    const bool track_x = tracked(x, tape);
    Tensor result = finish(x.shape(), std::move(out), tape, track_x);
    if (tape != nullptr && track_x) {
        ImplPtr xi = x.shared_impl(), oi = result.shared_impl();
        tape->record("absolute", [xi, oi, n] {
            if (oi->grad.empty()) return;
            xi->ensure_grad();
            for (std::size_t i = 0; i < n; ++i) {
                const double v = xi->data[i];
                const double sign = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
                xi->grad[i] += oi->grad[i] * sign;
            }
        });
    }
    return result;
}

Tensor cross_entropy_from_logits(const Tensor& logits, const Tensor& targets) {
    require_rank(logits, 2, "cross_entropy_from_logits", "logits");
    require_rank(targets, 1, "cross_entropy_from_logits", "targets");
    const std::size_t batch = logits.dim(0), classes = logits.dim(1);
    if (targets.dim(0) != batch) {
        throw std::invalid_argument("cross_entropy_from_logits: " + std::to_string(batch) +
                                    " logit rows but " + std::to_string(targets.dim(0)) +
                                    " targets");
    }

    auto tv = targets.data();
    std::vector<std::size_t> idx(batch);
    for (std::size_t i = 0; i < batch; ++i) {
        const double t = tv[i];
        if (t != std::floor(t) || t < 0.0 || t >= static_cast<double>(classes)) {
            throw std::invalid_argument(
                "cross_entropy_from_logits: target " + std::to_string(t) + " at row " +
                std::to_string(i) + " is not a class index in [0, " + std::to_string(classes) +
                ")");
        }
        idx[i] = static_cast<std::size_t>(t);
    }

    auto xv = logits.data();
    // Stores the softmax for the backward pass: d(logits) = (softmax - onehot) / batch.
    std::vector<double> probs(batch * classes);
    double total = 0.0;
    for (std::size_t i = 0; i < batch; ++i) {
        const double* row = &xv[i * classes];
        double m = row[0];
        for (std::size_t j = 1; j < classes; ++j) m = std::max(m, row[j]);
        double s = 0.0;
        for (std::size_t j = 0; j < classes; ++j) {
            const double e = std::exp(row[j] - m);
            probs[i * classes + j] = e;
            s += e;
        }
        for (std::size_t j = 0; j < classes; ++j) probs[i * classes + j] /= s;
        total += (m + std::log(s)) - row[idx[i]];
    }
    total /= static_cast<double>(batch);

    Tape* tape = Tape::active();
    const bool track_x = tracked(logits, tape);
    Tensor result = finish({}, {total}, tape, track_x);
    if (tape != nullptr && track_x) {
        ImplPtr xi = logits.shared_impl(), oi = result.shared_impl();
        tape->record("cross_entropy_from_logits",
                     [xi, oi, batch, classes, idx = std::move(idx), probs = std::move(probs)] {
                         if (oi->grad.empty()) return;
                         xi->ensure_grad();
                         const double g = oi->grad[0] / static_cast<double>(batch);
                         for (std::size_t i = 0; i < batch; ++i) {
                             for (std::size_t j = 0; j < classes; ++j) {
                                 double d = probs[i * classes + j];
                                 if (j == idx[i]) d -= 1.0;
                                 xi->grad[i * classes + j] += g * d;
                             }
                         }
                     });
    }
    return result;
}

void zero_grad(const std::vector<Tensor>& tensors) {
    for (const Tensor& t : tensors) t.clear_grad();
}

}  // namespace mlenv::engine
