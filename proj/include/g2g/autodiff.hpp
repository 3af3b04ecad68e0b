#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "g2g/tensor.hpp"

namespace g2g {

// One value in the computation graph. Gradient buffers exist only on nodes
// that require gradients and are zero-initialized at creation; leaves keep
// accumulating across tapes until zero_grad.
struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> inputs;
    std::function<void(Node&)> backprop;  // adds d(loss)/d(input) into inputs
};

using Var = std::shared_ptr<Node>;

inline Var make_leaf(Tensor t, bool requires_grad) {
    auto n = std::make_shared<Node>();
    n->value = std::move(t);
    n->requires_grad = requires_grad;
    if (requires_grad) n->grad = Tensor(n->value.shape);
    return n;
}

inline Var make_const(Tensor t) { return make_leaf(std::move(t), false); }

inline void zero_grad(const Var& p) {
    for (auto& g : p->grad.v) g = 0.0;
}

inline double scalar_of(const Var& x) {
    require(x->value.numel() == 1, "scalar_of: shape ", shape_str(x->value));
    return x->value.v[0];
}

// Records primitive operations in creation order (hence topologically) and
// replays their local-gradient closures in reverse. A tape drives exactly
// one backward pass; build a fresh one (or reset) per training step.
class Tape {
  public:
    void reset() {
        order_.clear();
        used_ = false;
    }

    std::size_t size() const { return order_.size(); }

    void backward(const Var& loss) {
        require(!used_, "backward: tape already consumed; reset first");
        require(loss->value.numel() == 1, "backward: loss has shape ", shape_str(loss->value),
                ", expected a scalar");
        require(!order_.empty(), "backward: empty tape");
        used_ = true;
        if (loss->requires_grad) loss->grad.v[0] = 1.0;
        for (auto it = order_.rbegin(); it != order_.rend(); ++it)
            if ((*it)->backprop) (*it)->backprop(**it);
    }

    // ---- primitives ----

    // matrix [r,c] times vector [c] -> [r], or matrix [c,k] -> [r,k]
    Var mm(const Var& a, const Var& b) {
        const Tensor& A = a->value;
        const Tensor& B = b->value;
        require(A.ndim() == 2, "mm: left operand has shape ", shape_str(A));
        if (B.ndim() == 1) {
            require(A.cols() == B.numel(), "mm: shapes ", shape_str(A), " x ", shape_str(B));
            Tensor out({A.rows()});
            for (std::size_t i = 0; i < A.rows(); ++i) {
                double s = 0.0;
                const double* row = &A.v[i * A.cols()];
                for (std::size_t j = 0; j < A.cols(); ++j) s += row[j] * B.v[j];
                out.v[i] = s;
            }
            return record(std::move(out), {a, b}, [](Node& n) {
                Node& na = *n.inputs[0];
                Node& nb = *n.inputs[1];
                const std::size_t r = na.value.rows(), c = na.value.cols();
                if (na.requires_grad)
                    for (std::size_t i = 0; i < r; ++i) {
                        const double u = n.grad.v[i];
                        for (std::size_t j = 0; j < c; ++j)
                            na.grad.v[i * c + j] += u * nb.value.v[j];
                    }
                if (nb.requires_grad)
                    for (std::size_t i = 0; i < r; ++i) {
                        const double u = n.grad.v[i];
                        const double* row = &na.value.v[i * c];
                        for (std::size_t j = 0; j < c; ++j) nb.grad.v[j] += u * row[j];
                    }
            });
        }
        require(B.ndim() == 2 && A.cols() == B.rows(), "mm: shapes ", shape_str(A), " x ",
                shape_str(B));
        Tensor out({A.rows(), B.cols()});
        for (std::size_t i = 0; i < A.rows(); ++i)
            for (std::size_t k = 0; k < A.cols(); ++k) {
                const double aik = A.at(i, k);
                if (aik == 0.0) continue;
                for (std::size_t j = 0; j < B.cols(); ++j) out.at(i, j) += aik * B.at(k, j);
            }
        return record(std::move(out), {a, b}, [](Node& n) {
            Node& na = *n.inputs[0];
            Node& nb = *n.inputs[1];
            const std::size_t r = na.value.rows(), c = na.value.cols(), k = nb.value.cols();
            if (na.requires_grad)
                for (std::size_t i = 0; i < r; ++i)
                    for (std::size_t m = 0; m < c; ++m) {
                        double s = 0.0;
                        for (std::size_t j = 0; j < k; ++j)
                            s += n.grad.at(i, j) * nb.value.at(m, j);
                        na.grad.at(i, m) += s;
                    }
            if (nb.requires_grad)
                for (std::size_t m = 0; m < c; ++m)
                    for (std::size_t j = 0; j < k; ++j) {
                        double s = 0.0;
                        for (std::size_t i = 0; i < r; ++i)
                            s += na.value.at(i, m) * n.grad.at(i, j);
                        nb.grad.at(m, j) += s;
                    }
        });
    }

    // transposed product: matrix [r,c] and vector [r] -> [c]
    Var tmm(const Var& a, const Var& b) {
        const Tensor& A = a->value;
        const Tensor& B = b->value;
        require(A.ndim() == 2 && B.ndim() == 1 && A.rows() == B.numel(), "tmm: shapes ",
                shape_str(A), " x ", shape_str(B));
        Tensor out({A.cols()});
        for (std::size_t i = 0; i < A.rows(); ++i) {
            const double bi = B.v[i];
            const double* row = &A.v[i * A.cols()];
            for (std::size_t j = 0; j < A.cols(); ++j) out.v[j] += row[j] * bi;
        }
        return record(std::move(out), {a, b}, [](Node& n) {
            Node& na = *n.inputs[0];
            Node& nb = *n.inputs[1];
            const std::size_t r = na.value.rows(), c = na.value.cols();
            if (na.requires_grad)
                for (std::size_t i = 0; i < r; ++i) {
                    const double bi = nb.value.v[i];
                    for (std::size_t j = 0; j < c; ++j) na.grad.v[i * c + j] += n.grad.v[j] * bi;
                }
            if (nb.requires_grad)
                for (std::size_t i = 0; i < r; ++i) {
                    double s = 0.0;
                    const double* row = &na.value.v[i * c];
                    for (std::size_t j = 0; j < c; ++j) s += row[j] * n.grad.v[j];
                    nb.grad.v[i] += s;
                }
        });
    }

    Var add(const Var& a, const Var& b) { return zip("add", a, b, [](double x, double y) { return x + y; }, 1.0, 1.0); }
    Var sub(const Var& a, const Var& b) { return zip("sub", a, b, [](double x, double y) { return x - y; }, 1.0, -1.0); }

    Var mul(const Var& a, const Var& b) {
        require(a->value.same_shape(b->value), "mul: shapes ", shape_str(a->value), " vs ",
                shape_str(b->value));
        Tensor out(a->value.shape);
        for (std::size_t i = 0; i < out.numel(); ++i) out.v[i] = a->value.v[i] * b->value.v[i];
        return record(std::move(out), {a, b}, [](Node& n) {
            Node& na = *n.inputs[0];
            Node& nb = *n.inputs[1];
            if (na.requires_grad)
                for (std::size_t i = 0; i < n.grad.numel(); ++i)
                    na.grad.v[i] += n.grad.v[i] * nb.value.v[i];
            if (nb.requires_grad)
                for (std::size_t i = 0; i < n.grad.numel(); ++i)
                    nb.grad.v[i] += n.grad.v[i] * na.value.v[i];
        });
    }

    // elementwise a*x + b with constant coefficients
    Var affine(const Var& x, double a, double b) {
        Tensor out(x->value.shape);
        for (std::size_t i = 0; i < out.numel(); ++i) out.v[i] = a * x->value.v[i] + b;
        return record(std::move(out), {x}, [a](Node& n) {
            Node& nx = *n.inputs[0];
            if (nx.requires_grad)
                for (std::size_t i = 0; i < n.grad.numel(); ++i) nx.grad.v[i] += a * n.grad.v[i];
        });
    }

    Var scale(const Var& x, double a) { return affine(x, a, 0.0); }

    Var concat(const std::vector<Var>& xs) {
        require(!xs.empty(), "concat: no inputs");
        std::size_t total = 0;
        for (const auto& x : xs) {
            require(x->value.ndim() == 1, "concat: input has shape ", shape_str(x->value));
            total += x->value.numel();
        }
        Tensor out({total});
        std::size_t off = 0;
        for (const auto& x : xs)
            for (std::size_t i = 0; i < x->value.numel(); ++i) out.v[off++] = x->value.v[i];
        return record(std::move(out), xs, [](Node& n) {
            std::size_t off = 0;
            for (auto& in : n.inputs) {
                if (in->requires_grad)
                    for (std::size_t i = 0; i < in->value.numel(); ++i)
                        in->grad.v[i] += n.grad.v[off + i];
                off += in->value.numel();
            }
        });
    }

    // stacks k vectors of equal length d into a [k,d] matrix
    Var stack(const std::vector<Var>& xs) {
        require(!xs.empty(), "stack: no inputs");
        const std::size_t d = xs[0]->value.numel();
        for (const auto& x : xs)
            require(x->value.ndim() == 1 && x->value.numel() == d, "stack: input has shape ",
                    shape_str(x->value), ", expected [", d, "]");
        Tensor out({xs.size(), d});
        for (std::size_t i = 0; i < xs.size(); ++i)
            for (std::size_t j = 0; j < d; ++j) out.at(i, j) = xs[i]->value.v[j];
        return record(std::move(out), xs, [](Node& n) {
            const std::size_t d = n.value.cols();
            for (std::size_t i = 0; i < n.inputs.size(); ++i) {
                Node& in = *n.inputs[i];
                if (in.requires_grad)
                    for (std::size_t j = 0; j < d; ++j) in.grad.v[j] += n.grad.at(i, j);
            }
        });
    }

    // contiguous range [lo, hi) of a vector
    Var slice(const Var& x, std::size_t lo, std::size_t hi) {
        require(x->value.ndim() == 1, "slice: input has shape ", shape_str(x->value));
        require(lo <= hi && hi <= x->value.numel(), "slice: range [", lo, ",", hi,
                ") of ", shape_str(x->value));
        Tensor out({hi - lo});
        for (std::size_t i = lo; i < hi; ++i) out.v[i - lo] = x->value.v[i];
        return record(std::move(out), {x}, [lo](Node& n) {
            Node& nx = *n.inputs[0];
            if (nx.requires_grad)
                for (std::size_t i = 0; i < n.grad.numel(); ++i) nx.grad.v[lo + i] += n.grad.v[i];
        });
    }

    // single element as a scalar
    Var at(const Var& x, std::size_t i) {
        require(i < x->value.numel(), "at: index ", i, " into ", shape_str(x->value));
        Tensor out({1});
        out.v[0] = x->value.v[i];
        return record(std::move(out), {x}, [i](Node& n) {
            Node& nx = *n.inputs[0];
            if (nx.requires_grad) nx.grad.v[i] += n.grad.v[0];
        });
    }

    Var sigmoid(const Var& x) {
        Tensor out(x->value.shape);
        for (std::size_t i = 0; i < out.numel(); ++i) {
            const double t = x->value.v[i];
            out.v[i] = t >= 0.0 ? 1.0 / (1.0 + std::exp(-t))
                                : std::exp(t) / (1.0 + std::exp(t));
        }
        return record(std::move(out), {x}, [](Node& n) {
            Node& nx = *n.inputs[0];
            if (nx.requires_grad)
                for (std::size_t i = 0; i < n.grad.numel(); ++i) {
                    const double s = n.value.v[i];
                    nx.grad.v[i] += n.grad.v[i] * s * (1.0 - s);
                }
        });
    }

    Var tanh(const Var& x) {
        Tensor out(x->value.shape);
        for (std::size_t i = 0; i < out.numel(); ++i) out.v[i] = std::tanh(x->value.v[i]);
        return record(std::move(out), {x}, [](Node& n) {
            Node& nx = *n.inputs[0];
            if (nx.requires_grad)
                for (std::size_t i = 0; i < n.grad.numel(); ++i) {
                    const double t = n.value.v[i];
                    nx.grad.v[i] += n.grad.v[i] * (1.0 - t * t);
                }
        });
    }

    // softmax over the last dimension (each row of a matrix, or a whole
    // vector), stabilized by max subtraction
    Var softmax_lastdim(const Var& x) {
        const Tensor& X = x->value;
        require(X.ndim() == 1 || X.ndim() == 2, "softmax: input has shape ", shape_str(X));
        const std::size_t d = X.ndim() == 1 ? X.numel() : X.cols();
        const std::size_t rows = X.numel() / (d == 0 ? 1 : d);
        require(d > 0, "softmax: empty final dimension");
        Tensor out(X.shape);
        for (std::size_t r = 0; r < rows; ++r) {
            const double* in = &X.v[r * d];
            double* o = &out.v[r * d];
            double hi = in[0];
            for (std::size_t i = 1; i < d; ++i) hi = std::max(hi, in[i]);
            double z = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                o[i] = std::exp(in[i] - hi);
                z += o[i];
            }
            for (std::size_t i = 0; i < d; ++i) o[i] /= z;
        }
        return record(std::move(out), {x}, [d, rows](Node& n) {
            Node& nx = *n.inputs[0];
            if (!nx.requires_grad) return;
            for (std::size_t r = 0; r < rows; ++r) {
                const double* s = &n.value.v[r * d];
                const double* u = &n.grad.v[r * d];
                double dot = 0.0;
                for (std::size_t i = 0; i < d; ++i) dot += u[i] * s[i];
                for (std::size_t i = 0; i < d; ++i) nx.grad.v[r * d + i] += s[i] * (u[i] - dot);
            }
        });
    }

    // natural log, clamped below at 1e-12 (zero gradient once clamped)
    Var log(const Var& x) {
        constexpr double kFloor = 1e-12;
        Tensor out(x->value.shape);
        for (std::size_t i = 0; i < out.numel(); ++i)
            out.v[i] = std::log(std::max(x->value.v[i], kFloor));
        return record(std::move(out), {x}, [](Node& n) {
            Node& nx = *n.inputs[0];
            if (nx.requires_grad)
                for (std::size_t i = 0; i < n.grad.numel(); ++i) {
                    const double t = nx.value.v[i];
                    if (t > kFloor) nx.grad.v[i] += n.grad.v[i] / t;
                }
        });
    }

    // elementwise x^p for a constant exponent
    Var pow(const Var& x, double p) {
        Tensor out(x->value.shape);
        for (std::size_t i = 0; i < out.numel(); ++i) out.v[i] = std::pow(x->value.v[i], p);
        return record(std::move(out), {x}, [p](Node& n) {
            Node& nx = *n.inputs[0];
            if (!nx.requires_grad || p == 0.0) return;
            for (std::size_t i = 0; i < n.grad.numel(); ++i)
                nx.grad.v[i] += n.grad.v[i] * p * std::pow(nx.value.v[i], p - 1.0);
        });
    }

    // clamp into [lo, hi]; gradient passes only strictly inside the range
    Var clamp(const Var& x, double lo, double hi) {
        require(lo <= hi, "clamp: empty range [", lo, ",", hi, "]");
        Tensor out(x->value.shape);
        for (std::size_t i = 0; i < out.numel(); ++i)
            out.v[i] = std::min(std::max(x->value.v[i], lo), hi);
        return record(std::move(out), {x}, [lo, hi](Node& n) {
            Node& nx = *n.inputs[0];
            if (nx.requires_grad)
                for (std::size_t i = 0; i < n.grad.numel(); ++i) {
                    const double t = nx.value.v[i];
                    if (t > lo && t < hi) nx.grad.v[i] += n.grad.v[i];
                }
        });
    }

    Var sum(const Var& x) {
        double s = 0.0;
        for (double t : x->value.v) s += t;
        return record(Tensor::scalar(s), {x}, [](Node& n) {
            Node& nx = *n.inputs[0];
            if (nx.requires_grad)
                for (auto& g : nx.grad.v) g += n.grad.v[0];
        });
    }

    Var mean(const Var& x) {
        require(x->value.numel() > 0, "mean: empty input");
        double s = 0.0;
        for (double t : x->value.v) s += t;
        const double inv = 1.0 / static_cast<double>(x->value.numel());
        return record(Tensor::scalar(s * inv), {x}, [inv](Node& n) {
            Node& nx = *n.inputs[0];
            if (nx.requires_grad)
                for (auto& g : nx.grad.v) g += n.grad.v[0] * inv;
        });
    }

  private:
    static constexpr double kFloor = 1e-12;

    template <class FwdFn>
    Var zip(const char* name, const Var& a, const Var& b, FwdFn fn, double da, double db) {
        require(a->value.same_shape(b->value), name, ": shapes ", shape_str(a->value), " vs ",
                shape_str(b->value));
        Tensor out(a->value.shape);
        for (std::size_t i = 0; i < out.numel(); ++i) out.v[i] = fn(a->value.v[i], b->value.v[i]);
        return record(std::move(out), {a, b}, [da, db](Node& n) {
            Node& na = *n.inputs[0];
            Node& nb = *n.inputs[1];
            if (na.requires_grad)
                for (std::size_t i = 0; i < n.grad.numel(); ++i) na.grad.v[i] += da * n.grad.v[i];
            if (nb.requires_grad)
                for (std::size_t i = 0; i < n.grad.numel(); ++i) nb.grad.v[i] += db * n.grad.v[i];
        });
    }

    Var record(Tensor out_value, std::vector<Var> inputs, std::function<void(Node&)> back) {
        auto n = std::make_shared<Node>();
        n->value = std::move(out_value);
        for (const auto& in : inputs)
            if (in->requires_grad) {
                n->requires_grad = true;
                break;
            }
        if (n->requires_grad) {
            n->grad = Tensor(n->value.shape);
            n->inputs = std::move(inputs);
            n->backprop = std::move(back);
            order_.push_back(n);
        }
        return n;
    }

    std::vector<Var> order_;
    bool used_ = false;
};

// Compares the reverse-mode gradient of a scalar function against central
// finite differences, component by component. Returns the worst relative
// error with denominator max(|a|, |b|, 1e-8).
template <class F>
double grad_check(F&& f, const Tensor& x, double eps = 1e-4) {
    require(eps > 0.0, "grad_check: eps must be positive");
    Tape tape;
    Var leaf = make_leaf(x, true);
    Var y = f(tape, leaf);
    require(y->value.numel() == 1, "grad_check: f returned shape ", shape_str(y->value));
    tape.backward(y);
    const Tensor analytic = leaf->grad;

    auto eval = [&](const Tensor& probe) {
        Tape t;
        Var v = make_leaf(probe, false);
        const double out = scalar_of(f(t, v));
        require(std::isfinite(out), "grad_check: non-finite function value");
        return out;
    };

    double worst = 0.0;
    for (std::size_t i = 0; i < x.numel(); ++i) {
        Tensor lo = x, hi = x;
        hi.v[i] += eps;
        lo.v[i] -= eps;
        const double fd = (eval(hi) - eval(lo)) / (2.0 * eps);
        const double a = analytic.v[i];
        require(std::isfinite(a) && std::isfinite(fd), "grad_check: non-finite gradient at ", i);
        const double denom = std::max({std::fabs(a), std::fabs(fd), 1e-8});
        worst = std::max(worst, std::fabs(a - fd) / denom);
    }
    return worst;
}

}  // namespace g2g
