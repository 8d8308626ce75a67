#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "csirl/dual.hpp"
#include "csirl/errors.hpp"
#include "csirl/mat.hpp"
#include "csirl/rng.hpp"

// Differentiable multilayer-perceptron core. Fully-connected layers with a
// linear head, reverse-mode gradients, and -- by running the same reverse
// pass on Dual scalars -- exact mixed-partial contractions of the form
// v^T d^2L/(da db). That contraction is the only second-order machinery the
// rest of the library needs; it is forward-over-reverse, so there is no
// truncation error beyond floating point.
//
// All arithmetic is real64. Everything here is value-semantic and free of
// shared mutable state; concurrent callers just need their own parameter
// snapshots.

namespace csirl::nn {

enum class Activation { relu, tanh };

inline std::string to_string(Activation a) { return a == Activation::relu ? "relu" : "tanh"; }

inline Activation activation_from_string(const std::string& s) {
    if (s == "relu") return Activation::relu;
    if (s == "tanh") return Activation::tanh;
    throw InvalidInputError("unknown activation: " + s);
}

struct MLPSpec {
    int input_dim = 0;
    std::vector<int> hidden_dims;
    int output_dim = 0;
    Activation activation = Activation::relu;

    bool operator==(const MLPSpec&) const = default;

    int num_layers() const { return static_cast<int>(hidden_dims.size()) + 1; }

    int layer_in(int l) const { return l == 0 ? input_dim : hidden_dims[l - 1]; }
    int layer_out(int l) const {
        return l == static_cast<int>(hidden_dims.size()) ? output_dim : hidden_dims[l];
    }

    // Exact count: sum over layers of (fan_in + 1) * fan_out.
    int param_count() const {
        int n = 0;
        for (int l = 0; l < num_layers(); ++l) n += (layer_in(l) + 1) * layer_out(l);
        return n;
    }

    void validate() const {
        if (input_dim <= 0 || output_dim <= 0) throw InvalidInputError("MLPSpec: non-positive layer width");
        for (const int h : hidden_dims)
            if (h <= 0) throw InvalidInputError("MLPSpec: non-positive hidden width");
    }
};

// Flat parameter storage. Layout per layer: weights row-major (out x in),
// then biases (out).
struct ParamVector {
    MLPSpec spec;
    std::vector<double> values;

    void check_aligned() const {
        if (static_cast<int>(values.size()) != spec.param_count())
            throw InvalidInputError("ParamVector: length does not match spec parameter count");
    }
};

struct GradVector {
    std::vector<double> values;
};

inline ParamVector zero_params(const MLPSpec& spec) {
    spec.validate();
    return {spec, std::vector<double>(spec.param_count(), 0.0)};
}

// Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)] for weights and biases.
inline ParamVector init_params(const MLPSpec& spec, Rng& rng) {
    ParamVector p = zero_params(spec);
    size_t k = 0;
    for (int l = 0; l < spec.num_layers(); ++l) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(spec.layer_in(l)));
        const int count = (spec.layer_in(l) + 1) * spec.layer_out(l);
        for (int i = 0; i < count; ++i) p.values[k++] = rng.uniform(-bound, bound);
    }
    return p;
}

namespace detail {

template <typename T>
T activate(Activation act, const T& z) {
    if (act == Activation::relu) return z > T(0.0) ? z : T(0.0);
    using std::tanh;
    return tanh(z);
}

// Activation derivative recovered from the post-activation value.
template <typename T>
T activate_deriv_from_output(Activation act, const T& y) {
    if (act == Activation::relu) return y > T(0.0) ? T(1.0) : T(0.0);
    return T(1.0) - y * y;
}

}  // namespace detail

// Stored forward pass: acts[0] is the input batch, acts[l+1] the output of
// layer l (post-activation; final layer is linear).
template <typename T>
struct Tape {
    std::vector<Mat<T>> acts;
};

template <typename T>
Mat<T> forward_batch(const MLPSpec& spec, std::span<const T> params, const Mat<T>& x, Tape<T>* tape = nullptr) {
    if (x.cols != spec.input_dim) throw InvalidInputError("forward_batch: input dim mismatch");
    if (static_cast<int>(params.size()) != spec.param_count())
        throw InvalidInputError("forward_batch: params do not match spec");

    if (tape) {
        tape->acts.clear();
        tape->acts.push_back(x);
    }
    Mat<T> cur = x;
    size_t off = 0;
    const int layers = spec.num_layers();
    for (int l = 0; l < layers; ++l) {
        const int in = spec.layer_in(l);
        const int out = spec.layer_out(l);
        const T* w = params.data() + off;
        const T* b = params.data() + off + static_cast<size_t>(in) * out;
        off += static_cast<size_t>(in + 1) * out;

        Mat<T> next(cur.rows, out);
        for (int r = 0; r < cur.rows; ++r) {
            const T* xr = cur.a.data() + static_cast<size_t>(r) * in;
            T* yr = next.a.data() + static_cast<size_t>(r) * out;
            for (int j = 0; j < out; ++j) {
                T acc = b[j];
                const T* wj = w + static_cast<size_t>(j) * in;
                for (int i = 0; i < in; ++i) acc += wj[i] * xr[i];
                yr[j] = (l == layers - 1) ? acc : detail::activate(spec.activation, acc);
            }
        }
        cur = std::move(next);
        if (tape) tape->acts.push_back(cur);
    }
    return cur;
}

// Reverse pass. d_out is dL/d(output); parameter gradients are ACCUMULATED
// into d_params (caller zeroes them), input gradients optionally into d_x.
template <typename T>
void backward_batch(const MLPSpec& spec, std::span<const T> params, const Tape<T>& tape, const Mat<T>& d_out,
                    std::span<T> d_params, Mat<T>* d_x = nullptr) {
    const int layers = spec.num_layers();
    if (static_cast<int>(tape.acts.size()) != layers + 1)
        throw InvalidInputError("backward_batch: tape does not match spec");
    if (static_cast<int>(d_params.size()) != spec.param_count())
        throw InvalidInputError("backward_batch: gradient buffer size mismatch");

    std::vector<size_t> offsets(layers);
    size_t off = 0;
    for (int l = 0; l < layers; ++l) {
        offsets[l] = off;
        off += static_cast<size_t>(spec.layer_in(l) + 1) * spec.layer_out(l);
    }

    Mat<T> g = d_out;
    for (int l = layers - 1; l >= 0; --l) {
        const int in = spec.layer_in(l);
        const int out = spec.layer_out(l);
        const Mat<T>& x = tape.acts[l];
        const T* w = params.data() + offsets[l];
        T* dw = d_params.data() + offsets[l];
        T* db = dw + static_cast<size_t>(in) * out;

        // g currently holds dL/dy_l; fold in the activation derivative.
        if (l != layers - 1) {
            const Mat<T>& y = tape.acts[l + 1];
            for (size_t i = 0; i < g.a.size(); ++i)
                g.a[i] = g.a[i] * detail::activate_deriv_from_output(spec.activation, y.a[i]);
        }

        const bool need_dx = (l > 0) || (d_x != nullptr);
        Mat<T> gx;
        if (need_dx) gx = Mat<T>(g.rows, in);
        for (int r = 0; r < g.rows; ++r) {
            const T* gr = g.a.data() + static_cast<size_t>(r) * out;
            const T* xr = x.a.data() + static_cast<size_t>(r) * in;
            T* gxr = need_dx ? gx.a.data() + static_cast<size_t>(r) * in : nullptr;
            for (int j = 0; j < out; ++j) {
                const T gj = gr[j];
                db[j] += gj;
                T* dwj = dw + static_cast<size_t>(j) * in;
                const T* wj = w + static_cast<size_t>(j) * in;
                for (int i = 0; i < in; ++i) {
                    dwj[i] += gj * xr[i];
                    if (need_dx) gxr[i] += gj * wj[i];
                }
            }
        }
        if (l == 0 && d_x) *d_x = std::move(gx);
        else if (need_dx) g = std::move(gx);
    }
}

// Single-input evaluation. Deterministic pure function of (spec, params, input).
inline std::vector<double> mlp_forward(const MLPSpec& spec, const ParamVector& params,
                                       std::span<const double> input) {
    if (static_cast<int>(input.size()) != spec.input_dim)
        throw InvalidInputError("mlp_forward: input length != spec.input_dim");
    params.check_aligned();
    MatD x(1, spec.input_dim);
    for (int i = 0; i < spec.input_dim; ++i) x(0, i) = input[i];
    MatD y = forward_batch<double>(spec, params.values, x);
    return {y.a.begin(), y.a.end()};
}

// Gradient of a mean batch loss with respect to every parameter.
// LossFn: (const MatD& outputs, MatD& d_outputs) -> double. It must return the
// batch-mean scalar loss and fill dLoss/dOutputs. Non-finite intermediates are
// reported, never propagated.
template <typename LossFn>
std::pair<double, GradVector> backprop_grad(const MLPSpec& spec, const ParamVector& params, const MatD& batch,
                                            LossFn&& loss_fn) {
    params.check_aligned();
    Tape<double> tape;
    MatD out = forward_batch<double>(spec, params.values, batch, &tape);
    for (const double v : out.a)
        if (!std::isfinite(v)) throw NumericError("backprop_grad: non-finite network output");

    MatD d_out(out.rows, out.cols);
    const double loss = loss_fn(static_cast<const MatD&>(out), d_out);
    if (!std::isfinite(loss)) throw NumericError("backprop_grad: non-finite loss");

    GradVector g{std::vector<double>(spec.param_count(), 0.0)};
    backward_batch<double>(spec, params.values, tape, d_out, g.values);
    for (const double v : g.values)
        if (!std::isfinite(v)) throw NumericError("backprop_grad: non-finite gradient");
    return {loss, std::move(g)};
}

// Mixed-partial contraction v^T dd(L)/(da db), returned aligned with b.
// grad_b must compute the gradient of the loss with respect to b in generic
// scalar arithmetic: template-callable as grad_b(span<const T> a,
// span<const T> b) -> vector<T>. Seeding a with direction v as dual numbers
// makes the returned derivative part exactly the directional derivative of
// grad_b along v -- no finite-difference truncation.
template <typename GradBFn>
std::vector<double> second_order_vjp(GradBFn&& grad_b, std::span<const double> a, std::span<const double> b,
                                     std::span<const double> v) {
    if (v.size() != a.size()) throw InvalidInputError("second_order_vjp: v not aligned with params_a");
    std::vector<Dual> ad(a.size()), bd(b.size());
    for (size_t i = 0; i < a.size(); ++i) ad[i] = Dual(a[i], v[i]);
    for (size_t j = 0; j < b.size(); ++j) bd[j] = Dual(b[j], 0.0);
    std::vector<Dual> g = grad_b(std::span<const Dual>(ad), std::span<const Dual>(bd));
    if (g.size() != b.size()) throw InvalidInputError("second_order_vjp: grad_b result not aligned with params_b");
    std::vector<double> out(g.size());
    for (size_t j = 0; j < g.size(); ++j) {
        if (!is_finite(g[j])) throw NumericError("second_order_vjp: non-finite mixed partial");
        out[j] = g[j].d;
    }
    return out;
}

// One plain gradient step; the input is left untouched.
inline ParamVector sgd_step(const ParamVector& params, const GradVector& grad, double lr) {
    params.check_aligned();
    if (grad.values.size() != params.values.size())
        throw InvalidInputError("sgd_step: gradient not aligned with params");
    if (!(lr > 0.0)) throw InvalidInputError("sgd_step: lr must be positive");
    ParamVector out = params;
    for (size_t i = 0; i < out.values.size(); ++i) out.values[i] -= lr * grad.values[i];
    return out;
}

// Adam with the usual bias correction; used for the live actor/critic and
// generator updates.
struct AdamState {
    std::vector<double> m, v;
    long t = 0;
};

inline void adam_step(ParamVector& params, const GradVector& grad, AdamState& state, double lr,
                      double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8) {
    if (grad.values.size() != params.values.size())
        throw InvalidInputError("adam_step: gradient not aligned with params");
    if (state.m.empty()) {
        state.m.assign(params.values.size(), 0.0);
        state.v.assign(params.values.size(), 0.0);
    }
    state.t += 1;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));
    for (size_t i = 0; i < params.values.size(); ++i) {
        const double g = grad.values[i];
        state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * g;
        state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * g * g;
        params.values[i] -= lr * (state.m[i] / c1) / (std::sqrt(state.v[i] / c2) + eps);
    }
}

}  // namespace csirl::nn
