#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "lacnn/errors.hpp"
#include "lacnn/nn/config.hpp"
#include "lacnn/nn/tensor.hpp"
#include "lacnn/rng.hpp"

namespace lacnn::nn {

/// Weights and biases for one layer; empty for parameter-free layers so that
/// indices stay aligned with NetworkConfig::layers.
///
/// Conv weights are laid out [filter][ky][kx][in_channel]; fc weights
/// [unit][input]. This order is also the checkpoint serialization order.
template <typename Real>
struct LayerParams {
    std::vector<Real> w;
    std::vector<Real> b;
};

template <typename Real>
struct Parameters {
    std::vector<LayerParams<Real>> layers;

    size_t count() const {
        size_t n = 0;
        for (const auto& l : layers) n += l.w.size() + l.b.size();
        return n;
    }

    template <typename Other>
    static Parameters<Real> from(const Parameters<Other>& src) {
        Parameters<Real> out;
        out.layers.resize(src.layers.size());
        for (size_t i = 0; i < src.layers.size(); ++i) {
            out.layers[i].w.assign(src.layers[i].w.begin(), src.layers[i].w.end());
            out.layers[i].b.assign(src.layers[i].b.begin(), src.layers[i].b.end());
        }
        return out;
    }
};

/// Zero-initialized parameter arrays shaped for cfg.
template <typename Real>
Parameters<Real> zero_parameters(const NetworkConfig& cfg) {
    const auto shapes = infer_shapes(cfg);
    Parameters<Real> params;
    params.layers.resize(cfg.layers.size());
    Dims in{cfg.input.height, cfg.input.width, cfg.input.channels};
    for (size_t i = 0; i < cfg.layers.size(); ++i) {
        if (const auto* conv = std::get_if<ConvSpec>(&cfg.layers[i])) {
            params.layers[i].w.assign(
                static_cast<size_t>(conv->filters) * conv->kernel * conv->kernel * in.c, Real(0));
            params.layers[i].b.assign(static_cast<size_t>(conv->filters), Real(0));
        } else if (const auto* fc = std::get_if<FcSpec>(&cfg.layers[i])) {
            params.layers[i].w.assign(static_cast<size_t>(fc->units) * in.flat(), Real(0));
            params.layers[i].b.assign(static_cast<size_t>(fc->units), Real(0));
        }
        in = shapes[i];
    }
    return params;
}

/// Gaussian init with std sqrt(2 / fan_in), biases zero, driven by cfg.seed.
template <typename Real>
Parameters<Real> init_parameters(const NetworkConfig& cfg) {
    Parameters<Real> params = zero_parameters<Real>(cfg);
    Rng rng(Rng::derive_seed(cfg.seed, 0x1417));
    const auto shapes = infer_shapes(cfg);
    Dims in{cfg.input.height, cfg.input.width, cfg.input.channels};
    for (size_t i = 0; i < cfg.layers.size(); ++i) {
        size_t fan_in = 0;
        if (const auto* conv = std::get_if<ConvSpec>(&cfg.layers[i]))
            fan_in = static_cast<size_t>(conv->kernel) * conv->kernel * in.c;
        else if (std::get_if<FcSpec>(&cfg.layers[i]))
            fan_in = static_cast<size_t>(in.flat());
        if (fan_in > 0) {
            const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
            for (auto& v : params.layers[i].w) v = static_cast<Real>(rng.normal(0.0, stddev));
        }
        in = shapes[i];
    }
    return params;
}

enum class RunMode : uint8_t { kTrain, kEval };

/// Intermediate state of one forward pass, consumed by backward().
template <typename Real>
struct ForwardCache {
    std::vector<Tensor<Real>> inputs;            // input tensor of each layer
    std::vector<std::vector<int64_t>> pool_argmax; // flat source index per pooled value
    std::vector<std::vector<Real>> dropout_scale;  // per-element 0 or 1/(1-rate)
    Tensor<Real> logits;
    bool ran = false;
};

namespace detail {

template <typename Real>
Tensor<Real> conv_forward(const ConvSpec& spec, const std::vector<Real>& w,
                          const std::vector<Real>& b, const Tensor<Real>& in) {
    const int n_batch = in.dim(0), ih = in.dim(1), iw = in.dim(2), ic = in.dim(3);
    const int oh = (ih + 2 * spec.padding - spec.kernel) / spec.stride + 1;
    const int ow = (iw + 2 * spec.padding - spec.kernel) / spec.stride + 1;
    Tensor<Real> out({n_batch, oh, ow, spec.filters});
    for (int n = 0; n < n_batch; ++n)
        for (int oy = 0; oy < oh; ++oy)
            for (int ox = 0; ox < ow; ++ox)
                for (int f = 0; f < spec.filters; ++f) {
                    Real acc = b[static_cast<size_t>(f)];
                    for (int ky = 0; ky < spec.kernel; ++ky) {
                        const int iy = oy * spec.stride - spec.padding + ky;
                        if (iy < 0 || iy >= ih) continue;
                        for (int kx = 0; kx < spec.kernel; ++kx) {
                            const int ix = ox * spec.stride - spec.padding + kx;
                            if (ix < 0 || ix >= iw) continue;
                            const size_t wbase =
                                ((static_cast<size_t>(f) * spec.kernel + ky) * spec.kernel + kx) * ic;
                            for (int c = 0; c < ic; ++c)
                                acc += in.at4(n, iy, ix, c) * w[wbase + c];
                        }
                    }
                    out.at4(n, oy, ox, f) = acc;
                }
    return out;
}

template <typename Real>
void conv_backward(const ConvSpec& spec, const std::vector<Real>& w, const Tensor<Real>& in,
                   const Tensor<Real>& dout, std::vector<Real>& dw, std::vector<Real>& db,
                   Tensor<Real>& din) {
    const int n_batch = in.dim(0), ih = in.dim(1), iw = in.dim(2), ic = in.dim(3);
    const int oh = dout.dim(1), ow = dout.dim(2);
    for (int n = 0; n < n_batch; ++n)
        for (int oy = 0; oy < oh; ++oy)
            for (int ox = 0; ox < ow; ++ox)
                for (int f = 0; f < spec.filters; ++f) {
                    const Real g = dout.at4(n, oy, ox, f);
                    if (g == Real(0)) continue;
                    db[static_cast<size_t>(f)] += g;
                    for (int ky = 0; ky < spec.kernel; ++ky) {
                        const int iy = oy * spec.stride - spec.padding + ky;
                        if (iy < 0 || iy >= ih) continue;
                        for (int kx = 0; kx < spec.kernel; ++kx) {
                            const int ix = ox * spec.stride - spec.padding + kx;
                            if (ix < 0 || ix >= iw) continue;
                            const size_t wbase =
                                ((static_cast<size_t>(f) * spec.kernel + ky) * spec.kernel + kx) * ic;
                            for (int c = 0; c < ic; ++c) {
                                dw[wbase + c] += in.at4(n, iy, ix, c) * g;
                                din.at4(n, iy, ix, c) += w[wbase + c] * g;
                            }
                        }
                    }
                }
}

template <typename Real>
Tensor<Real> maxpool_forward(const MaxPoolSpec& spec, const Tensor<Real>& in,
                             std::vector<int64_t>* argmax) {
    const int n_batch = in.dim(0), ih = in.dim(1), iw = in.dim(2), ic = in.dim(3);
    const int oh = (ih - spec.window) / spec.stride + 1;
    const int ow = (iw - spec.window) / spec.stride + 1;
    Tensor<Real> out({n_batch, oh, ow, ic});
    if (argmax) argmax->assign(out.count(), 0);
    size_t oi = 0;
    for (int n = 0; n < n_batch; ++n)
        for (int oy = 0; oy < oh; ++oy)
            for (int ox = 0; ox < ow; ++ox)
                for (int c = 0; c < ic; ++c, ++oi) {
                    Real best{};
                    int64_t best_idx = -1;
                    for (int wy = 0; wy < spec.window; ++wy)
                        for (int wx = 0; wx < spec.window; ++wx) {
                            const int iy = oy * spec.stride + wy;
                            const int ix = ox * spec.stride + wx;
                            const Real v = in.at4(n, iy, ix, c);
                            // ties keep the first window element scanned
                            if (best_idx < 0 || v > best) {
                                best = v;
                                best_idx =
                                    ((static_cast<int64_t>(n) * ih + iy) * iw + ix) * ic + c;
                            }
                        }
                    out.at4(n, oy, ox, c) = best;
                    if (argmax) (*argmax)[oi] = best_idx;
                }
    return out;
}

template <typename Real>
void fc_forward(const FcSpec& spec, const std::vector<Real>& w, const std::vector<Real>& b,
                const Tensor<Real>& in, Tensor<Real>& out) {
    const int n_batch = in.dim(0);
    const size_t in_dim = in.count() / static_cast<size_t>(n_batch);
    for (int n = 0; n < n_batch; ++n) {
        const Real* src = in.data.data() + static_cast<size_t>(n) * in_dim;
        for (int u = 0; u < spec.units; ++u) {
            Real acc = b[static_cast<size_t>(u)];
            const Real* wrow = w.data() + static_cast<size_t>(u) * in_dim;
            for (size_t i = 0; i < in_dim; ++i) acc += src[i] * wrow[i];
            out.at4(n, 0, 0, u) = acc;
        }
    }
}

} // namespace detail

/// Runs the network over an NHWC batch and returns logits (N x M).
/// Dropout draws from `dropout_rng` in train mode and is an identity in eval
/// mode (inverted dropout). Pass `cache` to enable a later backward().
template <typename Real>
Tensor<Real> forward(const NetworkConfig& cfg, const Parameters<Real>& params,
                     const Tensor<Real>& batch, RunMode mode, Rng* dropout_rng = nullptr,
                     ForwardCache<Real>* cache = nullptr) {
    if (batch.shape.size() != 4 || batch.dim(1) != cfg.input.height ||
        batch.dim(2) != cfg.input.width || batch.dim(3) != cfg.input.channels)
        throw std::invalid_argument("forward: batch shape does not match network input");
    if (params.layers.size() != cfg.layers.size())
        throw std::invalid_argument("forward: parameter/layer count mismatch");
    const int n_batch = batch.dim(0);
    if (n_batch <= 0) throw std::invalid_argument("forward: empty batch");

    if (cache) {
        cache->inputs.clear();
        cache->pool_argmax.assign(cfg.layers.size(), {});
        cache->dropout_scale.assign(cfg.layers.size(), {});
        cache->ran = false;
    }

    Tensor<Real> cur = batch;
    for (size_t i = 0; i < cfg.layers.size(); ++i) {
        if (cache) cache->inputs.push_back(cur);
        if (const auto* conv = std::get_if<ConvSpec>(&cfg.layers[i])) {
            cur = detail::conv_forward(*conv, params.layers[i].w, params.layers[i].b, cur);
        } else if (std::get_if<ReluSpec>(&cfg.layers[i])) {
            for (auto& v : cur.data) v = v > Real(0) ? v : Real(0);
        } else if (const auto* pool = std::get_if<MaxPoolSpec>(&cfg.layers[i])) {
            cur = detail::maxpool_forward(*pool, cur,
                                          cache ? &cache->pool_argmax[i] : nullptr);
        } else if (const auto* fc = std::get_if<FcSpec>(&cfg.layers[i])) {
            Tensor<Real> out({n_batch, 1, 1, fc->units});
            detail::fc_forward(*fc, params.layers[i].w, params.layers[i].b, cur, out);
            cur = std::move(out);
        } else if (const auto* drop = std::get_if<DropoutSpec>(&cfg.layers[i])) {
            if (mode == RunMode::kTrain && drop->rate > 0.0) {
                if (!dropout_rng)
                    throw std::invalid_argument("forward: train-mode dropout needs an rng");
                const Real keep_scale = static_cast<Real>(1.0 / (1.0 - drop->rate));
                std::vector<Real> scale(cur.count());
                for (size_t j = 0; j < scale.size(); ++j) {
                    scale[j] = dropout_rng->uniform() < drop->rate ? Real(0) : keep_scale;
                    cur.data[j] *= scale[j];
                }
                if (cache) cache->dropout_scale[i] = std::move(scale);
            }
        }
    }

    Tensor<Real> logits({n_batch, static_cast<int>(cur.count() / n_batch)});
    logits.data = std::move(cur.data);
    for (const Real v : logits.data)
        if (!std::isfinite(static_cast<double>(v)))
            throw NumericError("forward: non-finite logits");
    if (cache) {
        cache->logits = logits;
        cache->ran = true;
    }
    return logits;
}

/// Analytic gradients of the loss w.r.t. every parameter, given dLoss/dlogits
/// from a loss function and the cache of the matching forward pass.
template <typename Real>
Parameters<Real> backward(const NetworkConfig& cfg, const Parameters<Real>& params,
                          const ForwardCache<Real>& cache, const Tensor<Real>& dlogits) {
    if (!cache.ran) throw std::invalid_argument("backward: no prior forward pass");
    if (dlogits.shape != cache.logits.shape)
        throw std::invalid_argument("backward: dlogits shape mismatch");

    Parameters<Real> grads = zero_parameters<Real>(cfg);

    // Reshape upstream gradient to the final layer's output dims.
    const auto shapes = infer_shapes(cfg);
    const Dims out_dims = shapes.empty()
                              ? Dims{cfg.input.height, cfg.input.width, cfg.input.channels}
                              : shapes.back();
    Tensor<Real> dcur({dlogits.dim(0), out_dims.h, out_dims.w, out_dims.c});
    dcur.data = dlogits.data;

    for (size_t ri = cfg.layers.size(); ri-- > 0;) {
        const Tensor<Real>& in = cache.inputs[ri];
        if (const auto* conv = std::get_if<ConvSpec>(&cfg.layers[ri])) {
            Tensor<Real> din(in.shape);
            detail::conv_backward(*conv, params.layers[ri].w, in, dcur, grads.layers[ri].w,
                                  grads.layers[ri].b, din);
            dcur = std::move(din);
        } else if (std::get_if<ReluSpec>(&cfg.layers[ri])) {
            for (size_t j = 0; j < dcur.data.size(); ++j)
                if (in.data[j] <= Real(0)) dcur.data[j] = Real(0);
        } else if (std::get_if<MaxPoolSpec>(&cfg.layers[ri])) {
            Tensor<Real> din(in.shape);
            const auto& argmax = cache.pool_argmax[ri];
            for (size_t j = 0; j < dcur.data.size(); ++j)
                din.data[static_cast<size_t>(argmax[j])] += dcur.data[j];
            dcur = std::move(din);
        } else if (const auto* fc = std::get_if<FcSpec>(&cfg.layers[ri])) {
            const int n_batch = in.dim(0);
            const size_t in_dim = in.count() / static_cast<size_t>(n_batch);
            Tensor<Real> din(in.shape);
            for (int n = 0; n < n_batch; ++n) {
                const Real* src = in.data.data() + static_cast<size_t>(n) * in_dim;
                Real* dsrc = din.data.data() + static_cast<size_t>(n) * in_dim;
                for (int u = 0; u < fc->units; ++u) {
                    const Real g = dcur.at4(n, 0, 0, u);
                    if (g == Real(0)) continue;
                    grads.layers[ri].b[static_cast<size_t>(u)] += g;
                    Real* dwrow = grads.layers[ri].w.data() + static_cast<size_t>(u) * in_dim;
                    const Real* wrow = params.layers[ri].w.data() + static_cast<size_t>(u) * in_dim;
                    for (size_t j = 0; j < in_dim; ++j) {
                        dwrow[j] += src[j] * g;
                        dsrc[j] += wrow[j] * g;
                    }
                }
            }
            dcur = std::move(din);
        } else if (std::get_if<DropoutSpec>(&cfg.layers[ri])) {
            const auto& scale = cache.dropout_scale[ri];
            if (!scale.empty())
                for (size_t j = 0; j < dcur.data.size(); ++j) dcur.data[j] *= scale[j];
        }
    }
    return grads;
}

} // namespace lacnn::nn
