#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "lacnn/nn/loss.hpp"
#include "lacnn/nn/network.hpp"
#include "lacnn/nn/train.hpp"

namespace lacnn::nn {

namespace detail {

inline double loss_only(const NetworkConfig& cfg, const Parameters<double>& params,
                        const Tensor<double>& xs, const std::vector<int>& labels,
                        const LossConfig& loss_cfg) {
    const Tensor<double> logits = forward(cfg, params, xs, RunMode::kEval);
    if (loss_cfg.kind == LossKind::kSoftmaxNll)
        return softmax_nll_loss(logits, labels, params, loss_cfg).loss;
    const auto targets =
        one_hot_targets<double>(labels, 0, xs.dim(0), cfg.num_classes);
    return sigmoid_ce_loss(logits, targets, params, loss_cfg).loss;
}

} // namespace detail

/// Verifies analytic gradients of every parameter against central finite
/// differences (f(w+eps) - f(w-eps)) / 2eps in double precision, dropout
/// disabled (eval-mode pass). Returns the worst relative error, with the
/// denominator floored at 1e-5 so near-zero gradients are compared absolutely.
inline double gradient_check(const NetworkConfig& cfg, Parameters<double> params,
                             const Tensor<double>& xs, const std::vector<int>& labels,
                             const LossConfig& loss_cfg, double epsilon = 1e-5) {
    ForwardCache<double> cache;
    const Tensor<double> logits = forward(cfg, params, xs, RunMode::kEval, nullptr, &cache);
    LossGrad<double> lg;
    if (loss_cfg.kind == LossKind::kSoftmaxNll) {
        lg = softmax_nll_loss(logits, labels, params, loss_cfg);
    } else {
        const auto targets = detail::one_hot_targets<double>(labels, 0, xs.dim(0), cfg.num_classes);
        lg = sigmoid_ce_loss(logits, targets, params, loss_cfg);
    }
    Parameters<double> analytic = backward(cfg, params, cache, lg.dlogits);
    add_regularization_gradient(params, loss_cfg, analytic);

    double max_rel = 0.0;
    auto probe = [&](double& slot, double analytic_grad) {
        const double saved = slot;
        slot = saved + epsilon;
        const double plus = detail::loss_only(cfg, params, xs, labels, loss_cfg);
        slot = saved - epsilon;
        const double minus = detail::loss_only(cfg, params, xs, labels, loss_cfg);
        slot = saved;
        const double numeric = (plus - minus) / (2.0 * epsilon);
        const double denom = std::max({std::abs(analytic_grad), std::abs(numeric), 1e-5});
        max_rel = std::max(max_rel, std::abs(analytic_grad - numeric) / denom);
    };

    for (size_t i = 0; i < params.layers.size(); ++i) {
        for (size_t j = 0; j < params.layers[i].w.size(); ++j)
            probe(params.layers[i].w[j], analytic.layers[i].w[j]);
        for (size_t j = 0; j < params.layers[i].b.size(); ++j)
            probe(params.layers[i].b[j], analytic.layers[i].b[j]);
    }
    return max_rel;
}

} // namespace lacnn::nn
