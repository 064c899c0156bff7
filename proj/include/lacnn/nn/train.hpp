#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lacnn/errors.hpp"
#include "lacnn/nn/loss.hpp"
#include "lacnn/nn/network.hpp"
#include "lacnn/rng.hpp"

namespace lacnn::nn {

struct TrainConfig {
    double learning_rate = 0.01;
    double momentum = 0.9;
    int batch_size = 32;
    int epochs = 10;
    uint64_t seed = 0;
};

/// Momentum SGD update: v <- momentum*v - lr*g; w <- w + v.
template <typename Real>
void sgd_step(Parameters<Real>& params, const Parameters<Real>& grads,
              Parameters<Real>& velocity, const TrainConfig& cfg) {
    if (params.layers.size() != grads.layers.size() ||
        params.layers.size() != velocity.layers.size())
        throw std::invalid_argument("sgd_step: parameter shape mismatch");
    const Real mu = static_cast<Real>(cfg.momentum);
    const Real lr = static_cast<Real>(cfg.learning_rate);
    for (size_t i = 0; i < params.layers.size(); ++i) {
        auto& p = params.layers[i];
        const auto& g = grads.layers[i];
        auto& v = velocity.layers[i];
        if (p.w.size() != g.w.size() || p.b.size() != g.b.size())
            throw std::invalid_argument("sgd_step: gradient shape mismatch");
        for (size_t j = 0; j < p.w.size(); ++j) {
            v.w[j] = mu * v.w[j] - lr * g.w[j];
            p.w[j] += v.w[j];
        }
        for (size_t j = 0; j < p.b.size(); ++j) {
            v.b[j] = mu * v.b[j] - lr * g.b[j];
            p.b[j] += v.b[j];
        }
    }
}

template <typename Real>
struct TrainResult {
    Parameters<Real> params;
    std::vector<double> epoch_losses; // mean per-sample loss incl. regularizer
    int epochs_run = 0;
    double final_loss = 0.0;
};

namespace detail {

template <typename Real>
void check_params_finite(const Parameters<Real>& params, int epoch) {
    for (const auto& layer : params.layers) {
        for (const Real v : layer.w)
            if (!std::isfinite(static_cast<double>(v)))
                throw NumericError("non-finite weight after epoch " + std::to_string(epoch));
        for (const Real v : layer.b)
            if (!std::isfinite(static_cast<double>(v)))
                throw NumericError("non-finite bias after epoch " + std::to_string(epoch));
    }
}

// One-hot target probabilities for the sigmoid cross-entropy path.
template <typename Real>
Tensor<Real> one_hot_targets(const std::vector<int>& labels, int first, int count, int m_classes) {
    Tensor<Real> t({count, m_classes});
    for (int n = 0; n < count; ++n) t.at2(n, labels[static_cast<size_t>(first + n)]) = Real(1);
    return t;
}

} // namespace detail

/// Seeded mini-batch SGD. xs is the full NHWC dataset, labels[i] the class of
/// sample i. Shuffling, init and dropout are all deterministic functions of
/// cfg.seed / tcfg.seed. Aborts with NumericError on a non-finite loss.
template <typename Real>
TrainResult<Real> train(const NetworkConfig& cfg, const Tensor<Real>& xs,
                        const std::vector<int>& labels, const LossConfig& loss_cfg,
                        const TrainConfig& tcfg, std::ostream* log = nullptr) {
    const int n_total = xs.dim(0);
    if (n_total == 0 || labels.empty()) throw std::invalid_argument("train: empty data");
    if (static_cast<int>(labels.size()) != n_total)
        throw std::invalid_argument("train: label count != sample count");
    if (tcfg.learning_rate < 0.0 || tcfg.batch_size <= 0 || tcfg.epochs <= 0 ||
        tcfg.momentum < 0.0 || tcfg.momentum >= 1.0)
        throw std::invalid_argument("train: bad TrainConfig");

    bool single_class = true;
    for (const int y : labels)
        if (y != labels[0]) {
            single_class = false;
            break;
        }
    if (single_class && log) *log << "warning: training data contains a single class\n";

    TrainResult<Real> result;
    result.params = init_parameters<Real>(cfg);
    Parameters<Real> velocity = zero_parameters<Real>(cfg);

    Rng shuffle_rng(Rng::derive_seed(tcfg.seed, 0x5AFF));
    Rng dropout_rng(Rng::derive_seed(tcfg.seed, 0xD0D0));

    const auto shapes = infer_shapes(cfg);
    const int h = cfg.input.height, w = cfg.input.width, c = cfg.input.channels;
    const size_t sample_size = static_cast<size_t>(h) * w * c;

    std::vector<int> order(static_cast<size_t>(n_total));
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < tcfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_loss_sum = 0.0;
        for (int start = 0; start < n_total; start += tcfg.batch_size) {
            const int count = std::min(tcfg.batch_size, n_total - start);
            Tensor<Real> batch({count, h, w, c});
            std::vector<int> batch_labels(static_cast<size_t>(count));
            for (int n = 0; n < count; ++n) {
                const int src = order[static_cast<size_t>(start + n)];
                std::copy_n(xs.data.begin() + static_cast<size_t>(src) * sample_size, sample_size,
                            batch.data.begin() + static_cast<size_t>(n) * sample_size);
                batch_labels[static_cast<size_t>(n)] = labels[static_cast<size_t>(src)];
            }

            ForwardCache<Real> cache;
            const Tensor<Real> logits =
                forward(cfg, result.params, batch, RunMode::kTrain, &dropout_rng, &cache);

            LossGrad<Real> lg;
            if (loss_cfg.kind == LossKind::kSoftmaxNll) {
                lg = softmax_nll_loss(logits, batch_labels, result.params, loss_cfg);
            } else {
                const auto targets =
                    detail::one_hot_targets<Real>(batch_labels, 0, count, cfg.num_classes);
                lg = sigmoid_ce_loss(logits, targets, result.params, loss_cfg);
            }
            if (!std::isfinite(lg.loss))
                throw NumericError("non-finite training loss at epoch " + std::to_string(epoch) +
                                   ", batch offset " + std::to_string(start));

            Parameters<Real> grads = backward(cfg, result.params, cache, lg.dlogits);
            add_regularization_gradient(result.params, loss_cfg, grads);
            sgd_step(result.params, grads, velocity, tcfg);

            epoch_loss_sum += lg.loss * count;
        }
        detail::check_params_finite(result.params, epoch);
        const double epoch_loss = epoch_loss_sum / n_total;
        result.epoch_losses.push_back(epoch_loss);
        if (log) *log << "epoch " << epoch << " loss " << epoch_loss << "\n";
    }

    result.epochs_run = tcfg.epochs;
    result.final_loss = result.epoch_losses.back();
    return result;
}

} // namespace lacnn::nn
