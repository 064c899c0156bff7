#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "lacnn/nn/network.hpp"
#include "lacnn/nn/tensor.hpp"

namespace lacnn::nn {

enum class LossKind : uint8_t { kSoftmaxNll, kSigmoidCrossEntropy };

/// lambda * ||W||_2^2 by default; l2_squared = false gives the unsquared
/// lambda * ||W||_2 over all weights taken as one vector. Biases excluded.
struct LossConfig {
    LossKind kind = LossKind::kSoftmaxNll;
    double lambda = 0.0;
    bool l2_squared = true;
};

template <typename Real>
double regularization_term(const Parameters<Real>& params, const LossConfig& cfg) {
    if (cfg.lambda == 0.0) return 0.0;
    double sumsq = 0.0;
    for (const auto& layer : params.layers)
        for (const Real v : layer.w) sumsq += static_cast<double>(v) * static_cast<double>(v);
    return cfg.l2_squared ? cfg.lambda * sumsq : cfg.lambda * std::sqrt(sumsq);
}

/// Adds d(regularization)/dW onto existing weight gradients.
template <typename Real>
void add_regularization_gradient(const Parameters<Real>& params, const LossConfig& cfg,
                                 Parameters<Real>& grads) {
    if (cfg.lambda == 0.0) return;
    if (cfg.l2_squared) {
        for (size_t i = 0; i < params.layers.size(); ++i)
            for (size_t j = 0; j < params.layers[i].w.size(); ++j)
                grads.layers[i].w[j] +=
                    static_cast<Real>(2.0 * cfg.lambda) * params.layers[i].w[j];
    } else {
        double sumsq = 0.0;
        for (const auto& layer : params.layers)
            for (const Real v : layer.w) sumsq += static_cast<double>(v) * static_cast<double>(v);
        const double norm = std::sqrt(sumsq);
        if (norm == 0.0) return; // subgradient 0 at the origin
        const double coeff = cfg.lambda / norm;
        for (size_t i = 0; i < params.layers.size(); ++i)
            for (size_t j = 0; j < params.layers[i].w.size(); ++j)
                grads.layers[i].w[j] += static_cast<Real>(coeff * params.layers[i].w[j]);
    }
}

/// Softmax probabilities of one logit vector, computed max-subtracted.
template <typename Real>
std::vector<Real> softmax_probs(std::span<const Real> logits) {
    if (logits.empty()) throw std::invalid_argument("softmax_probs: empty logits");
    Real max_logit = logits[0];
    for (const Real v : logits)
        if (v > max_logit) max_logit = v;
    std::vector<Real> probs(logits.size());
    Real denom = Real(0);
    for (size_t m = 0; m < logits.size(); ++m) {
        probs[m] = std::exp(logits[m] - max_logit);
        denom += probs[m];
    }
    for (auto& p : probs) p /= denom;
    return probs;
}

template <typename Real>
struct LossGrad {
    double loss = 0.0;              // data term averaged over the batch + regularizer
    Tensor<Real> dlogits;           // same shape as the logits
};

/// Negative log-likelihood over softmax probabilities, averaged over the
/// batch, plus the regularization term. Gradient per sample is
/// (softmax - one_hot) / N; the regularizer's weight gradient is applied
/// separately via add_regularization_gradient.
template <typename Real>
LossGrad<Real> softmax_nll_loss(const Tensor<Real>& logits, const std::vector<int>& labels,
                                const Parameters<Real>& params, const LossConfig& cfg) {
    const int n_batch = logits.dim(0);
    const int m_classes = logits.dim(1);
    if (static_cast<int>(labels.size()) != n_batch)
        throw std::invalid_argument("softmax_nll_loss: label count != batch size");

    LossGrad<Real> result;
    result.dlogits = Tensor<Real>(logits.shape);
    double total = 0.0;
    for (int n = 0; n < n_batch; ++n) {
        if (labels[n] < 0 || labels[n] >= m_classes)
            throw std::invalid_argument("softmax_nll_loss: label index out of range");
        std::span<const Real> row(logits.data.data() + static_cast<size_t>(n) * m_classes,
                                  static_cast<size_t>(m_classes));
        Real max_logit = row[0];
        for (const Real v : row)
            if (v > max_logit) max_logit = v;
        double denom = 0.0;
        for (const Real v : row) denom += std::exp(static_cast<double>(v - max_logit));
        const double log_denom = std::log(denom);
        total += -(static_cast<double>(row[labels[n]] - max_logit) - log_denom);
        for (int m = 0; m < m_classes; ++m) {
            const double p = std::exp(static_cast<double>(row[m] - max_logit)) / denom;
            const double onehot = m == labels[n] ? 1.0 : 0.0;
            result.dlogits.at2(n, m) = static_cast<Real>((p - onehot) / n_batch);
        }
    }
    result.loss = total / n_batch + regularization_term(params, cfg);
    return result;
}

/// Per-output binary cross-entropy on sigmoid probabilities against target
/// probabilities in [0,1], averaged over N*M, plus the regularization term.
/// Computed in the standard overflow-free form.
template <typename Real>
LossGrad<Real> sigmoid_ce_loss(const Tensor<Real>& logits, const Tensor<Real>& target_probs,
                               const Parameters<Real>& params, const LossConfig& cfg) {
    if (logits.shape != target_probs.shape)
        throw std::invalid_argument("sigmoid_ce_loss: target shape mismatch");
    const int n_batch = logits.dim(0);
    const int m_classes = logits.dim(1);

    LossGrad<Real> result;
    result.dlogits = Tensor<Real>(logits.shape);
    const double denom = static_cast<double>(n_batch) * m_classes;
    double total = 0.0;
    for (size_t i = 0; i < logits.data.size(); ++i) {
        const double z = static_cast<double>(logits.data[i]);
        const double p = static_cast<double>(target_probs.data[i]);
        if (p < 0.0 || p > 1.0)
            throw std::invalid_argument("sigmoid_ce_loss: target outside [0,1]");
        total += std::max(z, 0.0) - z * p + std::log1p(std::exp(-std::abs(z)));
        const double sig = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z))
                                    : std::exp(z) / (1.0 + std::exp(z));
        result.dlogits.data[i] = static_cast<Real>((sig - p) / denom);
    }
    result.loss = total / denom + regularization_term(params, cfg);
    return result;
}

} // namespace lacnn::nn
