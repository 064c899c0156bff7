#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace lacnn::nn {

struct ConvSpec {
    int filters = 0;
    int kernel = 0;
    int stride = 1;
    int padding = 0;
};

struct ReluSpec {};

struct MaxPoolSpec {
    int window = 0;
    int stride = 0;
};

struct FcSpec {
    int units = 0;
};

struct DropoutSpec {
    double rate = 0.5;
};

using LayerSpec = std::variant<ConvSpec, ReluSpec, MaxPoolSpec, FcSpec, DropoutSpec>;

struct InputShape {
    int height = 0;
    int width = 0;
    int channels = 0;
};

struct NetworkConfig {
    InputShape input;
    std::vector<LayerSpec> layers;
    int num_classes = 0;
    uint64_t seed = 0;
};

/// Spatial shape between layers; after an fc layer, height = width = 1 and
/// channels holds the unit count.
struct Dims {
    int h = 0;
    int w = 0;
    int c = 0;

    int flat() const { return h * w * c; }
};

/// Walks the layer chain and returns the output shape of each layer.
/// Throws std::invalid_argument when the chain is inconsistent or the final
/// layer does not produce exactly num_classes values.
inline std::vector<Dims> infer_shapes(const NetworkConfig& cfg) {
    if (cfg.input.height <= 0 || cfg.input.width <= 0 || cfg.input.channels <= 0)
        throw std::invalid_argument("NetworkConfig: empty input shape");
    if (cfg.num_classes <= 0) throw std::invalid_argument("NetworkConfig: num_classes must be > 0");

    std::vector<Dims> shapes;
    Dims cur{cfg.input.height, cfg.input.width, cfg.input.channels};
    bool flattened = false;
    for (size_t i = 0; i < cfg.layers.size(); ++i) {
        const auto where = "layer " + std::to_string(i);
        if (const auto* conv = std::get_if<ConvSpec>(&cfg.layers[i])) {
            if (flattened) throw std::invalid_argument(where + ": conv after fc");
            if (conv->filters <= 0 || conv->kernel <= 0 || conv->stride <= 0 || conv->padding < 0)
                throw std::invalid_argument(where + ": bad conv spec");
            const int oh = (cur.h + 2 * conv->padding - conv->kernel) / conv->stride + 1;
            const int ow = (cur.w + 2 * conv->padding - conv->kernel) / conv->stride + 1;
            if (oh <= 0 || ow <= 0 || cur.h + 2 * conv->padding < conv->kernel ||
                cur.w + 2 * conv->padding < conv->kernel)
                throw std::invalid_argument(where + ": conv kernel larger than padded input");
            cur = {oh, ow, conv->filters};
        } else if (std::get_if<ReluSpec>(&cfg.layers[i])) {
            // shape preserved
        } else if (const auto* pool = std::get_if<MaxPoolSpec>(&cfg.layers[i])) {
            if (flattened) throw std::invalid_argument(where + ": maxpool after fc");
            if (pool->window <= 0 || pool->stride <= 0)
                throw std::invalid_argument(where + ": bad maxpool spec");
            if (cur.h < pool->window || cur.w < pool->window)
                throw std::invalid_argument(where + ": pool window larger than input");
            cur = {(cur.h - pool->window) / pool->stride + 1,
                   (cur.w - pool->window) / pool->stride + 1, cur.c};
        } else if (const auto* fc = std::get_if<FcSpec>(&cfg.layers[i])) {
            if (fc->units <= 0) throw std::invalid_argument(where + ": bad fc spec");
            cur = {1, 1, fc->units};
            flattened = true;
        } else if (const auto* drop = std::get_if<DropoutSpec>(&cfg.layers[i])) {
            if (drop->rate < 0.0 || drop->rate >= 1.0)
                throw std::invalid_argument(where + ": dropout rate must be in [0,1)");
        }
        shapes.push_back(cur);
    }
    if (cur.flat() != cfg.num_classes)
        throw std::invalid_argument("NetworkConfig: final layer outputs " +
                                    std::to_string(cur.flat()) + " values, expected " +
                                    std::to_string(cfg.num_classes));
    return shapes;
}

/// The default scaled-down topology: conv(8,5x5,s2,p2) - relu - maxpool(3,s2)
/// - conv(16,3x3,s1,p1) - relu - maxpool(2,s2) - fc(64) - dropout(0.5) - fc(M).
inline NetworkConfig mini_net_config(int input_size, int channels, int num_classes,
                                     uint64_t seed) {
    NetworkConfig cfg;
    cfg.input = {input_size, input_size, channels};
    cfg.layers = {ConvSpec{8, 5, 2, 2},  ReluSpec{}, MaxPoolSpec{3, 2},
                  ConvSpec{16, 3, 1, 1}, ReluSpec{}, MaxPoolSpec{2, 2},
                  FcSpec{64},            DropoutSpec{0.5}, FcSpec{num_classes}};
    cfg.num_classes = num_classes;
    cfg.seed = seed;
    infer_shapes(cfg);
    return cfg;
}

} // namespace lacnn::nn
