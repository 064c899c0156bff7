#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lacnn/errors.hpp"
#include "lacnn/fsio.hpp"
#include "lacnn/nn/config.hpp"
#include "lacnn/nn/network.hpp"

namespace lacnn::nn {

/// Serialized model: topology, float32 parameters, and training metadata.
/// Channel means are the training-set preprocessing statistics, stored so
/// evaluation applies the identical input transform.
struct ModelCheckpoint {
    uint32_t format_version = 1;
    NetworkConfig config;
    Parameters<float> params;
    std::string trait;
    uint64_t epochs_run = 0;
    double final_loss = 0.0;
    std::vector<double> channel_means;
};

namespace detail {

inline constexpr char kMagic[4] = {'L', 'A', 'C', 'N'};

enum class LayerTag : uint8_t { kConv = 0, kRelu = 1, kMaxPool = 2, kFc = 3, kDropout = 4 };

inline void put_config(BinaryWriter& w, const NetworkConfig& cfg) {
    w.put_u32(static_cast<uint32_t>(cfg.input.height));
    w.put_u32(static_cast<uint32_t>(cfg.input.width));
    w.put_u32(static_cast<uint32_t>(cfg.input.channels));
    w.put_u32(static_cast<uint32_t>(cfg.num_classes));
    w.put_u64(cfg.seed);
    w.put_u32(static_cast<uint32_t>(cfg.layers.size()));
    for (const auto& layer : cfg.layers) {
        if (const auto* conv = std::get_if<ConvSpec>(&layer)) {
            w.put_u8(static_cast<uint8_t>(LayerTag::kConv));
            w.put_u32(static_cast<uint32_t>(conv->filters));
            w.put_u32(static_cast<uint32_t>(conv->kernel));
            w.put_u32(static_cast<uint32_t>(conv->stride));
            w.put_u32(static_cast<uint32_t>(conv->padding));
        } else if (std::get_if<ReluSpec>(&layer)) {
            w.put_u8(static_cast<uint8_t>(LayerTag::kRelu));
        } else if (const auto* pool = std::get_if<MaxPoolSpec>(&layer)) {
            w.put_u8(static_cast<uint8_t>(LayerTag::kMaxPool));
            w.put_u32(static_cast<uint32_t>(pool->window));
            w.put_u32(static_cast<uint32_t>(pool->stride));
        } else if (const auto* fc = std::get_if<FcSpec>(&layer)) {
            w.put_u8(static_cast<uint8_t>(LayerTag::kFc));
            w.put_u32(static_cast<uint32_t>(fc->units));
        } else if (const auto* drop = std::get_if<DropoutSpec>(&layer)) {
            w.put_u8(static_cast<uint8_t>(LayerTag::kDropout));
            w.put_f64(drop->rate);
        }
    }
}

inline NetworkConfig get_config(BinaryReader& r) {
    NetworkConfig cfg;
    cfg.input.height = static_cast<int>(r.get_u32());
    cfg.input.width = static_cast<int>(r.get_u32());
    cfg.input.channels = static_cast<int>(r.get_u32());
    cfg.num_classes = static_cast<int>(r.get_u32());
    cfg.seed = r.get_u64();
    const uint32_t n_layers = r.get_u32();
    for (uint32_t i = 0; i < n_layers; ++i) {
        switch (static_cast<LayerTag>(r.get_u8())) {
            case LayerTag::kConv: {
                ConvSpec conv;
                conv.filters = static_cast<int>(r.get_u32());
                conv.kernel = static_cast<int>(r.get_u32());
                conv.stride = static_cast<int>(r.get_u32());
                conv.padding = static_cast<int>(r.get_u32());
                cfg.layers.emplace_back(conv);
                break;
            }
            case LayerTag::kRelu:
                cfg.layers.emplace_back(ReluSpec{});
                break;
            case LayerTag::kMaxPool: {
                MaxPoolSpec pool;
                pool.window = static_cast<int>(r.get_u32());
                pool.stride = static_cast<int>(r.get_u32());
                cfg.layers.emplace_back(pool);
                break;
            }
            case LayerTag::kFc:
                cfg.layers.emplace_back(FcSpec{static_cast<int>(r.get_u32())});
                break;
            case LayerTag::kDropout:
                cfg.layers.emplace_back(DropoutSpec{r.get_f64()});
                break;
            default:
                throw DataError("checkpoint: unknown layer tag");
        }
    }
    return cfg;
}

} // namespace detail

/// Layout, little-endian throughout: "LACN" magic, u32 format version,
/// NetworkConfig, per-layer f32 parameter arrays in declaration order
/// (weights then biases; counts derived from the config), then the metadata
/// block: length-prefixed trait name, u64 epochs, f64 final loss,
/// count-prefixed f64 channel means.
inline std::string serialize_checkpoint(const ModelCheckpoint& ckpt) {
    BinaryWriter w;
    w.put_bytes(detail::kMagic, 4);
    w.put_u32(ckpt.format_version);
    detail::put_config(w, ckpt.config);
    for (const auto& layer : ckpt.params.layers) {
        for (const float v : layer.w) w.put_f32(v);
        for (const float v : layer.b) w.put_f32(v);
    }
    w.put_string(ckpt.trait);
    w.put_u64(ckpt.epochs_run);
    w.put_f64(ckpt.final_loss);
    w.put_u32(static_cast<uint32_t>(ckpt.channel_means.size()));
    for (const double m : ckpt.channel_means) w.put_f64(m);
    return w.bytes();
}

inline ModelCheckpoint parse_checkpoint(const std::string& bytes) {
    BinaryReader r(bytes);
    char magic[4];
    r.get_bytes(magic, 4);
    if (std::memcmp(magic, detail::kMagic, 4) != 0)
        throw DataError("checkpoint: bad magic bytes");
    ModelCheckpoint ckpt;
    ckpt.format_version = r.get_u32();
    if (ckpt.format_version != 1)
        throw DataError("checkpoint: unsupported format version " +
                        std::to_string(ckpt.format_version));
    ckpt.config = detail::get_config(r);
    ckpt.params = zero_parameters<float>(ckpt.config);
    for (auto& layer : ckpt.params.layers) {
        for (auto& v : layer.w) v = r.get_f32();
        for (auto& v : layer.b) v = r.get_f32();
    }
    ckpt.trait = r.get_string();
    ckpt.epochs_run = r.get_u64();
    ckpt.final_loss = r.get_f64();
    const uint32_t n_means = r.get_u32();
    for (uint32_t i = 0; i < n_means; ++i) ckpt.channel_means.push_back(r.get_f64());
    if (!r.at_end()) throw DataError("checkpoint: trailing bytes");
    return ckpt;
}

inline void save_checkpoint(const std::string& path, const ModelCheckpoint& ckpt) {
    write_file_atomic(path, serialize_checkpoint(ckpt));
}

inline ModelCheckpoint load_checkpoint(const std::string& path) {
    return parse_checkpoint(read_file_bytes(path));
}

} // namespace lacnn::nn
