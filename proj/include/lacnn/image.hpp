#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "lacnn/errors.hpp"

namespace lacnn {

enum class ChannelSemantics : uint8_t {
    kRgb,          // 3 channels, values in [0,1]
    kRgbaLandmark, // RGB plus a nearest-landmark channel, all in [0,1]
};

/// Dense H x W x C float image, row-major by (row, column, channel).
/// Treated as immutable once filled; every operation returns a new tensor.
class ImageTensor {
public:
    ImageTensor() = default;

    ImageTensor(int height, int width, int channels, ChannelSemantics semantics)
        : height_(height), width_(width), channels_(channels), semantics_(semantics),
          data_(static_cast<size_t>(height) * width * channels, 0.0f) {
        if (height <= 0 || width <= 0) throw std::invalid_argument("ImageTensor: empty dimensions");
        if (channels != 3 && channels != 4)
            throw std::invalid_argument("ImageTensor: channels must be 3 or 4");
        if ((semantics == ChannelSemantics::kRgb) != (channels == 3))
            throw std::invalid_argument("ImageTensor: channel count does not match semantics");
    }

    static ImageTensor rgb(int height, int width) {
        return ImageTensor(height, width, 3, ChannelSemantics::kRgb);
    }

    int height() const { return height_; }
    int width() const { return width_; }
    int channels() const { return channels_; }
    ChannelSemantics semantics() const { return semantics_; }

    float at(int y, int x, int c) const { return data_[index(y, x, c)]; }
    float& at(int y, int x, int c) { return data_[index(y, x, c)]; }

    const std::vector<float>& data() const { return data_; }
    std::vector<float>& data() { return data_; }

    bool same_shape(const ImageTensor& other) const {
        return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
    }

private:
    size_t index(int y, int x, int c) const {
        assert(y >= 0 && y < height_ && x >= 0 && x < width_ && c >= 0 && c < channels_);
        return (static_cast<size_t>(y) * width_ + x) * channels_ + c;
    }

    int height_ = 0;
    int width_ = 0;
    int channels_ = 0;
    ChannelSemantics semantics_ = ChannelSemantics::kRgb;
    std::vector<float> data_;
};

/// Bilinear resample to out_height x out_width. Half-pixel-center convention,
/// source samples clamped at the borders; a same-size call is a plain copy.
inline ImageTensor resize_bilinear(const ImageTensor& img, int out_height, int out_width) {
    if (out_height <= 0 || out_width <= 0)
        throw std::invalid_argument("resize_bilinear: empty target");
    if (out_height == img.height() && out_width == img.width()) return img;

    ImageTensor out(out_height, out_width, img.channels(), img.semantics());
    const double scale_y = static_cast<double>(img.height()) / out_height;
    const double scale_x = static_cast<double>(img.width()) / out_width;
    for (int y = 0; y < out_height; ++y) {
        const double sy = (y + 0.5) * scale_y - 0.5;
        const int y0 = std::clamp(static_cast<int>(std::floor(sy)), 0, img.height() - 1);
        const int y1 = std::min(y0 + 1, img.height() - 1);
        const double wy = std::clamp(sy - std::floor(sy), 0.0, 1.0);
        const double fy = (sy < 0.0) ? 0.0 : (sy > img.height() - 1 ? 1.0 : wy);
        for (int x = 0; x < out_width; ++x) {
            const double sx = (x + 0.5) * scale_x - 0.5;
            const int x0 = std::clamp(static_cast<int>(std::floor(sx)), 0, img.width() - 1);
            const int x1 = std::min(x0 + 1, img.width() - 1);
            const double wx = std::clamp(sx - std::floor(sx), 0.0, 1.0);
            const double fx = (sx < 0.0) ? 0.0 : (sx > img.width() - 1 ? 1.0 : wx);
            for (int c = 0; c < img.channels(); ++c) {
                const double top = img.at(y0, x0, c) * (1.0 - fx) + img.at(y0, x1, c) * fx;
                const double bot = img.at(y1, x0, c) * (1.0 - fx) + img.at(y1, x1, c) * fx;
                out.at(y, x, c) = static_cast<float>(top * (1.0 - fy) + bot * fy);
            }
        }
    }
    return out;
}

} // namespace lacnn
