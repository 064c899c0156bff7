#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lacnn/image.hpp"

namespace lacnn {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

enum class Interpolation : uint8_t { kBilinear };

struct RotationSpec {
    std::vector<double> angles_deg{-40.0, -20.0, 20.0, 40.0};
    Interpolation interpolation = Interpolation::kBilinear;
    float fill_value = 0.0f;
};

/// sin/cos of an angle in degrees. Exact multiples of 90 get exact values so
/// that right-angle rotations map the pixel lattice onto itself.
inline std::pair<double, double> rotation_sincos(double angle_deg) {
    const double quarter = angle_deg / 90.0;
    if (quarter == std::round(quarter)) {
        static constexpr double kSin[4] = {0.0, 1.0, 0.0, -1.0};
        static constexpr double kCos[4] = {1.0, 0.0, -1.0, 0.0};
        int q = static_cast<int>(std::round(quarter)) % 4;
        if (q < 0) q += 4;
        return {kSin[q], kCos[q]};
    }
    const double rad = angle_deg * 3.14159265358979323846 / 180.0;
    return {std::sin(rad), std::cos(rad)};
}

/// Rotates p by angle_deg about center (no clamping). Positive angles follow
/// the mathematical convention x' = c + R(theta) (p - c) in pixel coordinates.
inline Point rotate_point(Point p, double angle_deg, Point center) {
    const auto [s, c] = rotation_sincos(angle_deg);
    const double dx = p.x - center.x;
    const double dy = p.y - center.y;
    return {center.x + dx * c - dy * s, center.y + dx * s + dy * c};
}

/// Center of the pixel grid: pixel centers span [0, w-1] x [0, h-1].
inline Point image_center(const ImageTensor& img) {
    return {(img.width() - 1) / 2.0, (img.height() - 1) / 2.0};
}

/// Rotates an RGB image about its center by inverse mapping with bilinear
/// interpolation; samples falling outside the source read spec.fill_value.
/// The landmark channel is categorical and must never be interpolated, so
/// 4-channel input is rejected (rebuild the channel from rotated landmarks).
inline ImageTensor rotate_image(const ImageTensor& img, double angle_deg,
                                const RotationSpec& spec = RotationSpec{}) {
    if (img.semantics() != ChannelSemantics::kRgb)
        throw std::invalid_argument("rotate_image: input must be RGB");
    if (!std::isfinite(angle_deg)) throw std::invalid_argument("rotate_image: non-finite angle");
    if (angle_deg == 0.0) return img;

    const Point center = image_center(img);
    const auto [s, c] = rotation_sincos(-angle_deg); // dest -> source mapping
    ImageTensor out(img.height(), img.width(), img.channels(), img.semantics());
    const float fill = spec.fill_value;

    auto sample = [&](int y, int x, int ch) -> float {
        if (y < 0 || y >= img.height() || x < 0 || x >= img.width()) return fill;
        return img.at(y, x, ch);
    };

    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const double dx = x - center.x;
            const double dy = y - center.y;
            const double sx = center.x + dx * c - dy * s;
            const double sy = center.y + dx * s + dy * c;
            const int x0 = static_cast<int>(std::floor(sx));
            const int y0 = static_cast<int>(std::floor(sy));
            const double wx = sx - x0;
            const double wy = sy - y0;
            for (int ch = 0; ch < img.channels(); ++ch) {
                const double top = sample(y0, x0, ch) * (1.0 - wx) + sample(y0, x0 + 1, ch) * wx;
                const double bot = sample(y0 + 1, x0, ch) * (1.0 - wx) + sample(y0 + 1, x0 + 1, ch) * wx;
                out.at(y, x, ch) = static_cast<float>(top * (1.0 - wy) + bot * wy);
            }
        }
    }
    return out;
}

} // namespace lacnn
