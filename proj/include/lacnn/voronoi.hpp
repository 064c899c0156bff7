#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "lacnn/errors.hpp"
#include "lacnn/image.hpp"
#include "lacnn/landmarks.hpp"

namespace lacnn {

/// Per-pixel index of the nearest landmark: a discrete Voronoi map over the
/// pixel lattice. Raw indices are kept for inspection; attach_channel
/// produces the normalized input-channel encoding.
struct LandmarkChannel {
    int height = 0;
    int width = 0;
    int k = 0;
    std::vector<int32_t> indices; // h*w, row-major

    int32_t at(int y, int x) const { return indices[static_cast<size_t>(y) * width + x]; }
};

/// Euclidean distance between a pixel center and a landmark coordinate.
inline double pixel_landmark_distance(Point pixel, Point landmark) {
    const double dx = landmark.x - pixel.x;
    const double dy = landmark.y - pixel.y;
    return std::sqrt(dx * dx + dy * dy);
}

/// Assigns every pixel the index of its nearest landmark (squared-distance
/// argmin; ties take the smallest index). Coordinates are clamped into the
/// image box first.
inline LandmarkChannel augment_fll(const LandmarkSet& landmarks, int height, int width) {
    if (landmarks.points.empty()) throw std::invalid_argument("augment_fll: empty LandmarkSet");
    if (height <= 0 || width <= 0) throw std::invalid_argument("augment_fll: empty image");

    const LandmarkSet clamped = clamp_landmarks(landmarks, height, width);
    const int k = clamped.k();

    LandmarkChannel ch;
    ch.height = height;
    ch.width = width;
    ch.k = k;
    ch.indices.resize(static_cast<size_t>(height) * width);

    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            int best = 0;
            double best_d2 = std::numeric_limits<double>::infinity();
            for (int j = 0; j < k; ++j) {
                const double dx = clamped.points[j].x - x;
                const double dy = clamped.points[j].y - y;
                const double d2 = dx * dx + dy * dy;
                if (d2 < best_d2) {
                    best_d2 = d2;
                    best = j;
                }
            }
            ch.indices[static_cast<size_t>(y) * width + x] = best;
        }
    }
    return ch;
}

/// Appends the landmark channel as channel 3, encoded as index / (k-1) so its
/// magnitude is comparable to the normalized RGB channels (0 when k = 1).
inline ImageTensor attach_channel(const ImageTensor& img, const LandmarkChannel& ch) {
    if (img.semantics() != ChannelSemantics::kRgb)
        throw std::invalid_argument("attach_channel: image must be RGB");
    if (img.height() != ch.height || img.width() != ch.width)
        throw std::invalid_argument("attach_channel: dimension mismatch");

    ImageTensor out(img.height(), img.width(), 4, ChannelSemantics::kRgbaLandmark);
    const double denom = ch.k > 1 ? static_cast<double>(ch.k - 1) : 1.0;
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            for (int c = 0; c < 3; ++c) out.at(y, x, c) = img.at(y, x, c);
            out.at(y, x, 3) = static_cast<float>(ch.at(y, x) / denom);
        }
    return out;
}

} // namespace lacnn
