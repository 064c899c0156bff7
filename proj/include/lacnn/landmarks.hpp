#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lacnn/errors.hpp"
#include "lacnn/rotate.hpp"

namespace lacnn {

/// Ordered facial landmark coordinates for one image. The index of a point is
/// its landmark identity (same semantic point across all images).
struct LandmarkSet {
    std::vector<Point> points;
    std::string source_image_id;

    int k() const { return static_cast<int>(points.size()); }
};

/// Sidecar format: one line per landmark, `index x y`, indices forming a
/// permutation of 0..k-1, coordinates in original-image pixel space.
inline LandmarkSet read_landmark_file(const std::string& path, const std::string& image_id = "") {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open landmark file: " + path);

    std::vector<std::pair<int, Point>> entries;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        std::istringstream ss(line);
        int index;
        double x, y;
        if (!(ss >> index >> x >> y))
            throw DataError(path + ":" + std::to_string(lineno) + ": expected `index x y`");
        if (!std::isfinite(x) || !std::isfinite(y))
            throw DataError(path + ":" + std::to_string(lineno) + ": non-finite coordinate");
        entries.emplace_back(index, Point{x, y});
    }
    if (entries.empty()) throw DataError(path + ": no landmarks");

    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    LandmarkSet set;
    set.source_image_id = image_id;
    for (size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].first != static_cast<int>(i))
            throw DataError(path + ": landmark indices must be 0..k-1 without gaps");
        set.points.push_back(entries[i].second);
    }
    return set;
}

inline void write_landmark_file(const std::string& path, const LandmarkSet& set) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open for writing: " + path);
    for (size_t i = 0; i < set.points.size(); ++i)
        out << i << " " << set.points[i].x << " " << set.points[i].y << "\n";
}

/// Scales coordinates when the image is resized (per-axis factors).
inline LandmarkSet rescale_landmarks(const LandmarkSet& set, double scale_x, double scale_y) {
    LandmarkSet out = set;
    for (auto& p : out.points) {
        p.x *= scale_x;
        p.y *= scale_y;
    }
    return out;
}

/// Clamps every point into the pixel-center box [0, w-1] x [0, h-1], keeping
/// detector artifacts and post-rotation escapes inside the image.
inline LandmarkSet clamp_landmarks(const LandmarkSet& set, int height, int width) {
    LandmarkSet out = set;
    for (auto& p : out.points) {
        p.x = std::clamp(p.x, 0.0, static_cast<double>(width - 1));
        p.y = std::clamp(p.y, 0.0, static_cast<double>(height - 1));
    }
    return out;
}

/// Landmark coordinates matching a rotated copy of the image: each point is
/// rotated about the same center as the pixels, then clamped to bounds.
/// Order (and therefore identity) is preserved.
inline LandmarkSet landmarks_for_rotation(const LandmarkSet& set, double angle_deg, Point center,
                                          int height, int width) {
    LandmarkSet out = set;
    for (auto& p : out.points) p = rotate_point(p, angle_deg, center);
    return clamp_landmarks(out, height, width);
}

} // namespace lacnn
