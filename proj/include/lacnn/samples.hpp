#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lacnn/image.hpp"
#include "lacnn/image_io.hpp"
#include "lacnn/landmarks.hpp"
#include "lacnn/manifest.hpp"
#include "lacnn/rotate.hpp"
#include "lacnn/voronoi.hpp"

namespace lacnn {

enum class PipelineMode : uint8_t { kBaseline, kLacnn };

inline PipelineMode parse_mode(const std::string& s) {
    if (s == "baseline") return PipelineMode::kBaseline;
    if (s == "lacnn") return PipelineMode::kLacnn;
    throw std::invalid_argument("mode must be 'baseline' or 'lacnn', got '" + s + "'");
}

/// One unit of training data: the (possibly landmark-augmented) image, its
/// label for the trait under study, and its provenance.
struct AugmentedSample {
    ImageTensor image;
    std::string image_id;
    double angle_deg = 0.0; // 0 for the unrotated original
    std::string label;
    int label_index = -1;
};

/// Loads, scales, rotates and (in lacnn mode) landmark-augments every labeled
/// image of a trait. Per image the original is emitted first, then one sample
/// per rotation angle; rotated copies keep the original's label. The landmark
/// channel is recomputed per sample from analytically transformed
/// coordinates, never resampled.
inline std::vector<AugmentedSample> build_samples(const DatasetManifest& manifest,
                                                  const std::string& trait, PipelineMode mode,
                                                  const RotationSpec& rotation, int target_size,
                                                  const std::set<std::string>* only_ids = nullptr) {
    auto trait_it = manifest.trait_classes.find(trait);
    if (trait_it == manifest.trait_classes.end())
        throw std::invalid_argument("build_samples: unknown trait " + trait);
    const auto& classes = trait_it->second;
    auto class_index = [&](const std::string& label) {
        for (size_t i = 0; i < classes.size(); ++i)
            if (classes[i] == label) return static_cast<int>(i);
        throw DataError("label '" + label + "' outside class set of trait " + trait);
    };

    std::vector<AugmentedSample> samples;
    for (const auto& entry : manifest.entries) {
        const auto label_it = entry.labels.find(trait);
        if (label_it == entry.labels.end() || label_it->second.empty()) continue;
        if (only_ids && !only_ids->count(entry.image_id)) continue;

        const ImageTensor native = decode_image_file(entry.image_path);
        const ImageTensor scaled = resize_bilinear(native, target_size, target_size);

        LandmarkSet landmarks;
        if (mode == PipelineMode::kLacnn) {
            if (entry.landmark_path.empty())
                throw DataError("lacnn mode needs a landmark file for image " + entry.image_id);
            landmarks = read_landmark_file(entry.landmark_path, entry.image_id);
            landmarks = rescale_landmarks(landmarks,
                                          static_cast<double>(target_size) / native.width(),
                                          static_cast<double>(target_size) / native.height());
        }

        const int label_idx = class_index(label_it->second);
        const Point center = image_center(scaled);

        auto emit = [&](double angle) {
            AugmentedSample s;
            s.image_id = entry.image_id;
            s.angle_deg = angle;
            s.label = label_it->second;
            s.label_index = label_idx;
            const ImageTensor rgb = angle == 0.0 ? scaled : rotate_image(scaled, angle, rotation);
            if (mode == PipelineMode::kLacnn) {
                const LandmarkSet rotated =
                    angle == 0.0 ? landmarks
                                 : landmarks_for_rotation(landmarks, angle, center, target_size,
                                                          target_size);
                s.image = attach_channel(rgb, augment_fll(rotated, target_size, target_size));
            } else {
                s.image = rgb;
            }
            samples.push_back(std::move(s));
        };

        emit(0.0);
        for (const double angle : rotation.angles_deg) emit(angle);
    }
    return samples;
}

/// Parses a comma-separated angle list ("" means no rotation augmentation).
inline RotationSpec parse_rotations(const std::string& csv) {
    RotationSpec spec;
    spec.angles_deg.clear();
    std::string cur;
    auto flush = [&]() {
        if (cur.empty()) return;
        size_t pos = 0;
        const double v = std::stod(cur, &pos);
        if (pos != cur.size() || !std::isfinite(v))
            throw std::invalid_argument("bad rotation angle: '" + cur + "'");
        spec.angles_deg.push_back(v);
        cur.clear();
    };
    for (const char ch : csv) {
        if (ch == ',')
            flush();
        else if (!std::isspace(static_cast<unsigned char>(ch)))
            cur += ch;
    }
    flush();
    return spec;
}

} // namespace lacnn
