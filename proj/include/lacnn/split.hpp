#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "lacnn/csv.hpp"
#include "lacnn/fsio.hpp"
#include "lacnn/manifest.hpp"
#include "lacnn/rng.hpp"

namespace lacnn {

enum class Side : uint8_t { kTrain, kTest };

struct SplitAssignment {
    std::string trait;
    uint64_t seed = 0;
    std::map<std::string, Side> side; // image_id -> side

    bool is_test(const std::string& image_id) const {
        auto it = side.find(image_id);
        return it != side.end() && it->second == Side::kTest;
    }
};

/// Per-class seeded shuffle with test count = floor(class_size * fraction),
/// remainder on the train side. Unlabeled images are left out entirely.
inline SplitAssignment stratified_split(const DatasetManifest& manifest, const std::string& trait,
                                        double test_fraction, uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw std::invalid_argument("stratified_split: test_fraction must be in (0,1)");
    auto trait_it = manifest.trait_classes.find(trait);
    if (trait_it == manifest.trait_classes.end())
        throw std::invalid_argument("stratified_split: unknown trait " + trait);

    std::map<std::string, std::vector<std::string>> per_class; // class -> image ids, manifest order
    for (const auto& e : manifest.entries) {
        const auto label_it = e.labels.find(trait);
        if (label_it == e.labels.end() || label_it->second.empty()) continue;
        per_class[label_it->second].push_back(e.image_id);
    }

    SplitAssignment split;
    split.trait = trait;
    split.seed = seed;
    Rng rng(Rng::derive_seed(seed, 0x5917));
    for (const auto& cls : trait_it->second) {
        auto it = per_class.find(cls);
        if (it == per_class.end() || it->second.empty())
            throw std::invalid_argument("stratified_split: class with zero samples: " + cls);
        auto ids = it->second;
        rng.shuffle(ids);
        const size_t n_test = static_cast<size_t>(
            std::floor(static_cast<double>(ids.size()) * test_fraction));
        for (size_t i = 0; i < ids.size(); ++i)
            split.side[ids[i]] = i < n_test ? Side::kTest : Side::kTrain;
    }
    return split;
}

/// Split file: CSV `image_id,split` sorted by image_id.
inline void write_split_csv(const std::string& path, const SplitAssignment& split) {
    std::string out = "image_id,split\n";
    for (const auto& [id, side] : split.side)
        out += csv_field(id) + (side == Side::kTest ? ",test\n" : ",train\n");
    write_file_atomic(path, out);
}

inline SplitAssignment read_split_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    const int c_id = table.column("image_id");
    const int c_side = table.column("split");
    if (c_id < 0 || c_side < 0) throw DataError(path + ": missing split columns");
    SplitAssignment split;
    for (const auto& row : table.rows) {
        if (row[c_side] == "train")
            split.side[row[c_id]] = Side::kTrain;
        else if (row[c_side] == "test")
            split.side[row[c_id]] = Side::kTest;
        else
            throw DataError(path + ": bad split value '" + row[c_side] + "'");
    }
    return split;
}

} // namespace lacnn
