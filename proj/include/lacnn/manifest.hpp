#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "lacnn/csv.hpp"
#include "lacnn/errors.hpp"

namespace lacnn {

/// One dataset row. An empty label string means Unlabeled for that trait.
struct ManifestEntry {
    std::string image_id;
    std::string image_path;
    std::string landmark_path; // may be empty (baseline-only data)
    std::map<std::string, std::string> labels;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
    std::vector<std::string> traits;                             // header order
    std::map<std::string, std::vector<std::string>> trait_classes; // sorted labels seen

    const ManifestEntry* find(const std::string& image_id) const {
        for (const auto& e : entries)
            if (e.image_id == image_id) return &e;
        return nullptr;
    }
};

/// Manifest CSV: image_id,image_path,landmark_path,<trait1>,<trait2>,...
/// Relative file paths are resolved against the manifest's directory.
/// With check_files set, every non-empty referenced path must exist.
inline DatasetManifest read_manifest(const std::string& path, bool check_files = true) {
    const CsvTable table = read_csv(path);
    if (table.header.size() < 3 || table.header[0] != "image_id" ||
        table.header[1] != "image_path" || table.header[2] != "landmark_path")
        throw DataError(path + ": manifest header must start with image_id,image_path,landmark_path");

    const auto base = std::filesystem::path(path).parent_path();
    auto resolve = [&](const std::string& p) -> std::string {
        if (p.empty()) return p;
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp.string() : (base / fp).string();
    };

    DatasetManifest manifest;
    for (size_t i = 3; i < table.header.size(); ++i) manifest.traits.push_back(table.header[i]);

    std::set<std::string> seen_ids;
    std::map<std::string, std::set<std::string>> classes;
    for (const auto& row : table.rows) {
        ManifestEntry e;
        e.image_id = row[0];
        if (e.image_id.empty()) throw DataError(path + ": empty image_id");
        if (!seen_ids.insert(e.image_id).second)
            throw DataError(path + ": duplicate image_id " + e.image_id);
        e.image_path = resolve(row[1]);
        e.landmark_path = resolve(row[2]);
        if (e.image_path.empty()) throw DataError(path + ": empty image_path for " + e.image_id);
        if (check_files) {
            if (!std::filesystem::exists(e.image_path))
                throw DataError("image file for " + e.image_id + " not found: " + e.image_path);
            if (!e.landmark_path.empty() && !std::filesystem::exists(e.landmark_path))
                throw DataError("landmark file for " + e.image_id + " not found: " +
                                e.landmark_path);
        }
        for (size_t i = 3; i < table.header.size(); ++i) {
            e.labels[table.header[i]] = row[i];
            if (!row[i].empty()) classes[table.header[i]].insert(row[i]);
        }
        manifest.entries.push_back(std::move(e));
    }
    if (manifest.entries.empty()) throw DataError(path + ": manifest has no entries");
    for (const auto& t : manifest.traits)
        manifest.trait_classes[t] =
            std::vector<std::string>(classes[t].begin(), classes[t].end());
    return manifest;
}

} // namespace lacnn
