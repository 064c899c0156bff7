#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "lacnn/annotations.hpp"

namespace lacnn {

/// Subjects x categories table of rater assignments; every row sums to the
/// constant number of raters per subject.
struct RatingMatrix {
    int n_subjects = 0;
    int n_categories = 0;
    int n_raters = 0;
    std::vector<std::vector<int>> counts; // [subject][category]
};

/// Fleiss' kappa: (P_bar - Pe_bar) / (1 - Pe_bar) with
///   P_i    = sum_j n_ij (n_ij - 1) / (n (n - 1))
///   p_j    = sum_i n_ij / (N n)
///   Pe_bar = sum_j p_j^2.
/// When every rating falls in a single category Pe_bar = 1 and kappa is 1 by
/// convention.
inline double fleiss_kappa(const RatingMatrix& m) {
    if (m.n_raters < 2) throw std::invalid_argument("fleiss_kappa: need at least 2 raters");
    if (m.n_subjects < 1 || static_cast<int>(m.counts.size()) != m.n_subjects)
        throw std::invalid_argument("fleiss_kappa: bad subject count");

    std::vector<long long> category_totals(static_cast<size_t>(m.n_categories), 0);
    double p_sum = 0.0;
    for (const auto& row : m.counts) {
        if (static_cast<int>(row.size()) != m.n_categories)
            throw std::invalid_argument("fleiss_kappa: ragged matrix");
        int row_sum = 0;
        long long agree = 0;
        for (int j = 0; j < m.n_categories; ++j) {
            if (row[j] < 0) throw std::invalid_argument("fleiss_kappa: negative count");
            row_sum += row[j];
            agree += static_cast<long long>(row[j]) * (row[j] - 1);
            category_totals[static_cast<size_t>(j)] += row[j];
        }
        if (row_sum != m.n_raters)
            throw std::invalid_argument("fleiss_kappa: row sum != n_raters");
        p_sum += static_cast<double>(agree) /
                 (static_cast<double>(m.n_raters) * (m.n_raters - 1));
    }
    const double p_bar = p_sum / m.n_subjects;

    const long long total = static_cast<long long>(m.n_subjects) * m.n_raters;
    for (const long long t : category_totals)
        if (t == total) return 1.0; // all ratings in one category
    double pe_bar = 0.0;
    for (const long long t : category_totals) {
        const double pj = static_cast<double>(t) / static_cast<double>(total);
        pe_bar += pj * pj;
    }
    return (p_bar - pe_bar) / (1.0 - pe_bar);
}

enum class AgreementBand : uint8_t {
    kPoor,
    kSlight,
    kFair,
    kModerate,
    kSubstantial,
    kAlmostPerfect,
};

/// Landis-Koch bands: kappa < 0 Poor; [0, 0.2] Slight; (0.2, 0.4] Fair;
/// (0.4, 0.6] Moderate; (0.6, 0.8] Substantial; (0.8, 1] Almost perfect.
inline AgreementBand classify_agreement(double kappa) {
    if (kappa < -1.0 || kappa > 1.0)
        throw std::invalid_argument("classify_agreement: kappa outside [-1, 1]");
    if (kappa < 0.0) return AgreementBand::kPoor;
    if (kappa <= 0.2) return AgreementBand::kSlight;
    if (kappa <= 0.4) return AgreementBand::kFair;
    if (kappa <= 0.6) return AgreementBand::kModerate;
    if (kappa <= 0.8) return AgreementBand::kSubstantial;
    return AgreementBand::kAlmostPerfect;
}

inline const char* band_name(AgreementBand band) {
    switch (band) {
        case AgreementBand::kPoor: return "Poor agreement";
        case AgreementBand::kSlight: return "Slight agreement";
        case AgreementBand::kFair: return "Fair agreement";
        case AgreementBand::kModerate: return "Moderate agreement";
        case AgreementBand::kSubstantial: return "Substantial agreement";
        case AgreementBand::kAlmostPerfect: return "Almost perfect agreement";
    }
    return "?";
}

inline const char* band_code(AgreementBand band) {
    switch (band) {
        case AgreementBand::kPoor: return "PA";
        case AgreementBand::kSlight: return "SLA";
        case AgreementBand::kFair: return "FA";
        case AgreementBand::kModerate: return "MA";
        case AgreementBand::kSubstantial: return "SA";
        case AgreementBand::kAlmostPerfect: return "APA";
    }
    return "?";
}

struct RatingMatrixBuild {
    RatingMatrix matrix;
    std::vector<std::string> categories; // column order (sorted labels)
    int excluded_subjects = 0;           // images whose surviving rater count != n
};

/// Builds the per-trait rating matrix from surviving responses. Fleiss' kappa
/// needs a constant rater count per subject, so n is taken as the most common
/// surviving count >= 2 (larger count on ties) and images with a different
/// count are excluded and tallied.
inline RatingMatrixBuild build_rating_matrix(const std::vector<RaterResponse>& kept,
                                             const std::string& trait) {
    std::map<std::string, std::vector<std::string>> by_image; // image -> labels
    for (const auto& r : kept)
        if (r.trait == trait) by_image[r.image_id].push_back(r.label);
    if (by_image.empty()) throw DataError("no responses for trait: " + trait);

    std::map<size_t, int> count_freq;
    for (const auto& [id, labels] : by_image) count_freq[labels.size()] += 1;
    size_t n_raters = 0;
    int best_freq = 0;
    for (const auto& [count, freq] : count_freq)
        if (count >= 2 && freq >= best_freq) { // map order: ties resolve to larger count
            n_raters = count;
            best_freq = freq;
        }
    if (n_raters < 2) throw DataError("trait " + trait + ": no image has 2+ surviving ratings");

    std::map<std::string, int> category_index;
    for (const auto& [id, labels] : by_image)
        if (labels.size() == n_raters)
            for (const auto& l : labels) category_index.emplace(l, 0);
    int next = 0;
    for (auto& [label, idx] : category_index) idx = next++;

    RatingMatrixBuild out;
    out.matrix.n_categories = next;
    out.matrix.n_raters = static_cast<int>(n_raters);
    for (const auto& [label, idx] : category_index) out.categories.push_back(label);
    for (const auto& [id, labels] : by_image) {
        if (labels.size() != n_raters) {
            out.excluded_subjects += 1;
            continue;
        }
        std::vector<int> row(static_cast<size_t>(next), 0);
        for (const auto& l : labels) row[static_cast<size_t>(category_index[l])] += 1;
        out.matrix.counts.push_back(std::move(row));
    }
    out.matrix.n_subjects = static_cast<int>(out.matrix.counts.size());
    return out;
}

} // namespace lacnn
