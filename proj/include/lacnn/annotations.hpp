#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lacnn/csv.hpp"
#include "lacnn/errors.hpp"

namespace lacnn {

struct RaterResponse {
    std::string rater_id;
    std::string image_id;
    std::string trait;
    std::string label;
    bool attention_checks_passed = true;
};

/// Response file: CSV with header rater_id,image_id,trait,label,attention_passed.
inline std::vector<RaterResponse> read_responses_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    const int c_rater = table.column("rater_id");
    const int c_image = table.column("image_id");
    const int c_trait = table.column("trait");
    const int c_label = table.column("label");
    const int c_att = table.column("attention_passed");
    if (c_rater < 0 || c_image < 0 || c_trait < 0 || c_label < 0 || c_att < 0)
        throw DataError(path + ": missing response columns");
    std::vector<RaterResponse> out;
    for (const auto& row : table.rows) {
        RaterResponse r;
        r.rater_id = row[c_rater];
        r.image_id = row[c_image];
        r.trait = row[c_trait];
        r.label = row[c_label];
        const std::string& att = row[c_att];
        if (att == "1" || att == "true" || att == "yes")
            r.attention_checks_passed = true;
        else if (att == "0" || att == "false" || att == "no")
            r.attention_checks_passed = false;
        else
            throw DataError(path + ": bad attention_passed value '" + att + "'");
        out.push_back(std::move(r));
    }
    return out;
}

struct FilterResult {
    std::vector<RaterResponse> kept;
    std::vector<std::string> rejected_raters; // sorted, unique
};

/// Removes all responses of raters who failed an attention check, then all
/// responses of raters whose label differs from their peers' majority on
/// strictly more than 1/3 of their objective-trait labels.
///
/// Peer majorities are computed from the responses as given (pre-filter): for
/// one (image, trait) the peers of a rater are the other raters, and a
/// majority exists when at least two peers agree on a label held by more than
/// half of them. Labels without a peer majority do not count as disagreement.
inline FilterResult filter_raters(const std::vector<RaterResponse>& responses,
                                  const std::set<std::string>& objective_traits) {
    std::set<std::string> rejected;
    for (const auto& r : responses)
        if (!r.attention_checks_passed) rejected.insert(r.rater_id);

    // Group objective-trait responses per (image, trait).
    std::map<std::pair<std::string, std::string>, std::vector<const RaterResponse*>> groups;
    for (const auto& r : responses)
        if (objective_traits.count(r.trait))
            groups[{r.image_id, r.trait}].push_back(&r);

    std::map<std::string, int> total_labels, disagreements;
    for (const auto& [key, members] : groups) {
        for (const auto* self : members) {
            total_labels[self->rater_id] += 1;
            std::map<std::string, int> peer_votes;
            int n_peers = 0;
            for (const auto* peer : members) {
                if (peer->rater_id == self->rater_id) continue;
                peer_votes[peer->label] += 1;
                ++n_peers;
            }
            if (n_peers < 2) continue;
            for (const auto& [label, votes] : peer_votes) {
                if (votes >= 2 && 2 * votes > n_peers) {
                    if (label != self->label) disagreements[self->rater_id] += 1;
                    break;
                }
            }
        }
    }
    for (const auto& [rater, total] : total_labels)
        if (3 * disagreements[rater] > total) rejected.insert(rater);

    FilterResult result;
    for (const auto& r : responses)
        if (!rejected.count(r.rater_id)) result.kept.push_back(r);
    result.rejected_raters.assign(rejected.begin(), rejected.end());
    return result;
}

/// Majority-vote consensus per image for one trait. Images without at least
/// two agreeing raters stay unlabeled (absent from `labels`).
struct ConsensusLabels {
    std::map<std::string, std::string> labels; // image_id -> label
    std::vector<std::string> unlabeled_ids;    // sorted
};

inline ConsensusLabels aggregate_labels(const std::vector<RaterResponse>& kept,
                                        const std::string& trait) {
    std::map<std::string, std::map<std::string, int>> votes; // image -> label -> count
    for (const auto& r : kept)
        if (r.trait == trait) votes[r.image_id][r.label] += 1;

    ConsensusLabels out;
    for (const auto& [image_id, counts] : votes) {
        int total = 0, best_count = 0;
        std::string best_label;
        for (const auto& [label, count] : counts) {
            total += count;
            if (count > best_count) {
                best_count = count;
                best_label = label;
            }
        }
        if (best_count >= 2 && 2 * best_count > total)
            out.labels[image_id] = best_label;
        else
            out.unlabeled_ids.push_back(image_id);
    }
    return out;
}

/// Per-class proportions of a label list in the given class order; classes
/// outside the order are rejected, proportions sum to 1.
inline std::vector<std::pair<std::string, double>> class_distribution(
    const std::vector<std::string>& labels, const std::vector<std::string>& class_order) {
    if (labels.empty()) throw std::invalid_argument("class_distribution: empty labels");
    std::map<std::string, int> counts;
    for (const auto& c : class_order) counts[c] = 0;
    for (const auto& l : labels) {
        auto it = counts.find(l);
        if (it == counts.end())
            throw std::invalid_argument("class_distribution: label outside class set: " + l);
        it->second += 1;
    }
    std::vector<std::pair<std::string, double>> out;
    for (const auto& c : class_order)
        out.emplace_back(c, static_cast<double>(counts[c]) / static_cast<double>(labels.size()));
    return out;
}

} // namespace lacnn
