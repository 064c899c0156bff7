#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lacnn/image_io.hpp"
#include "lacnn/manifest.hpp"
#include "lacnn/nn/checkpoint.hpp"
#include "lacnn/nn/train.hpp"
#include "lacnn/samples.hpp"
#include "lacnn/split.hpp"

namespace lacnn {

struct EvalReport {
    std::string trait;
    std::vector<std::string> classes;
    std::vector<std::vector<int>> confusion; // [actual][predicted]
    int n_test = 0;
    double accuracy = 0.0;
    std::vector<double> precision; // per class, 0 when undefined
    std::vector<double> recall;
};

namespace detail {

/// Mean of each channel over all pixels of all samples.
inline std::vector<double> channel_means(const std::vector<AugmentedSample>& samples) {
    if (samples.empty()) return {};
    const int channels = samples[0].image.channels();
    std::vector<double> sums(static_cast<size_t>(channels), 0.0);
    size_t n_pixels = 0;
    for (const auto& s : samples) {
        for (int y = 0; y < s.image.height(); ++y)
            for (int x = 0; x < s.image.width(); ++x)
                for (int c = 0; c < channels; ++c) sums[static_cast<size_t>(c)] += s.image.at(y, x, c);
        n_pixels += static_cast<size_t>(s.image.height()) * s.image.width();
    }
    for (auto& v : sums) v /= static_cast<double>(n_pixels);
    return sums;
}

/// Stacks samples into an NHWC batch, subtracting the per-channel means.
inline nn::Tensor<float> to_batch(const std::vector<AugmentedSample>& samples,
                                  const std::vector<double>& means) {
    const int h = samples[0].image.height();
    const int w = samples[0].image.width();
    const int c = samples[0].image.channels();
    nn::Tensor<float> batch({static_cast<int>(samples.size()), h, w, c});
    size_t i = 0;
    for (const auto& s : samples) {
        if (s.image.height() != h || s.image.width() != w || s.image.channels() != c)
            throw std::invalid_argument("to_batch: mixed sample shapes");
        for (const float v : s.image.data()) {
            batch.data[i] = v - static_cast<float>(means[i % static_cast<size_t>(c)]);
            ++i;
        }
    }
    return batch;
}

} // namespace detail

/// Applies a checkpoint's stored preprocessing to one image and returns the
/// 1xHxWxC eval-ready batch.
inline nn::Tensor<float> prepare_sample(const nn::ModelCheckpoint& ckpt, const ImageTensor& img) {
    if (img.height() != ckpt.config.input.height || img.width() != ckpt.config.input.width ||
        img.channels() != ckpt.config.input.channels)
        throw std::invalid_argument("prepare_sample: image shape does not match checkpoint input");
    nn::Tensor<float> batch({1, img.height(), img.width(), img.channels()});
    const size_t c = static_cast<size_t>(img.channels());
    for (size_t i = 0; i < img.data().size(); ++i)
        batch.data[i] = img.data()[i] - static_cast<float>(ckpt.channel_means[i % c]);
    return batch;
}

/// Argmax class predictions for a prepared batch.
inline std::vector<int> predict(const nn::ModelCheckpoint& ckpt, const nn::Tensor<float>& batch) {
    const auto logits = nn::forward(ckpt.config, ckpt.params, batch, nn::RunMode::kEval);
    std::vector<int> out(static_cast<size_t>(logits.dim(0)));
    for (int n = 0; n < logits.dim(0); ++n) {
        int best = 0;
        for (int m = 1; m < logits.dim(1); ++m)
            if (logits.at2(n, m) > logits.at2(n, best)) best = m;
        out[static_cast<size_t>(n)] = best;
    }
    return out;
}

inline EvalReport evaluate(const nn::ModelCheckpoint& ckpt,
                           const std::vector<AugmentedSample>& test_samples,
                           const std::vector<std::string>& classes, const std::string& trait) {
    if (test_samples.empty()) throw DataError("evaluate: empty test set");
    EvalReport report;
    report.trait = trait;
    report.classes = classes;
    const int m = static_cast<int>(classes.size());
    report.confusion.assign(static_cast<size_t>(m), std::vector<int>(static_cast<size_t>(m), 0));

    const auto batch = detail::to_batch(test_samples, ckpt.channel_means);
    const auto predictions = predict(ckpt, batch);
    int correct = 0;
    for (size_t i = 0; i < test_samples.size(); ++i) {
        const int actual = test_samples[i].label_index;
        const int predicted = predictions[i];
        report.confusion[static_cast<size_t>(actual)][static_cast<size_t>(predicted)] += 1;
        if (actual == predicted) ++correct;
    }
    report.n_test = static_cast<int>(test_samples.size());
    report.accuracy = static_cast<double>(correct) / report.n_test;
    report.precision.assign(static_cast<size_t>(m), 0.0);
    report.recall.assign(static_cast<size_t>(m), 0.0);
    for (int c = 0; c < m; ++c) {
        int col = 0, row = 0;
        for (int r = 0; r < m; ++r) {
            col += report.confusion[static_cast<size_t>(r)][static_cast<size_t>(c)];
            row += report.confusion[static_cast<size_t>(c)][static_cast<size_t>(r)];
        }
        const int tp = report.confusion[static_cast<size_t>(c)][static_cast<size_t>(c)];
        report.precision[static_cast<size_t>(c)] = col > 0 ? static_cast<double>(tp) / col : 0.0;
        report.recall[static_cast<size_t>(c)] = row > 0 ? static_cast<double>(tp) / row : 0.0;
    }
    return report;
}

struct ExperimentResult {
    nn::ModelCheckpoint checkpoint;
    EvalReport report;
    std::vector<double> epoch_losses;
};

/// Full per-trait run: augment the train side, train, evaluate on the
/// untouched originals of the test side. Test time uses no rotation
/// augmentation; channel means come from the training samples only.
inline ExperimentResult run_experiment(const DatasetManifest& manifest, const std::string& trait,
                                       PipelineMode mode, const nn::NetworkConfig& net,
                                       const nn::LossConfig& loss_cfg,
                                       const nn::TrainConfig& train_cfg,
                                       const SplitAssignment& split, const RotationSpec& rotation,
                                       std::ostream* log = nullptr) {
    const int expected_channels = mode == PipelineMode::kLacnn ? 4 : 3;
    if (net.input.channels != expected_channels)
        throw std::invalid_argument("run_experiment: network channels do not match mode");
    if (net.input.height != net.input.width)
        throw std::invalid_argument("run_experiment: network input must be square");

    std::set<std::string> train_ids, test_ids;
    for (const auto& [id, side] : split.side)
        (side == Side::kTest ? test_ids : train_ids).insert(id);
    if (train_ids.empty()) throw DataError("run_experiment: empty train side");
    if (test_ids.empty()) throw DataError("run_experiment: empty test set");

    const int target = net.input.height;
    const auto train_samples = build_samples(manifest, trait, mode, rotation, target, &train_ids);
    const auto test_samples =
        build_samples(manifest, trait, mode, RotationSpec{.angles_deg = {}}, target, &test_ids);
    if (train_samples.empty()) throw DataError("run_experiment: no labeled training samples");
    if (test_samples.empty()) throw DataError("run_experiment: no labeled test samples");

    const auto means = detail::channel_means(train_samples);
    const auto train_batch = detail::to_batch(train_samples, means);
    std::vector<int> train_labels;
    train_labels.reserve(train_samples.size());
    for (const auto& s : train_samples) train_labels.push_back(s.label_index);

    const auto trained = nn::train(net, train_batch, train_labels, loss_cfg, train_cfg, log);

    ExperimentResult result;
    result.checkpoint.config = net;
    result.checkpoint.params = trained.params;
    result.checkpoint.trait = trait;
    result.checkpoint.epochs_run = static_cast<uint64_t>(trained.epochs_run);
    result.checkpoint.final_loss = trained.final_loss;
    result.checkpoint.channel_means = means;
    result.epoch_losses = trained.epoch_losses;
    result.report =
        evaluate(result.checkpoint, test_samples, manifest.trait_classes.at(trait), trait);
    return result;
}

/// Eval report CSV: rows `trait,metric,class_a,class_b,value`; confusion rows
/// carry actual/predicted class pairs.
inline std::string eval_report_csv(const EvalReport& report, const std::string& mode_name) {
    std::ostringstream out;
    out << "trait,mode,metric,class_a,class_b,value\n";
    const auto row = [&](const std::string& metric, const std::string& a, const std::string& b,
                         double v) {
        out << csv_field(report.trait) << ',' << mode_name << ',' << metric << ',' << csv_field(a)
            << ',' << csv_field(b) << ',' << v << "\n";
    };
    out.precision(10);
    row("accuracy", "", "", report.accuracy);
    row("n_test", "", "", report.n_test);
    for (size_t c = 0; c < report.classes.size(); ++c) {
        row("precision", report.classes[c], "", report.precision[c]);
        row("recall", report.classes[c], "", report.recall[c]);
    }
    for (size_t a = 0; a < report.classes.size(); ++a)
        for (size_t b = 0; b < report.classes.size(); ++b)
            row("confusion", report.classes[a], report.classes[b], report.confusion[a][b]);
    return out.str();
}

/// First convolutional layer activation maps for one prepared sample, each
/// min-max normalized to [0,1] (flat maps render 0.5 gray), arranged
/// row-major on the smallest square grid; unused cells are 0.
struct ActivationGrid {
    int grid = 0;  // cells per side
    int map_h = 0; // one map's height
    int map_w = 0;
    int n_maps = 0;
    std::vector<float> image; // (grid*map_h) x (grid*map_w), row-major
};

inline ActivationGrid first_layer_activations(const nn::ModelCheckpoint& ckpt,
                                              const ImageTensor& img) {
    if (ckpt.config.layers.empty() ||
        !std::holds_alternative<nn::ConvSpec>(ckpt.config.layers[0]))
        throw std::invalid_argument("first_layer_activations: first layer is not convolutional");
    const auto& conv = std::get<nn::ConvSpec>(ckpt.config.layers[0]);

    const auto batch = prepare_sample(ckpt, img);
    const auto maps = nn::detail::conv_forward(conv, ckpt.params.layers[0].w,
                                               ckpt.params.layers[0].b, batch);
    ActivationGrid grid;
    grid.n_maps = conv.filters;
    grid.map_h = maps.dim(1);
    grid.map_w = maps.dim(2);
    grid.grid = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(conv.filters))));
    grid.image.assign(static_cast<size_t>(grid.grid) * grid.map_h * grid.grid * grid.map_w, 0.0f);

    for (int f = 0; f < conv.filters; ++f) {
        float lo = maps.at4(0, 0, 0, f), hi = lo;
        for (int y = 0; y < grid.map_h; ++y)
            for (int x = 0; x < grid.map_w; ++x) {
                lo = std::min(lo, maps.at4(0, y, x, f));
                hi = std::max(hi, maps.at4(0, y, x, f));
            }
        const int cell_y = f / grid.grid;
        const int cell_x = f % grid.grid;
        const int canvas_w = grid.grid * grid.map_w;
        for (int y = 0; y < grid.map_h; ++y)
            for (int x = 0; x < grid.map_w; ++x) {
                const float v = maps.at4(0, y, x, f);
                const float norm = hi > lo ? (v - lo) / (hi - lo) : 0.5f;
                grid.image[static_cast<size_t>(cell_y * grid.map_h + y) * canvas_w +
                           cell_x * grid.map_w + x] = norm;
            }
    }
    return grid;
}

inline void write_activation_grid_png(const std::string& path, const ActivationGrid& grid) {
    const int h = grid.grid * grid.map_h;
    const int w = grid.grid * grid.map_w;
    std::vector<uint8_t> bytes(static_cast<size_t>(h) * w);
    for (size_t i = 0; i < bytes.size(); ++i)
        bytes[i] = static_cast<uint8_t>(std::lround(std::clamp(grid.image[i], 0.0f, 1.0f) * 255.0f));
    write_png(path, bytes.data(), h, w, 1);
}

} // namespace lacnn
