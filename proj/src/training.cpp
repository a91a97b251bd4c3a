#include "oam/training.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>

#include "oam/errors.hpp"
#include "oam/field_io.hpp"
#include "oam/parallel.hpp"
#include "oam/rng.hpp"

namespace oam {

namespace fs = std::filesystem;

namespace {

constexpr int kEvalBatch = 64;

Tensor<float> gather(const LabeledImages& data, std::span<const std::size_t> rows) {
    const int s = data.images.shape[2];
    const std::size_t stride = static_cast<std::size_t>(s) * s;
    Tensor<float> batch({static_cast<int>(rows.size()), 1, s, s});
    for (std::size_t i = 0; i < rows.size(); ++i)
        std::copy_n(data.images.values.begin() + rows[i] * stride, stride,
                    batch.values.begin() + i * stride);
    return batch;
}

int argmax_row(const Tensor<float>& probs, int row) {
    const int c = probs.shape[1];
    const float* p = probs.values.data() + static_cast<std::size_t>(row) * c;
    return static_cast<int>(std::max_element(p, p + c) - p);
}

std::size_t sample_count(const LabeledImages& data) { return data.labels.size(); }

}  // namespace

void TrainConfig::validate() const {
    adam.validate();
    require(batch_size >= 1, "train: batch size must be >= 1");
    require(epochs >= 0, "train: epochs must be >= 0");
    require(dropout >= 0.0 && dropout < 1.0, "train: dropout must be in [0, 1)");
    require(input_size >= 4 && input_size % 4 == 0, "train: input size must be a multiple of 4");
}

LabeledImages load_split(const fs::path& root, const DatasetManifest& manifest,
                         const std::string& split, int size, int threads) {
    const auto it = manifest.splits.find(split);
    require(it != manifest.splits.end(), "dataset: unknown split '" + split + "'");
    const auto& records = it->second;
    LabeledImages out;
    out.images = Tensor<float>({static_cast<int>(records.size()), 1, size, size});
    out.labels.resize(records.size());
    const std::size_t stride = static_cast<std::size_t>(size) * size;
    parallel_for(records.size(), threads, [&](std::size_t i) {
        const auto px = area_resample(read_pgm(root / records[i].path), size);
        std::transform(px.begin(), px.end(), out.images.values.begin() + i * stride,
                       [](double v) { return static_cast<float>(v); });
        out.labels[i] = records[i].class_index;
    });
    return out;
}

EvalMetrics metrics_from_predictions(const std::vector<int>& truth, const std::vector<int>& predicted,
                                     int classes) {
    require(truth.size() == predicted.size(), "metrics: prediction count mismatch");
    require(!truth.empty(), "metrics: empty split");
    EvalMetrics m;
    m.counts.assign(classes, std::vector<long long>(classes, 0));
    long long correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        require(truth[i] >= 0 && truth[i] < classes && predicted[i] >= 0 && predicted[i] < classes,
                "metrics: class index out of range");
        ++m.counts[truth[i]][predicted[i]];
        correct += truth[i] == predicted[i];
    }
    m.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
    m.confusion.assign(classes, std::vector<double>(classes, 0.0));
    m.per_class_accuracy.assign(classes, std::numeric_limits<double>::quiet_NaN());
    for (int t = 0; t < classes; ++t) {
        const long long row = std::accumulate(m.counts[t].begin(), m.counts[t].end(), 0LL);
        if (row == 0) continue;
        for (int p = 0; p < classes; ++p)
            m.confusion[t][p] = static_cast<double>(m.counts[t][p]) / static_cast<double>(row);
        m.per_class_accuracy[t] = m.confusion[t][t];
    }
    m.predictions = predicted;
    return m;
}

EvalMetrics evaluate(const ClassifierModel<float>& model, const LabeledImages& data, int threads) {
    const std::size_t n = sample_count(data);
    require(n > 0, "evaluate: empty split");
    require(data.images.shape[2] == model.input_size(), "evaluate: image size does not match model");
    std::vector<int> predicted(n);
    double loss = 0.0;
    std::vector<std::size_t> rows;
    for (std::size_t start = 0; start < n; start += kEvalBatch) {
        rows.clear();
        for (std::size_t i = start; i < std::min(n, start + kEvalBatch); ++i) rows.push_back(i);
        const auto fwd = forward(model, gather(data, rows), Mode::eval, 0, threads);
        std::vector<int> labels;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            predicted[rows[i]] = argmax_row(fwd.probs, static_cast<int>(i));
            labels.push_back(data.labels[rows[i]]);
        }
        loss += cross_entropy(fwd.probs, labels);
    }
    EvalMetrics m = metrics_from_predictions(data.labels, predicted, model.classes());
    m.loss = loss / static_cast<double>(n);
    return m;
}

EvalMetrics evaluate(const ClassifierModel<float>& model, const fs::path& root,
                     const std::string& split, int threads) {
    const auto manifest = load_manifest(root);
    require(manifest.space.class_count() == model.classes(),
            "evaluate: model head does not match the dataset class count");
    return evaluate(model, load_split(root, manifest, split, model.input_size(), threads), threads);
}

double adjacent_z_error_fraction(const EvalMetrics& metrics, const LabelSpace& space) {
    const int classes = space.class_count();
    require(static_cast<int>(metrics.counts.size()) == classes, "metrics: class count mismatch");
    const int nz = static_cast<int>(space.zs.size());
    long long errors = 0, adjacent = 0;
    for (int t = 0; t < classes; ++t)
        for (int p = 0; p < classes; ++p) {
            if (t == p) continue;
            const long long c = metrics.counts[t][p];
            errors += c;
            if (t / nz == p / nz && std::abs(t % nz - p % nz) == 1) adjacent += c;
        }
    return errors == 0 ? 1.0 : static_cast<double>(adjacent) / static_cast<double>(errors);
}

TrainResult train(const ClassifierModel<float>& initial, const LabeledImages& train_set,
                  const LabeledImages& val_set, const TrainConfig& config) {
    config.validate();
    require(initial.input_size() == config.input_size, "train: model input size differs from config");
    require(sample_count(train_set) > 0, "train: empty training split");
    require(train_set.images.shape[2] == initial.input_size(), "train: image size mismatch");
    for (int l : train_set.labels)
        require(l >= 0 && l < initial.classes(), "train: label outside the model head");

    TrainResult res{initial, initial, 0, {}, {}};
    double best_acc = -1.0;
    const std::size_t n = sample_count(train_set);
    std::vector<std::size_t> order(n);

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng shuffle_rng(derive_seed(config.seed, {1, static_cast<std::uint64_t>(epoch)}));
        shuffle_rng.shuffle(std::span(order));

        double loss_sum = 0.0;
        long long correct = 0;
        int batch_index = 0;
        for (std::size_t start = 0; start < n; start += config.batch_size, ++batch_index) {
            const std::size_t end = std::min(n, start + static_cast<std::size_t>(config.batch_size));
            const std::span<const std::size_t> rows(order.data() + start, end - start);
            std::vector<int> labels;
            for (std::size_t r : rows) labels.push_back(train_set.labels[r]);

            const auto seed = derive_seed(config.seed, {2, static_cast<std::uint64_t>(epoch),
                                                        static_cast<std::uint64_t>(batch_index)});
            const auto fwd = forward(res.model, gather(train_set, rows), Mode::train, seed, config.threads);
            loss_sum += cross_entropy(fwd.probs, labels);
            for (std::size_t i = 0; i < rows.size(); ++i)
                correct += argmax_row(fwd.probs, static_cast<int>(i)) == labels[i];

            auto grads = backward(res.model, fwd.cache, fwd.probs, labels, config.threads);
            const float scale = 1.0f / static_cast<float>(rows.size());
            for (auto& g : grads)
                for (float& v : g.values) v *= scale;
            adam_step(res.model, res.adam, grads, config.adam);
        }

        EpochMetrics em;
        em.epoch = epoch;
        em.train_loss = loss_sum / static_cast<double>(n);
        em.train_accuracy = static_cast<double>(correct) / static_cast<double>(n);
        if (sample_count(val_set) > 0) {
            const auto vm = evaluate(res.model, val_set, config.threads);
            em.val_loss = vm.loss;
            em.val_accuracy = vm.accuracy;
        }
        res.history.push_back(em);
        if (em.val_accuracy > best_acc) {
            best_acc = em.val_accuracy;
            res.best_model = res.model;
            res.best_epoch = epoch;
        }
        if (config.verbose) {
            std::cerr << "epoch " << epoch << " train_loss " << em.train_loss << " train_acc "
                      << em.train_accuracy << " val_loss " << em.val_loss << " val_acc "
                      << em.val_accuracy << '\n';
        }
        if (!config.checkpoint.empty())
            write_checkpoint(config.checkpoint, {res.model, res.adam, res.history});
    }
    return res;
}

TrainResult train(const ClassifierModel<float>& initial, const fs::path& root,
                  const TrainConfig& config) {
    config.validate();
    const auto manifest = load_manifest(root);
    require(manifest.space.class_count() == initial.classes(),
            "train: model head has " + std::to_string(initial.classes()) + " classes, dataset has " +
                std::to_string(manifest.space.class_count()));
    const auto train_set = load_split(root, manifest, "train", config.input_size, config.threads);
    const auto val_set = load_split(root, manifest, "val", config.input_size, config.threads);
    return train(initial, train_set, val_set, config);
}

}  // namespace oam
