#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "oam/classifier.hpp"
#include "oam/dataset.hpp"

namespace oam {

struct TrainConfig {
    AdamConfig adam;
    int batch_size = 32;
    int epochs = 30;
    double dropout = 0.5;
    std::uint64_t seed = 0;
    int input_size = 64;
    int threads = 1;
    std::filesystem::path checkpoint;  // written after every epoch when set
    bool verbose = false;

    void validate() const;
};

struct EpochMetrics {
    int epoch = 0;  // 1-based
    double train_loss = 0.0;  // per sample
    double train_accuracy = 0.0;
    double val_loss = 0.0;
    double val_accuracy = 0.0;
};

struct EvalMetrics {
    double accuracy = 0.0;
    double loss = 0.0;  // per sample
    std::vector<std::vector<long long>> counts;   // [true][predicted]
    std::vector<std::vector<double>> confusion;   // rows sum to 1, or all zero
    std::vector<double> per_class_accuracy;       // NaN for absent classes
    std::vector<int> predictions;
};

/// Images of one split, area-downsampled to size x size with pixels in [0, 1].
struct LabeledImages {
    Tensor<float> images;  // (N, 1, size, size)
    std::vector<int> labels;
};

LabeledImages load_split(const std::filesystem::path& root, const DatasetManifest& manifest,
                         const std::string& split, int size, int threads = 1);

/// Eval-mode accuracy, loss and confusion over a set of images.
EvalMetrics evaluate(const ClassifierModel<float>& model, const LabeledImages& data, int threads = 1);
EvalMetrics evaluate(const ClassifierModel<float>& model, const std::filesystem::path& root,
                     const std::string& split, int threads = 1);

/// Normalized confusion and accuracy from (true, predicted) pairs.
EvalMetrics metrics_from_predictions(const std::vector<int>& truth, const std::vector<int>& predicted,
                                     int classes);

/// Fraction of misclassified samples whose prediction has the same ell and
/// an adjacent z rank. 1 when there are no errors.
double adjacent_z_error_fraction(const EvalMetrics& metrics, const LabelSpace& space);

struct TrainResult {
    ClassifierModel<float> model;       // after the last epoch
    ClassifierModel<float> best_model;  // highest validation accuracy
    int best_epoch = 0;                 // 0 when no epoch ran
    AdamState<float> adam;
    std::vector<EpochMetrics> history;
};

/// Mini-batch Adam on the mean batch loss. Each epoch shuffles the training
/// set with derive_seed(seed, {1, epoch}); batch k of epoch e draws dropout
/// masks from derive_seed(seed, {2, e, k}). Validation runs in eval mode.
TrainResult train(const ClassifierModel<float>& initial, const std::filesystem::path& root,
                  const TrainConfig& config);
TrainResult train(const ClassifierModel<float>& initial, const LabeledImages& train_set,
                  const LabeledImages& val_set, const TrainConfig& config);

/// "OAMC" checkpoint: version u32 | classes u32 | input size u32 | dropout f64 |
/// layer spec | parameter tensors (rank, dims, f32 values) | Adam t and
/// moments | metrics history.
struct Checkpoint {
    ClassifierModel<float> model;
    AdamState<float> adam;
    std::vector<EpochMetrics> history;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::filesystem::path& path);

/// Metrics as JSON text and the normalized confusion matrix as CSV.
std::string metrics_json(const EvalMetrics& metrics, const LabelSpace& space);
std::string confusion_csv(const EvalMetrics& metrics);

}  // namespace oam
