#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace oam {

/// Row-major dense array.
template <class T>
struct Tensor {
    std::vector<int> shape;
    std::vector<T> values;

    Tensor() = default;
    explicit Tensor(std::vector<int> s);

    std::size_t size() const { return values.size(); }
};

enum class Mode { train, eval };

/// conv3x3(16) relu maxpool2 | conv3x3(32) relu maxpool2 | conv3x3(64) relu
/// global-maxpool | dropout | dense(64 -> classes) | softmax.
///
/// Parameters are kept in a fixed order: w1 b1 w2 b2 w3 b3 w4 b4, with conv
/// weights shaped (out, in, 3, 3) and dense weights (classes, 64). Anything
/// that edits parameters must call touch() so stale forward caches are
/// rejected by backward().
template <class T>
class ClassifierModel {
public:
    static constexpr int kWidths[3] = {16, 32, 64};

    ClassifierModel() = default;
    ClassifierModel(int classes, int input_size = 64, double dropout = 0.5);

    int classes() const { return classes_; }
    int input_size() const { return input_size_; }
    double dropout() const { return dropout_; }
    std::string layer_spec() const;

    std::vector<Tensor<T>>& params() { return params_; }
    const std::vector<Tensor<T>>& params() const { return params_; }
    std::size_t parameter_count() const;

    /// He-uniform weights (limit sqrt(6 / fan_in)), zero biases.
    void init_he_uniform(std::uint64_t seed);
    void touch() { ++version_; }
    std::uint64_t version() const { return version_; }
    std::uint64_t id() const { return id_; }

    template <class U>
    ClassifierModel<U> cast() const;

private:
    int classes_ = 0;
    int input_size_ = 0;
    double dropout_ = 0.5;
    std::vector<Tensor<T>> params_;
    std::uint64_t id_ = 0;
    std::uint64_t version_ = 0;

    template <class U>
    friend class ClassifierModel;
};

/// Intermediates of one sample, kept for backward.
template <class T>
struct SampleCache {
    std::vector<T> input, a1, p1, a2, p2, a3, feature;
    std::vector<int> i1, i2, i3;  // argmax of each pooling window
    std::vector<T> mask;          // 0 or 1/(1-p) per feature, empty in eval mode
};

template <class T>
struct ForwardCache {
    std::uint64_t model_id = 0;
    std::uint64_t version = 0;
    Mode mode = Mode::eval;
    std::vector<SampleCache<T>> samples;
};

template <class T>
struct ForwardResult {
    Tensor<T> logits;  // (B, C)
    Tensor<T> probs;   // (B, C)
    ForwardCache<T> cache;
};

/// batch is (B, 1, S, S) with S the model's input size. In train mode sample
/// b uses the dropout mask drawn from derive_seed(seed, {b}).
template <class T>
ForwardResult<T> forward(const ClassifierModel<T>& model, const Tensor<T>& batch, Mode mode,
                         std::uint64_t seed, int threads = 1);

/// Numerically stable softmax of each row of a (B, C) tensor.
template <class T>
Tensor<T> softmax(const Tensor<T>& logits);

/// Summed categorical cross-entropy with probabilities clamped at 1e-12.
template <class T>
double cross_entropy(const Tensor<T>& probs, const std::vector<int>& labels);

/// probs - onehot(labels), the gradient of the summed loss at the logits.
template <class T>
Tensor<T> logit_gradient(const Tensor<T>& probs, const std::vector<int>& labels);

/// Gradients of the summed loss, shaped like model.params(). Per-sample
/// gradients are added in sample order, so the result does not depend on
/// `threads`. The cache must come from a train-mode forward of this model
/// at its current version.
template <class T>
std::vector<Tensor<T>> backward(const ClassifierModel<T>& model, const ForwardCache<T>& cache,
                                const Tensor<T>& probs, const std::vector<int>& labels,
                                int threads = 1);

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    void validate() const;
};

template <class T>
struct AdamState {
    std::int64_t t = 0;
    std::vector<Tensor<T>> m, v;
};

/// One bias-corrected Adam update. An empty state is initialized to zeros.
template <class T>
void adam_step(ClassifierModel<T>& model, AdamState<T>& state, const std::vector<Tensor<T>>& grads,
               const AdamConfig& config);

}  // namespace oam
