#include "oam/classifier.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <numeric>
#include <sstream>

#include "oam/errors.hpp"
#include "oam/parallel.hpp"
#include "oam/rng.hpp"

namespace oam {

namespace {

std::atomic<std::uint64_t> g_next_model_id{1};

enum Param { W1, B1, W2, B2, W3, B3, W4, B4 };

template <class T>
void check_finite([[maybe_unused]] const std::vector<T>& v) {
#ifndef NDEBUG
    for (T x : v) assert(std::isfinite(x));
#endif
}

// 3x3 convolution, stride 1, zero padding 1: (cin, s, s) -> (cout, s, s).
template <class T>
void conv_forward(const T* in, int cin, int s, const T* w, const T* b, int cout, T* out) {
    const std::size_t plane = static_cast<std::size_t>(s) * s;
    for (int co = 0; co < cout; ++co) {
        T* o = out + co * plane;
        std::fill(o, o + plane, b[co]);
        for (int ci = 0; ci < cin; ++ci) {
            const T* src = in + ci * plane;
            const T* k = w + (static_cast<std::size_t>(co) * cin + ci) * 9;
            for (int ky = 0; ky < 3; ++ky) {
                const int y0 = std::max(0, 1 - ky), y1 = std::min(s, s + 1 - ky);
                for (int kx = 0; kx < 3; ++kx) {
                    const T wk = k[ky * 3 + kx];
                    const int x0 = std::max(0, 1 - kx), x1 = std::min(s, s + 1 - kx);
                    for (int y = y0; y < y1; ++y) {
                        const T* srow = src + (y + ky - 1) * s + (kx - 1);
                        T* orow = o + y * s;
                        for (int x = x0; x < x1; ++x) orow[x] += wk * srow[x];
                    }
                }
            }
        }
    }
}

// Accumulates dW, dB and (if din is non-null) dIn for conv_forward.
template <class T>
void conv_backward(const T* in, int cin, int s, const T* w, int cout, const T* dout, T* dw, T* db,
                   T* din) {
    const std::size_t plane = static_cast<std::size_t>(s) * s;
    for (int co = 0; co < cout; ++co) {
        const T* g = dout + co * plane;
        T sum = 0;
        for (std::size_t i = 0; i < plane; ++i) sum += g[i];
        db[co] += sum;
        for (int ci = 0; ci < cin; ++ci) {
            const T* src = in + ci * plane;
            T* dsrc = din ? din + ci * plane : nullptr;
            const std::size_t kbase = (static_cast<std::size_t>(co) * cin + ci) * 9;
            for (int ky = 0; ky < 3; ++ky) {
                const int y0 = std::max(0, 1 - ky), y1 = std::min(s, s + 1 - ky);
                for (int kx = 0; kx < 3; ++kx) {
                    const T wk = w[kbase + ky * 3 + kx];
                    const int x0 = std::max(0, 1 - kx), x1 = std::min(s, s + 1 - kx);
                    T acc = 0;
                    for (int y = y0; y < y1; ++y) {
                        const T* srow = src + (y + ky - 1) * s + (kx - 1);
                        const T* grow = g + y * s;
                        for (int x = x0; x < x1; ++x) acc += srow[x] * grow[x];
                        if (dsrc) {
                            T* drow = dsrc + (y + ky - 1) * s + (kx - 1);
                            for (int x = x0; x < x1; ++x) drow[x] += wk * grow[x];
                        }
                    }
                    dw[kbase + ky * 3 + kx] += acc;
                }
            }
        }
    }
}

template <class T>
void relu(std::vector<T>& v) {
    for (T& x : v) x = x > T(0) ? x : T(0);
}

// 2x2 max pooling of (c, s, s); records the flat argmax of each window.
template <class T>
void maxpool2(const std::vector<T>& in, int c, int s, std::vector<T>& out, std::vector<int>& idx) {
    const int h = s / 2;
    out.assign(static_cast<std::size_t>(c) * h * h, T(0));
    idx.assign(out.size(), 0);
    for (int ch = 0; ch < c; ++ch) {
        const std::size_t base = static_cast<std::size_t>(ch) * s * s;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < h; ++x) {
                int best = static_cast<int>(base) + 2 * y * s + 2 * x;
                for (int dy = 0; dy < 2; ++dy)
                    for (int dx = 0; dx < 2; ++dx) {
                        const int j = static_cast<int>(base) + (2 * y + dy) * s + 2 * x + dx;
                        if (in[j] > in[best]) best = j;
                    }
                const std::size_t o = (static_cast<std::size_t>(ch) * h + y) * h + x;
                out[o] = in[best];
                idx[o] = best;
            }
        }
    }
}

template <class T>
SampleCache<T> forward_sample(const ClassifierModel<T>& model, const T* x, Mode mode,
                              std::uint64_t seed, T* logits) {
    const auto& P = model.params();
    const int s = model.input_size();
    const int c1 = ClassifierModel<T>::kWidths[0];
    const int c2 = ClassifierModel<T>::kWidths[1];
    const int c3 = ClassifierModel<T>::kWidths[2];
    SampleCache<T> sc;
    sc.input.assign(x, x + static_cast<std::size_t>(s) * s);

    sc.a1.resize(static_cast<std::size_t>(c1) * s * s);
    conv_forward(sc.input.data(), 1, s, P[W1].values.data(), P[B1].values.data(), c1, sc.a1.data());
    relu(sc.a1);
    maxpool2(sc.a1, c1, s, sc.p1, sc.i1);

    const int s2 = s / 2;
    sc.a2.resize(static_cast<std::size_t>(c2) * s2 * s2);
    conv_forward(sc.p1.data(), c1, s2, P[W2].values.data(), P[B2].values.data(), c2, sc.a2.data());
    relu(sc.a2);
    maxpool2(sc.a2, c2, s2, sc.p2, sc.i2);

    const int s3 = s2 / 2;
    const std::size_t plane3 = static_cast<std::size_t>(s3) * s3;
    sc.a3.resize(c3 * plane3);
    conv_forward(sc.p2.data(), c2, s3, P[W3].values.data(), P[B3].values.data(), c3, sc.a3.data());
    relu(sc.a3);

    sc.feature.resize(c3);
    sc.i3.resize(c3);
    for (int ch = 0; ch < c3; ++ch) {
        const auto first = sc.a3.begin() + ch * plane3;
        const auto it = std::max_element(first, first + plane3);
        sc.feature[ch] = *it;
        sc.i3[ch] = static_cast<int>(it - sc.a3.begin());
    }

    if (mode == Mode::train && model.dropout() > 0.0) {
        Rng rng(seed);
        const double p = model.dropout();
        const T keep = static_cast<T>(1.0 / (1.0 - p));
        sc.mask.resize(c3);
        for (int ch = 0; ch < c3; ++ch) {
            sc.mask[ch] = rng.uniform() < p ? T(0) : keep;
            sc.feature[ch] *= sc.mask[ch];
        }
    }

    const int classes = model.classes();
    const T* w4 = P[W4].values.data();
    for (int c = 0; c < classes; ++c) {
        T acc = P[B4].values[c];
        for (int j = 0; j < c3; ++j) acc += w4[c * c3 + j] * sc.feature[j];
        logits[c] = acc;
    }
    check_finite(sc.a1);
    check_finite(sc.a3);
    return sc;
}

template <class T>
void backward_sample(const ClassifierModel<T>& model, const SampleCache<T>& sc, const T* dlogits,
                     std::vector<Tensor<T>>& g) {
    const auto& P = model.params();
    const int s = model.input_size(), s2 = s / 2, s3 = s2 / 2;
    const int c1 = ClassifierModel<T>::kWidths[0];
    const int c2 = ClassifierModel<T>::kWidths[1];
    const int c3 = ClassifierModel<T>::kWidths[2];
    const int classes = model.classes();

    std::vector<T> dfeat(c3, T(0));
    const T* w4 = P[W4].values.data();
    for (int c = 0; c < classes; ++c) {
        g[B4].values[c] += dlogits[c];
        for (int j = 0; j < c3; ++j) {
            g[W4].values[c * c3 + j] += dlogits[c] * sc.feature[j];
            dfeat[j] += dlogits[c] * w4[c * c3 + j];
        }
    }
    if (!sc.mask.empty())
        for (int j = 0; j < c3; ++j) dfeat[j] *= sc.mask[j];

    std::vector<T> da3(sc.a3.size(), T(0));
    for (int ch = 0; ch < c3; ++ch)
        if (sc.a3[sc.i3[ch]] > T(0)) da3[sc.i3[ch]] = dfeat[ch];

    std::vector<T> dp2(sc.p2.size(), T(0));
    conv_backward(sc.p2.data(), c2, s3, P[W3].values.data(), c3, da3.data(), g[W3].values.data(),
                  g[B3].values.data(), dp2.data());

    std::vector<T> da2(sc.a2.size(), T(0));
    for (std::size_t i = 0; i < dp2.size(); ++i)
        if (sc.a2[sc.i2[i]] > T(0)) da2[sc.i2[i]] += dp2[i];

    std::vector<T> dp1(sc.p1.size(), T(0));
    conv_backward(sc.p1.data(), c1, s2, P[W2].values.data(), c2, da2.data(), g[W2].values.data(),
                  g[B2].values.data(), dp1.data());

    std::vector<T> da1(sc.a1.size(), T(0));
    for (std::size_t i = 0; i < dp1.size(); ++i)
        if (sc.a1[sc.i1[i]] > T(0)) da1[sc.i1[i]] += dp1[i];

    conv_backward<T>(sc.input.data(), 1, s, P[W1].values.data(), c1, da1.data(), g[W1].values.data(),
                     g[B1].values.data(), nullptr);
}

template <class T>
std::vector<Tensor<T>> zeros_like(const std::vector<Tensor<T>>& params) {
    std::vector<Tensor<T>> out;
    out.reserve(params.size());
    for (const auto& p : params) out.emplace_back(p.shape);
    return out;
}

}  // namespace

template <class T>
Tensor<T>::Tensor(std::vector<int> s) : shape(std::move(s)) {
    std::size_t count = 1;
    for (int d : shape) {
        require(d >= 0, "tensor: negative dimension");
        count *= static_cast<std::size_t>(d);
    }
    values.assign(count, T(0));
}

template <class T>
ClassifierModel<T>::ClassifierModel(int classes, int input_size, double dropout)
    : classes_(classes), input_size_(input_size), dropout_(dropout), id_(g_next_model_id++) {
    require(classes >= 2, "model: need at least two classes");
    require(input_size >= 4 && input_size % 4 == 0, "model: input size must be a multiple of 4");
    require(dropout >= 0.0 && dropout < 1.0, "model: dropout must be in [0, 1)");
    const int c1 = kWidths[0], c2 = kWidths[1], c3 = kWidths[2];
    params_.emplace_back(std::vector<int>{c1, 1, 3, 3});
    params_.emplace_back(std::vector<int>{c1});
    params_.emplace_back(std::vector<int>{c2, c1, 3, 3});
    params_.emplace_back(std::vector<int>{c2});
    params_.emplace_back(std::vector<int>{c3, c2, 3, 3});
    params_.emplace_back(std::vector<int>{c3});
    params_.emplace_back(std::vector<int>{classes, c3});
    params_.emplace_back(std::vector<int>{classes});
}

template <class T>
std::string ClassifierModel<T>::layer_spec() const {
    std::ostringstream os;
    os << "conv3x3:" << kWidths[0] << ",relu,maxpool2,conv3x3:" << kWidths[1]
       << ",relu,maxpool2,conv3x3:" << kWidths[2] << ",relu,globalmaxpool,dropout:" << dropout_
       << ",dense:" << classes_ << ",softmax";
    return os.str();
}

template <class T>
std::size_t ClassifierModel<T>::parameter_count() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += p.size();
    return n;
}

template <class T>
void ClassifierModel<T>::init_he_uniform(std::uint64_t seed) {
    Rng rng(seed);
    for (std::size_t i = 0; i < params_.size(); i += 2) {
        auto& w = params_[i];
        const int fan_in = static_cast<int>(w.size() / static_cast<std::size_t>(w.shape[0]));
        const double limit = std::sqrt(6.0 / fan_in);
        for (T& v : w.values) v = static_cast<T>(rng.uniform(-limit, limit));
        std::fill(params_[i + 1].values.begin(), params_[i + 1].values.end(), T(0));
    }
    touch();
}

template <class T>
template <class U>
ClassifierModel<U> ClassifierModel<T>::cast() const {
    ClassifierModel<U> out(classes_, input_size_, dropout_);
    for (std::size_t i = 0; i < params_.size(); ++i)
        std::transform(params_[i].values.begin(), params_[i].values.end(),
                       out.params_[i].values.begin(), [](T v) { return static_cast<U>(v); });
    out.touch();
    return out;
}

template <class T>
ForwardResult<T> forward(const ClassifierModel<T>& model, const Tensor<T>& batch, Mode mode,
                         std::uint64_t seed, int threads) {
    const int s = model.input_size();
    require(batch.shape.size() == 4 && batch.shape[1] == 1 && batch.shape[2] == s &&
                batch.shape[3] == s,
            "forward: batch must be (B, 1, " + std::to_string(s) + ", " + std::to_string(s) + ")");
    const int b = batch.shape[0];
    require(b >= 1, "forward: empty batch");
    const int classes = model.classes();

    ForwardResult<T> out;
    out.logits = Tensor<T>({b, classes});
    out.cache.model_id = model.id();
    out.cache.version = model.version();
    out.cache.mode = mode;
    out.cache.samples.resize(b);
    const std::size_t stride = static_cast<std::size_t>(s) * s;
    parallel_for(static_cast<std::size_t>(b), threads, [&](std::size_t i) {
        out.cache.samples[i] =
            forward_sample(model, batch.values.data() + i * stride, mode, derive_seed(seed, {i}),
                           out.logits.values.data() + i * classes);
    });
    out.probs = softmax(out.logits);
    return out;
}

template <class T>
Tensor<T> softmax(const Tensor<T>& logits) {
    require(logits.shape.size() == 2, "softmax: expected (B, C)");
    const int b = logits.shape[0], c = logits.shape[1];
    Tensor<T> out(logits.shape);
    for (int i = 0; i < b; ++i) {
        const T* z = logits.values.data() + static_cast<std::size_t>(i) * c;
        T* p = out.values.data() + static_cast<std::size_t>(i) * c;
        const T mx = *std::max_element(z, z + c);
        T sum = 0;
        for (int j = 0; j < c; ++j) sum += (p[j] = std::exp(z[j] - mx));
        for (int j = 0; j < c; ++j) p[j] /= sum;
    }
    return out;
}

template <class T>
double cross_entropy(const Tensor<T>& probs, const std::vector<int>& labels) {
    require(probs.shape.size() == 2, "cross_entropy: expected (B, C)");
    const int b = probs.shape[0], c = probs.shape[1];
    require(static_cast<int>(labels.size()) == b, "cross_entropy: label count mismatch");
    double loss = 0.0;
    for (int i = 0; i < b; ++i) {
        require(labels[i] >= 0 && labels[i] < c, "cross_entropy: label out of range");
        const double p = probs.values[static_cast<std::size_t>(i) * c + labels[i]];
        loss -= std::log(std::max(p, 1e-12));
    }
    return loss;
}

template <class T>
Tensor<T> logit_gradient(const Tensor<T>& probs, const std::vector<int>& labels) {
    require(probs.shape.size() == 2, "logit_gradient: expected (B, C)");
    const int b = probs.shape[0], c = probs.shape[1];
    require(static_cast<int>(labels.size()) == b, "logit_gradient: label count mismatch");
    Tensor<T> g = probs;
    for (int i = 0; i < b; ++i) {
        require(labels[i] >= 0 && labels[i] < c, "logit_gradient: label out of range");
        g.values[static_cast<std::size_t>(i) * c + labels[i]] -= T(1);
    }
    return g;
}

template <class T>
std::vector<Tensor<T>> backward(const ClassifierModel<T>& model, const ForwardCache<T>& cache,
                                const Tensor<T>& probs, const std::vector<int>& labels,
                                int threads) {
    require(cache.mode == Mode::train, "backward: cache must come from a train-mode forward");
    require(cache.model_id == model.id() && cache.version == model.version(),
            "backward: stale forward cache (model changed since forward)");
    const int b = static_cast<int>(cache.samples.size());
    require(probs.shape.size() == 2 && probs.shape[0] == b && probs.shape[1] == model.classes(),
            "backward: probs do not match the cache");
    const Tensor<T> dlogits = logit_gradient(probs, labels);

    std::vector<std::vector<Tensor<T>>> per(b);
    parallel_for(static_cast<std::size_t>(b), threads, [&](std::size_t i) {
        per[i] = zeros_like(model.params());
        backward_sample(model, cache.samples[i], dlogits.values.data() + i * model.classes(), per[i]);
    });
    std::vector<Tensor<T>> grads = zeros_like(model.params());
    for (int i = 0; i < b; ++i)
        for (std::size_t p = 0; p < grads.size(); ++p) {
            auto& dst = grads[p].values;
            const auto& src = per[i][p].values;
            for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
        }
    return grads;
}

void AdamConfig::validate() const {
    require(std::isfinite(lr) && lr > 0.0, "adam: learning rate must be positive");
    require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0, "adam: betas must be in [0, 1)");
    require(eps > 0.0, "adam: eps must be positive");
}

template <class T>
void adam_step(ClassifierModel<T>& model, AdamState<T>& state, const std::vector<Tensor<T>>& grads,
               const AdamConfig& config) {
    config.validate();
    auto& params = model.params();
    require(grads.size() == params.size(), "adam: gradient count mismatch");
    if (state.m.empty()) {
        state.m = zeros_like(params);
        state.v = zeros_like(params);
    }
    require(state.m.size() == params.size() && state.v.size() == params.size(),
            "adam: state does not match the model");
    ++state.t;
    const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.t));
    const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.t));
    const T b1 = static_cast<T>(config.beta1), b2 = static_cast<T>(config.beta2);
    for (std::size_t p = 0; p < params.size(); ++p) {
        require(grads[p].size() == params[p].size() && state.m[p].size() == params[p].size(),
                "adam: shape mismatch");
        auto& w = params[p].values;
        auto& m = state.m[p].values;
        auto& v = state.v[p].values;
        const auto& g = grads[p].values;
        for (std::size_t k = 0; k < w.size(); ++k) {
            m[k] = b1 * m[k] + (T(1) - b1) * g[k];
            v[k] = b2 * v[k] + (T(1) - b2) * g[k] * g[k];
            const double mhat = m[k] / c1;
            const double vhat = v[k] / c2;
            w[k] -= static_cast<T>(config.lr * mhat / (std::sqrt(vhat) + config.eps));
        }
    }
    model.touch();
}

#define OAM_INSTANTIATE(T)                                                                        \
    template struct Tensor<T>;                                                                    \
    template class ClassifierModel<T>;                                                            \
    template ForwardResult<T> forward(const ClassifierModel<T>&, const Tensor<T>&, Mode,          \
                                      std::uint64_t, int);                                        \
    template Tensor<T> softmax(const Tensor<T>&);                                                 \
    template double cross_entropy(const Tensor<T>&, const std::vector<int>&);                     \
    template Tensor<T> logit_gradient(const Tensor<T>&, const std::vector<int>&);                 \
    template std::vector<Tensor<T>> backward(const ClassifierModel<T>&, const ForwardCache<T>&,   \
                                             const Tensor<T>&, const std::vector<int>&, int);     \
    template void adam_step(ClassifierModel<T>&, AdamState<T>&, const std::vector<Tensor<T>>&,    \
                            const AdamConfig&);

OAM_INSTANTIATE(float)
OAM_INSTANTIATE(double)

template ClassifierModel<double> ClassifierModel<float>::cast<double>() const;
template ClassifierModel<float> ClassifierModel<double>::cast<float>() const;
template ClassifierModel<float> ClassifierModel<float>::cast<float>() const;

}  // namespace oam
