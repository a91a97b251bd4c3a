#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "oam/binary.hpp"
#include "oam/errors.hpp"
#include "oam/training.hpp"

namespace oam {

namespace fs = std::filesystem;

namespace {

void put_tensor(std::ostream& os, const Tensor<float>& t) {
    bin::put_u32(os, static_cast<std::uint32_t>(t.shape.size()));
    for (int d : t.shape) bin::put_u32(os, static_cast<std::uint32_t>(d));
    for (float v : t.values) bin::put_f32(os, v);
}

// Reads a tensor and checks it against the expected shape.
void get_tensor(std::istream& is, Tensor<float>& t) {
    const auto rank = bin::get_u32(is);
    require(rank == t.shape.size(), "checkpoint: tensor rank mismatch");
    for (int d : t.shape) require(bin::get_u32(is) == static_cast<std::uint32_t>(d),
                                  "checkpoint: tensor shape mismatch");
    for (float& v : t.values) {
        v = bin::get_f32(is);
        require(std::isfinite(v), "checkpoint: non-finite parameter");
    }
}

}  // namespace

void write_checkpoint(const fs::path& path, const Checkpoint& ckpt) {
    const auto& m = ckpt.model;
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open for writing: " + tmp.string());
        os.write("OAMC", 4);
        bin::put_u32(os, kCheckpointVersion);
        bin::put_u32(os, static_cast<std::uint32_t>(m.classes()));
        bin::put_u32(os, static_cast<std::uint32_t>(m.input_size()));
        bin::put_f64(os, m.dropout());
        bin::put_string(os, m.layer_spec());
        bin::put_u32(os, static_cast<std::uint32_t>(m.params().size()));
        for (const auto& p : m.params()) put_tensor(os, p);

        bin::put_u64(os, static_cast<std::uint64_t>(ckpt.adam.t));
        const bool has_moments = !ckpt.adam.m.empty();
        bin::put_u32(os, has_moments ? 1u : 0u);
        if (has_moments) {
            for (const auto& t : ckpt.adam.m) put_tensor(os, t);
            for (const auto& t : ckpt.adam.v) put_tensor(os, t);
        }

        bin::put_u32(os, static_cast<std::uint32_t>(ckpt.history.size()));
        for (const auto& e : ckpt.history) {
            bin::put_u32(os, static_cast<std::uint32_t>(e.epoch));
            bin::put_f64(os, e.train_loss);
            bin::put_f64(os, e.train_accuracy);
            bin::put_f64(os, e.val_loss);
            bin::put_f64(os, e.val_accuracy);
        }
        if (!os) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

Checkpoint read_checkpoint(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for reading: " + path.string());
    char magic[4];
    bin::read_exact(is, magic, 4);
    require(std::string(magic, 4) == "OAMC", "not an OAMC checkpoint: " + path.string());
    const auto version = bin::get_u32(is);
    require(version == kCheckpointVersion, "checkpoint: unsupported version " + std::to_string(version));
    const int classes = static_cast<int>(bin::get_u32(is));
    const int input_size = static_cast<int>(bin::get_u32(is));
    const double dropout = bin::get_f64(is);

    Checkpoint ck{ClassifierModel<float>(classes, input_size, dropout), {}, {}};
    require(bin::get_string(is) == ck.model.layer_spec(), "checkpoint: layer spec mismatch");
    require(bin::get_u32(is) == ck.model.params().size(), "checkpoint: parameter count mismatch");
    for (auto& p : ck.model.params()) get_tensor(is, p);
    ck.model.touch();

    ck.adam.t = static_cast<std::int64_t>(bin::get_u64(is));
    if (bin::get_u32(is) != 0) {
        for (auto* moments : {&ck.adam.m, &ck.adam.v}) {
            for (const auto& p : ck.model.params()) {
                moments->emplace_back(p.shape);
                get_tensor(is, moments->back());
            }
        }
    }
    const auto epochs = bin::get_u32(is);
    require(epochs < 1000000, "checkpoint: implausible history length");
    for (std::uint32_t i = 0; i < epochs; ++i) {
        EpochMetrics e;
        e.epoch = static_cast<int>(bin::get_u32(is));
        e.train_loss = bin::get_f64(is);
        e.train_accuracy = bin::get_f64(is);
        e.val_loss = bin::get_f64(is);
        e.val_accuracy = bin::get_f64(is);
        ck.history.push_back(e);
    }
    return ck;
}

std::string metrics_json(const EvalMetrics& metrics, const LabelSpace& space) {
    using nlohmann::json;
    json per_class = json::array();
    for (int c = 0; c < static_cast<int>(metrics.per_class_accuracy.size()); ++c) {
        const double a = metrics.per_class_accuracy[c];
        per_class.push_back({{"class_index", c},
                             {"ell", space.ell_of(c)},
                             {"z", space.z_of(c)},
                             {"accuracy", std::isnan(a) ? json(nullptr) : json(a)}});
    }
    const json doc = {
        {"accuracy", metrics.accuracy},
        {"loss", metrics.loss},
        {"adjacent_z_error_fraction", adjacent_z_error_fraction(metrics, space)},
        {"per_class", per_class},
        {"confusion", metrics.confusion},
        {"units", {{"z", "m"}, {"loss", "nats per sample"}}},
    };
    return doc.dump(1) + "\n";
}

std::string confusion_csv(const EvalMetrics& metrics) {
    std::ostringstream os;
    os << std::setprecision(17);
    const std::size_t c = metrics.confusion.size();
    os << "true\\predicted";
    for (std::size_t j = 0; j < c; ++j) os << ',' << j;
    os << '\n';
    for (std::size_t i = 0; i < c; ++i) {
        os << i;
        for (std::size_t j = 0; j < c; ++j) os << ',' << metrics.confusion[i][j];
        os << '\n';
    }
    return os.str();
}

}  // namespace oam
