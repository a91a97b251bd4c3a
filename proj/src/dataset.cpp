#include "oam/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "oam/errors.hpp"
#include "oam/field_io.hpp"
#include "oam/hash.hpp"
#include "oam/parallel.hpp"
#include "oam/propagate.hpp"
#include "oam/rng.hpp"

namespace oam {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kZTolerance = 1e-9;

std::string read_file(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for reading: " + path.string());
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json sim_json(const SimConfig& s) {
    return {
        {"grid_n", s.grid.n},
        {"grid_extent", s.grid.extent},
        {"waist", s.waist},
        {"wavelength", s.wavelength},
        {"out_size", s.out_size},
        {"crop_extent", s.crop_extent},
        {"max_offset", s.max_offset},
        {"turbulence", s.turbulence},
        {"cn2", s.cn2},
        {"kappa0", s.kappa0},
        {"kappam", number_or_null(s.kappam)},
        {"screen_z", s.screen_z ? json(*s.screen_z) : json(nullptr)},
        {"band_limit", s.band_limit},
    };
}

json units_json() {
    return {
        {"z", "m"},           {"offset_x", "m"},       {"offset_y", "m"},
        {"screen_z", "m"},    {"grid_extent", "m"},    {"waist", "m"},
        {"wavelength", "m"},  {"crop_extent", "m"},    {"max_offset", "m"},
        {"cn2", "m^-2/3"},    {"kappa0", "rad/m"},     {"kappam", "rad/m"},
        {"out_size", "px"},   {"grid_n", "samples"},
    };
}

json record_json(const SampleRecord& r) {
    return {
        {"path", r.path},
        {"class_index", r.class_index},
        {"ell", r.ell},
        {"z", r.z},
        {"ordinal", r.ordinal},
        {"seed", r.seed},
        {"offset_x", r.aug.offset_x},
        {"offset_y", r.aug.offset_y},
        {"turbulence", r.aug.turbulence},
        {"cn2", r.aug.cn2},
        {"screen_z", r.aug.screen_z},
        {"screen_seed", r.aug.screen_seed},
        {"sha256", r.sha256},
    };
}

SampleRecord record_from_json(const json& j) {
    SampleRecord r;
    r.path = j.at("path").get<std::string>();
    r.class_index = j.at("class_index").get<int>();
    r.ell = j.at("ell").get<int>();
    r.z = j.at("z").get<double>();
    r.ordinal = j.at("ordinal").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.aug.offset_x = j.at("offset_x").get<double>();
    r.aug.offset_y = j.at("offset_y").get<double>();
    r.aug.turbulence = j.at("turbulence").get<bool>();
    r.aug.cn2 = j.at("cn2").get<double>();
    r.aug.screen_z = j.at("screen_z").get<double>();
    r.aug.screen_seed = j.at("screen_seed").get<std::uint64_t>();
    r.sha256 = j.at("sha256").get<std::string>();
    return r;
}

}  // namespace

int LabelSpace::ell_of(int index) const {
    require(index >= 0 && index < class_count(), "label space: class index out of range");
    return ells[static_cast<std::size_t>(index) / zs.size()];
}

double LabelSpace::z_of(int index) const {
    require(index >= 0 && index < class_count(), "label space: class index out of range");
    return zs[static_cast<std::size_t>(index) % zs.size()];
}

void LabelSpace::validate() const {
    require(!ells.empty() && !zs.empty(), "label space: ells and zs must be non-empty");
    for (std::size_t i = 0; i < ells.size(); ++i) {
        require(ells[i] >= 0 && ells[i] <= kMaxCharge, "label space: ell out of range");
        require(i == 0 || ells[i] > ells[i - 1], "label space: ells must be strictly increasing");
    }
    for (std::size_t i = 0; i < zs.size(); ++i) {
        require(std::isfinite(zs[i]) && zs[i] > 0.0, "label space: z must be positive");
        require(i == 0 || zs[i] - zs[i - 1] > kZTolerance,
                "label space: zs must be strictly increasing");
    }
}

LabelSpace default_label_space() {
    LabelSpace s;
    for (int l = 1; l <= 5; ++l) s.ells.push_back(l);
    for (int i = 0; i <= 12; ++i) s.zs.push_back((40 + 5 * i) / 100.0);
    return s;
}

int class_index(const LabelSpace& space, int ell, double z) {
    const auto li = std::find(space.ells.begin(), space.ells.end(), ell);
    require(li != space.ells.end(), "class_index: ell " + std::to_string(ell) + " not in label space");
    for (std::size_t zi = 0; zi < space.zs.size(); ++zi) {
        if (std::abs(space.zs[zi] - z) <= kZTolerance)
            return static_cast<int>((li - space.ells.begin()) * space.zs.size() + zi);
    }
    std::ostringstream msg;
    msg << "class_index: z = " << z << " m not in label space";
    throw ValidationError(msg.str());
}

void SimConfig::validate() const {
    require(grid.n >= 8 && grid.extent > 0.0, "sim: invalid grid");
    require(waist > 0.0 && wavelength > 0.0, "sim: waist and wavelength must be positive");
    require(out_size >= 8, "sim: out_size must be >= 8");
    require(crop_extent > 0.0 && crop_extent <= grid.extent, "sim: crop must fit inside the grid");
    require(max_offset >= 0.0 && max_offset < 0.5 * grid.extent, "sim: invalid offset bound");
    if (turbulence) {
        require(cn2 > 0.0, "sim: cn2 must be positive");
        require(kappa0 >= 0.0 && kappam > kappa0, "sim: kappam must exceed kappa0");
        require(!screen_z || *screen_z > 0.0, "sim: screen path length must be positive");
    }
}

IntensityMap synth_intensity(int ell, double z, const SimConfig& config, std::uint64_t seed,
                             Augmentation* aug) {
    config.validate();
    require(z > 0.0, "synth: z must be positive");
    Rng rng(seed);
    Augmentation a;
    a.offset_x = rng.uniform(-config.max_offset, config.max_offset);
    a.offset_y = rng.uniform(-config.max_offset, config.max_offset);
    a.turbulence = config.turbulence;
    a.screen_seed = derive_seed(seed, {1});

    const BeamParams beam{ell, config.waist, config.wavelength};
    ComplexField field = source_vortex(beam, config.grid, a.offset_x, a.offset_y);
    if (config.turbulence) {
        a.cn2 = config.cn2;
        a.screen_z = config.screen_z.value_or(z);
        const TurbulenceParams tp{config.cn2, a.screen_z, config.kappa0, config.kappam, a.screen_seed};
        field = apply_phase(field, generate_screen(config.grid, tp, config.wavelength));
    }
    if (aug) *aug = a;
    return intensity(propagate_spectral(field, z, config.band_limit));
}

Sample synth_sample(const LabelSpace& space, int ell, double z, const SimConfig& config,
                    std::uint64_t seed) {
    Sample s;
    s.class_index = class_index(space, ell, z);
    s.ell = ell;
    s.z = space.z_of(s.class_index);
    s.seed = seed;
    try {
        s.image = render_image(synth_intensity(ell, s.z, config, seed, &s.aug), config.out_size,
                               config.crop_extent);
    } catch (const ValidationError& e) {
        std::ostringstream msg;
        msg << "sample ell=" << ell << " z=" << z << " m: " << e.what();
        throw ValidationError(msg.str());
    }
    return s;
}

void DatasetConfig::validate() const {
    space.validate();
    sim.validate();
    for (int c : per_class) require(c >= 1, "dataset: per-class counts must be >= 1");
    require(!root.empty(), "dataset: output root is required");
}

std::uint64_t sample_seed(std::uint64_t master, int class_index, int split, int ordinal) {
    return derive_seed(master, {static_cast<std::uint64_t>(class_index),
                                static_cast<std::uint64_t>(split),
                                static_cast<std::uint64_t>(ordinal)});
}

DatasetManifest generate_dataset(const DatasetConfig& config) {
    config.validate();
    const fs::path manifest_path = config.root / "manifest.json";
    if (fs::exists(manifest_path)) {
        require(config.overwrite,
                "dataset: " + config.root.string() + " already holds a dataset (pass overwrite)");
        for (const char* split : kSplitNames) fs::remove_all(config.root / split);
        fs::remove(manifest_path);
    }

    struct Job {
        int split, cls, ordinal;
    };
    std::vector<Job> jobs;
    for (int cls = 0; cls < config.space.class_count(); ++cls)
        for (int split = 0; split < 3; ++split)
            for (int o = 0; o < config.per_class[split]; ++o) jobs.push_back({split, cls, o});

    for (int split = 0; split < 3; ++split)
        for (int cls = 0; cls < config.space.class_count(); ++cls)
            fs::create_directories(config.root / kSplitNames[split] / std::to_string(cls));

    std::vector<SampleRecord> records(jobs.size());
    parallel_for(jobs.size(), config.threads, [&](std::size_t i) {
        const Job& job = jobs[i];
        const int ell = config.space.ell_of(job.cls);
        const double z = config.space.z_of(job.cls);
        const auto seed = sample_seed(config.master_seed, job.cls, job.split, job.ordinal);
        const Sample s = synth_sample(config.space, ell, z, config.sim, seed);

        SampleRecord& r = records[i];
        r.path = std::string(kSplitNames[job.split]) + "/" + std::to_string(job.cls) + "/" +
                 std::to_string(job.ordinal) + ".pgm";
        r.class_index = job.cls;
        r.ell = ell;
        r.z = z;
        r.ordinal = job.ordinal;
        r.seed = seed;
        r.aug = s.aug;
        write_pgm(config.root / r.path, s.image);
        r.sha256 = sha256_hex(read_file(config.root / r.path));
    });

    DatasetManifest m;
    m.version = kManifestVersion;
    m.space = config.space;
    m.per_class = config.per_class;
    m.master_seed = config.master_seed;

    const json generator = {
        {"sim", sim_json(config.sim)},
        {"master_seed", config.master_seed},
        {"per_class", {{"train", config.per_class[0]}, {"val", config.per_class[1]}, {"test", config.per_class[2]}}},
        {"label_space", {{"ells", config.space.ells}, {"zs", config.space.zs}}},
    };
    m.config_hash = sha256_hex(generator.dump());

    json splits = json::object();
    for (int split = 0; split < 3; ++split) {
        json list = json::array();
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            if (jobs[i].split != split) continue;
            list.push_back(record_json(records[i]));
            m.splits[kSplitNames[split]].push_back(records[i]);
        }
        splits[kSplitNames[split]] = std::move(list);
    }

    const json doc = {
        {"format", "oamforge-dataset"},
        {"version", kManifestVersion},
        {"units", units_json()},
        {"label_space", generator["label_space"]},
        {"generator", generator},
        {"config_hash", m.config_hash},
        {"splits", splits},
    };
    const std::string text = doc.dump(1) + "\n";
    {
        std::ofstream os(manifest_path, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open for writing: " + manifest_path.string());
        os << text;
        if (!os) throw std::runtime_error("write failed: " + manifest_path.string());
    }
    m.hash = sha256_hex(text);
    return m;
}

DatasetManifest load_manifest(const fs::path& root) {
    const std::string text = read_file(root / "manifest.json");
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("manifest: ") + e.what());
    }
    DatasetManifest m;
    try {
        require(doc.at("format") == "oamforge-dataset", "manifest: unknown format");
        m.version = doc.at("version").get<int>();
        require(m.version == kManifestVersion,
                "manifest: unsupported version " + std::to_string(m.version));
        m.space.ells = doc.at("label_space").at("ells").get<std::vector<int>>();
        m.space.zs = doc.at("label_space").at("zs").get<std::vector<double>>();
        m.space.validate();
        const auto& gen = doc.at("generator");
        m.master_seed = gen.at("master_seed").get<std::uint64_t>();
        for (int s = 0; s < 3; ++s) m.per_class[s] = gen.at("per_class").at(kSplitNames[s]).get<int>();
        m.config_hash = doc.at("config_hash").get<std::string>();
        for (const char* split : kSplitNames) {
            auto& list = m.splits[split];
            for (const auto& j : doc.at("splits").at(split)) list.push_back(record_from_json(j));
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("manifest: ") + e.what());
    }
    for (const auto& [split, list] : m.splits) {
        for (const auto& r : list) {
            require(r.class_index >= 0 && r.class_index < m.space.class_count(),
                    "manifest: class index out of range in " + r.path);
            require(fs::exists(root / r.path), "manifest: missing file " + r.path);
        }
    }
    m.hash = sha256_hex(text);
    return m;
}

}  // namespace oam
