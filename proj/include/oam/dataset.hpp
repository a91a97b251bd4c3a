#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oam/beam.hpp"
#include "oam/field.hpp"
#include "oam/turbulence.hpp"

namespace oam {

/// The (ell, z) class grid. class_index = rank(ell) * |zs| + rank(z).
struct LabelSpace {
    std::vector<int> ells;
    std::vector<double> zs;  // meters

    int class_count() const { return static_cast<int>(ells.size() * zs.size()); }
    int ell_of(int index) const;
    double z_of(int index) const;
    void validate() const;
};

/// ell 1..5, z 0.40..1.00 m in 5 cm steps: 65 classes.
LabelSpace default_label_space();

/// z is matched within 1e-9 m.
int class_index(const LabelSpace& space, int ell, double z);

/// Physical and rendering settings for one simulated capture.
struct SimConfig {
    GridSpec grid{1024, 0.026};
    double waist = kDefaultWaist;
    double wavelength = kHeNeWavelength;
    int out_size = 360;
    double crop_extent = 6.0e-3;  // meters
    double max_offset = 0.2e-3;   // envelope misalignment bound per axis, meters
    bool turbulence = true;
    double cn2 = 5e-8;  // m^-2/3
    double kappa0 = kDefaultKappa0;
    double kappam = kDefaultKappaM;
    std::optional<double> screen_z;  // path length for r0; the sample's z when unset
    bool band_limit = true;

    void validate() const;
};

struct Augmentation {
    double offset_x = 0.0;  // meters
    double offset_y = 0.0;
    bool turbulence = false;
    double cn2 = 0.0;
    double screen_z = 0.0;
    std::uint64_t screen_seed = 0;
};

struct Sample {
    Image8 image;
    int class_index = -1;
    int ell = 0;
    double z = 0.0;
    std::uint64_t seed = 0;
    Augmentation aug;
};

/// Source vortex with a random envelope offset in [-max_offset, max_offset]
/// per axis, an optional fresh phase screen, spectral propagation to z.
/// The offset and screen seed are drawn from `seed`.
IntensityMap synth_intensity(int ell, double z, const SimConfig& config, std::uint64_t seed,
                             Augmentation* aug = nullptr);

/// synth_intensity rendered to config.out_size pixels over config.crop_extent.
Sample synth_sample(const LabelSpace& space, int ell, double z, const SimConfig& config,
                    std::uint64_t seed);

inline constexpr std::array<const char*, 3> kSplitNames = {"train", "val", "test"};

struct DatasetConfig {
    LabelSpace space = default_label_space();
    std::array<int, 3> per_class = {86, 10, 10};  // train, val, test
    SimConfig sim;
    std::uint64_t master_seed = 0;
    std::filesystem::path root;
    bool overwrite = false;
    int threads = 1;

    void validate() const;
};

/// derive_seed(master, {class_index, split, ordinal}).
std::uint64_t sample_seed(std::uint64_t master, int class_index, int split, int ordinal);

struct SampleRecord {
    std::string path;  // relative to the dataset root
    int class_index = 0;
    int ell = 0;
    double z = 0.0;
    int ordinal = 0;
    std::uint64_t seed = 0;
    Augmentation aug;
    std::string sha256;  // of the PGM file
};

struct DatasetManifest {
    int version = 1;
    LabelSpace space;
    std::array<int, 3> per_class{};
    std::uint64_t master_seed = 0;
    std::string config_hash;  // of the canonical generator block
    std::map<std::string, std::vector<SampleRecord>> splits;
    std::string hash;  // of the manifest.json bytes
};

inline constexpr int kManifestVersion = 1;

/// Writes <root>/<split>/<class_index>/<ordinal>.pgm and <root>/manifest.json.
/// Fails if the manifest already exists unless overwrite is set, in which case
/// the split directories and manifest are replaced.
DatasetManifest generate_dataset(const DatasetConfig& config);

/// Parses <root>/manifest.json and checks that every listed file exists.
DatasetManifest load_manifest(const std::filesystem::path& root);

}  // namespace oam
