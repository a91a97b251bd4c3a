#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <set>

#include "helpers.hpp"
#include "oam/dataset.hpp"
#include "oam/errors.hpp"
#include "oam/field_io.hpp"

using namespace oam;

namespace {

SimConfig small_sim() {
    SimConfig s;
    s.grid = make_grid(256, 0.026);
    s.out_size = 64;
    return s;
}

LabelSpace desk_space() { return {{1, 2, 3}, {0.40, 0.70, 1.00}}; }

long l1(const Image8& a, const Image8& b) {
    long d = 0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) d += std::abs(int(a.pixels[i]) - int(b.pixels[i]));
    return d;
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("class_index examples") {
    const auto s = default_label_space();
    CHECK(s.class_count() == 65);
    CHECK(class_index(s, 1, 0.40) == 0);
    CHECK(class_index(s, 5, 1.00) == 64);
    CHECK(class_index(s, 3, 0.70) == 32);
    CHECK(class_index(s, 3, 0.70 + 5e-10) == 32);
    CHECK_THROWS_AS(class_index(s, 6, 0.40), ValidationError);
    CHECK_THROWS_AS(class_index(s, 1, 0.42), ValidationError);
}

TEST_CASE("class_index is a bijection") {
    const auto s = default_label_space();
    std::set<int> seen;
    for (int ell : s.ells)
        for (double z : s.zs) {
            const int idx = class_index(s, ell, z);
            CHECK(s.ell_of(idx) == ell);
            CHECK(s.z_of(idx) == z);
            seen.insert(idx);
        }
    CHECK(seen.size() == 65);
    CHECK(*seen.begin() == 0);
    CHECK(*seen.rbegin() == 64);
}

TEST_CASE("label space validation") {
    CHECK_THROWS_AS(LabelSpace({{2, 1}, {0.4}}).validate(), ValidationError);
    CHECK_THROWS_AS(LabelSpace({{1}, {0.7, 0.4}}).validate(), ValidationError);
    CHECK_THROWS_AS(LabelSpace({{}, {0.4}}).validate(), ValidationError);
}

TEST_CASE("sample seeds never collide") {
    std::set<std::uint64_t> seeds;
    for (int c = 0; c < 65; ++c)
        for (int split = 0; split < 3; ++split)
            for (int o = 0; o < 86; ++o) seeds.insert(sample_seed(42, c, split, o));
    CHECK(seeds.size() == 65u * 3 * 86);
}

TEST_CASE("synthesis is deterministic") {
    auto sim = small_sim();
    sim.turbulence = false;
    sim.max_offset = 0.0;
    const auto space = default_label_space();
    const auto a = synth_sample(space, 1, 0.40, sim, 11);
    const auto b = synth_sample(space, 1, 0.40, sim, 11);
    CHECK(a.image.pixels == b.image.pixels);
    CHECK(a.class_index == 0);
    CHECK(a.aug.offset_x == 0.0);
    // With no augmentation the seed does not matter.
    CHECK(synth_sample(space, 1, 0.40, sim, 12).image.pixels == a.image.pixels);

    sim.turbulence = true;
    sim.max_offset = 0.2e-3;
    const auto c = synth_sample(space, 2, 0.55, sim, 11);
    const auto d = synth_sample(space, 2, 0.55, sim, 11);
    CHECK(c.image.pixels == d.image.pixels);
    CHECK(std::abs(c.aug.offset_x) <= 0.2e-3);
    CHECK(std::abs(c.aug.offset_y) <= 0.2e-3);
}

TEST_CASE("ring radius is larger for ell = 5 than ell = 3") {
    auto sim = small_sim();
    sim.grid = make_grid(1024, 0.026);
    sim.turbulence = false;
    sim.max_offset = 0.0;
    const double r3 = ring_peak_radius(synth_intensity(3, 0.70, sim, 0));
    const double r5 = ring_peak_radius(synth_intensity(5, 0.70, sim, 0));
    CHECK(r5 > r3);
}

TEST_CASE("turbulence changes the image but not the label") {
    auto sim = small_sim();
    sim.max_offset = 0.0;
    sim.turbulence = false;
    const auto space = default_label_space();
    const auto clean = synth_sample(space, 3, 0.70, sim, 5);
    sim.turbulence = true;
    const auto turb = synth_sample(space, 3, 0.70, sim, 5);
    CHECK(turb.aug.turbulence);
    CHECK(turb.aug.cn2 == 5e-8);
    CHECK(turb.aug.screen_z == 0.70);
    CHECK(l1(clean.image, turb.image) > 0);
    CHECK(turb.class_index == clean.class_index);
}

TEST_CASE("generate_dataset layout, balance and hash") {
    const auto root = testutil::scratch_dir("dataset");
    DatasetConfig cfg;
    cfg.space = desk_space();
    cfg.per_class = {3, 1, 2};
    cfg.sim = small_sim();
    cfg.master_seed = 7;
    cfg.root = root / "a";
    cfg.threads = 2;
    const auto m = generate_dataset(cfg);
    CHECK(m.splits.at("train").size() == 27);
    CHECK(m.splits.at("val").size() == 9);
    CHECK(m.splits.at("test").size() == 18);

    std::set<std::string> paths;
    for (const auto& [split, recs] : m.splits) {
        std::vector<int> per(9, 0);
        for (const auto& r : recs) {
            CHECK(paths.insert(r.path).second);
            CHECK(std::filesystem::exists(cfg.root / r.path));
            CHECK(r.class_index == class_index(cfg.space, r.ell, r.z));
            ++per[r.class_index];
            const auto img = read_pgm(cfg.root / r.path);
            CHECK(img.width == 64);
            CHECK(*std::max_element(img.pixels.begin(), img.pixels.end()) == 255);
            CHECK(*std::min_element(img.pixels.begin(), img.pixels.end()) == 0);
        }
        CHECK(std::all_of(per.begin(), per.end(), [&](int c) { return c == per[0]; }));
    }
    CHECK(m.splits.at("val")[0].path == "val/0/0.pgm");

    const auto loaded = load_manifest(cfg.root);
    CHECK(loaded.hash == m.hash);
    CHECK(loaded.config_hash == m.config_hash);

    CHECK_THROWS_AS(generate_dataset(cfg), ValidationError);

    auto again = cfg;
    again.root = root / "b";
    again.threads = 1;
    CHECK(generate_dataset(again).hash == m.hash);

    again.overwrite = true;
    again.master_seed = 8;
    CHECK(generate_dataset(again).hash != m.hash);

    std::filesystem::remove(cfg.root / m.splits.at("test")[0].path);
    CHECK_THROWS_AS(load_manifest(cfg.root), ValidationError);
}

TEST_CASE("dataset config validation") {
    DatasetConfig cfg;
    cfg.root = testutil::scratch_dir("dataset_bad");
    cfg.per_class = {0, 1, 1};
    CHECK_THROWS_AS(generate_dataset(cfg), ValidationError);
    cfg.per_class = {1, 1, 1};
    cfg.sim.crop_extent = 0.03;
    CHECK_THROWS_AS(generate_dataset(cfg), ValidationError);
}

}
