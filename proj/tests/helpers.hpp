#pragma once

#include <cmath>
#include <filesystem>
#include <string>

#include "oam/field.hpp"
#include "oam/rng.hpp"

namespace testutil {

inline double rel_l2(const oam::ComplexField& a, const oam::ComplexField& ref) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        num += std::norm(a.values[i] - ref.values[i]);
        den += std::norm(ref.values[i]);
    }
    return std::sqrt(num / den);
}

inline oam::ComplexField random_field(const oam::GridSpec& g, std::uint64_t seed,
                                      double wavelength = 632.8e-9) {
    oam::Rng rng(seed);
    oam::ComplexField f(g, wavelength);
    for (auto& v : f.values) v = {rng.normal(), rng.normal()};
    return f;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("oamforge_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace testutil
