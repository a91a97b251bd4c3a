#pragma once

namespace oam {

/// Uniform square sampling grid centered on the optical axis.
///
/// Sample index i sits at x = (i - n/2) * pitch, so the axis falls on
/// index n/2 and the grid spans [-extent/2, extent/2 - pitch].
struct GridSpec {
    int n = 0;
    double extent = 0.0;  // meters

    double pitch() const { return extent / n; }
    double coord(int i) const { return (i - n / 2) * pitch(); }
    int center() const { return n / 2; }
    long long size() const { return static_cast<long long>(n) * n; }

    bool operator==(const GridSpec&) const = default;
};

/// Validating constructor: n >= 8, extent > 0.
GridSpec make_grid(int n, double extent);

inline constexpr int kDefaultGridN = 2048;
inline constexpr double kDefaultExtent = 0.026;

/// 2048 samples over 26 mm: the grid the optics acceptance checks run on.
GridSpec default_grid();

}  // namespace oam
