#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "oam/grid.hpp"

namespace oam {

using cplx = std::complex<double>;

/// Complex scalar field sampled on a GridSpec. Row index is y, column is x.
struct ComplexField {
    GridSpec grid;
    double wavelength = 0.0;  // meters
    std::vector<cplx> values;

    ComplexField() = default;
    ComplexField(GridSpec g, double lambda);

    cplx& at(int row, int col) { return values[static_cast<std::size_t>(row) * grid.n + col]; }
    const cplx& at(int row, int col) const {
        return values[static_cast<std::size_t>(row) * grid.n + col];
    }
    double wavenumber() const;
};

/// |E|^2 on the same grid.
struct IntensityMap {
    GridSpec grid;
    std::vector<double> values;

    double at(int row, int col) const { return values[static_cast<std::size_t>(row) * grid.n + col]; }
};

/// 8-bit grayscale image, row-major.
struct Image8 {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    std::uint8_t at(int row, int col) const {
        return pixels[static_cast<std::size_t>(row) * width + col];
    }
};

struct ProfilePoint {
    double x = 0.0;  // meters
    double value = 0.0;
};

/// Throws ValidationError unless the shape matches and all entries are finite.
void validate(const ComplexField& field);
void validate(const IntensityMap& map);

IntensityMap intensity(const ComplexField& field);

/// Sum |E|^2 * pitch^2.
double power(const ComplexField& field);

/// Central crop of physical width `crop_extent`, area-averaged onto an
/// out_size x out_size raster, then min-max normalized to [0, 255].
///
/// The crop window is centered on the array center (half a sample from the
/// optical axis), so a full-extent crop at out_size == n is the identity
/// resampling. A constant map renders as all zeros.
Image8 render_image(const IntensityMap& map, int out_size, double crop_extent);

/// Full-image area average onto out_size x out_size, pixel values scaled
/// to [0, 1]. Square images only.
std::vector<double> area_resample(const Image8& img, int out_size);

/// Row y = 0 (index n/2) paired with physical x.
std::vector<ProfilePoint> cross_section(const IntensityMap& map);

/// Result of the side-lobe rule on a y = 0 profile.
struct LobeCount {
    int left = 0;
    int right = 0;
    double left_peak_x = 0.0;   // principal peak positions
    double right_peak_x = 0.0;
};

/// Counts side lobes on each side of x = 0.
///
/// The principal peak on each side is the highest sample of that half. A side
/// lobe is a strict local maximum further from the axis than the principal
/// peak, above `rel_threshold` times the global maximum and with
/// |x| <= max_abs_x.
LobeCount count_side_lobes(std::span<const ProfilePoint> profile,
                           double max_abs_x = 2.2e-3, double rel_threshold = 5e-3);

/// Azimuthally averaged intensity in radial bins of width `bin_width`
/// about the optical axis. Empty bins are skipped.
std::vector<ProfilePoint> ring_profile(const IntensityMap& map, double bin_width);

/// Radius of the maximum of the ring-averaged profile, refined by a
/// parabola through the neighbouring bins.
double ring_peak_radius(const IntensityMap& map);

}  // namespace oam
