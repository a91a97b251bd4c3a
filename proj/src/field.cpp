#include "oam/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oam/errors.hpp"

namespace oam {

ComplexField::ComplexField(GridSpec g, double lambda)
    : grid(g), wavelength(lambda), values(static_cast<std::size_t>(g.size())) {}

double ComplexField::wavenumber() const { return 2.0 * std::numbers::pi / wavelength; }

void validate(const ComplexField& field) {
    require(field.grid.n >= 8 && field.grid.extent > 0.0, "field: invalid grid");
    require(field.wavelength > 0.0 && std::isfinite(field.wavelength),
            "field: wavelength must be positive");
    require(static_cast<long long>(field.values.size()) == field.grid.size(),
            "field: value count does not match grid");
    for (const auto& v : field.values) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw ValidationError("field: non-finite amplitude");
    }
}

void validate(const IntensityMap& map) {
    require(map.grid.n >= 8 && map.grid.extent > 0.0, "intensity: invalid grid");
    require(static_cast<long long>(map.values.size()) == map.grid.size(),
            "intensity: value count does not match grid");
    for (double v : map.values) {
        if (!std::isfinite(v) || v < 0.0)
            throw ValidationError("intensity: values must be finite and nonnegative");
    }
}

IntensityMap intensity(const ComplexField& field) {
    validate(field);
    IntensityMap out{field.grid, std::vector<double>(field.values.size())};
    std::transform(field.values.begin(), field.values.end(), out.values.begin(),
                   [](const cplx& v) { return std::norm(v); });
    return out;
}

double power(const ComplexField& field) {
    double sum = 0.0;
    for (const auto& v : field.values) sum += std::norm(v);
    const double p = field.grid.pitch();
    return sum * p * p;
}

namespace {

struct Tap {
    int index;
    double weight;
};

// Box-filter taps mapping n source cells onto `out` equal output cells that
// cover [lo, lo + width] in continuous sample-index units (cell i spans
// [i - 0.5, i + 0.5]).
std::vector<std::vector<Tap>> box_taps(int n, int out, double lo, double width) {
    std::vector<std::vector<Tap>> taps(out);
    const double step = width / out;
    for (int j = 0; j < out; ++j) {
        const double a = lo + j * step;
        const double b = a + step;
        const int first = std::max(0, static_cast<int>(std::floor(a + 0.5)));
        const int last = std::min(n - 1, static_cast<int>(std::ceil(b - 0.5)));
        for (int i = first; i <= last; ++i) {
            const double overlap = std::min(b, i + 0.5) - std::max(a, i - 0.5);
            if (overlap > 0.0) taps[j].push_back({i, overlap / step});
        }
    }
    return taps;
}

}  // namespace

Image8 render_image(const IntensityMap& map, int out_size, double crop_extent) {
    validate(map);
    require(out_size >= 8, "render: out_size must be >= 8");
    require(crop_extent > 0.0, "render: crop extent must be positive");
    require(crop_extent <= map.grid.extent * (1.0 + 1e-12),
            "render: crop extent exceeds the grid extent");

    const int n = map.grid.n;
    const double width = std::min(crop_extent / map.grid.pitch(), static_cast<double>(n));
    const double lo = 0.5 * (n - 1) - 0.5 * width;
    const auto taps = box_taps(n, out_size, lo, width);

    const int row_lo = taps.front().empty() ? 0 : taps.front().front().index;
    const int row_hi = taps.back().empty() ? n - 1 : taps.back().back().index;

    // Horizontal pass over the rows the crop touches, then vertical.
    std::vector<double> rows(static_cast<std::size_t>(n) * out_size, 0.0);
    for (int r = row_lo; r <= row_hi; ++r) {
        for (int j = 0; j < out_size; ++j) {
            double acc = 0.0;
            for (const auto& t : taps[j]) acc += t.weight * map.at(r, t.index);
            rows[static_cast<std::size_t>(r) * out_size + j] = acc;
        }
    }
    std::vector<double> resampled(static_cast<std::size_t>(out_size) * out_size, 0.0);
    for (int i = 0; i < out_size; ++i) {
        for (int j = 0; j < out_size; ++j) {
            double acc = 0.0;
            for (const auto& t : taps[i])
                acc += t.weight * rows[static_cast<std::size_t>(t.index) * out_size + j];
            resampled[static_cast<std::size_t>(i) * out_size + j] = acc;
        }
    }

    const auto [mn, mx] = std::minmax_element(resampled.begin(), resampled.end());
    const double lo_v = *mn;
    const double span = *mx - *mn;
    Image8 img{out_size, out_size, std::vector<std::uint8_t>(resampled.size(), 0)};
    // Resampling rounding can make a constant map very slightly non-constant.
    if (!(span > 1e-12 * std::max(std::abs(*mx), 1e-300))) return img;
    for (std::size_t k = 0; k < resampled.size(); ++k) {
        const double v = 255.0 * (resampled[k] - lo_v) / span;
        img.pixels[k] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
    return img;
}

std::vector<double> area_resample(const Image8& img, int out_size) {
    require(img.width == img.height && img.width > 0, "resample: image must be square");
    require(out_size >= 1, "resample: out_size must be positive");
    const int n = img.width;
    const auto taps = box_taps(n, out_size, -0.5, n);
    std::vector<double> rows(static_cast<std::size_t>(n) * out_size, 0.0);
    for (int r = 0; r < n; ++r)
        for (int j = 0; j < out_size; ++j) {
            double acc = 0.0;
            for (const auto& t : taps[j]) acc += t.weight * img.at(r, t.index);
            rows[static_cast<std::size_t>(r) * out_size + j] = acc;
        }
    std::vector<double> out(static_cast<std::size_t>(out_size) * out_size, 0.0);
    for (int i = 0; i < out_size; ++i)
        for (int j = 0; j < out_size; ++j) {
            double acc = 0.0;
            for (const auto& t : taps[i])
                acc += t.weight * rows[static_cast<std::size_t>(t.index) * out_size + j];
            out[static_cast<std::size_t>(i) * out_size + j] = acc / 255.0;
        }
    return out;
}

std::vector<ProfilePoint> cross_section(const IntensityMap& map) {
    validate(map);
    const int n = map.grid.n;
    const int row = map.grid.center();
    std::vector<ProfilePoint> out(n);
    for (int c = 0; c < n; ++c) out[c] = {map.grid.coord(c), map.at(row, c)};
    return out;
}

LobeCount count_side_lobes(std::span<const ProfilePoint> profile, double max_abs_x,
                           double rel_threshold) {
    require(profile.size() >= 3, "lobes: profile too short");
    LobeCount out;
    double global_max = 0.0;
    std::size_t left_peak = profile.size(), right_peak = profile.size();
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const auto& p = profile[i];
        global_max = std::max(global_max, p.value);
        if (p.x < 0.0 && (left_peak == profile.size() || p.value > profile[left_peak].value))
            left_peak = i;
        if (p.x > 0.0 && (right_peak == profile.size() || p.value > profile[right_peak].value))
            right_peak = i;
    }
    require(left_peak < profile.size() && right_peak < profile.size(),
            "lobes: profile must straddle x = 0");
    out.left_peak_x = profile[left_peak].x;
    out.right_peak_x = profile[right_peak].x;

    const double floor_v = rel_threshold * global_max;
    for (std::size_t i = 1; i + 1 < profile.size(); ++i) {
        const auto& p = profile[i];
        if (!(p.value > profile[i - 1].value && p.value > profile[i + 1].value)) continue;
        if (p.value <= floor_v || std::abs(p.x) > max_abs_x) continue;
        if (p.x < out.left_peak_x) ++out.left;
        if (p.x > out.right_peak_x) ++out.right;
    }
    return out;
}

std::vector<ProfilePoint> ring_profile(const IntensityMap& map, double bin_width) {
    validate(map);
    require(bin_width > 0.0, "ring profile: bin width must be positive");
    const int n = map.grid.n;
    const double p = map.grid.pitch();
    const int bins = static_cast<int>(std::ceil(0.5 * std::sqrt(2.0) * map.grid.extent / bin_width)) + 2;
    std::vector<double> sum(bins, 0.0), rsum(bins, 0.0);
    std::vector<long long> count(bins, 0);
    for (int r = 0; r < n; ++r) {
        const double y = (r - n / 2) * p;
        for (int c = 0; c < n; ++c) {
            const double x = (c - n / 2) * p;
            const double rad = std::hypot(x, y);
            const int b = static_cast<int>(rad / bin_width);
            if (b >= bins) continue;
            sum[b] += map.at(r, c);
            rsum[b] += rad;
            ++count[b];
        }
    }
    std::vector<ProfilePoint> out;
    for (int b = 0; b < bins; ++b) {
        if (count[b] == 0) continue;
        out.push_back({rsum[b] / count[b], sum[b] / count[b]});
    }
    return out;
}

double ring_peak_radius(const IntensityMap& map) {
    const auto prof = ring_profile(map, 0.5 * map.grid.pitch());
    std::size_t best = 0;
    for (std::size_t i = 1; i < prof.size(); ++i)
        if (prof[i].value > prof[best].value) best = i;
    if (best == 0 || best + 1 >= prof.size()) return prof[best].x;

    // Vertex of the parabola through three (possibly unevenly spaced) points.
    const double x0 = prof[best - 1].x, x1 = prof[best].x, x2 = prof[best + 1].x;
    const double y0 = prof[best - 1].value, y1 = prof[best].value, y2 = prof[best + 1].value;
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double curv = (d12 - d01) / (x2 - x0);
    if (!(curv < 0.0)) return x1;
    const double vertex = 0.5 * (x0 + x1) - d01 / (2.0 * curv);
    return std::clamp(vertex, x0, x2);
}

}  // namespace oam
