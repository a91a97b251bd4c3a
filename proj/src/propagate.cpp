#include "oam/propagate.hpp"

#include <atomic>
#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>

#include "oam/errors.hpp"
#include "oam/fft.hpp"
#include "oam/log.hpp"

namespace oam {

namespace {

constexpr double kPi = std::numbers::pi;
std::atomic<bool> g_warnings{true};

// Signed DFT frequency of bin j in cycles per meter (zero at j = 0).
double bin_frequency(int j, int n, double extent) {
    const int s = j < (n + 1) / 2 ? j : j - n;
    return s / extent;
}

}  // namespace

void warn(const std::string& msg) {
    if (g_warnings.load(std::memory_order_relaxed)) std::cerr << "warning: " << msg << '\n';
}

void set_warnings_enabled(bool enabled) { g_warnings.store(enabled, std::memory_order_relaxed); }

void PropagationConfig::validate() const {
    require(std::isfinite(z) && z >= 0.0, "propagate: z must be >= 0");
}

bool transfer_function_sampled(const GridSpec& grid, double wavelength, double z) {
    return grid.extent * grid.extent >= wavelength * z * grid.n;
}

double band_limit_frequency(const GridSpec& grid, double wavelength, double z) {
    const double q = 2.0 * z / grid.extent;
    return 1.0 / (wavelength * std::sqrt(q * q + 1.0));
}

ComplexField propagate_spectral(const ComplexField& field, double z, bool band_limit) {
    require(std::isfinite(z) && z >= 0.0, "propagate: z must be >= 0");
    validate(field);
    if (z == 0.0) return field;

    const GridSpec& g = field.grid;
    const int n = g.n;
    const double lambda = field.wavelength;
    if (!band_limit && !transfer_function_sampled(g, lambda, z)) {
        std::ostringstream msg;
        msg << "propagate: extent^2 < lambda*z*n at z = " << z
            << " m; transfer function is undersampled";
        warn(msg.str());
    }

    const double k = 2.0 * kPi / lambda;
    const cplx carrier = std::polar(1.0, -std::fmod(k * z, 2.0 * kPi));
    const double f_lim = band_limit ? band_limit_frequency(g, lambda, z) : HUGE_VAL;
    const double scale = 1.0 / (static_cast<double>(n) * n);

    std::vector<double> freq(n);
    for (int j = 0; j < n; ++j) freq[j] = bin_frequency(j, n, g.extent);

    ComplexField out = field;
    fft2d(out.values, n, FftDirection::forward);
    for (int r = 0; r < n; ++r) {
        const double fy = freq[r];
        for (int c = 0; c < n; ++c) {
            const double fx = freq[c];
            cplx& v = out.at(r, c);
            if (std::abs(fx) > f_lim || std::abs(fy) > f_lim) {
                v = 0.0;
                continue;
            }
            const double phase = std::fmod(kPi * lambda * z * (fx * fx + fy * fy), 2.0 * kPi);
            v *= carrier * std::polar(scale, phase);
        }
    }
    fft2d(out.values, n, FftDirection::inverse);
    return out;
}

ComplexField propagate(const ComplexField& field, const PropagationConfig& config) {
    config.validate();
    require(config.method == PropagationConfig::Method::spectral,
            "propagate: quadrature evaluates points, use propagate_quadrature");
    return propagate_spectral(field, config.z, config.band_limit);
}

std::vector<cplx> propagate_quadrature(const ComplexField& field, double z,
                                       std::span<const PolarPoint> points) {
    require(std::isfinite(z) && z > 0.0, "quadrature: z must be positive");
    validate(field);
    const GridSpec& g = field.grid;
    const int n = g.n;
    const double k = field.wavenumber();
    const double p = g.pitch();
    const double half = 0.5 * g.extent;
    const cplx pre = cplx(0.0, 1.0) / (field.wavelength * z) *
                     std::polar(1.0, -std::fmod(k * z, 2.0 * kPi)) * (p * p);

    std::vector<double> weight(n, 1.0);
    weight.front() = weight.back() = 0.5;

    std::vector<cplx> out;
    out.reserve(points.size());
    std::vector<cplx> ex(n), ey(n);
    for (const auto& pt : points) {
        const double x1 = pt.r1 * std::cos(pt.theta1);
        const double y1 = pt.r1 * std::sin(pt.theta1);
        require(std::abs(x1) <= half && std::abs(y1) <= half,
                "quadrature: output point outside the grid extent");
        // The kernel separates into x and y chirps.
        for (int j = 0; j < n; ++j) {
            const double dx = g.coord(j) - x1;
            const double dy = g.coord(j) - y1;
            ex[j] = weight[j] * std::polar(1.0, -std::fmod(k * dx * dx / (2.0 * z), 2.0 * kPi));
            ey[j] = weight[j] * std::polar(1.0, -std::fmod(k * dy * dy / (2.0 * z), 2.0 * kPi));
        }
        cplx total = 0.0;
        for (int r = 0; r < n; ++r) {
            cplx row = 0.0;
            const cplx* src = &field.values[static_cast<std::size_t>(r) * n];
            for (int c = 0; c < n; ++c) row += src[c] * ex[c];
            total += ey[r] * row;
        }
        out.push_back(pre * total);
    }
    return out;
}

}  // namespace oam
