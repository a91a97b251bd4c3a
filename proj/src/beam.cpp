#include "oam/beam.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "oam/errors.hpp"
#include "oam/special.hpp"

namespace oam {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSourceAmplitude = std::sqrt(2.0 / kPi);

// i^p for integer p >= 0, exact.
cplx i_power(int p) {
    switch (p % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

// exp(-i k z) with the large phase reduced before the complex exponential.
cplx carrier(double k, double z) { return std::polar(1.0, -std::fmod(k * z, 2.0 * kPi)); }

// Everything in the propagated field except exp(-i l theta1).
struct RadialHyGG {
    int ell;
    double k, z;
    cplx eps1;
    cplx prefactor;
    double kummer_a, kummer_b;

    RadialHyGG(const BeamParams& p, double z_) : ell(p.ell), z(z_) {
        k = 2.0 * kPi / p.wavelength;
        eps1 = cplx(1.0 / (p.waist * p.waist), k / (2.0 * z));
        const double gamma_ratio = std::exp(log_gamma(ell / 2.0 + 1.0) - log_gamma(ell + 1.0));
        prefactor = i_power(ell + 1) * (kPi * kSourceAmplitude / (p.wavelength * z)) *
                    carrier(k, z) * gamma_ratio / std::pow(eps1, 1.0 + ell / 2.0);
        kummer_a = (ell + 2) / 2.0;
        kummer_b = ell + 1.0;
    }

    cplx operator()(double r1) const {
        const double b1 = k * r1 / (2.0 * z);
        if (ell > 0 && b1 == 0.0) return 0.0;
        const cplx chirp = std::polar(1.0, -std::fmod(k * r1 * r1 / (2.0 * z), 2.0 * kPi));
        const cplx f = kummer_1f1(kummer_a, kummer_b, -b1 * b1 / eps1);
        return prefactor * chirp * std::pow(b1, ell) * f;
    }
};

}  // namespace

void BeamParams::validate() const {
    require(ell >= 0 && ell <= kMaxCharge,
            "beam: topological charge must be in 0.." + std::to_string(kMaxCharge));
    require(std::isfinite(waist) && waist > 0.0, "beam: waist must be positive");
    require(std::isfinite(wavelength) && wavelength > 0.0, "beam: wavelength must be positive");
}

HyGGTerms hygg_terms(const BeamParams& params, double r1, double z) {
    params.validate();
    require(z > 0.0, "hygg: z must be positive");
    const double k = 2.0 * kPi / params.wavelength;
    return {k * r1 / (2.0 * z), cplx(1.0 / (params.waist * params.waist), k / (2.0 * z))};
}

ComplexField source_vortex(const BeamParams& params, const GridSpec& grid, double offset_x,
                           double offset_y) {
    params.validate();
    require(grid.n >= 8 && grid.extent > 0.0, "source: invalid grid");
    ComplexField out(grid, params.wavelength);
    const double inv_w2 = 1.0 / (params.waist * params.waist);
    for (int r = 0; r < grid.n; ++r) {
        const double y = grid.coord(r);
        const double dy = y - offset_y;
        for (int c = 0; c < grid.n; ++c) {
            const double x = grid.coord(c);
            const double dx = x - offset_x;
            const double amp = kSourceAmplitude * std::exp(-(dx * dx + dy * dy) * inv_w2);
            const double theta = (x == 0.0 && y == 0.0) ? 0.0 : std::atan2(y, x);
            out.at(r, c) = std::polar(amp, -params.ell * theta);
        }
    }
    return out;
}

ComplexField apply_phase(const ComplexField& field, const GridSpec& phase_grid,
                         std::span<const double> phase) {
    require(field.grid == phase_grid, "apply_phase: grid mismatch");
    require(static_cast<long long>(phase.size()) == phase_grid.size(),
            "apply_phase: phase size does not match grid");
    ComplexField out = field;
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] *= std::polar(1.0, phase[i]);
    return out;
}

cplx hygg_value(const BeamParams& params, double r1, double theta1, double z) {
    params.validate();
    require(z > 0.0, "hygg: z must be positive (the closed form is singular at z = 0)");
    const RadialHyGG radial(params, z);
    return radial(r1) * std::polar(1.0, -params.ell * theta1);
}

ComplexField hygg_field(const BeamParams& params, const GridSpec& grid, double z) {
    params.validate();
    require(z > 0.0, "hygg: z must be positive (the closed form is singular at z = 0)");
    const RadialHyGG radial(params, z);

    // The radial factor depends on (|di|, |dj|) only; tabulate one octant.
    const int h = grid.n / 2;
    const double p = grid.pitch();
    auto tri = [](int a, int b) { return static_cast<std::size_t>(a) * (a + 1) / 2 + b; };
    std::vector<cplx> table(tri(h, h) + 1);
    for (int a = 0; a <= h; ++a)
        for (int b = 0; b <= a; ++b) table[tri(a, b)] = radial(p * std::hypot(a, b));

    ComplexField out(grid, params.wavelength);
    for (int r = 0; r < grid.n; ++r) {
        const int di = std::abs(r - h);
        const double y = grid.coord(r);
        for (int c = 0; c < grid.n; ++c) {
            const int dj = std::abs(c - h);
            const double x = grid.coord(c);
            const double theta = (x == 0.0 && y == 0.0) ? 0.0 : std::atan2(y, x);
            const cplx g = di >= dj ? table[tri(di, dj)] : table[tri(dj, di)];
            out.at(r, c) = g * std::polar(1.0, -params.ell * theta);
        }
    }
    return out;
}

cplx gaussian_propagated(const BeamParams& params, double r1, double z) {
    params.validate();
    require(z > 0.0, "gaussian: z must be positive");
    const double k = 2.0 * kPi / params.wavelength;
    const cplx eps1(1.0 / (params.waist * params.waist), k / (2.0 * z));
    const double b1 = k * r1 / (2.0 * z);
    const cplx chirp = std::polar(1.0, -std::fmod(k * r1 * r1 / (2.0 * z), 2.0 * kPi));
    return kSourceAmplitude * (cplx(0.0, k) / (2.0 * z * eps1)) * carrier(k, z) * chirp *
           std::exp(-b1 * b1 / eps1);
}

double gaussian_waist_at(double waist, double wavelength, double z) {
    const double zr = kPi * waist * waist / wavelength;
    return waist * std::sqrt(1.0 + (z / zr) * (z / zr));
}

double second_moment_waist(const IntensityMap& map) {
    validate(map);
    double total = 0.0, moment = 0.0;
    for (int r = 0; r < map.grid.n; ++r) {
        const double y = map.grid.coord(r);
        for (int c = 0; c < map.grid.n; ++c) {
            const double x = map.grid.coord(c);
            const double v = map.at(r, c);
            total += v;
            moment += v * (x * x + y * y);
        }
    }
    require(total > 0.0, "second moment: empty intensity map");
    return std::sqrt(2.0 * moment / total);
}

}  // namespace oam
