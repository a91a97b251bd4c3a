#include "oam/turbulence.hpp"

#include <cmath>
#include <complex>
#include <fstream>

#include "oam/beam.hpp"
#include "oam/binary.hpp"
#include "oam/errors.hpp"
#include "oam/fft.hpp"
#include "oam/field_io.hpp"
#include "oam/parallel.hpp"
#include "oam/rng.hpp"

namespace oam {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double bin_frequency(int j, int n, double extent) {
    const int s = j < (n + 1) / 2 ? j : j - n;
    return s / extent;
}

}  // namespace

void TurbulenceParams::validate() const {
    require(std::isfinite(cn2) && cn2 > 0.0, "turbulence: cn2 must be positive");
    require(std::isfinite(z) && z > 0.0, "turbulence: z must be positive");
    require(std::isfinite(kappa0) && kappa0 >= 0.0, "turbulence: kappa0 must be >= 0");
    require(!std::isnan(kappam) && kappam > kappa0, "turbulence: kappam must exceed kappa0");
}

double fried_parameter(double k, double cn2, double z) {
    require(k > 0.0 && cn2 > 0.0 && z > 0.0, "fried_parameter: arguments must be positive");
    return std::pow(0.423 * k * k * cn2 * z, -3.0 / 5.0);
}

double von_karman_psd(double kappa, double r0, double kappa0, double kappam) {
    require(r0 > 0.0, "von_karman_psd: r0 must be positive");
    require(kappam > 0.0, "von_karman_psd: kappam must be positive");
    const double k2 = kappa * kappa;
    const double cutoff = std::isinf(kappam) ? 1.0 : std::exp(-k2 / (kappam * kappam));
    return 0.023 * std::pow(r0, -5.0 / 3.0) * std::pow(k2 + kappa0 * kappa0, -11.0 / 6.0) * cutoff;
}

PhaseScreen generate_screen(const GridSpec& grid, const TurbulenceParams& params, double wavelength) {
    params.validate();
    require(grid.n >= 8 && grid.extent > 0.0, "screen: invalid grid");
    require(std::isfinite(wavelength) && wavelength > 0.0, "screen: wavelength must be positive");

    PhaseScreen out;
    out.grid = grid;
    out.params = params;
    out.wavelength = wavelength;
    out.r0 = fried_parameter(kTwoPi / wavelength, params.cn2, params.z);

    const int n = grid.n;
    const double df = 1.0 / grid.extent;
    const double f0 = params.kappa0 / kTwoPi;
    const double fm = params.kappam / kTwoPi;
    std::vector<double> freq(n);
    for (int j = 0; j < n; ++j) freq[j] = bin_frequency(j, n, grid.extent);

    Rng rng(params.seed);
    std::vector<std::complex<double>> spec(static_cast<std::size_t>(grid.size()));
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            const double re = rng.normal();
            const double im = rng.normal();
            if (r == 0 && c == 0) continue;
            const double f = std::hypot(freq[r], freq[c]);
            const double amp = std::sqrt(von_karman_psd(f, out.r0, f0, fm)) * df;
            spec[static_cast<std::size_t>(r) * n + c] = {re * amp, im * amp};
        }
    }
    fft2d(spec, n, FftDirection::inverse);

    out.values.resize(spec.size());
    double mean = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        out.values[i] = spec[i].real();
        mean += out.values[i];
    }
    mean /= static_cast<double>(spec.size());
    for (double& v : out.values) v -= mean;
    return out;
}

ComplexField apply_phase(const ComplexField& field, const PhaseScreen& screen) {
    return apply_phase(field, screen.grid, screen.values);
}

std::vector<StructurePoint> structure_function(const TurbulenceParams& params, const GridSpec& grid,
                                               double wavelength, int n_screens,
                                               const std::vector<double>& separations,
                                               int threads) {
    params.validate();
    require(n_screens >= 50, "structure_function: n_screens must be >= 50");
    std::vector<int> lags;
    for (double s : separations) {
        require(std::isfinite(s) && s >= 0.0, "structure_function: separations must be >= 0");
        require(s < grid.extent, "structure_function: separation beyond grid extent");
        const int lag = static_cast<int>(std::lround(s / grid.pitch()));
        require(lag < grid.n, "structure_function: separation beyond grid extent");
        lags.push_back(lag);
    }

    const int n = grid.n;
    std::vector<std::vector<double>> per_screen(n_screens, std::vector<double>(lags.size()));
    parallel_for(static_cast<std::size_t>(n_screens), threads, [&](std::size_t i) {
        TurbulenceParams p = params;
        p.seed = derive_seed(params.seed, {i});
        const PhaseScreen s = generate_screen(grid, p, wavelength);
        for (std::size_t j = 0; j < lags.size(); ++j) {
            const int lag = lags[j];
            if (lag == 0) continue;
            double acc = 0.0;
            for (int r = 0; r < n; ++r) {
                const double* row = &s.values[static_cast<std::size_t>(r) * n];
                for (int c = 0; c + lag < n; ++c) {
                    const double d = row[c + lag] - row[c];
                    acc += d * d;
                }
            }
            per_screen[i][j] = acc / (static_cast<double>(n) * (n - lag));
        }
    });

    std::vector<StructurePoint> out;
    for (std::size_t j = 0; j < lags.size(); ++j) {
        double mean = 0.0;
        for (const auto& v : per_screen) mean += v[j];
        mean /= n_screens;
        double var = 0.0;
        for (const auto& v : per_screen) var += (v[j] - mean) * (v[j] - mean);
        var /= (n_screens - 1);
        out.push_back({separations[j], lags[j], mean, std::sqrt(var / n_screens)});
    }
    return out;
}

void write_screen(const std::filesystem::path& path, const PhaseScreen& screen) {
    require(static_cast<long long>(screen.values.size()) == screen.grid.size(),
            "screen: value count does not match grid");
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    write_field_header(os, {kFieldFormatVersion, screen.grid, FieldKind::phase_screen, screen.wavelength});
    for (double v : screen.values) bin::put_f64(os, v);
    bin::put_f64(os, screen.params.cn2);
    bin::put_f64(os, screen.params.z);
    bin::put_f64(os, screen.params.kappa0);
    bin::put_f64(os, screen.params.kappam);
    bin::put_u64(os, screen.params.seed);
    bin::put_f64(os, screen.r0);
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

PhaseScreen read_screen(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for reading: " + path.string());
    const auto h = read_field_header(is);
    require(h.kind == FieldKind::phase_screen, "OAMF: file does not hold a phase screen");
    PhaseScreen s;
    s.grid = h.grid;
    s.wavelength = h.wavelength;
    s.values.resize(static_cast<std::size_t>(h.grid.size()));
    for (double& v : s.values) {
        v = bin::get_f64(is);
        require(std::isfinite(v), "screen: non-finite phase value");
    }
    s.params.cn2 = bin::get_f64(is);
    s.params.z = bin::get_f64(is);
    s.params.kappa0 = bin::get_f64(is);
    s.params.kappam = bin::get_f64(is);
    s.params.seed = bin::get_u64(is);
    s.r0 = bin::get_f64(is);
    s.params.validate();
    return s;
}

}  // namespace oam
