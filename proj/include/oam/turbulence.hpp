#pragma once

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <vector>

#include "oam/field.hpp"

namespace oam {

inline constexpr double kDefaultKappa0 = 2.0 * std::numbers::pi / 10.0;  // L0 = 10 m
inline constexpr double kDefaultKappaM = 5.92 / 0.01;                     // l0 = 1 cm

struct TurbulenceParams {
    double cn2 = 5e-8;                // m^-2/3
    double z = 1.0;                   // path length, meters
    double kappa0 = kDefaultKappa0;   // rad/m
    double kappam = kDefaultKappaM;   // rad/m, may be +inf (no inner scale)
    std::uint64_t seed = 0;

    void validate() const;
};

struct PhaseScreen {
    GridSpec grid;
    std::vector<double> values;  // radians, row-major
    TurbulenceParams params;
    double wavelength = 0.0;
    double r0 = 0.0;  // meters
};

/// r0 = (0.423 k^2 cn2 z)^(-3/5).
double fried_parameter(double k, double cn2, double z);

/// 0.023 r0^(-5/3) (kappa^2 + kappa0^2)^(-11/6) exp(-kappa^2 / kappam^2).
double von_karman_psd(double kappa, double r0, double kappa0, double kappam);

/// Random phase screen Re{F^-1(M sqrt(phi))} with the DC bin zeroed and the
/// mean removed. M has independent N(0, 1) real and imaginary parts.
///
/// The spectrum is sampled on the DFT frequency lattice in cycles per meter
/// (f = kappa / 2 pi, spacing 1/extent), where the 0.023 r0^(-5/3) law is
/// the phase power spectral density, so the screen variance approximates
/// the continuum integral of the spectrum and the structure function tends
/// to 6.88 (r / r0)^(5/3) inside the inertial range. No subharmonics are
/// added: scales beyond the grid extent are missing.
PhaseScreen generate_screen(const GridSpec& grid, const TurbulenceParams& params, double wavelength);

/// Multiplies by exp(i * screen). Grids must match.
ComplexField apply_phase(const ComplexField& field, const PhaseScreen& screen);

struct StructurePoint {
    double separation = 0.0;  // meters, as requested
    int lag = 0;              // samples actually used, round(separation / pitch)
    double value = 0.0;       // rad^2
    double std_error = 0.0;   // across screens
};

/// D(r) = <(phi(x + r) - phi(x))^2> over every horizontal sample pair of
/// n_screens screens. Screen i uses seed derive_seed(params.seed, {i}).
std::vector<StructurePoint> structure_function(const TurbulenceParams& params, const GridSpec& grid,
                                               double wavelength, int n_screens,
                                               const std::vector<double>& separations,
                                               int threads = 1);

/// OAMF container (kind phase_screen) followed by
/// cn2 f64 | z f64 | kappa0 f64 | kappam f64 | seed u64 | r0 f64.
void write_screen(const std::filesystem::path& path, const PhaseScreen& screen);
PhaseScreen read_screen(const std::filesystem::path& path);

}  // namespace oam
