#pragma once

#include "oam/field.hpp"

namespace oam {

inline constexpr double kHeNeWavelength = 632.8e-9;  // meters
inline constexpr double kDefaultWaist = 2.0e-3;      // meters
inline constexpr int kMaxCharge = 12;

struct BeamParams {
    int ell = 1;                          // topological charge, 0..12
    double waist = kDefaultWaist;         // Gaussian waist w0, meters
    double wavelength = kHeNeWavelength;  // meters

    void validate() const;
};

/// b1 = k r1 / 2z and eps1 = 1/w0^2 + i k / 2z of the propagated vortex.
struct HyGGTerms {
    double b1 = 0.0;
    cplx eps1;
};

HyGGTerms hygg_terms(const BeamParams& params, double r1, double z);

/// Gaussian-illuminated spiral phase on the modulator plane:
/// sqrt(2/pi) exp(-|r - offset|^2 / w0^2) exp(-i ell theta).
///
/// The offset moves the Gaussian envelope only; the phase singularity stays
/// on the grid axis (a beam hitting the modulator off-center). theta is
/// atan2(y, x) with theta(0, 0) = 0.
ComplexField source_vortex(const BeamParams& params, const GridSpec& grid,
                           double offset_x = 0.0, double offset_y = 0.0);

/// Multiplies by exp(i * phase) sample by sample. Grids must match.
ComplexField apply_phase(const ComplexField& field, const GridSpec& phase_grid,
                         std::span<const double> phase);

/// Closed-form field of the source after free-space distance z > 0
/// (hypergeometric-Gaussian mode).
///
///   E2 = i^(l+1) pi sqrt(2/pi) / (lambda z) exp(-ikz) exp(-ik r1^2 / 2z) exp(-i l theta1)
///        * b1^l / eps1^(1 + l/2) * Gamma(l/2 + 1) / Gamma(l + 1)
///        * 1F1((l+2)/2; l+1; -b1^2 / eps1)
///
/// The sqrt(2/pi) carries the source amplitude through the diffraction
/// integral so this matches numerical propagation of source_vortex.
ComplexField hygg_field(const BeamParams& params, const GridSpec& grid, double z);

/// Same expression at a single output point (r1, theta1).
cplx hygg_value(const BeamParams& params, double r1, double theta1, double z);

/// Propagated fundamental Gaussian of amplitude sqrt(2/pi):
/// sqrt(2/pi) (i k / (2 z eps1)) exp(-ikz) exp(-ik r1^2/2z) exp(-b1^2/eps1).
cplx gaussian_propagated(const BeamParams& params, double r1, double z);

/// w(z) = w0 sqrt(1 + (z / zR)^2), zR = pi w0^2 / lambda.
double gaussian_waist_at(double waist, double wavelength, double z);

/// 1/e^2 intensity radius from second moments: w = sqrt(2 <r^2>).
double second_moment_waist(const IntensityMap& map);

}  // namespace oam
