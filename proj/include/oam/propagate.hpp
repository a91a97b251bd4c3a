#pragma once

#include <span>
#include <vector>

#include "oam/field.hpp"

namespace oam {

/// Free-space propagation over distance z (ABCD = [[1, z], [0, 1]]).
struct PropagationConfig {
    enum class Method { spectral, quadrature };

    double z = 0.0;  // meters
    Method method = Method::spectral;
    bool band_limit = true;

    void validate() const;
};

/// True when extent^2 >= lambda * z * n, i.e. the transfer function's chirp
/// is adequately sampled at this distance.
bool transfer_function_sampled(const GridSpec& grid, double wavelength, double z);

/// Per-axis frequency bound of the band-limited angular spectrum,
/// 1 / (lambda sqrt((2 z / extent)^2 + 1)), cycles per meter.
double band_limit_frequency(const GridSpec& grid, double wavelength, double z);

/// Transfer-function propagation:
///   H(fx, fy) = exp(-ikz) exp(i pi lambda z (fx^2 + fy^2)),
/// applied between a forward and an inverse 2-D DFT. z == 0 returns the
/// input unchanged. With band_limit, frequencies beyond
/// band_limit_frequency on either axis are zeroed; without it the operator
/// is unitary. Warns on stderr when the sampling criterion fails and
/// band_limit is off.
ComplexField propagate_spectral(const ComplexField& field, double z, bool band_limit = true);

/// Dispatches on config.method; quadrature is not a whole-grid method.
ComplexField propagate(const ComplexField& field, const PropagationConfig& config);

struct PolarPoint {
    double r1 = 0.0;      // meters
    double theta1 = 0.0;  // radians
};

/// Direct 2-D trapezoid quadrature of the Collins integral over the source
/// grid, evaluated at the given output points:
///   (i / lambda z) exp(-ikz) sum E(x, y) exp[-(ik/2z)((x - x1)^2 + (y - y1)^2)] w dx dy.
/// O(n^2) per point; used as the reference for the spectral method.
std::vector<cplx> propagate_quadrature(const ComplexField& field, double z,
                                       std::span<const PolarPoint> points);

}  // namespace oam
