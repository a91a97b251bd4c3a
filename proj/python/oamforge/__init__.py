"""Vortex-beam diffraction, turbulence screens and (ell, z) classification."""

from ._oamforge import (
    GridSpec,
    __version__,
    class_index,
    count_side_lobes,
    cross_section,
    fried_parameter,
    hygg_field,
    kummer_1f1,
    phase_screen,
    propagate_quadrature,
    propagate_spectral,
    render_image,
    ring_peak_radius,
    source_vortex,
    structure_function,
    synth_image,
    verify,
    von_karman_psd,
)

__all__ = [
    "GridSpec",
    "class_index",
    "count_side_lobes",
    "cross_section",
    "fried_parameter",
    "hygg_field",
    "kummer_1f1",
    "phase_screen",
    "propagate_quadrature",
    "propagate_spectral",
    "render_image",
    "ring_peak_radius",
    "source_vortex",
    "structure_function",
    "synth_image",
    "verify",
    "von_karman_psd",
]
