#pragma once

#include <cstdint>
#include <filesystem>

#include "oam/field.hpp"

namespace oam {

/// Binary PGM (P5, maxval 255).
void write_pgm(const std::filesystem::path& path, const Image8& img);
Image8 read_pgm(const std::filesystem::path& path);

/// Payload kind stored in the OAMF header.
enum class FieldKind : std::uint32_t { complex_field = 0, intensity = 1, phase_screen = 2 };

/// OAMF container, 32-byte little-endian header:
///   magic "OAMF" | version u32 | n u32 | kind u32 | extent f64 | wavelength f64
/// followed by n*n row-major f64 pairs (re, im) or f64 values.
/// Phase screens append a parameter block after the values.
inline constexpr std::uint32_t kFieldFormatVersion = 1;
inline constexpr std::size_t kFieldHeaderBytes = 32;

struct FieldHeader {
    std::uint32_t version = kFieldFormatVersion;
    GridSpec grid;
    FieldKind kind = FieldKind::complex_field;
    double wavelength = 0.0;
};

void write_field(const std::filesystem::path& path, const ComplexField& field);
ComplexField read_field(const std::filesystem::path& path);

/// Intensity maps carry no wavelength; the header slot holds 0.
void write_intensity(const std::filesystem::path& path, const IntensityMap& map);
IntensityMap read_intensity(const std::filesystem::path& path);

void write_field_header(std::ostream& os, const FieldHeader& h);
FieldHeader read_field_header(std::istream& is);

}  // namespace oam
