#include "oam/field_io.hpp"

#include <cctype>
#include <fstream>
#include <string>

#include "oam/binary.hpp"
#include "oam/errors.hpp"

namespace oam {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    return os;
}

std::ifstream open_in(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for reading: " + path.string());
    return is;
}

// Reads one whitespace-delimited PGM header token, skipping '#' comments.
std::string pgm_token(std::istream& is) {
    std::string tok;
    int c;
    while ((c = is.get()) != EOF) {
        if (c == '#') {
            while ((c = is.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    return tok;
}

}  // namespace

void write_pgm(const fs::path& path, const Image8& img) {
    require(img.width > 0 && img.height > 0 &&
                img.pixels.size() == static_cast<std::size_t>(img.width) * img.height,
            "pgm: image shape mismatch");
    auto os = open_out(path);
    os << "P5\n" << img.width << ' ' << img.height << "\n255\n";
    os.write(reinterpret_cast<const char*>(img.pixels.data()),
             static_cast<std::streamsize>(img.pixels.size()));
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

Image8 read_pgm(const fs::path& path) {
    auto is = open_in(path);
    if (pgm_token(is) != "P5") throw ValidationError("pgm: not a binary P5 file: " + path.string());
    Image8 img;
    try {
        img.width = std::stoi(pgm_token(is));
        img.height = std::stoi(pgm_token(is));
        if (std::stoi(pgm_token(is)) != 255) throw ValidationError("pgm: maxval must be 255");
    } catch (const std::logic_error&) {
        throw ValidationError("pgm: malformed header: " + path.string());
    }
    require(img.width > 0 && img.height > 0, "pgm: bad dimensions");
    img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
    bin::read_exact(is, reinterpret_cast<char*>(img.pixels.data()), img.pixels.size());
    return img;
}

void write_field_header(std::ostream& os, const FieldHeader& h) {
    os.write("OAMF", 4);
    bin::put_u32(os, h.version);
    bin::put_u32(os, static_cast<std::uint32_t>(h.grid.n));
    bin::put_u32(os, static_cast<std::uint32_t>(h.kind));
    bin::put_f64(os, h.grid.extent);
    bin::put_f64(os, h.wavelength);
}

FieldHeader read_field_header(std::istream& is) {
    char magic[4];
    bin::read_exact(is, magic, 4);
    if (std::string(magic, 4) != "OAMF") throw ValidationError("not an OAMF file");
    FieldHeader h;
    h.version = bin::get_u32(is);
    if (h.version != kFieldFormatVersion)
        throw ValidationError("unsupported OAMF version " + std::to_string(h.version));
    const auto n = bin::get_u32(is);
    const auto kind = bin::get_u32(is);
    require(kind <= 2, "OAMF: unknown payload kind");
    h.kind = static_cast<FieldKind>(kind);
    const double extent = bin::get_f64(is);
    h.grid = make_grid(static_cast<int>(n), extent);
    h.wavelength = bin::get_f64(is);
    return h;
}

void write_field(const fs::path& path, const ComplexField& field) {
    validate(field);
    auto os = open_out(path);
    write_field_header(os, {kFieldFormatVersion, field.grid, FieldKind::complex_field, field.wavelength});
    for (const auto& v : field.values) {
        bin::put_f64(os, v.real());
        bin::put_f64(os, v.imag());
    }
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

ComplexField read_field(const fs::path& path) {
    auto is = open_in(path);
    const auto h = read_field_header(is);
    require(h.kind == FieldKind::complex_field, "OAMF: file does not hold a complex field");
    ComplexField f(h.grid, h.wavelength);
    for (auto& v : f.values) {
        const double re = bin::get_f64(is);
        const double im = bin::get_f64(is);
        v = {re, im};
    }
    validate(f);
    return f;
}

void write_intensity(const fs::path& path, const IntensityMap& map) {
    validate(map);
    auto os = open_out(path);
    write_field_header(os, {kFieldFormatVersion, map.grid, FieldKind::intensity, 0.0});
    for (double v : map.values) bin::put_f64(os, v);
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

IntensityMap read_intensity(const fs::path& path) {
    auto is = open_in(path);
    const auto h = read_field_header(is);
    require(h.kind == FieldKind::intensity, "OAMF: file does not hold an intensity map");
    IntensityMap m{h.grid, std::vector<double>(static_cast<std::size_t>(h.grid.size()))};
    for (auto& v : m.values) v = bin::get_f64(is);
    validate(m);
    return m;
}

}  // namespace oam
