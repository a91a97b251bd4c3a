#include "oam/units.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <utility>

#include "oam/errors.hpp"

namespace oam {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

// Splits "<number><unit>" and returns (value, unit).
std::pair<double, std::string> split_number(const std::string& raw) {
    const std::string s = trim(raw);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr == s.data())
        throw ValidationError("expected a number with a unit, got '" + raw + "'");
    if (!std::isfinite(v)) throw ValidationError("non-finite value '" + raw + "'");
    return {v, trim(std::string(ptr, s.data() + s.size()))};
}

[[noreturn]] void bad_unit(const std::string& raw, const std::string& allowed) {
    throw ValidationError("'" + raw + "' needs a unit (" + allowed + ")");
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

int parse_int(const std::string& raw) {
    const std::string s = trim(raw);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ValidationError("expected an integer, got '" + raw + "'");
    return v;
}

}  // namespace

double parse_length(const std::string& text) {
    const auto [v, unit] = split_number(text);
    if (unit == "m") return v;
    // Division keeps decimal inputs such as 26mm exactly 0.026.
    if (unit == "cm") return v / 1e2;
    if (unit == "mm") return v / 1e3;
    if (unit == "um") return v / 1e6;
    if (unit == "nm") return v / 1e9;
    bad_unit(text, "m, cm, mm, um, nm");
}

double parse_cn2(const std::string& text) {
    const auto [v, unit] = split_number(text);
    if (unit == "m^-2/3" || unit == "m^(-2/3)") return v;
    // 1 mm^-2/3 = (1e-3 m)^-2/3 = 100 m^-2/3
    if (unit == "mm^-2/3" || unit == "mm^(-2/3)") return v * 100.0;
    bad_unit(text, "m^-2/3, mm^-2/3");
}

double parse_wavenumber(const std::string& text) {
    if (trim(text) == "inf") return std::numeric_limits<double>::infinity();
    const auto [v, unit] = split_number(text);
    if (unit == "rad/m" || unit == "1/m") return v;
    if (unit == "rad/mm" || unit == "1/mm") return v * 1e3;
    bad_unit(text, "rad/m, rad/mm, or inf");
}

double parse_angle(const std::string& text) {
    const auto [v, unit] = split_number(text);
    if (unit == "rad") return v;
    if (unit == "deg") return v * 3.14159265358979323846 / 180.0;
    bad_unit(text, "rad, deg");
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (const auto& part : split(text, ',')) {
        const auto dash = part.find('-', 1);
        if (dash == std::string::npos) {
            out.push_back(parse_int(part));
            continue;
        }
        const int a = parse_int(part.substr(0, dash));
        const int b = parse_int(part.substr(dash + 1));
        require(a <= b, "bad integer range '" + part + "'");
        for (int i = a; i <= b; ++i) out.push_back(i);
    }
    return out;
}

std::vector<double> parse_length_list(const std::string& text) {
    if (text.find(':') == std::string::npos) {
        std::vector<double> out;
        for (const auto& part : split(text, ',')) out.push_back(parse_length(part));
        return out;
    }
    const auto parts = split(text, ':');
    require(parts.size() == 3, "range must be start:stop:step, got '" + text + "'");
    const double a = parse_length(parts[0]);
    const double b = parse_length(parts[1]);
    const double step = parse_length(parts[2]);
    require(step > 0.0 && b >= a, "bad range '" + text + "'");
    const long long count = static_cast<long long>(std::floor((b - a) / step + 1e-9)) + 1;
    require(count <= 100000, "range '" + text + "' has too many values");
    std::vector<double> out;
    for (long long i = 0; i < count; ++i) out.push_back(std::round((a + i * step) * 1e12) / 1e12);
    return out;
}

}  // namespace oam
