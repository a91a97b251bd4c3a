#pragma once

#include <string>
#include <vector>

namespace oam {

// Parsers for physical quantities written with an explicit unit suffix.
// A bare number is rejected with ValidationError.

/// m, cm, mm, um, nm -> meters. "0.70m", "2 mm".
double parse_length(const std::string& text);

/// m^-2/3 or mm^-2/3 -> m^-2/3. "5e-10mm^-2/3" is 5e-8 m^-2/3.
double parse_cn2(const std::string& text);

/// rad/m or rad/mm -> rad/m; "inf" (no unit) means no cutoff.
double parse_wavenumber(const std::string& text);

/// rad or deg -> radians.
double parse_angle(const std::string& text);

/// "1-3" or "1,2,5".
std::vector<int> parse_int_list(const std::string& text);

/// "0.40m:1.00m:0.05m" (inclusive range) or "0.4m,0.7m,1m". Range values are
/// rounded to the nearest picometer so decimal steps land on decimal values.
std::vector<double> parse_length_list(const std::string& text);

}  // namespace oam
