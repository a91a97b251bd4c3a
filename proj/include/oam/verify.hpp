#pragma once

#include <string>
#include <vector>

namespace oam {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Oracle and invariant checks. "quick" runs small-grid checks in seconds;
/// "full" adds the default-grid optics checks.
std::vector<CheckResult> run_verify(const std::string& suite);

}  // namespace oam
