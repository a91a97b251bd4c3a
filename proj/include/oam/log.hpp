#pragma once

#include <string>

namespace oam {

/// Writes "warning: <msg>" to stderr unless warnings are disabled.
void warn(const std::string& msg);
void set_warnings_enabled(bool enabled);

}  // namespace oam
