#pragma once

#include <cstddef>
#include <string>

namespace gatsim {

// Diagnostics go through a single sink so tests and the CLI can silence or
// count them.
void log_warning(const std::string& message);
void set_warnings_enabled(bool enabled);
std::size_t warning_count();

}  // namespace gatsim
