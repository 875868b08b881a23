#pragma once

#include <string>

namespace dcmicro {

// Warnings go to stderr once per distinct message.  Tests and the CLI can
// silence them; the count of distinct warnings is kept either way.
void log_warning(const std::string& msg);
void set_warnings_enabled(bool on);
int warning_count();

}  // namespace dcmicro
