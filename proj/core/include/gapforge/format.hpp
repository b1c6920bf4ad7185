#pragma once

// Deterministic serialization helpers.  All floats printed by the toolkit go
// through format_double so that repeated runs produce byte-identical files.

#include <string>

namespace gapforge::io {

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

/// Parses a strict decimal double; throws ValidationError on trailing junk.
double parse_double(const std::string& text);

} // namespace gapforge::io
