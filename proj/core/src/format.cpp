#include "gapforge/format.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <system_error>

#include "gapforge/errors.hpp"

namespace gapforge::io {

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (end == begin || end != begin + text.size() || !std::isfinite(value))
        throw ValidationError("not a finite floating point number: '" + text + "'");
    return value;
}

} // namespace gapforge::io
