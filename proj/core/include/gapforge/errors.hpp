#pragma once

#include <stdexcept>
#include <string>

namespace gapforge {

/// Invalid input or violated domain invariant.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// The layout policy cannot place the requested shapes.
class LayoutError : public std::runtime_error {
public:
    explicit LayoutError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical procedure failed to converge or an internal cross-check tripped.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace gapforge
