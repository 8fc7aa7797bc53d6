#pragma once

#include <stdexcept>
#include <string>

namespace putlab {

/// Thrown when a domain type or operation input violates its invariants.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown on missing/unreadable files and malformed resources.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace putlab
