#pragma once

#include <stdexcept>
#include <string>

namespace lacnn {

/// Unreadable, malformed or inconsistent input data (files, labels, formats).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Non-finite values encountered during numeric work (diverged training).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace lacnn
