// errors.hpp — error categories shared by every module
//
// Two families: configuration errors (bad inputs, violated preconditions) and
// numerical errors (a well-posed computation that could not deliver its
// guarantee). Each carries a short machine-readable code; the CLI maps the
// families to exit codes 2 and 3.

#pragma once

#include <stdexcept>
#include <string>

namespace bilayer {

class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& detail)
        : std::runtime_error(detail), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace bilayer
