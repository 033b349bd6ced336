#pragma once

#include <stdexcept>
#include <string>

namespace spdelab {

// Invalid parameters or mismatched inputs detected before any work is done.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Argument outside the mathematical domain of an operation (negative time,
// gamma <= 1, zero terminal value, ...).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Requested diagnostic data was not retained by the producer.
class UnavailableError : public std::runtime_error {
public:
    explicit UnavailableError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace spdelab
