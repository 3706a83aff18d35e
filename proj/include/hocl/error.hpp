#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace hocl {

// Bad argument to a library call: dimension mismatch, out-of-range parameter.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A documented precondition of the dynamics was violated at runtime,
// e.g. an activation exceeding its declared bound.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// The computation produced a non-finite value.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A configuration document failed validation. field() names the offender.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error("invalid config field '" + field + "': " + what),
          field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hocl
