#pragma once

#include <stdexcept>
#include <string>

namespace hcran {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Raised when no allocation satisfies the constraint set.
class InfeasibleError : public Error {
public:
    InfeasibleError(std::string constraint, const std::string& detail)
        : Error("infeasible instance: " + constraint + " (" + detail + ")"), constraint_(std::move(constraint)) {}
    const std::string& constraint() const { return constraint_; }

private:
    std::string constraint_;
};

}  // namespace hcran
