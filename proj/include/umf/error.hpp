#pragma once

#include <stdexcept>
#include <string>

namespace umf {

// Bad input: malformed spec, grid, config or precondition violation.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A numerical stage could not deliver a trustworthy result.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace umf
