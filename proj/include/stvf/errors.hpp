#pragma once

#include <stdexcept>
#include <string>

namespace stvf {

// Raised when a Gram or system matrix fails its positivity contract
// (pivot below tolerance during factorization).
struct AssemblyError : std::runtime_error {
    explicit AssemblyError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a numerical contract is violated at solve time
// (singular normal matrix, residual above tolerance).
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace stvf
