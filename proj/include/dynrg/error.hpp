#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dynrg {

enum class ErrorKind {
    parameter_domain,      // law parameters outside their admissible set
    infinite_mean,         // a mean that must be finite is not
    divergence,            // series evaluated at or below its convergence boundary
    out_of_range,          // inversion target outside the function's range
    convergence,           // iterative solver hit its cap
    size,                  // request too large (e.g. joint law over too many epochs)
    insufficient_data,     // trace too short for the requested statistics
    incompatible_moments,  // empirical moments have no solution in the family
    degenerate_saddle,     // saddlepoint Hessian not positive definite
    io,                    // file system / parsing problems
    config,                // malformed configuration
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace dynrg
