#pragma once

#include <stdexcept>
#include <string>

namespace asplab {

// Invalid user input: bad grid sizes, unknown catalog keys, inadmissible beta, malformed
// config files. Maps to CLI exit code 1.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A linear solve failed to reach its tolerance within the iteration cap. Carries the final
// relative residual so callers can report how close it got. Maps to CLI exit code 2.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual, int iterations)
        : std::runtime_error(what), final_residual(residual), iterations_used(iterations) {}

    double final_residual;
    int iterations_used;
};

} // namespace asplab
