#pragma once

#include <stdexcept>
#include <string>

namespace lmd {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad user input: invalid grid, parameters, config files, argument combinations.
struct ConfigError : Error {
    using Error::Error;
};

// Numerical failure during integration (NaN/Inf, negative density, CFL guard).
struct NumericsError : Error {
    explicit NumericsError(const std::string& msg, long step_index = -1)
        : Error(msg), step(step_index) {}
    long step;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace lmd
