#pragma once

#include <stdexcept>
#include <string>

namespace adrc {

// Precondition violated by a caller-supplied value (bad gain, non-finite matrix, ...).
class InvalidInput : public std::invalid_argument {
public:
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

// Closed-loop simulation diverged or produced non-finite values.
class SimulationError : public std::runtime_error {
public:
    SimulationError(const std::string& what, double time)
        : std::runtime_error(what), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

} // namespace adrc
