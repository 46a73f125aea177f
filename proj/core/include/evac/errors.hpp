#pragma once

#include <stdexcept>
#include <string>

namespace evac {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input files and parameters.
class InputError : public Error {
public:
    using Error::Error;
};

// Non-radial, disconnected or phase-inconsistent network.
class TopologyError : public InputError {
public:
    using InputError::InputError;
};

class PowerFlowError : public Error {
public:
    PowerFlowError(const std::string& what, int t, double mismatch);

    int timeStep() const noexcept { return t_; }
    double mismatch() const noexcept { return mismatch_; }

private:
    int t_;
    double mismatch_;
};

class SolverError : public Error {
public:
    using Error::Error;
};

// A decoded charging schedule breaks one of the charging-logic constraints.
class ScheduleError : public Error {
public:
    using Error::Error;
};

}  // namespace evac
