#pragma once

#include <stdexcept>
#include <string>

namespace sigcausal {

// Exit codes used by the command-line front end.
enum class ExitCode : int {
    success = 0,
    failure = 1,
    usage = 2,
    numeric = 3,
    io = 4,
};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual ExitCode exit_code() const noexcept { return ExitCode::failure; }
};

// Invalid arguments, malformed queries, violated preconditions.
class UsageError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::usage; }
};

class IndexError : public UsageError {
public:
    using UsageError::UsageError;
};

// Interval restriction left fewer than two observations.
class DegenerateIntervalError : public UsageError {
public:
    using UsageError::UsageError;
};

class CapExceededError : public UsageError {
public:
    using UsageError::UsageError;
};

class NumericError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::numeric; }
};

class SimulationDivergedError : public NumericError {
public:
    SimulationDivergedError(std::size_t path_index, const std::string& what)
        : NumericError(what), path_index_(path_index) {}
    std::size_t path_index() const noexcept { return path_index_; }

private:
    std::size_t path_index_;
};

class IoError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::io; }
};

}  // namespace sigcausal
