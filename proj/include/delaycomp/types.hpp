#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace delaycomp {

using Vector = Eigen::VectorXd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller violated a documented precondition (bad gain, wrong dimension, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A history lookup fell outside the stored range.
class HistoryError : public Error {
public:
    using Error::Error;
};

/// The simulated state left the finite range.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent scenario configuration. `line` is 0 when the
/// problem is not tied to a specific line of the source file.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    [[nodiscard]] int line() const noexcept { return line_; }

private:
    int line_;
};

[[nodiscard]] inline bool all_finite(const Vector& v) noexcept {
    return v.allFinite();
}

}  // namespace delaycomp
