#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wpt {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter or configuration value violates its contract.
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// The envelope plant has no unique equilibrium (R1 R2 + (w Lm)^2 == 0).
class DegeneratePlantError : public Error {
public:
    using Error::Error;
};

/// An integrator produced a non-finite state.
class DivergenceError : public Error {
public:
    DivergenceError(std::size_t step, double time, const std::string& context = {})
        : Error(context + "non-finite state at step " + std::to_string(step) + " (t = " + std::to_string(time) + " s)"),
          step_(step), time_(time) {}

    std::size_t step() const noexcept { return step_; }
    double time() const noexcept { return time_; }

private:
    std::size_t step_;
    double time_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace wpt
