#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace cpals {

/// Shapes or extents that do not fit together.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An input violates a documented precondition (e.g. unnormalized columns).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A rank-one component collapsed (zero column norm or zero weight).
class DegenerateComponentError : public std::runtime_error {
public:
    DegenerateComponentError(std::size_t component, std::optional<std::size_t> iteration = {})
        : std::runtime_error(format(component, iteration)),
          component_(component),
          iteration_(iteration) {}

    std::size_t component() const noexcept { return component_; }
    std::optional<std::size_t> iteration() const noexcept { return iteration_; }

    DegenerateComponentError at_iteration(std::size_t k) const {
        return DegenerateComponentError(component_, k);
    }

private:
    static std::string format(std::size_t component, std::optional<std::size_t> iteration) {
        std::string msg = "degenerate component " + std::to_string(component);
        if (iteration) msg += " at iteration " + std::to_string(*iteration);
        return msg;
    }

    std::size_t component_;
    std::optional<std::size_t> iteration_;
};

/// Fewer usable data points than an estimator needs.
class InsufficientDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed tensor/model file. Line and column are 1-based; column 0 means "whole line".
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : std::runtime_error("line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ": " + what),
          line_(line),
          column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

}  // namespace cpals
