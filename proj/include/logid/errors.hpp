#pragma once

#include <stdexcept>
#include <string>

namespace logid {

/// Requested tolerance could not be met; carries the best available result.
class accuracy_error : public std::runtime_error {
public:
    accuracy_error(const std::string& what, double best_value, double error_estimate)
        : std::runtime_error(what), value(best_value), abs_error(error_estimate) {}

    double value;
    double abs_error;
};

/// A parameter combination no evaluation route supports.
class unsupported_error : public std::runtime_error {
public:
    explicit unsupported_error(const std::string& what) : std::runtime_error(what) {}
};

/// Failure of a numerical subroutine (factorization, non-convergence, ...).
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

/// A computation that would exceed its resource budget (enumeration size,
/// evaluation count) and was refused up front.
class budget_error : public std::runtime_error {
public:
    explicit budget_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace logid
