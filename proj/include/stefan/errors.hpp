#pragma once

#include <stdexcept>
#include <string>

namespace stefan {

/// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Coefficient function evaluated to a non-positive or non-finite value.
class ModelDomainError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Adaptive quadrature hit its refinement cap; carries the best estimate.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double best, double err)
        : std::runtime_error(what), best_estimate(best), error_estimate(err) {}
    double best_estimate;
    double error_estimate;
};

}  // namespace stefan
