#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ritt {

// Base class for all mathematically meaningful failures (as opposed to
// usage/parse errors). CLI maps these to exit code 1.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A required root (square root, n-th root) does not exist in the coefficient
// field Q(s). Carries a description of the minimal polynomial of the missing
// element, e.g. "y^2 - (s+1)".
class RootNotRepresentable : public DomainError {
public:
    explicit RootNotRepresentable(std::string minimal_poly)
        : DomainError("root not representable in Q(s); minimal polynomial: " + minimal_poly),
          minimal_poly_(std::move(minimal_poly)) {}

    const std::string& minimal_poly() const noexcept { return minimal_poly_; }

private:
    std::string minimal_poly_;
};

// A functional equation / linear system has no solution at all.
class NoSolution : public DomainError {
public:
    using DomainError::DomainError;
};

// A partial action was applied outside its domain (Ritt swap undefined, ...).
class UndefinedAction : public DomainError {
public:
    using DomainError::DomainError;
};

// Rewriting/action step budget exhausted.
class BudgetExceeded : public DomainError {
public:
    using DomainError::DomainError;
};

// A decomposition handed to the bookkeeping layer is not clean C-free:
// some factor is neither a scaled monomial nor a C-free Ritt polynomial,
// or no factor is a non-monomial.
class NotCleanCFree : public DomainError {
public:
    using DomainError::DomainError;
};

// Applying a trace to bookkeeping tables drove an entry negative.
class NegativeEntry : public DomainError {
public:
    using DomainError::DomainError;
};

// An internal stage of a multi-step pipeline produced data violating the
// stage's contract. Always a bug trap: the message names the failing stage.
class PipelineFailure : public DomainError {
public:
    using DomainError::DomainError;
};

// Input text could not be parsed. CLI maps this to exit code 2.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ritt
