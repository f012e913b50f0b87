#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fxlab {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad user input or a violated precondition.
class ValidationError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// An adaptive loop produced non-finite or runaway values.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, std::size_t iteration)
        : Error(what), iteration_(iteration) {}

    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

// The requested optimal controller is not realizable (non-causal).
class InfeasibleError : public Error {
public:
    using Error::Error;
};

class ConditioningError : public Error {
public:
    ConditioningError(const std::string& what, double condition_number)
        : Error(what), condition_number_(condition_number) {}

    double condition_number() const noexcept { return condition_number_; }

private:
    double condition_number_;
};

} // namespace fxlab
