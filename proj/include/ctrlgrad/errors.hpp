#pragma once

#include <stdexcept>
#include <string>

namespace ctrlgrad {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not match the operation.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A numerical precondition on the inputs does not hold (asymmetric matrix,
/// indefinite Hessian, ill-conditioned Gramian, ...).
class ContractError : public Error {
public:
    using Error::Error;
};

class UnsupportedSizeError : public Error {
public:
    using Error::Error;
};

class InvalidParameterError : public ContractError {
public:
    using ContractError::ContractError;
};

class NoCriticalPointError : public ContractError {
public:
    using ContractError::ContractError;
};

class SteeringInfeasibleError : public ContractError {
public:
    using ContractError::ContractError;
};

class IllConditionedGramianError : public ContractError {
public:
    using ContractError::ContractError;
};

class ScheduleExhaustedError : public Error {
public:
    using Error::Error;
};

/// Malformed input document. `pointer` is a JSON pointer to the offending node.
class ParseError : public Error {
public:
    ParseError(const std::string& pointer, const std::string& what)
        : Error(pointer.empty() ? what : pointer + ": " + what), pointer_(pointer)
    {
    }

    const std::string& pointer() const noexcept { return pointer_; }

private:
    std::string pointer_;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace ctrlgrad
