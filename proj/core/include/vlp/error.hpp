#pragma once

#include <stdexcept>
#include <string>

namespace vlp {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of an operation (t outside [0,1], bad parameters).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Pointwise evaluation at a point where the value is +infinity.
class UnboundedPointError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Operation not defined for the given representation variant.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure ran out of budget without a certified answer.
/// Never coerced into a finite or divergent verdict.
class InconclusiveError : public Error {
public:
    using Error::Error;
};

/// Two independent routes that must agree did not.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace vlp
