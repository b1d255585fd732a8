#pragma once

#include <stdexcept>
#include <string>

namespace tourank {

// Base class for everything this library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input text (CSV rows, config files, model JSON).
class ParseError : public Error {
public:
    using Error::Error;
};

// An argument violates an operation's contract.
class DomainError : public Error {
public:
    using Error::Error;
};

// Vector / matrix shape mismatch (a flavor of contract violation).
class DimensionError : public DomainError {
public:
    using DomainError::DomainError;
};

// Non-finite values where finite ones are required.
class NumericError : public Error {
public:
    using Error::Error;
};

// Tree construction or model training cannot proceed.
class BuildError : public Error {
public:
    using Error::Error;
};

// Inconsistent or invalid experiment configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

// AUC requested for a single-class label vector.
class UndefinedAucError : public DomainError {
public:
    using DomainError::DomainError;
};

} // namespace tourank
