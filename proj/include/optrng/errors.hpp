#pragma once

#include <stdexcept>
#include <string>

namespace optrng {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Balance is undefined because the sequence holds a single symbol.
class ConstantSequence : public Error {
public:
    ConstantSequence() : Error("sequence contains a single symbol; balance is undefined") {}
};

class MalformedFile : public Error {
public:
    using Error::Error;
};

class IoFailure : public Error {
public:
    using Error::Error;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

class InsufficientQuantumBits : public Error {
public:
    using Error::Error;
};

/// Sequence is below the minimum length a statistical test accepts.
class TooShort : public Error {
public:
    using Error::Error;
};

/// Test cannot be evaluated on this input (e.g. too few random-walk cycles).
class Inapplicable : public Error {
public:
    using Error::Error;
};

class EmptyProfile : public Error {
public:
    EmptyProfile() : Error("median profile is empty") {}
};

class FitDiverged : public Error {
public:
    using Error::Error;
};

class InsufficientPoints : public Error {
public:
    using Error::Error;
};

}  // namespace optrng
