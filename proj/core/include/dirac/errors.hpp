#pragma once

#include <stdexcept>
#include <string>

namespace dirac {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes or interfaces do not line up (ambient, arity, bond space).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A subspace that must be a Dirac structure failed the exact (or toleranced) check.
class DiracCheckError : public Error {
public:
    using Error::Error;
};

/// Invalid constructor parameters (zero ratio, non-skew matrix, negative capacity...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure could not produce a trustworthy answer.
class SolverError : public Error {
public:
    using Error::Error;
};

/// Malformed serialized input.
class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace dirac
