#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gibbsnet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (x = 0 in Raoult's
/// law, division by zero on a dual, C + T = 0 in Antoine, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Vector or matrix sizes that do not agree.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A component embedding with zero L2 norm; cosine distance is undefined.
class DegenerateEmbeddingError : public Error {
public:
    using Error::Error;
};

/// Malformed input text. `position` is a byte offset for SMILES and a
/// 1-based line number for tabular files.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error(what), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Data that parses but violates an invariant (bad checkpoint, missing
/// descriptor, NaN gradient).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Broken internal bookkeeping; never expected in correct use.
class InternalError : public Error {
public:
    using Error::Error;
};

}  // namespace gibbsnet
