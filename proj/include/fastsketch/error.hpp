#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fastsketch {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An operation received an empty set (or only empty inputs) where a
// nonempty one is required.
class EmptyInput : public Error {
public:
    using Error::Error;
};

// Two sketches or feature vectors of different shape or seed were combined.
class IncompatibleSketches : public Error {
public:
    using Error::Error;
};

class InvalidParameters : public Error {
public:
    using Error::Error;
};

// Argument outside an operation's documented domain (e.g. round >= 2t).
class ContractViolation : public Error {
public:
    using Error::Error;
};

class DuplicateId : public Error {
public:
    using Error::Error;
};

// Malformed binary or text input. `offset()` is a byte offset for binary
// files and a 1-based line number for text files.
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::uint64_t offset)
        : Error(what + " (at " + std::to_string(offset) + ")"), offset_(offset) {}

    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::uint64_t offset_;
};

}  // namespace fastsketch
