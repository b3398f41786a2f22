// Copyright 2026 The wae Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WAE_ERROR_HPP
#define WAE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace wae {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value or combination of values violates an operation's contract
/// (out-of-range score, mismatched dimensions, degenerate input, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A text input (CSV, JSON config, weight list) could not be parsed.
/// Messages carry file/line context where available.
class ParseError : public Error {
public:
    using Error::Error;
};

/// A binary file (FTB, PGM/PPM) violates its format contract.
class FormatError : public Error {
public:
    using Error::Error;
};

} // namespace wae

#endif // WAE_ERROR_HPP
