#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ragaudit {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input record. Carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& message)
        : Error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Input that parses but breaks a domain invariant (duplicate ids, bad config, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A stance or similarity provider could not produce a usable answer.
class ProviderError : public Error {
public:
    using Error::Error;
};

/// Output could not be written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Statistics requested on a study set that cannot support them.
class DegenerateError : public Error {
public:
    using Error::Error;
};

}  // namespace ragaudit
