#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cybok {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input document. Offsets are zero-based bytes; line/column are
// one-based and zero when unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t byte_offset, std::size_t line = 0,
               std::size_t column = 0)
        : Error(what + " (byte " + std::to_string(byte_offset) +
                (line ? ", line " + std::to_string(line) + ", column " + std::to_string(column)
                      : std::string{}) +
                ")"),
          byte_offset_(byte_offset), line_(line), column_(column) {}

    std::size_t byte_offset() const noexcept { return byte_offset_; }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t byte_offset_;
    std::size_t line_;
    std::size_t column_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class PersistenceError : public Error {
public:
    using Error::Error;
};

class StaleIndexError : public Error {
public:
    using Error::Error;
};

class CorruptSourceError : public Error {
public:
    using Error::Error;
};

// Transport-level failure while downloading a source; safe to retry.
class FetchError : public Error {
public:
    FetchError(const std::string& database, const std::string& what)
        : Error(database + ": " + what), database_(database) {}

    const std::string& database() const noexcept { return database_; }
    bool retryable() const noexcept { return true; }

private:
    std::string database_;
};

}  // namespace cybok
