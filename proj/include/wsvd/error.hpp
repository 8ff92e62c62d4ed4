#ifndef WSVD_ERROR_HPP
#define WSVD_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wsvd {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Ingestion failure; carries the 1-based line number of the offending line.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// SGD produced a non-finite value; message names the epoch and rating index
/// when thrown from the training loop.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// Output directory or result file cannot be created or written.
class OutputError : public Error {
public:
    using Error::Error;
};

/// Model file problems, split by cause so callers can react distinctly.
class ModelIoError : public Error {
public:
    enum class Kind { Version, Shape, Corrupt, Io };

    ModelIoError(Kind kind, const std::string& msg) : Error(msg), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

} // namespace wsvd

#endif
