#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace solscan {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed Solidity input: unbalanced delimiters, unterminated comments or
/// strings, truncated files.
class ParseError : public Error {
public:
    ParseError(std::string message, std::size_t line, std::size_t column)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line), column_(column) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class PatternError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class UnknownTool : public Error {
public:
    explicit UnknownTool(const std::string& id) : Error("unknown tool: " + id), id_(id) {}
    [[nodiscard]] const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

class RuntimeUnavailable : public Error {
public:
    using Error::Error;
};

class ImageMissing : public Error {
public:
    using Error::Error;
};

class UnknownDataset : public Error {
public:
    explicit UnknownDataset(const std::string& name) : Error("unknown dataset: " + name) {}
};

class MissingPath : public Error {
public:
    using Error::Error;
};

class ManifestError : public Error {
public:
    using Error::Error;
};

class UsageError : public Error {
public:
    using Error::Error;
};

}  // namespace solscan
