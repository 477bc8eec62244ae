#pragma once

#include <stdexcept>
#include <string>

namespace pocketforge {

// Error categories map one-to-one onto CLI exit codes.
enum class ErrorKind { validation = 1, infeasible = 2, io = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string code, const std::string& message)
        : std::runtime_error(message), kind_(kind), code_(std::move(code)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& code() const noexcept { return code_; }

private:
    ErrorKind kind_;
    std::string code_;
};

class ValidationError : public Error {
public:
    ValidationError(std::string code, const std::string& message)
        : Error(ErrorKind::validation, std::move(code), message) {}
};

class InfeasibleError : public Error {
public:
    InfeasibleError(std::string code, const std::string& message)
        : Error(ErrorKind::infeasible, std::move(code), message) {}
};

class IoError : public Error {
public:
    IoError(std::string code, const std::string& message)
        : Error(ErrorKind::io, std::move(code), message) {}
};

} // namespace pocketforge
