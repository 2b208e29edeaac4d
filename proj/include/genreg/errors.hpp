#pragma once

#include <stdexcept>
#include <string>

namespace genreg {

// Error categories map 1:1 onto CLI exit codes.
enum class ErrorCategory : int {
    config = 2,
    data = 3,
    numeric = 4,
    experiment = 5,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCategory cat, const std::string& msg)
        : std::runtime_error(msg), category_(cat) {}
    ErrorCategory category() const { return category_; }
    int exit_code() const { return static_cast<int>(category_); }

private:
    ErrorCategory category_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(ErrorCategory::config, msg) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& msg) : Error(ErrorCategory::data, msg) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& msg) : Error(ErrorCategory::numeric, msg) {}
};

class ExperimentError : public Error {
public:
    explicit ExperimentError(const std::string& msg) : Error(ErrorCategory::experiment, msg) {}
};

} // namespace genreg
