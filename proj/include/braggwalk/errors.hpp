#pragma once

#include <stdexcept>
#include <string>

namespace braggwalk {

/// Invalid run configuration or input file. `line` is 0 when the error is not
/// tied to a location in a text file.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A run would exceed the configured work or memory budget.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A propagated amplitude became non-finite.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace braggwalk
