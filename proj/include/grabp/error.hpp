#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace grabp {

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A matrix row with no nonzero entry; S would be ill-posed for the row-action methods.
struct ZeroRowError : std::invalid_argument {
    ZeroRowError(std::vector<std::size_t> rows_in, const std::string& what);
    std::vector<std::size_t> rows;  // 0-based
};

struct ParseError : std::runtime_error {
    ParseError(std::size_t line_in, const std::string& what);
    std::size_t line;  // 1-based, 0 when not tied to a line
};

// A file that cannot be opened, read or written.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::invalid_argument {
    ConfigError(std::string field_in, const std::string& what);
    std::string field;
};

struct UnimplementedError : std::logic_error {
    using std::logic_error::logic_error;
};

// Invariant violated inside a solver step (e.g. a selected block with zero residual).
struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace grabp
