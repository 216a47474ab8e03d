#include "grabp/error.hpp"

#include <utility>

namespace grabp {

ZeroRowError::ZeroRowError(std::vector<std::size_t> rows_in, const std::string& what)
    : std::invalid_argument(what), rows(std::move(rows_in)) {}

ParseError::ParseError(std::size_t line_in, const std::string& what)
    : std::runtime_error(line_in == 0 ? what : "line " + std::to_string(line_in) + ": " + what), line(line_in) {}

ConfigError::ConfigError(std::string field_in, const std::string& what)
    : std::invalid_argument(field_in + ": " + what), field(std::move(field_in)) {}

}  // namespace grabp
