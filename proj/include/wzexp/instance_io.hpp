#pragma once

// JSON instance files. See docs/instance_format.md for the schema.

#include <cstddef>
#include <stdexcept>
#include <string>

#include "wzexp/exponent.hpp"

namespace wzexp {

/// Schema or parse failure. `line` is 0 when unknown.
class InstanceError : public std::invalid_argument {
 public:
  InstanceError(const std::string& source, std::size_t line, std::string field, const std::string& what);
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

WZInstance parse_instance(const std::string& path);
WZInstance parse_instance_text(const std::string& text, const std::string& source = "<string>");

/// Writes an explicit (non-builtin) instance document.
std::string instance_to_json(const WZInstance& inst);

}  // namespace wzexp
