#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nmchaos/error.hpp"

namespace nmchaos::toml {

/// Malformed document; carries the 1-based position of the offending text.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct Value;
using Array = std::vector<Value>;

/// Scalar or array value. Inline tables and dates are not supported.
struct Value {
  std::variant<std::int64_t, double, bool, std::string, Array> v;
  std::size_t line = 0;

  bool is_int() const { return std::holds_alternative<std::int64_t>(v); }
  bool is_float() const { return std::holds_alternative<double>(v); }
  bool is_number() const { return is_int() || is_float(); }
  bool is_bool() const { return std::holds_alternative<bool>(v); }
  bool is_string() const { return std::holds_alternative<std::string>(v); }
  bool is_array() const { return std::holds_alternative<Array>(v); }

  std::int64_t as_int() const { return std::get<std::int64_t>(v); }
  double as_number() const { return is_int() ? static_cast<double>(as_int()) : std::get<double>(v); }
  bool as_bool() const { return std::get<bool>(v); }
  const std::string& as_string() const { return std::get<std::string>(v); }
  const Array& as_array() const { return std::get<Array>(v); }
};

using Table = std::map<std::string, Value, std::less<>>;

/// Top-level keys live in the table named "".
struct Document {
  std::map<std::string, Table, std::less<>> tables;
};

Document parse(std::string_view text);

/// TOML literal for a string (basic string with escapes).
std::string quote(std::string_view s);

}  // namespace nmchaos::toml
