#include "nmchaos/toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

namespace nmchaos::toml {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& what)
    : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  Document run() {
    Document doc;
    Table* current = &doc.tables[""];
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        advance();
        skip_ws();
        if (peek() == '[') fail("arrays of tables are not supported");
        const std::string name = key();
        skip_ws();
        expect(']');
        if (doc.tables.count(name) && !doc.tables[name].empty()) fail("duplicate table [" + name + "]");
        current = &doc.tables[name];
      } else {
        const std::size_t key_line = line_, key_col = col_;
        const std::string k = key();
        skip_ws();
        expect('=');
        skip_ws();
        Value v = value();
        v.line = key_line;
        if (current->count(k)) throw ParseError(key_line, key_col, "duplicate key '" + k + "'");
        current->emplace(k, std::move(v));
      }
      end_of_line();
    }
    return doc;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;

  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[pos_]; }
  char advance() {
    const char c = s_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, col_, what); }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    advance();
  }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) advance();
  }
  void skip_comment() {
    if (peek() == '#')
      while (!eof() && peek() != '\n') advance();
  }
  void skip_blank_lines() {
    while (!eof()) {
      skip_ws();
      skip_comment();
      if (peek() == '\r') advance();
      if (peek() == '\n') advance();
      else break;
    }
  }
  // Whitespace, comments and newlines inside arrays.
  void skip_array_space() {
    while (!eof()) {
      skip_ws();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') advance();
      else break;
    }
  }
  void end_of_line() {
    skip_ws();
    skip_comment();
    if (peek() == '\r') advance();
    if (eof()) return;
    if (peek() != '\n') fail("unexpected trailing text");
    advance();
  }

  static bool bare_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  }

  std::string key() {
    if (peek() == '"') return basic_string();
    std::string k;
    while (!eof() && (bare_char(peek()) || peek() == '.')) k += advance();
    if (k.empty()) fail("expected a key");
    if (k.front() == '.' || k.back() == '.' || k.find("..") != std::string::npos)
      fail("malformed dotted key '" + k + "'");
    return k;
  }

  std::string basic_string() {
    expect('"');
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = advance();
      if (c == '"') break;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (eof()) fail("unterminated escape");
      switch (const char e = advance()) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: fail(std::string("unsupported escape '\\") + e + "'");
      }
    }
    return out;
  }

  std::string literal_string() {
    expect('\'');
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = advance();
      if (c == '\'') break;
      out += c;
    }
    return out;
  }

  Value value() {
    const char c = peek();
    if (c == '"') return {basic_string()};
    if (c == '\'') return {literal_string()};
    if (c == '[') return {array()};
    if (c == '{') fail("inline tables are not supported");
    std::string tok;
    while (!eof() && (bare_char(peek()) || peek() == '.' || peek() == '+')) tok += advance();
    if (tok.empty()) fail("expected a value");
    if (tok == "true") return {true};
    if (tok == "false") return {false};
    return number(tok);
  }

  Array array() {
    expect('[');
    Array out;
    skip_array_space();
    while (peek() != ']') {
      if (eof()) fail("unterminated array");
      Value v = value();
      v.line = line_;
      out.push_back(std::move(v));
      skip_array_space();
      if (peek() == ',') {
        advance();
        skip_array_space();
      } else if (peek() != ']') {
        fail("expected ',' or ']' in array");
      }
    }
    advance();
    return out;
  }

  Value number(std::string tok) {
    const std::size_t col = col_ - tok.size();
    std::string clean;
    for (std::size_t i = 0; i < tok.size(); ++i) {
      if (tok[i] == '_') {
        if (i == 0 || i + 1 == tok.size() || !std::isdigit(static_cast<unsigned char>(tok[i - 1])) ||
            !std::isdigit(static_cast<unsigned char>(tok[i + 1])))
          throw ParseError(line_, col, "malformed number '" + tok + "'");
        continue;
      }
      clean += tok[i];
    }
    std::string_view body = clean;
    bool neg = false;
    if (!body.empty() && (body.front() == '+' || body.front() == '-')) {
      neg = body.front() == '-';
      body.remove_prefix(1);
    }
    if (body == "inf" || body == "nan") {
      const double v = body == "inf" ? std::numeric_limits<double>::infinity()
                                     : std::numeric_limits<double>::quiet_NaN();
      return {neg ? -v : v};
    }
    const bool is_float = clean.find_first_of(".eE") != std::string::npos;
    const char* first = clean.data();
    const char* last = clean.data() + clean.size();
    if (*first == '+') ++first;
    if (is_float) {
      double d = 0;
      auto [p, ec] = std::from_chars(first, last, d);
      if (ec != std::errc() || p != last) throw ParseError(line_, col, "malformed number '" + tok + "'");
      return {d};
    }
    std::int64_t i = 0;
    auto [p, ec] = std::from_chars(first, last, i);
    if (ec == std::errc::result_out_of_range) throw ParseError(line_, col, "integer out of range '" + tok + "'");
    if (ec != std::errc() || p != last) throw ParseError(line_, col, "malformed value '" + tok + "'");
    return {i};
  }
};

}  // namespace

Document parse(std::string_view text) { return Parser(text).run(); }

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

}  // namespace nmchaos::toml
