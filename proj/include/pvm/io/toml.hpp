#pragma once

// Minimal TOML reader covering the subset the config files use:
// [section] headers, bare keys, numbers, booleans, basic strings, and
// (nested, possibly multi-line) arrays. Comments start with '#'.

#include <cctype>
#include <cstdlib>
#include <map>
#include <set>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace pvm::io::toml {

struct Value;
using Array = std::vector<Value>;

struct Value {
  std::variant<double, bool, std::string, Array> data;
  int line = 0;

  bool is_number() const { return std::holds_alternative<double>(data); }
  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_array() const { return std::holds_alternative<Array>(data); }
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// section name → key → value; keys before any header live in section "".
using Document = std::map<std::string, std::map<std::string, Value>>;

namespace detail {

class Parser {
 public:
  explicit Parser(std::string text) : s_(std::move(text)) {}

  Document parse() {
    Document doc;
    std::string section;
    std::set<std::string> seen;
    doc[section];
    while (true) {
      skip_ws_and_comments(true);
      if (eof()) break;
      if (peek() == '[') {
        ++pos_;
        skip_inline_ws();
        section = bare_key();
        skip_inline_ws();
        expect(']');
        if (!seen.insert(section).second)
          throw ParseError(line_, "duplicate section [" + section + "]");
        doc[section];
      } else {
        const int key_line = line_;
        const std::string key = bare_key();
        skip_inline_ws();
        expect('=');
        skip_inline_ws();
        Value v = value();
        v.line = key_line;
        auto& tbl = doc[section];
        if (tbl.count(key)) throw ParseError(key_line, "duplicate key '" + key + "'");
        tbl.emplace(key, std::move(v));
      }
      end_of_line();
    }
    return doc;
  }

 private:
  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[pos_]; }

  void advance() {
    if (peek() == '\n') ++line_;
    ++pos_;
  }

  void expect(char c) {
    if (peek() != c) throw ParseError(line_, std::string("expected '") + c + "'");
    advance();
  }

  void skip_inline_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) advance();
  }

  void skip_ws_and_comments(bool newlines) {
    while (!eof()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || (newlines && c == '\n')) {
        advance();
      } else if (c == '#') {
        while (!eof() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  void end_of_line() {
    skip_inline_ws();
    if (peek() == '#')
      while (!eof() && peek() != '\n') advance();
    if (!eof() && peek() != '\n') throw ParseError(line_, "unexpected trailing characters");
  }

  std::string bare_key() {
    std::string k;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                      peek() == '-'))
      k += s_[pos_++];
    if (k.empty()) throw ParseError(line_, "expected a key");
    return k;
  }

  Value value() {
    Value v;
    v.line = line_;
    const char c = peek();
    if (c == '[') {
      advance();
      Array arr;
      while (true) {
        skip_ws_and_comments(true);
        if (eof()) throw ParseError(v.line, "unterminated array");
        if (peek() == ']') {
          advance();
          break;
        }
        arr.push_back(value());
        skip_ws_and_comments(true);
        if (eof()) throw ParseError(v.line, "unterminated array");
        if (peek() == ',') {
          advance();
        } else if (peek() == ']') {
          advance();
          break;
        } else {
          throw ParseError(line_, "expected ',' or ']' in array");
        }
      }
      v.data = std::move(arr);
    } else if (c == '"') {
      advance();
      std::string str;
      while (!eof() && peek() != '"') {
        if (peek() == '\n') throw ParseError(line_, "unterminated string");
        if (peek() == '\\') {
          advance();
          const char e = peek();
          str += e == 'n' ? '\n' : e == 't' ? '\t' : e;
        } else {
          str += peek();
        }
        advance();
      }
      expect('"');
      v.data = std::move(str);
    } else if (s_.compare(pos_, 4, "true") == 0) {
      pos_ += 4;
      v.data = true;
    } else if (s_.compare(pos_, 5, "false") == 0) {
      pos_ += 5;
      v.data = false;
    } else {
      std::string num;
      while (!eof() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '+' ||
                        peek() == '-' || peek() == '.' || peek() == 'e' || peek() == 'E' ||
                        peek() == '_'))
        if (s_[pos_++] != '_') num += s_[pos_ - 1];
      if (num.empty()) throw ParseError(line_, "expected a value");
      char* end = nullptr;
      const double d = std::strtod(num.c_str(), &end);
      if (end != num.c_str() + num.size()) throw ParseError(line_, "malformed number '" + num + "'");
      v.data = d;
    }
    return v;
  }

  std::string s_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace detail

inline Document parse(const std::string& text) { return detail::Parser(text).parse(); }

}  // namespace pvm::io::toml
