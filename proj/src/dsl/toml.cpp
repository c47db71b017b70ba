#include "nxs/dsl/toml.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

#include "nxs/error.hpp"

namespace nxs::dsl {

const Value* TomlTable::find(std::string_view key) const {
  for (const auto& [k, v] : entries) {
    if (k == key) return &v;
  }
  return nullptr;
}

namespace {

class Reader {
 public:
  explicit Reader(std::string_view text) : s_(text) {}

  TomlDocument parse() {
    TomlDocument doc;
    doc.tables.push_back(TomlTable{});
    while (true) {
      skip_ws_comments_newlines();
      if (eof()) break;
      if (peek() == '[') {
        doc.tables.push_back(parse_header(doc));
      } else {
        parse_key_value(doc.tables.back());
      }
    }
    return doc;
  }

 private:
  bool eof() const { return pos_ >= s_.size(); }
  char peek(std::size_t ahead = 0) const { return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0'; }

  char get() {
    const char c = s_[pos_++];
    if (c == '\n') {
      ++line_;
      line_start_ = pos_;
    }
    return c;
  }

  int col() const { return static_cast<int>(pos_ - line_start_) + 1; }

  [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(line_, col(), what); }

  void skip_inline_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) get();
  }

  void skip_comment() {
    if (peek() == '#') {
      while (!eof() && peek() != '\n') get();
    }
  }

  void skip_ws_comments_newlines() {
    while (!eof()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        get();
      } else if (c == '#') {
        skip_comment();
      } else {
        break;
      }
    }
  }

  void expect_line_end() {
    skip_inline_ws();
    skip_comment();
    if (peek() == '\r') get();
    if (!eof() && peek() != '\n') fail(std::string("unexpected '") + peek() + "' after value");
  }

  static bool bare_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  }

  std::string parse_key() {
    if (peek() == '"') return parse_basic_string();
    if (peek() == '\'') return parse_literal_string();
    std::string key;
    while (!eof() && bare_key_char(peek())) key += get();
    if (key.empty()) fail(eof() ? "expected key" : std::string("invalid character '") + peek() + "' in key");
    return key;
  }

  TomlTable parse_header(const TomlDocument& doc) {
    TomlTable table;
    table.line = line_;
    get();  // '['
    if (peek() == '[') fail("arrays of tables are not supported");
    while (true) {
      skip_inline_ws();
      table.path.push_back(parse_key());
      skip_inline_ws();
      if (peek() == '.') {
        get();
        continue;
      }
      if (peek() != ']') fail("expected ']' to close table header");
      get();
      break;
    }
    expect_line_end();
    for (const auto& t : doc.tables) {
      if (t.path == table.path) {
        if (table.path.size() == 2 && table.path[0] == "node") {
          throw Error(Errc::duplicate_node_name,
                      "node '" + table.path[1] + "' declared twice (lines " + std::to_string(t.line) + " and " +
                          std::to_string(table.line) + ")");
        }
        fail("table declared twice");
      }
    }
    return table;
  }

  void parse_key_value(TomlTable& table) {
    const int key_line = line_;
    std::string key = parse_key();
    skip_inline_ws();
    if (peek() == '.') fail("dotted keys are not supported; use a [table] header");
    if (peek() != '=') fail("expected '=' after key '" + key + "'");
    get();
    skip_inline_ws();
    Value v = parse_value();
    expect_line_end();
    if (table.find(key)) {
      throw SyntaxError(key_line, 1, "duplicate key '" + key + "'");
    }
    table.entries.emplace_back(std::move(key), std::move(v));
    table.entry_lines.push_back(key_line);
  }

  Value parse_value() {
    const char c = peek();
    if (c == '"') {
      if (peek(1) == '"' && peek(2) == '"') fail("multi-line strings are not supported");
      return parse_basic_string();
    }
    if (c == '\'') return parse_literal_string();
    if (c == '[') return parse_array();
    if (c == '{') fail("inline tables are not supported");
    if (s_.substr(pos_, 4) == "true" && !bare_key_char(peek(4))) {
      for (int i = 0; i < 4; ++i) get();
      return Value(true);
    }
    if (s_.substr(pos_, 5) == "false" && !bare_key_char(peek(5))) {
      for (int i = 0; i < 5; ++i) get();
      return Value(false);
    }
    return parse_number();
  }

  Value parse_array() {
    get();  // '['
    Value::List items;
    while (true) {
      skip_ws_comments_newlines();
      if (eof()) fail("unterminated array");
      if (peek() == ']') {
        get();
        break;
      }
      items.push_back(parse_value());
      skip_ws_comments_newlines();
      if (peek() == ',') {
        get();
        continue;
      }
      if (peek() == ']') {
        get();
        break;
      }
      fail("expected ',' or ']' in array");
    }
    return Value(std::move(items));
  }

  std::string parse_basic_string() {
    get();  // '"'
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = get();
      if (c == '"') break;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (eof()) fail("unterminated escape");
      const char e = get();
      switch (e) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case 'b': out += '\b'; break;
        case 'f': out += '\f'; break;
        case 'u': append_utf8(parse_hex(4), out); break;
        case 'U': append_utf8(parse_hex(8), out); break;
        default: fail(std::string("invalid escape '\\") + e + "'");
      }
    }
    return out;
  }

  std::uint32_t parse_hex(int digits) {
    std::uint32_t cp = 0;
    for (int i = 0; i < digits; ++i) {
      const char h = eof() ? '\0' : get();
      if (!std::isxdigit(static_cast<unsigned char>(h))) fail("invalid unicode escape");
      cp = cp * 16 + static_cast<std::uint32_t>(std::isdigit(static_cast<unsigned char>(h))
                                                    ? h - '0'
                                                    : std::tolower(static_cast<unsigned char>(h)) - 'a' + 10);
    }
    return cp;
  }

  static void append_utf8(std::uint32_t cp, std::string& out) {
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xC0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      out += static_cast<char>(0xE0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (cp >> 18));
      out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    }
  }

  std::string parse_literal_string() {
    get();  // '\''
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = get();
      if (c == '\'') break;
      out += c;
    }
    return out;
  }

  Value parse_number() {
    const int start_col = col();
    std::string token;
    while (!eof()) {
      const char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.' || c == '_') {
        token += get();
      } else {
        break;
      }
    }
    if (token.empty()) fail(eof() ? "expected value" : std::string("unexpected '") + peek() + "'");
    auto bad = [&] { throw SyntaxError(line_, start_col, "invalid value '" + token + "'"); };

    std::string body = token;
    bool negative = false;
    if (body[0] == '+' || body[0] == '-') {
      negative = body[0] == '-';
      body.erase(0, 1);
    }
    if (body == "inf") return Value(negative ? -std::numeric_limits<double>::infinity()
                                             : std::numeric_limits<double>::infinity());
    if (body == "nan") return Value(std::numeric_limits<double>::quiet_NaN());

    std::string digits;
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (body[i] == '_') {
        if (i == 0 || i + 1 == body.size() || !std::isdigit(static_cast<unsigned char>(body[i - 1])) ||
            !std::isdigit(static_cast<unsigned char>(body[i + 1]))) {
          bad();
        }
        continue;
      }
      digits += body[i];
    }
    if (digits.empty() || !std::isdigit(static_cast<unsigned char>(digits[0]))) bad();
    const bool is_float = digits.find_first_of(".eE") != std::string::npos;
    if (!is_float) {
      if (digits.size() > 1 && digits[0] == '0') bad();
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
      if (ec != std::errc{} || p != digits.data() + digits.size()) bad();
      return Value(negative ? -v : v);
    }
    const auto dot = digits.find('.');
    if (dot != std::string::npos &&
        (dot + 1 >= digits.size() || !std::isdigit(static_cast<unsigned char>(digits[dot + 1])))) {
      bad();
    }
    double v = 0.0;
    auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (ec != std::errc{} || p != digits.data() + digits.size()) bad();
    return Value(negative ? -v : v);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_start_ = 0;
  int line_ = 1;
};

}  // namespace

TomlDocument parse_toml(std::string_view text) { return Reader(text).parse(); }

}  // namespace nxs::dsl
