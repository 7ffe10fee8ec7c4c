#include "asyncsprt/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace asyncsprt::config {

namespace {

struct Cursor {
  const std::string& text;
  std::size_t pos = 0;
  int line = 1;
  const std::string& source;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(source + ":" + std::to_string(line) + ": " + msg);
  }
  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  void skip_inline_ws() {
    while (!done() && (peek() == ' ' || peek() == '\t')) ++pos;
  }
};

bool is_bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string parse_bare_key(Cursor& c) {
  std::string key;
  while (!c.done() && is_bare_key_char(c.peek())) key += c.text[c.pos++];
  if (key.empty()) c.fail("expected a key");
  return key;
}

std::string parse_quoted_string(Cursor& c) {
  ++c.pos;  // opening quote
  std::string out;
  while (true) {
    if (c.done() || c.peek() == '\n') c.fail("unterminated string");
    char ch = c.text[c.pos++];
    if (ch == '"') return out;
    if (ch == '\\') {
      if (c.done()) c.fail("unterminated escape");
      char esc = c.text[c.pos++];
      switch (esc) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        default: c.fail(std::string("unsupported escape '\\") + esc + "'");
      }
    } else {
      out += ch;
    }
  }
}

Value parse_scalar(Cursor& c, const std::string& token) {
  if (token == "true") return Value(true);
  if (token == "false") return Value(false);
  // integer first, then float
  {
    std::int64_t i = 0;
    const char* b = token.data();
    const char* e = b + token.size();
    auto [p, ec] = std::from_chars(b, e, i);
    if (ec == std::errc() && p == e) return Value(i);
  }
  {
    double d = 0.0;
    const char* b = token.data();
    const char* e = b + token.size();
    auto [p, ec] = std::from_chars(b, e, d);
    if (ec == std::errc() && p == e) return Value(d);
  }
  c.fail("cannot parse value '" + token + "'");
}

Value parse_value(Cursor& c);

Value parse_array(Cursor& c) {
  ++c.pos;  // '['
  std::vector<Value> items;
  while (true) {
    c.skip_inline_ws();
    if (c.done() || c.peek() == '\n') c.fail("arrays must close on the same line");
    if (c.peek() == ']') {
      ++c.pos;
      return Value(std::move(items));
    }
    items.push_back(parse_value(c));
    c.skip_inline_ws();
    if (!c.done() && c.peek() == ',') {
      ++c.pos;
      continue;
    }
    if (!c.done() && c.peek() == ']') {
      ++c.pos;
      return Value(std::move(items));
    }
    c.fail("expected ',' or ']' in array");
  }
}

Value parse_value(Cursor& c) {
  c.skip_inline_ws();
  if (c.done() || c.peek() == '\n') c.fail("expected a value");
  const char ch = c.peek();
  if (ch == '"') return Value(parse_quoted_string(c));
  if (ch == '[') return parse_array(c);
  std::string token;
  while (!c.done()) {
    const char t = c.peek();
    if (t == '\n' || t == '#' || t == ',' || t == ']' || t == ' ' || t == '\t') break;
    token += t;
    ++c.pos;
  }
  return parse_scalar(c, token);
}

Table* descend(Table& root, const std::vector<std::string>& parts, Cursor& c) {
  Table* t = &root;
  std::string walked;
  for (const auto& part : parts) {
    walked = walked.empty() ? part : walked + "." + part;
    auto it = t->find(part);
    if (it == t->end()) it = t->emplace(part, Value(Table{})).first;
    if (!it->second.is_table()) c.fail("'" + walked + "' is not a table");
    t = &it->second.as_table(walked);
  }
  return t;
}

}  // namespace

double Value::as_double(const std::string& path) const {
  if (auto* d = std::get_if<double>(&v_)) return *d;
  if (auto* i = std::get_if<std::int64_t>(&v_)) return static_cast<double>(*i);
  throw ConfigError(path + ": expected a number");
}

std::int64_t Value::as_integer(const std::string& path) const {
  if (auto* i = std::get_if<std::int64_t>(&v_)) return *i;
  throw ConfigError(path + ": expected an integer");
}

bool Value::as_boolean(const std::string& path) const {
  if (auto* b = std::get_if<bool>(&v_)) return *b;
  throw ConfigError(path + ": expected a boolean");
}

const std::string& Value::as_string(const std::string& path) const {
  if (auto* s = std::get_if<std::string>(&v_)) return *s;
  throw ConfigError(path + ": expected a string");
}

const std::vector<Value>& Value::as_array(const std::string& path) const {
  if (auto* a = std::get_if<std::vector<Value>>(&v_)) return *a;
  throw ConfigError(path + ": expected an array");
}

const Table& Value::as_table(const std::string& path) const {
  if (auto* t = std::get_if<Table>(&v_)) return *t;
  throw ConfigError(path + ": expected a table");
}

Table& Value::as_table(const std::string& path) {
  if (auto* t = std::get_if<Table>(&v_)) return *t;
  throw ConfigError(path + ": expected a table");
}

Table parse_string(const std::string& text, const std::string& source_name) {
  Table root;
  Cursor c{text, 0, 1, source_name};
  Table* current = &root;
  std::string current_prefix;

  while (!c.done()) {
    c.skip_inline_ws();
    if (c.done()) break;
    const char ch = c.peek();
    if (ch == '\n') {
      ++c.pos;
      ++c.line;
      continue;
    }
    if (ch == '#') {
      while (!c.done() && c.peek() != '\n') ++c.pos;
      continue;
    }
    if (ch == '[') {
      ++c.pos;
      std::vector<std::string> parts;
      while (true) {
        c.skip_inline_ws();
        parts.push_back(parse_bare_key(c));
        c.skip_inline_ws();
        if (!c.done() && c.peek() == '.') {
          ++c.pos;
          continue;
        }
        break;
      }
      if (c.done() || c.peek() != ']') c.fail("expected ']' after table name");
      ++c.pos;
      current = descend(root, parts, c);
      current_prefix.clear();
      for (const auto& p : parts)
        current_prefix = current_prefix.empty() ? p : current_prefix + "." + p;
    } else {
      const std::string key = parse_bare_key(c);
      c.skip_inline_ws();
      if (c.done() || c.peek() != '=') c.fail("expected '=' after key '" + key + "'");
      ++c.pos;
      Value v = parse_value(c);
      const std::string full = current_prefix.empty() ? key : current_prefix + "." + key;
      if (current->count(key)) c.fail("duplicate key '" + full + "'");
      current->emplace(key, std::move(v));
    }
    // only whitespace or a comment may follow on the line
    c.skip_inline_ws();
    if (!c.done() && c.peek() == '#')
      while (!c.done() && c.peek() != '\n') ++c.pos;
    if (!c.done()) {
      if (c.peek() != '\n') c.fail("unexpected trailing characters");
      ++c.pos;
      ++c.line;
    }
  }
  return root;
}

Table parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

const Value* find(const Table& root, const std::string& dotted_path) {
  const Table* t = &root;
  std::size_t begin = 0;
  while (true) {
    const std::size_t dot = dotted_path.find('.', begin);
    const std::string part = dotted_path.substr(begin, dot - begin);
    const auto it = t->find(part);
    if (it == t->end()) return nullptr;
    if (dot == std::string::npos) return &it->second;
    if (!it->second.is_table()) return nullptr;
    t = &it->second.as_table(dotted_path);
    begin = dot + 1;
  }
}

namespace {
const Value& require(const Table& root, const std::string& path) {
  const Value* v = find(root, path);
  if (!v) throw ConfigError(path + ": missing required field");
  return *v;
}
}  // namespace

double require_double(const Table& root, const std::string& path) {
  return require(root, path).as_double(path);
}

std::int64_t require_integer(const Table& root, const std::string& path) {
  return require(root, path).as_integer(path);
}

const std::string& require_string(const Table& root, const std::string& path) {
  return require(root, path).as_string(path);
}

std::vector<double> require_double_array(const Table& root, const std::string& path) {
  const auto& arr = require(root, path).as_array(path);
  std::vector<double> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i)
    out.push_back(arr[i].as_double(path + "[" + std::to_string(i) + "]"));
  return out;
}

double get_double(const Table& root, const std::string& path, double fallback) {
  const Value* v = find(root, path);
  return v ? v->as_double(path) : fallback;
}

std::int64_t get_integer(const Table& root, const std::string& path, std::int64_t fallback) {
  const Value* v = find(root, path);
  return v ? v->as_integer(path) : fallback;
}

std::string get_string(const Table& root, const std::string& path, std::string fallback) {
  const Value* v = find(root, path);
  return v ? v->as_string(path) : fallback;
}

}  // namespace asyncsprt::config
