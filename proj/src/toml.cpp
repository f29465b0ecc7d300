#include "plategamma/toml.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace pg::toml {

namespace {

struct Cursor {
  const std::string& s;
  std::size_t pos = 0;
  int line = 1;

  bool done() const { return pos >= s.size(); }
  char peek() const { return done() ? '\0' : s[pos]; }
  char take() {
    char c = s[pos++];
    if (c == '\n') ++line;
    return c;
  }
  void skip_ws_inline() {
    while (!done() && (peek() == ' ' || peek() == '\t')) ++pos;
  }
  void skip_comment() {
    if (peek() == '#')
      while (!done() && peek() != '\n') ++pos;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("config line " + std::to_string(line) + ": " + msg);
  }
};

bool bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string parse_key(Cursor& c) {
  c.skip_ws_inline();
  std::string key;
  if (c.peek() == '"') {
    c.take();
    while (!c.done() && c.peek() != '"') key += c.take();
    if (c.done()) c.fail("unterminated quoted key");
    c.take();
  } else {
    while (bare_key_char(c.peek())) key += c.take();
  }
  if (key.empty()) c.fail("expected a key");
  return key;
}

Value parse_value(Cursor& c);

Value parse_array(Cursor& c) {
  Value v;
  v.kind = Value::Kind::kArray;
  c.take();  // [
  while (true) {
    // Arrays may span lines.
    while (!c.done()) {
      c.skip_ws_inline();
      c.skip_comment();
      if (c.peek() == '\n' || c.peek() == '\r')
        c.take();
      else
        break;
    }
    if (c.done()) c.fail("unterminated array");
    if (c.peek() == ']') {
      c.take();
      break;
    }
    v.array.push_back(parse_value(c));
    while (!c.done()) {
      c.skip_ws_inline();
      c.skip_comment();
      if (c.peek() == '\n' || c.peek() == '\r')
        c.take();
      else
        break;
    }
    if (c.peek() == ',') {
      c.take();
    } else if (c.peek() == ']') {
      c.take();
      break;
    } else {
      c.fail("expected ',' or ']' in array");
    }
  }
  return v;
}

Value parse_value(Cursor& c) {
  c.skip_ws_inline();
  Value v;
  char ch = c.peek();
  if (ch == '[') return parse_array(c);
  if (ch == '"') {
    c.take();
    v.kind = Value::Kind::kString;
    while (!c.done() && c.peek() != '"') {
      char x = c.take();
      if (x == '\\' && !c.done()) {
        char e = c.take();
        switch (e) {
          case 'n': v.str += '\n'; break;
          case 't': v.str += '\t'; break;
          case '"': v.str += '"'; break;
          case '\\': v.str += '\\'; break;
          default: c.fail("unsupported escape");
        }
      } else {
        v.str += x;
      }
    }
    if (c.done()) c.fail("unterminated string");
    c.take();
    return v;
  }
  std::string tok;
  while (!c.done() && c.peek() != '\n' && c.peek() != '\r' && c.peek() != ',' &&
         c.peek() != ']' && c.peek() != '#')
    tok += c.take();
  while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t'))
    tok.pop_back();
  if (tok == "true" || tok == "false") {
    v.kind = Value::Kind::kBool;
    v.boolean = (tok == "true");
    return v;
  }
  if (tok.empty()) c.fail("expected a value");
  char* end = nullptr;
  std::string cleaned;
  for (char x : tok)
    if (x != '_') cleaned += x;
  double num = std::strtod(cleaned.c_str(), &end);
  if (end == cleaned.c_str() || *end != '\0')
    c.fail("cannot parse value '" + tok + "'");
  v.kind = Value::Kind::kNumber;
  v.num = num;
  v.has_fraction = cleaned.find_first_of(".eE") != std::string::npos;
  return v;
}

Value* descend(Value* root, const std::vector<std::string>& path,
               Cursor& c, bool array_of_tables) {
  Value* cur = root;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const std::string& key = path[i];
    bool last = (i + 1 == path.size());
    Value& slot = cur->table[key];
    if (slot.kind == Value::Kind::kNone) {
      slot.kind = (last && array_of_tables) ? Value::Kind::kArray
                                            : Value::Kind::kTable;
    }
    if (last && array_of_tables) {
      if (!slot.is_array()) c.fail("'" + key + "' is not an array of tables");
      Value elem;
      elem.kind = Value::Kind::kTable;
      slot.array.push_back(elem);
      cur = &slot.array.back();
    } else if (slot.is_array()) {
      if (slot.array.empty()) c.fail("'" + key + "' has no elements");
      cur = &slot.array.back();
    } else {
      if (!slot.is_table()) c.fail("'" + key + "' is not a table");
      cur = &slot;
    }
  }
  return cur;
}

}  // namespace

const Value& Value::at(const std::string& key) const {
  const Value* v = find(key);
  if (!v) throw ConfigError("missing config key '" + key + "'");
  return *v;
}

const Value* Value::find(const std::string& key) const {
  if (kind != Kind::kTable) return nullptr;
  auto it = table.find(key);
  return it == table.end() ? nullptr : &it->second;
}

double Value::as_number(const std::string& what) const {
  if (kind != Kind::kNumber)
    throw ConfigError("config value '" + what + "' must be a number");
  return num;
}

int Value::as_int(const std::string& what) const {
  double v = as_number(what);
  if (has_fraction || v != static_cast<double>(static_cast<long long>(v)))
    throw ConfigError("config value '" + what + "' must be an integer");
  return static_cast<int>(v);
}

bool Value::as_bool(const std::string& what) const {
  if (kind != Kind::kBool)
    throw ConfigError("config value '" + what + "' must be a boolean");
  return boolean;
}

const std::string& Value::as_string(const std::string& what) const {
  if (kind != Kind::kString)
    throw ConfigError("config value '" + what + "' must be a string");
  return str;
}

std::vector<double> Value::as_number_array(const std::string& what) const {
  if (kind != Kind::kArray)
    throw ConfigError("config value '" + what + "' must be an array");
  std::vector<double> out;
  out.reserve(array.size());
  for (const Value& v : array) out.push_back(v.as_number(what));
  return out;
}

double Value::number_or(const std::string& key, double fallback) const {
  const Value* v = find(key);
  return v ? v->as_number(key) : fallback;
}

int Value::int_or(const std::string& key, int fallback) const {
  const Value* v = find(key);
  return v ? v->as_int(key) : fallback;
}

bool Value::bool_or(const std::string& key, bool fallback) const {
  const Value* v = find(key);
  return v ? v->as_bool(key) : fallback;
}

std::string Value::string_or(const std::string& key,
                             const std::string& fallback) const {
  const Value* v = find(key);
  return v ? v->as_string(key) : fallback;
}

Value parse(const std::string& text) {
  Value root;
  root.kind = Value::Kind::kTable;
  Cursor c{text};
  Value* current = &root;

  while (!c.done()) {
    c.skip_ws_inline();
    c.skip_comment();
    if (c.done()) break;
    char ch = c.peek();
    if (ch == '\n' || ch == '\r') {
      c.take();
      continue;
    }
    if (ch == '[') {
      c.take();
      bool array_of_tables = (c.peek() == '[');
      if (array_of_tables) c.take();
      std::vector<std::string> path;
      path.push_back(parse_key(c));
      while (c.peek() == '.') {
        c.take();
        path.push_back(parse_key(c));
      }
      c.skip_ws_inline();
      if (c.peek() != ']') c.fail("expected ']' after table name");
      c.take();
      if (array_of_tables) {
        if (c.peek() != ']') c.fail("expected ']]' after table array name");
        c.take();
      }
      current = descend(&root, path, c, array_of_tables);
      continue;
    }
    std::string key = parse_key(c);
    c.skip_ws_inline();
    if (c.peek() != '=') c.fail("expected '=' after key '" + key + "'");
    c.take();
    if (current->table.count(key) &&
        current->table[key].kind != Value::Kind::kNone)
      c.fail("duplicate key '" + key + "'");
    current->table[key] = parse_value(c);
    c.skip_ws_inline();
    c.skip_comment();
    if (!c.done() && c.peek() != '\n' && c.peek() != '\r')
      c.fail("trailing characters after value for '" + key + "'");
  }
  return root;
}

Value parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

}  // namespace pg::toml
