#pragma once

#include <map>
#include <string>
#include <vector>

#include "plategamma/common.hpp"

namespace pg::toml {

// Minimal TOML reader covering the subset the config format uses: bare keys,
// strings, booleans, integers, floats, (nested) arrays, [table] headers and
// [[array-of-tables]] headers, comments.  No dates, no inline tables, no
// dotted keys.
class Value {
 public:
  enum class Kind { kNone, kString, kNumber, kBool, kArray, kTable };

  Kind kind = Kind::kNone;
  std::string str;
  double num = 0;
  bool has_fraction = false;
  bool boolean = false;
  std::vector<Value> array;
  std::map<std::string, Value> table;

  bool is_table() const { return kind == Kind::kTable; }
  bool is_array() const { return kind == Kind::kArray; }

  bool contains(const std::string& key) const {
    return kind == Kind::kTable && table.count(key) > 0;
  }

  const Value& at(const std::string& key) const;
  const Value* find(const std::string& key) const;

  double as_number(const std::string& what) const;
  int as_int(const std::string& what) const;
  bool as_bool(const std::string& what) const;
  const std::string& as_string(const std::string& what) const;
  std::vector<double> as_number_array(const std::string& what) const;

  // Convenience with defaults.
  double number_or(const std::string& key, double fallback) const;
  int int_or(const std::string& key, int fallback) const;
  bool bool_or(const std::string& key, bool fallback) const;
  std::string string_or(const std::string& key,
                        const std::string& fallback) const;
};

Value parse(const std::string& text);
Value parse_file(const std::string& path);

}  // namespace pg::toml
