#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

namespace urnsim::toml {

// Minimal TOML subset used for experiment specs: [section] headers (dots
// allowed), `key = value` pairs, `#` comments, and scalar values (quoted
// string, integer, float, boolean). Arrays and inline tables are not part
// of the schema and are rejected.

struct Value {
    enum class Type { String, Integer, Float, Boolean };
    Type type = Type::String;
    std::string str;
    std::int64_t integer = 0;
    double real = 0;
    bool boolean = false;
    int line = 0;

    double as_double() const;       // Integer or Float
    std::int64_t as_integer() const;
    const std::string& as_string() const;
    bool as_boolean() const;
};

// keys are flattened as "section.key"
using Table = std::map<std::string, Value>;

// Throws ConfigError with a line number on malformed input.
Table parse(std::string_view text);

} // namespace urnsim::toml
