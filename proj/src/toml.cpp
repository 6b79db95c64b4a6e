#include "urnsim/toml.hpp"

#include <cctype>
#include <charconv>

#include "urnsim/errors.hpp"

namespace urnsim::toml {

namespace {

[[noreturn]] void fail(int line, const std::string& what) {
    throw ConfigError("toml parse error at line " + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool bare_key_ok(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.')
            return false;
    return true;
}

// strip a trailing comment that is not inside a quoted string
std::string_view strip_comment(std::string_view s) {
    bool in_str = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') in_str = !in_str;
        else if (s[i] == '#' && !in_str) return s.substr(0, i);
    }
    return s;
}

Value parse_value(std::string_view raw, int line) {
    Value v;
    v.line = line;
    if (raw.empty()) fail(line, "missing value");
    if (raw.front() == '"') {
        if (raw.size() < 2 || raw.back() != '"') fail(line, "unterminated string");
        std::string out;
        for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
            if (raw[i] == '\\' && i + 2 < raw.size()) {
                ++i;
                switch (raw[i]) {
                    case '"': out.push_back('"'); break;
                    case '\\': out.push_back('\\'); break;
                    case 'n': out.push_back('\n'); break;
                    case 't': out.push_back('\t'); break;
                    default: fail(line, "unsupported escape in string");
                }
            } else if (raw[i] == '"') {
                fail(line, "stray quote in string");
            } else {
                out.push_back(raw[i]);
            }
        }
        v.type = Value::Type::String;
        v.str = std::move(out);
        return v;
    }
    if (raw == "true" || raw == "false") {
        v.type = Value::Type::Boolean;
        v.boolean = (raw == "true");
        return v;
    }
    if (raw.front() == '[' || raw.front() == '{')
        fail(line, "arrays and inline tables are not supported");
    // integer first (full match), then float
    {
        std::int64_t iv = 0;
        const auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), iv);
        if (ec == std::errc() && p == raw.data() + raw.size()) {
            v.type = Value::Type::Integer;
            v.integer = iv;
            v.real = static_cast<double>(iv);
            return v;
        }
    }
    {
        double dv = 0;
        const auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), dv);
        if (ec == std::errc() && p == raw.data() + raw.size()) {
            v.type = Value::Type::Float;
            v.real = dv;
            return v;
        }
    }
    fail(line, "cannot parse value '" + std::string(raw) + "'");
}

} // namespace

double Value::as_double() const {
    if (type == Type::Integer) return static_cast<double>(integer);
    if (type == Type::Float) return real;
    throw ConfigError("toml: expected a number at line " + std::to_string(line));
}

std::int64_t Value::as_integer() const {
    if (type == Type::Integer) return integer;
    if (type == Type::Float && real == static_cast<double>(static_cast<std::int64_t>(real)))
        return static_cast<std::int64_t>(real);
    throw ConfigError("toml: expected an integer at line " + std::to_string(line));
}

const std::string& Value::as_string() const {
    if (type != Type::String)
        throw ConfigError("toml: expected a string at line " + std::to_string(line));
    return str;
}

bool Value::as_boolean() const {
    if (type != Type::Boolean)
        throw ConfigError("toml: expected a boolean at line " + std::to_string(line));
    return boolean;
}

Table parse(std::string_view text) {
    Table table;
    std::map<std::string, int> sections_seen;
    std::string prefix;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;

        line = trim(strip_comment(line));
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') fail(line_no, "unterminated section header");
            const std::string_view name = trim(line.substr(1, line.size() - 2));
            if (!bare_key_ok(name)) fail(line_no, "invalid section name");
            if (!sections_seen.emplace(std::string(name), line_no).second)
                fail(line_no, "duplicate section [" + std::string(name) + "]");
            prefix = std::string(name) + ".";
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) fail(line_no, "expected 'key = value'");
        const std::string_view key = trim(line.substr(0, eq));
        if (!bare_key_ok(key)) fail(line_no, "invalid key '" + std::string(key) + "'");
        const std::string_view raw = trim(line.substr(eq + 1));
        const std::string full = prefix + std::string(key);
        if (table.count(full)) fail(line_no, "duplicate key '" + full + "'");
        table[full] = parse_value(raw, line_no);
    }
    return table;
}

} // namespace urnsim::toml
