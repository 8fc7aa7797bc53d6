#pragma once

// Minimal TOML reader covering the configuration schema: single-level
// [tables], [[arrays of tables]], and key = value lines with string, number,
// boolean, or flat array values. Dotted keys, inline tables, multi-line
// strings, and dates are out of scope.

#include <cctype>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "putlab/errors.hpp"

namespace putlab::toml {

class ParseError : public ValidationError {
public:
    ParseError(int line, const std::string& what)
        : ValidationError("toml: line " + std::to_string(line) + ": " + what) {}
};

struct Value {
    std::variant<double, std::string, bool, std::vector<Value>> data;

    bool is_number() const { return std::holds_alternative<double>(data); }
    bool is_string() const { return std::holds_alternative<std::string>(data); }
    bool is_bool() const { return std::holds_alternative<bool>(data); }
    bool is_array() const { return std::holds_alternative<std::vector<Value>>(data); }
    double number() const { return std::get<double>(data); }
    const std::string& string() const { return std::get<std::string>(data); }
    bool boolean() const { return std::get<bool>(data); }
    const std::vector<Value>& array() const { return std::get<std::vector<Value>>(data); }
};

struct Table {
    std::map<std::string, Value> values;
    std::map<std::string, Table> tables;
    std::map<std::string, std::vector<Table>> table_arrays;

    bool has(const std::string& key) const { return values.count(key) != 0; }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::string strip_comment(const std::string& s) {
    bool in_string = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') in_string = !in_string;
        else if (s[i] == '#' && !in_string) return s.substr(0, i);
    }
    return s;
}

inline Value parse_value(const std::string& raw, int line);

inline std::vector<Value> parse_array(const std::string& raw, int line) {
    // raw is the text between the brackets
    std::vector<Value> out;
    std::string item;
    int depth = 0;
    bool in_string = false;
    auto flush = [&] {
        const std::string t = trim(item);
        if (!t.empty()) out.push_back(parse_value(t, line));
        item.clear();
    };
    for (char c : raw) {
        if (c == '"') in_string = !in_string;
        if (!in_string) {
            if (c == '[') ++depth;
            if (c == ']') --depth;
            if (c == ',' && depth == 0) {
                flush();
                continue;
            }
        }
        item.push_back(c);
    }
    flush();
    return out;
}

inline Value parse_value(const std::string& raw, int line) {
    if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') {
        std::string s;
        for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
            if (raw[i] == '\\' && i + 2 < raw.size()) {
                ++i;
                switch (raw[i]) {
                    case 'n': s += '\n'; break;
                    case 't': s += '\t'; break;
                    case '"': s += '"'; break;
                    case '\\': s += '\\'; break;
                    default: throw ParseError(line, "unsupported escape in string");
                }
            } else {
                s += raw[i];
            }
        }
        return Value{s};
    }
    if (raw == "true") return Value{true};
    if (raw == "false") return Value{false};
    if (raw.front() == '[') {
        if (raw.back() != ']') throw ParseError(line, "unterminated array");
        return Value{parse_array(raw.substr(1, raw.size() - 2), line)};
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(raw, &used);
        if (used != raw.size()) throw ParseError(line, "trailing characters after number");
        return Value{v};
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError(line, "cannot parse value '" + raw + "'");
    }
}

inline bool valid_key(const std::string& key) {
    if (key.empty()) return false;
    for (char c : key)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
    return true;
}

}  // namespace detail

inline Table parse(const std::string& text) {
    Table root;
    Table* current = &root;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string line = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
        pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        line = detail::trim(detail::strip_comment(line));
        if (line.empty()) continue;

        if (line.front() == '[') {
            const bool is_array = line.size() > 1 && line[1] == '[';
            const std::string close = is_array ? "]]" : "]";
            if (line.substr(line.size() - close.size()) != close)
                throw ParseError(line_no, "unterminated table header");
            const std::string name = detail::trim(
                line.substr(is_array ? 2 : 1, line.size() - 2 * (is_array ? 2 : 1)));
            if (!detail::valid_key(name))
                throw ParseError(line_no, "bad table name '" + name + "' (dotted names unsupported)");
            if (is_array) {
                root.table_arrays[name].emplace_back();
                current = &root.table_arrays[name].back();
            } else {
                current = &root.tables[name];
            }
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(line_no, "expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string raw = detail::trim(line.substr(eq + 1));
        if (!detail::valid_key(key)) throw ParseError(line_no, "bad key '" + key + "'");
        if (raw.empty()) throw ParseError(line_no, "missing value for key '" + key + "'");
        if (current->values.count(key)) throw ParseError(line_no, "duplicate key '" + key + "'");
        current->values[key] = detail::parse_value(raw, line_no);
    }
    return root;
}

}  // namespace putlab::toml
