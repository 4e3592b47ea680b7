#include "mln/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace mln {

bool ConfigValue::as_bool() const {
    if (auto* b = std::get_if<bool>(&data)) return *b;
    throw ConfigError("expected a boolean", line);
}
double ConfigValue::as_number() const {
    if (auto* d = std::get_if<double>(&data)) return *d;
    throw ConfigError("expected a number", line);
}
const std::string& ConfigValue::as_string() const {
    if (auto* s = std::get_if<std::string>(&data)) return *s;
    throw ConfigError("expected a string", line);
}
const std::vector<double>& ConfigValue::as_array() const {
    if (auto* a = std::get_if<std::vector<double>>(&data)) return *a;
    throw ConfigError("expected an array", line);
}

namespace {

struct Cursor {
    const std::string& s;
    std::size_t i = 0;
    int line;
    void skip_ws() {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    }
    bool done() const { return i >= s.size(); }
    char peek() const { return i < s.size() ? s[i] : '\0'; }
};

ConfigValue parse_scalar(Cursor& c);

ConfigValue parse_value(Cursor& c) {
    c.skip_ws();
    if (c.done()) throw ConfigError("missing value", c.line);
    if (c.peek() == '[') {
        ++c.i;
        std::vector<double> arr;
        c.skip_ws();
        while (!c.done() && c.peek() != ']') {
            ConfigValue v = parse_scalar(c);
            arr.push_back(v.as_number());
            c.skip_ws();
            if (c.peek() == ',') {
                ++c.i;
                c.skip_ws();
            }
        }
        if (c.peek() != ']') throw ConfigError("unterminated array", c.line);
        ++c.i;
        ConfigValue v;
        v.data = arr;
        v.line = c.line;
        return v;
    }
    return parse_scalar(c);
}

ConfigValue parse_scalar(Cursor& c) {
    c.skip_ws();
    ConfigValue v;
    v.line = c.line;
    if (c.peek() == '"') {
        ++c.i;
        std::string out;
        while (!c.done() && c.peek() != '"') out.push_back(c.s[c.i++]);
        if (c.peek() != '"') throw ConfigError("unterminated string", c.line);
        ++c.i;
        v.data = out;
        return v;
    }
    std::size_t start = c.i;
    while (!c.done() && (std::isalnum((unsigned char)c.peek()) || c.peek() == '.' ||
                         c.peek() == '+' || c.peek() == '-' || c.peek() == '_' ||
                         c.peek() == 'e' || c.peek() == 'E'))
        ++c.i;
    std::string tok = c.s.substr(start, c.i - start);
    if (tok.empty()) throw ConfigError("malformed value", c.line);
    if (tok == "true") {
        v.data = true;
        return v;
    }
    if (tok == "false") {
        v.data = false;
        return v;
    }
    try {
        std::size_t used = 0;
        double d = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument("trailing");
        v.data = d;
        return v;
    } catch (...) {
        throw ConfigError("cannot parse value '" + tok + "'", c.line);
    }
}

std::string parse_key(Cursor& c) {
    c.skip_ws();
    std::size_t start = c.i;
    while (!c.done() && (std::isalnum((unsigned char)c.peek()) || c.peek() == '_' ||
                         c.peek() == '-' || c.peek() == '.'))
        ++c.i;
    std::string k = c.s.substr(start, c.i - start);
    if (k.empty()) throw ConfigError("expected a key", c.line);
    return k;
}

}  // namespace

Config Config::parse_string(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    std::string section;
    while (std::getline(in, raw)) {
        ++lineno;
        // strip comments outside strings
        std::string lineS;
        bool instr = false;
        for (char ch : raw) {
            if (ch == '"') instr = !instr;
            if (ch == '#' && !instr) break;
            lineS.push_back(ch);
        }
        Cursor c{lineS, 0, lineno};
        c.skip_ws();
        if (c.done()) continue;
        if (c.peek() == '[') {
            ++c.i;
            std::size_t close = lineS.find(']', c.i);
            if (close == std::string::npos)
                throw ConfigError("unterminated section header", lineno);
            section = lineS.substr(c.i, close - c.i);
            continue;
        }
        std::string key = parse_key(c);
        c.skip_ws();
        if (c.peek() != '=') throw ConfigError("expected '=' after key '" + key + "'", lineno);
        ++c.i;
        c.skip_ws();
        std::string full = section.empty() ? key : section + "." + key;
        if (c.peek() == '{') {
            // inline table: key = { a = 1, b = "x" }
            ++c.i;
            while (true) {
                c.skip_ws();
                if (c.peek() == '}') {
                    ++c.i;
                    break;
                }
                std::string sub = parse_key(c);
                c.skip_ws();
                if (c.peek() != '=')
                    throw ConfigError("expected '=' in inline table", lineno);
                ++c.i;
                ConfigValue v = parse_value(c);
                cfg.kv_[full + "." + sub] = v;
                c.skip_ws();
                if (c.peek() == ',') {
                    ++c.i;
                    continue;
                }
            }
        } else {
            cfg.kv_[full] = parse_value(c);
        }
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_string(ss.str());
}

const ConfigValue& Config::at(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("missing required key '" + key + "'", 0);
    return it->second;
}

double Config::number_or(const std::string& key, double dflt) const {
    return has(key) ? number(key) : dflt;
}
std::string Config::str_or(const std::string& key, const std::string& dflt) const {
    return has(key) ? str(key) : dflt;
}
std::vector<double> Config::array_or(const std::string& key, std::vector<double> dflt) const {
    return has(key) ? at(key).as_array() : dflt;
}

}  // namespace mln
