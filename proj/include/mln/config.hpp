#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace mln {

// Minimal TOML-style config: comments (#), [section] headers, key = value
// with strings, numbers, booleans, arrays and inline tables.  Every stored
// value remembers its source line for validation messages.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(const std::string& msg, int line)
        : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    int line() const { return line_; }

  private:
    int line_;
};

struct ConfigValue {
    std::variant<bool, double, std::string, std::vector<double>> data;
    int line = 0;

    bool as_bool() const;
    double as_number() const;
    const std::string& as_string() const;
    const std::vector<double>& as_array() const;
};

class Config {
  public:
    // keys are dotted: "grid.m", "domain.kind", ...
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text);

    bool has(const std::string& key) const { return kv_.count(key) > 0; }
    const ConfigValue& at(const std::string& key) const;

    double number(const std::string& key) const { return at(key).as_number(); }
    double number_or(const std::string& key, double dflt) const;
    std::string str(const std::string& key) const { return at(key).as_string(); }
    std::string str_or(const std::string& key, const std::string& dflt) const;
    std::vector<double> array_or(const std::string& key, std::vector<double> dflt) const;
    int line_of(const std::string& key) const { return at(key).line; }

    const std::map<std::string, ConfigValue>& items() const { return kv_; }

  private:
    std::map<std::string, ConfigValue> kv_;
};

}  // namespace mln
