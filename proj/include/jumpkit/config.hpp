#ifndef JUMPKIT_CONFIG_HPP
#define JUMPKIT_CONFIG_HPP

// Flat key = value configuration files: one assignment per line, '#' comments,
// schema-checked with defaults. Unknown keys are rejected by name.

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "jumpkit/errors.hpp"

namespace jumpkit {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

class Config {
  public:
    static Config parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open config file " + path);
        std::stringstream buf;
        buf << in.rdbuf();
        return parse_text(buf.str());
    }

    static Config parse_text(const std::string& text) {
        Config cfg;
        std::istringstream in(text);
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            std::string stripped = line;
            if (auto pos = stripped.find('#'); pos != std::string::npos) stripped = stripped.substr(0, pos);
            stripped = trim(stripped);
            if (stripped.empty()) continue;
            auto eq = stripped.find('=');
            if (eq == std::string::npos)
                throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
            std::string key = trim(stripped.substr(0, eq));
            std::string value = trim(stripped.substr(eq + 1));
            if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
            if (cfg.values_.count(key)) throw ConfigError("duplicate key '" + key + "'");
            cfg.values_[key] = value;
        }
        return cfg;
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    const std::string& get_string(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
        return it->second;
    }

    double get_double(const std::string& key) const { return to_double(key, get_string(key)); }

    std::int64_t get_int(const std::string& key) const {
        const std::string& raw = get_string(key);
        char* end = nullptr;
        long long v = std::strtoll(raw.c_str(), &end, 10);
        if (end == raw.c_str() || *end != '\0')
            throw ConfigError("key '" + key + "': '" + raw + "' is not an integer");
        return v;
    }

    std::uint64_t get_uint(const std::string& key) const {
        const std::string& raw = get_string(key);
        if (!raw.empty() && raw[0] == '-') throw ConfigError("key '" + key + "': must be non-negative");
        char* end = nullptr;
        unsigned long long v = std::strtoull(raw.c_str(), &end, 10);
        if (end == raw.c_str() || *end != '\0')
            throw ConfigError("key '" + key + "': '" + raw + "' is not an unsigned integer");
        return v;
    }

    std::vector<std::int64_t> get_int_list(const std::string& key) const {
        std::vector<std::int64_t> out;
        std::istringstream in(get_string(key));
        std::string item;
        while (std::getline(in, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            char* end = nullptr;
            out.push_back(std::strtoll(item.c_str(), &end, 10));
            if (end == item.c_str() || *end != '\0')
                throw ConfigError("key '" + key + "': '" + item + "' is not an integer");
        }
        if (out.empty()) throw ConfigError("key '" + key + "': empty list");
        return out;
    }

    void set_default(const std::string& key, const std::string& value) {
        values_.emplace(key, value);
    }

    // Every key must appear in `known`, every `required` key must be present.
    void check_schema(const std::vector<std::string>& known, const std::vector<std::string>& required) const {
        for (const auto& [key, value] : values_) {
            bool ok = false;
            for (const auto& k : known)
                if (k == key) { ok = true; break; }
            if (!ok) throw ConfigError("unknown key '" + key + "'");
        }
        for (const auto& k : required)
            if (!values_.count(k)) throw ConfigError("missing required key '" + k + "'");
    }

    const std::map<std::string, std::string>& values() const { return values_; }

  private:
    static double to_double(const std::string& key, const std::string& raw) {
        char* end = nullptr;
        double v = std::strtod(raw.c_str(), &end);
        if (end == raw.c_str() || *end != '\0')
            throw ConfigError("key '" + key + "': '" + raw + "' is not a number");
        return v;
    }

    std::map<std::string, std::string> values_;
};

}  // namespace jumpkit

#endif
