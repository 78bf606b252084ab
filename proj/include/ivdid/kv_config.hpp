// Copyright 2026 The ivdid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IVDID_KV_CONFIG_HPP
#define IVDID_KV_CONFIG_HPP

#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "error.hpp"

namespace ivdid {

namespace detail {

inline std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(std::string_view s, char sep = ',')
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::optional<double> parse_double(std::string_view s)
{
    const std::string t = trim(s);
    if (t.empty()) return std::nullopt;
    double v = 0.0;
    const char* first = t.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
    return v;
}

} // namespace detail

/// Ordered `key = value` file. `#` starts a comment; keys may repeat.
class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig parse(std::istream& in, const std::string& origin = "<config>")
    {
        KeyValueConfig cfg;
        cfg.origin_ = origin;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            const std::string t = detail::trim(line);
            if (t.empty()) continue;
            const auto eq = t.find('=');
            if (eq == std::string::npos) {
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
            }
            std::string key = detail::trim(std::string_view(t).substr(0, eq));
            if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
            cfg.entries_.emplace_back(std::move(key), detail::trim(std::string_view(t).substr(eq + 1)));
        }
        return cfg;
    }

    static KeyValueConfig parse_string(const std::string& text, const std::string& origin = "<string>")
    {
        std::istringstream in(text);
        return parse(in, origin);
    }

    static KeyValueConfig load(const std::string& path)
    {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file '" + path + "'");
        return parse(in, path);
    }

    const std::string& origin() const noexcept { return origin_; }

    bool has(std::string_view key) const { return get(key).has_value(); }

    // Last assignment wins.
    std::optional<std::string> get(std::string_view key) const
    {
        for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
            if (it->first == key) return it->second;
        }
        return std::nullopt;
    }

    std::vector<std::string> get_all(std::string_view key) const
    {
        std::vector<std::string> out;
        for (const auto& [k, v] : entries_) {
            if (k == key) out.push_back(v);
        }
        return out;
    }

    std::string require(std::string_view key) const
    {
        auto v = get(key);
        if (!v) throw ConfigError(origin_ + ": missing required key '" + std::string(key) + "'");
        return *v;
    }

    std::optional<double> get_double(std::string_view key) const
    {
        const auto v = get(key);
        if (!v) return std::nullopt;
        const auto d = detail::parse_double(*v);
        if (!d) throw ConfigError(origin_ + ": key '" + std::string(key) + "' is not a number: '" + *v + "'");
        return d;
    }

    std::optional<long long> get_int(std::string_view key) const
    {
        const auto d = get_double(key);
        if (!d) return std::nullopt;
        if (static_cast<double>(static_cast<long long>(*d)) != *d) {
            throw ConfigError(origin_ + ": key '" + std::string(key) + "' must be an integer");
        }
        return static_cast<long long>(*d);
    }

    std::optional<bool> get_bool(std::string_view key) const
    {
        const auto v = get(key);
        if (!v) return std::nullopt;
        if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
        if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
        throw ConfigError(origin_ + ": key '" + std::string(key) + "' is not a boolean: '" + *v + "'");
    }

    const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }

    void set(std::string key, std::string value) { entries_.emplace_back(std::move(key), std::move(value)); }

private:
    std::string origin_ = "<config>";
    std::vector<std::pair<std::string, std::string>> entries_;
};

} // namespace ivdid

#endif // IVDID_KV_CONFIG_HPP
