#pragma once

// Flat `section.key = value` configuration files.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pdisp {

/// Lines are `key = value`; `#` starts a comment; `[section]` headers prefix
/// the following keys with `section.`. Duplicate keys are rejected.
class Config {
public:
    static Config parse(std::istream& in);
    static Config parse_string(const std::string& text);
    static Config load(const std::string& path);

    bool has(const std::string& key) const;
    void set(const std::string& key, const std::string& value);

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    std::optional<std::string> find(const std::string& key) const;

    /// Keys that were never read, so typos can be reported.
    std::vector<std::string> unused_keys() const;

    /// Canonical `key = value` lines in key order.
    void write(std::ostream& out) const;

    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
    mutable std::map<std::string, bool> touched_;
};

}  // namespace pdisp
