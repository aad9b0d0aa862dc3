#pragma once

// Flat key = value configuration. '#' starts a comment; blank lines are
// ignored; later assignments override earlier ones.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace coalesce {

// Any malformed or out-of-range configuration value.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class KeyValueConfig {
public:
    static KeyValueConfig parse(std::istream& in, const std::string& origin = "<input>");
    static KeyValueConfig load(const std::string& path);

    void set(const std::string& key, const std::string& value);
    bool contains(const std::string& key) const { return entries_.count(key) != 0; }
    const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

    // Typed reads; all throw ConfigError on a missing key or a bad value.
    const std::string& text(const std::string& key) const;
    double real(const std::string& key) const;
    std::int64_t integer(const std::string& key) const;
    std::uint64_t count(const std::string& key) const;
    // Comma-separated list; empty text gives an empty list.
    std::vector<double> reals(const std::string& key) const;

private:
    std::map<std::string, std::string> entries_;
};

// Throws ConfigError(message) unless ok.
void require(bool ok, const std::string& message);

} // namespace coalesce
