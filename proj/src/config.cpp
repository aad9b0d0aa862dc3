#include "coalesce/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

namespace coalesce {

namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_real(const std::string& key, const std::string& text)
{
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    if (!text.empty() && *begin == '+') {
        ++begin;
    }
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw ConfigError("config: '" + key + "' is not a finite number: '" + text + "'");
    }
    return value;
}

} // namespace

void require(bool ok, const std::string& message)
{
    if (!ok) {
        throw ConfigError(message);
    }
}

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& origin)
{
    KeyValueConfig config;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(number) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) {
            throw ConfigError(origin + ":" + std::to_string(number) + ": empty key");
        }
        config.set(key, trim(line.substr(eq + 1)));
    }
    return config;
}

KeyValueConfig KeyValueConfig::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config: cannot open " + path);
    }
    return parse(in, path);
}

void KeyValueConfig::set(const std::string& key, const std::string& value)
{
    entries_[key] = value;
}

const std::string& KeyValueConfig::text(const std::string& key) const
{
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
        throw ConfigError("config: missing key '" + key + "'");
    }
    return it->second;
}

double KeyValueConfig::real(const std::string& key) const
{
    return parse_real(key, text(key));
}

std::int64_t KeyValueConfig::integer(const std::string& key) const
{
    const std::string& raw = text(key);
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
    if (ec != std::errc() || ptr != raw.data() + raw.size()) {
        // Accept integral values written in floating notation, e.g. 1e5.
        const double d = parse_real(key, raw);
        if (d != std::floor(d) || std::abs(d) > 9.0e15) {
            throw ConfigError("config: '" + key + "' is not an integer: '" + raw + "'");
        }
        return static_cast<std::int64_t>(d);
    }
    return value;
}

std::uint64_t KeyValueConfig::count(const std::string& key) const
{
    const std::int64_t value = integer(key);
    if (value < 0) {
        throw ConfigError("config: '" + key + "' must be nonnegative");
    }
    return static_cast<std::uint64_t>(value);
}

std::vector<double> KeyValueConfig::reals(const std::string& key) const
{
    const std::string& raw = text(key);
    std::vector<double> out;
    std::size_t start = 0;
    if (trim(raw).empty()) {
        return out;
    }
    for (;;) {
        const auto comma = raw.find(',', start);
        out.push_back(parse_real(key, trim(raw.substr(start, comma - start))));
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

} // namespace coalesce
