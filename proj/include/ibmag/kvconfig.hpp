#pragma once

// Minimal `key = value` configuration files. `#` starts a comment; blank lines
// are ignored. Numbers are parsed with from_chars so replayed values are
// bit-exact regardless of locale.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

namespace ibmag {

class KeyValueFile {
public:
    static KeyValueFile parse(std::istream& in, const std::string& source = "<stream>");
    static KeyValueFile load(const std::filesystem::path& path);

    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    const std::string& source() const { return source_; }

    std::string get_string(const std::string& key) const;
    double get_double(const std::string& key) const;
    std::optional<double> find_double(const std::string& key) const;
    double get_double_or(const std::string& key, double fallback) const;

private:
    std::string source_;
    std::map<std::string, std::string> entries_;
};

/// Strict decimal parse of the whole string; throws ParseError otherwise.
double parse_double(const std::string& text, const std::string& context);

}  // namespace ibmag
