#include "ibmag/kvconfig.hpp"

#include "ibmag/errors.hpp"

#include <charconv>
#include <fstream>
#include <istream>

namespace ibmag {

namespace {

std::string trim(const std::string& s) {
    auto const first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    auto const last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

}  // namespace

double parse_double(const std::string& text, const std::string& context) {
    auto const t = trim(text);
    double value = 0.0;
    auto const* begin = t.data();
    auto const* end = t.data() + t.size();
    // from_chars rejects a leading '+', accept it for hand-written files
    if (begin != end && *begin == '+') ++begin;
    auto const [ptr, ec] = std::from_chars(begin, end, value);
    if (t.empty() || ec != std::errc{} || ptr != end) {
        throw ParseError(context + ": not a number: '" + text + "'");
    }
    return value;
}

KeyValueFile KeyValueFile::parse(std::istream& in, const std::string& source) {
    KeyValueFile file;
    file.source_ = source;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto const hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto const eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
        }
        auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ParseError(source + ":" + std::to_string(lineno) + ": empty key");
        }
        file.entries_[std::move(key)] = std::move(value);
    }
    return file;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    return parse(in, path.string());
}

std::string KeyValueFile::get_string(const std::string& key) const {
    auto const it = entries_.find(key);
    if (it == entries_.end()) throw ParseError(source_ + ": missing key '" + key + "'");
    return it->second;
}

double KeyValueFile::get_double(const std::string& key) const {
    return parse_double(get_string(key), source_ + ": key '" + key + "'");
}

std::optional<double> KeyValueFile::find_double(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return get_double(key);
}

double KeyValueFile::get_double_or(const std::string& key, double fallback) const {
    return find_double(key).value_or(fallback);
}

}  // namespace ibmag
