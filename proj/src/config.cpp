#include "fairsemi/config.hpp"

#include "fairsemi/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace fairsemi {

namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

IniFile IniFile::parse(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("config: cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_text(buffer.str(), path.string());
}

IniFile IniFile::parse_text(const std::string& text, const std::string& origin) {
    IniFile ini;
    ini.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw SchemaError(origin + ":" + std::to_string(line_no) +
                                  ": unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                throw SchemaError(origin + ":" + std::to_string(line_no) +
                                  ": empty section name");
            if (!ini.sections_.count(section)) {
                ini.sections_[section] = {};
                ini.order_.push_back(section);
            }
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw SchemaError(origin + ":" + std::to_string(line_no) +
                              ": expected key = value, got \"" + t + "\"");
        if (section.empty())
            throw SchemaError(origin + ":" + std::to_string(line_no) +
                              ": key outside any [section]");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw SchemaError(origin + ":" + std::to_string(line_no) + ": empty key");
        auto& sec = ini.sections_[section];
        if (sec.count(key))
            throw SchemaError(origin + ":" + std::to_string(line_no) + ": duplicate key \"" +
                              key + "\" in [" + section + "]");
        sec[key] = value;
    }
    return ini;
}

bool IniFile::has_section(const std::string& section) const {
    return sections_.count(section) > 0;
}

bool IniFile::has(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(key) > 0;
}

std::string IniFile::get(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    if (it == sections_.end())
        throw SchemaError(origin_ + ": missing section [" + section + "]");
    auto kv = it->second.find(key);
    if (kv == it->second.end())
        throw SchemaError(origin_ + ": missing key \"" + key + "\" in [" + section + "]");
    return kv->second;
}

std::string IniFile::get_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
    return has(section, key) ? get(section, key) : fallback;
}

void IniFile::require_known_keys(const std::string& section,
                                 const std::vector<std::string>& allowed) const {
    auto it = sections_.find(section);
    if (it == sections_.end()) return;
    for (const auto& [key, value] : it->second) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw SchemaError(origin_ + ": unknown key \"" + key + "\" in [" + section + "]");
    }
}

void IniFile::require_known_sections(const std::vector<std::string>& allowed) const {
    for (const auto& name : order_) {
        if (std::find(allowed.begin(), allowed.end(), name) == allowed.end())
            throw SchemaError(origin_ + ": unknown section [" + name + "]");
    }
}

Scalar to_scalar(const std::string& value, const std::string& what) {
    try {
        std::size_t pos = 0;
        Scalar v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw SchemaError(what + ": expected a number, got \"" + value + "\"");
    }
}

Index to_index(const std::string& value, const std::string& what) {
    Index out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw SchemaError(what + ": expected an integer, got \"" + value + "\"");
    return out;
}

int to_int(const std::string& value, const std::string& what) {
    int out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw SchemaError(what + ": expected an integer, got \"" + value + "\"");
    return out;
}

std::uint64_t to_u64(const std::string& value, const std::string& what) {
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw SchemaError(what + ": expected an unsigned integer, got \"" + value + "\"");
    return out;
}

bool to_bool(const std::string& value, const std::string& what) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw SchemaError(what + ": expected true/false, got \"" + value + "\"");
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(value);
    while (std::getline(in, item, ',')) {
        auto begin = item.find_first_not_of(" \t");
        auto end = item.find_last_not_of(" \t");
        if (begin == std::string::npos)
            out.push_back("");
        else
            out.push_back(item.substr(begin, end - begin + 1));
    }
    if (!value.empty() && value.back() == ',') out.push_back("");
    return out;
}

std::vector<Scalar> to_scalar_list(const std::string& value, const std::string& what) {
    std::vector<Scalar> out;
    for (const auto& item : split_list(value)) out.push_back(to_scalar(item, what));
    return out;
}

}  // namespace fairsemi
