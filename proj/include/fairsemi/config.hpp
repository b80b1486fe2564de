#pragma once

#include "fairsemi/types.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace fairsemi {

/// Minimal INI reader: [section] headers, key = value pairs, full-line #
/// comments, blank lines. Values keep embedded commas and semicolons so
/// list-valued and delimiter settings survive. Duplicate keys within a
/// section are rejected.
class IniFile {
public:
    static IniFile parse(const std::filesystem::path& path);
    static IniFile parse_text(const std::string& text, const std::string& origin);

    bool has_section(const std::string& section) const;
    bool has(const std::string& section, const std::string& key) const;

    /// Throws SchemaError when the key is absent.
    std::string get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;

    /// Throws SchemaError naming the first key in the section that is not
    /// in the allowed list, and for sections not named by any call made
    /// through validate_sections.
    void require_known_keys(const std::string& section,
                            const std::vector<std::string>& allowed) const;
    void require_known_sections(const std::vector<std::string>& allowed) const;

    const std::vector<std::string>& section_names() const { return order_; }

private:
    std::string origin_;
    std::map<std::string, std::map<std::string, std::string>> sections_;
    std::vector<std::string> order_;
};

// conversion helpers with contextual error messages
Scalar to_scalar(const std::string& value, const std::string& what);
Index to_index(const std::string& value, const std::string& what);
int to_int(const std::string& value, const std::string& what);
std::uint64_t to_u64(const std::string& value, const std::string& what);
bool to_bool(const std::string& value, const std::string& what);
std::vector<std::string> split_list(const std::string& value);
std::vector<Scalar> to_scalar_list(const std::string& value, const std::string& what);

}  // namespace fairsemi
