// SPDX-License-Identifier: Apache-2.0
//
// beamsim: digital multi-beam mm-wave array simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0.
//
// Unless required by applicable law or agreed to in writing, software distributed
// under the License is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR
// CONDITIONS OF ANY KIND, either express or implied. See the License for the
// specific language governing permissions and limitations under the License.
// -------------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace beamsim {

/// Configuration error: malformed file, unknown key, or invariant violation.
/// The CLI maps this to its config-error exit code.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/*!\brief Line-tracking INI document with consumption accounting.
 *
 * Sections are [name] headers; entries are key = value pairs; blank lines and
 * lines starting with '#' or ';' are ignored. Every key remembers its line
 * number, and readers mark keys consumed so a loader can reject leftovers as
 * unknown keys by name and line.
 */
class IniDoc {
  public:
    static IniDoc parse(const std::string& text);

    bool has_section(const std::string& section) const;
    bool has_key(const std::string& section, const std::string& key) const;
    int section_line(const std::string& section) const;

    /// Raw value; marks the key consumed. Throws ConfigError if absent.
    std::string get(const std::string& section, const std::string& key);

    /// Typed readers with defaults; absent keys return the default.
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback);
    double get_double(const std::string& section, const std::string& key, double fallback);
    std::int64_t get_int(const std::string& section, const std::string& key,
                         std::int64_t fallback);
    std::uint64_t get_uint(const std::string& section, const std::string& key,
                           std::uint64_t fallback);
    bool get_bool(const std::string& section, const std::string& key, bool fallback);
    std::vector<double> get_double_list(const std::string& section, const std::string& key,
                                        const std::vector<double>& fallback);

    /// Required variants: throw ConfigError naming the section and key.
    double require_double(const std::string& section, const std::string& key);
    std::uint64_t require_uint(const std::string& section, const std::string& key);
    std::string require_string(const std::string& section, const std::string& key);

    /// Mark a whole section as recognized even if no key was read from it.
    void touch_section(const std::string& section);

    /// Throws ConfigError naming the first unconsumed key or unrecognized
    /// section, with its line number.
    void reject_unconsumed() const;

    int line_of(const std::string& section, const std::string& key) const;

  private:
    struct Entry {
        std::string value;
        int line = 0;
        bool consumed = false;
    };
    struct Section {
        std::map<std::string, Entry> entries;
        int line = 0;
        bool touched = false;
    };
    std::map<std::string, Section> sections_;

    Entry* find(const std::string& section, const std::string& key);
    const Entry* find(const std::string& section, const std::string& key) const;
};

} // namespace beamsim
