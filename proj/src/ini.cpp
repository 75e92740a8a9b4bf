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

#include "beamsim/ini.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace beamsim {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos)
        return "";
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& section, const std::string& key, const std::string& raw,
                    int line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(raw, &used);
        if (used != raw.size())
            throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line) + ": " + section + "." + key +
                          ": not a number: '" + raw + "'");
    }
}

} // namespace

IniDoc IniDoc::parse(const std::string& text) {
    IniDoc doc;
    std::istringstream in(text);
    std::string line;
    std::string current;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';')
            continue;
        if (t.front() == '[') {
            if (t.back() != ']' || t.size() < 3)
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            current = trim(t.substr(1, t.size() - 2));
            if (current.empty())
                throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
            auto [it, inserted] = doc.sections_.try_emplace(current);
            if (inserted)
                it->second.line = lineno;
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        if (current.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
        const std::string key = trim(t.substr(0, eq));
        if (key.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        const std::string value = trim(t.substr(eq + 1));
        auto& section = doc.sections_[current];
        if (section.entries.count(key) != 0)
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key " + current +
                              "." + key);
        section.entries[key] = Entry{value, lineno, false};
    }
    return doc;
}

bool IniDoc::has_section(const std::string& section) const {
    return sections_.count(section) != 0;
}

bool IniDoc::has_key(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
}

int IniDoc::section_line(const std::string& section) const {
    const auto it = sections_.find(section);
    return it == sections_.end() ? 0 : it->second.line;
}

IniDoc::Entry* IniDoc::find(const std::string& section, const std::string& key) {
    const auto sit = sections_.find(section);
    if (sit == sections_.end())
        return nullptr;
    const auto eit = sit->second.entries.find(key);
    return eit == sit->second.entries.end() ? nullptr : &eit->second;
}

const IniDoc::Entry* IniDoc::find(const std::string& section, const std::string& key) const {
    const auto sit = sections_.find(section);
    if (sit == sections_.end())
        return nullptr;
    const auto eit = sit->second.entries.find(key);
    return eit == sit->second.entries.end() ? nullptr : &eit->second;
}

std::string IniDoc::get(const std::string& section, const std::string& key) {
    touch_section(section);
    Entry* e = find(section, key);
    if (e == nullptr)
        throw ConfigError("missing required key " + section + "." + key);
    e->consumed = true;
    return e->value;
}

std::string IniDoc::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) {
    touch_section(section);
    Entry* e = find(section, key);
    if (e == nullptr)
        return fallback;
    e->consumed = true;
    return e->value;
}

double IniDoc::get_double(const std::string& section, const std::string& key, double fallback) {
    touch_section(section);
    Entry* e = find(section, key);
    if (e == nullptr)
        return fallback;
    e->consumed = true;
    return parse_double(section, key, e->value, e->line);
}

std::int64_t IniDoc::get_int(const std::string& section, const std::string& key,
                             std::int64_t fallback) {
    const double v = get_double(section, key, static_cast<double>(fallback));
    const auto r = static_cast<std::int64_t>(std::llround(v));
    if (static_cast<double>(r) != v)
        throw ConfigError(section + "." + key + ": expected an integer");
    return r;
}

std::uint64_t IniDoc::get_uint(const std::string& section, const std::string& key,
                               std::uint64_t fallback) {
    touch_section(section);
    Entry* e = find(section, key);
    if (e == nullptr)
        return fallback;
    e->consumed = true;
    try {
        std::size_t used = 0;
        const std::uint64_t v = std::stoull(e->value, &used);
        if (used != e->value.size())
            throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(e->line) + ": " + section + "." + key +
                          ": not an unsigned integer: '" + e->value + "'");
    }
}

bool IniDoc::get_bool(const std::string& section, const std::string& key, bool fallback) {
    touch_section(section);
    Entry* e = find(section, key);
    if (e == nullptr)
        return fallback;
    e->consumed = true;
    std::string v = e->value;
    std::transform(v.begin(), v.end(), v.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (v == "true" || v == "1" || v == "yes" || v == "on")
        return true;
    if (v == "false" || v == "0" || v == "no" || v == "off")
        return false;
    throw ConfigError("line " + std::to_string(e->line) + ": " + section + "." + key +
                      ": not a boolean: '" + e->value + "'");
}

std::vector<double> IniDoc::get_double_list(const std::string& section, const std::string& key,
                                            const std::vector<double>& fallback) {
    touch_section(section);
    Entry* e = find(section, key);
    if (e == nullptr)
        return fallback;
    e->consumed = true;
    std::vector<double> out;
    std::istringstream in(e->value);
    std::string field;
    while (std::getline(in, field, ','))
        out.push_back(parse_double(section, key, trim(field), e->line));
    if (out.empty())
        throw ConfigError("line " + std::to_string(e->line) + ": " + section + "." + key +
                          ": empty list");
    return out;
}

double IniDoc::require_double(const std::string& section, const std::string& key) {
    const std::string raw = get(section, key);
    return parse_double(section, key, raw, line_of(section, key));
}

std::uint64_t IniDoc::require_uint(const std::string& section, const std::string& key) {
    touch_section(section);
    if (find(section, key) == nullptr)
        throw ConfigError("missing required key " + section + "." + key);
    return get_uint(section, key, 0);
}

std::string IniDoc::require_string(const std::string& section, const std::string& key) {
    return get(section, key);
}

void IniDoc::touch_section(const std::string& section) {
    const auto it = sections_.find(section);
    if (it != sections_.end())
        it->second.touched = true;
}

void IniDoc::reject_unconsumed() const {
    for (const auto& [name, section] : sections_) {
        if (!section.touched)
            throw ConfigError("line " + std::to_string(section.line) + ": unknown section [" +
                              name + "]");
        for (const auto& [key, entry] : section.entries)
            if (!entry.consumed)
                throw ConfigError("line " + std::to_string(entry.line) + ": unknown key " + name +
                                  "." + key);
    }
}

int IniDoc::line_of(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    return e == nullptr ? 0 : e->line;
}

} // namespace beamsim
