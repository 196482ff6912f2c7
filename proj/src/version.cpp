#include "patchsim/version.hpp"

#include "patchsim/errors.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

namespace patchsim {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

VersionRules rules_from_json(const nlohmann::json& j, VersionRules base) {
    if (!j.is_object()) {
        throw DataError(DataError::Kind::Malformed, "quirk entry must be an object");
    }
    for (const auto& [key, value] : j.items()) {
        if (key != "update_markers" && key != "strip_trailing_zeros" && key != "strip_prefixes") {
            throw DataError(DataError::Kind::Malformed, "unknown quirk field '" + key + "'");
        }
    }
    if (auto it = j.find("update_markers"); it != j.end()) {
        base.update_markers = it->get<std::vector<std::string>>();
        for (auto& m : base.update_markers) m = lowercase(m);
    }
    if (auto it = j.find("strip_trailing_zeros"); it != j.end()) {
        base.strip_trailing_zeros = it->get<bool>();
    }
    if (auto it = j.find("strip_prefixes"); it != j.end()) {
        base.strip_prefixes = it->get<std::vector<std::string>>();
        for (auto& p : base.strip_prefixes) p = lowercase(p);
    }
    return base;
}

}  // namespace

const VersionRules& QuirkTable::rules_for(std::string_view vendor,
                                          std::string_view product) const {
    std::string key = lowercase(vendor);
    key += ':';
    key += lowercase(product);
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;
    if (auto it = entries_.find(lowercase(vendor)); it != entries_.end()) return it->second;
    return default_;
}

QuirkTable QuirkTable::from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) {
        throw DataError(DataError::Kind::Malformed, "quirk file must hold a JSON object");
    }
    QuirkTable table;
    try {
        if (auto it = doc.find("default"); it != doc.end()) {
            table.default_ = rules_from_json(*it, VersionRules{});
        }
        for (const auto& [key, value] : doc.items()) {
            if (key == "default") continue;
            table.entries_[lowercase(key)] = rules_from_json(value, table.default_);
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(DataError::Kind::Malformed, std::string("quirk file: ") + e.what());
    }
    return table;
}

QuirkTable QuirkTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open quirk file " + path);
    try {
        return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(DataError::Kind::Malformed, path + ": " + e.what());
    }
}

VersionKey::VersionKey(std::string_view raw, const VersionRules& rules) {
    std::string text = lowercase(raw);
    for (const auto& prefix : rules.strip_prefixes) {
        if (!prefix.empty() && text.starts_with(prefix) && text.size() > prefix.size() &&
            is_digit(text[prefix.size()])) {
            text.erase(0, prefix.size());
            break;
        }
    }

    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (is_digit(c)) {
            std::size_t j = i;
            while (j < text.size() && is_digit(text[j])) ++j;
            std::size_t first = i;
            while (first + 1 < j && text[first] == '0') ++first;
            segments_.push_back({true, text.substr(first, j - first)});
            i = j;
        } else if (is_alpha(c)) {
            std::size_t j = i;
            while (j < text.size() && is_alpha(text[j])) ++j;
            std::string run = text.substr(i, j - i);
            const bool between_digits = i > 0 && is_digit(text[i - 1]) && j < text.size() &&
                                        is_digit(text[j]);
            const bool marker = between_digits &&
                                std::find(rules.update_markers.begin(),
                                          rules.update_markers.end(),
                                          run) != rules.update_markers.end();
            if (!marker) segments_.push_back({false, std::move(run)});
            i = j;
        } else {
            ++i;
        }
    }

    if (rules.strip_trailing_zeros) {
        while (segments_.size() > 1 && segments_.back().numeric && segments_.back().text == "0") {
            segments_.pop_back();
        }
    }
}

std::string VersionKey::to_string() const {
    std::string out;
    for (const auto& s : segments_) {
        if (!out.empty()) out += '.';
        out += s.text;
    }
    return out;
}

std::strong_ordering compare_segments(const VersionSegment& a, const VersionSegment& b) {
    if (a.numeric != b.numeric) {
        return a.numeric ? std::strong_ordering::greater : std::strong_ordering::less;
    }
    if (a.numeric && a.text.size() != b.text.size()) {
        return a.text.size() <=> b.text.size();
    }
    const int c = a.text.compare(b.text);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

std::strong_ordering operator<=>(const VersionKey& a, const VersionKey& b) {
    const std::size_t n = std::min(a.segments_.size(), b.segments_.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (auto c = compare_segments(a.segments_[i], b.segments_[i]); c != 0) return c;
    }
    return a.segments_.size() <=> b.segments_.size();
}

std::strong_ordering compare_versions(std::string_view a, std::string_view b,
                                      const VersionRules& rules) {
    return VersionKey(a, rules) <=> VersionKey(b, rules);
}

bool VersionConstraint::satisfied_by(const VersionKey& v) const {
    if (kind == Kind::Exact) return v == exact.key;
    if (start) {
        const auto c = v <=> start->key;
        if (c < 0 || (c == 0 && !start->inclusive)) return false;
    }
    if (end) {
        const auto c = v <=> end->key;
        if (c > 0 || (c == 0 && !end->inclusive)) return false;
    }
    return true;
}

void VersionConstraint::rekey(const VersionRules& rules) {
    exact.key = VersionKey(exact.version, rules);
    if (start) start->key = VersionKey(start->version, rules);
    if (end) end->key = VersionKey(end->version, rules);
}

bool VersionConstraint::is_empty_range() const {
    if (kind != Kind::Range || !start || !end) return false;
    const auto c = start->key <=> end->key;
    return c > 0 || (c == 0 && !(start->inclusive && end->inclusive));
}

nlohmann::json VersionConstraint::to_json() const {
    nlohmann::json j = nlohmann::json::object();
    if (kind == Kind::Exact) {
        j["exact"] = exact.version;
        return j;
    }
    if (start) j[start->inclusive ? "startIncluding" : "startExcluding"] = start->version;
    if (end) j[end->inclusive ? "endIncluding" : "endExcluding"] = end->version;
    return j;
}

std::string VersionConstraint::describe() const {
    if (kind == Kind::Exact) return "=" + exact.version;
    std::string out;
    if (start) out += (start->inclusive ? ">=" : ">") + start->version;
    if (end) {
        if (!out.empty()) out += ' ';
        out += (end->inclusive ? "<=" : "<") + end->version;
    }
    return out.empty() ? "*" : out;
}

VersionConstraint parse_constraint(const nlohmann::json& match, const VersionRules& rules) {
    if (!match.is_object()) {
        throw DataError(DataError::Kind::Malformed, "constraint must be a JSON object");
    }
    auto read = [&](const char* field) -> std::optional<std::string> {
        auto it = match.find(field);
        if (it == match.end()) return std::nullopt;
        if (!it->is_string() || it->get<std::string>().empty()) {
            throw DataError(DataError::Kind::Malformed,
                            std::string("constraint field '") + field +
                                "' must be a non-empty string");
        }
        return it->get<std::string>();
    };
    for (const auto& [key, value] : match.items()) {
        if (key != "exact" && key != "startIncluding" && key != "startExcluding" &&
            key != "endIncluding" && key != "endExcluding") {
            throw DataError(DataError::Kind::Malformed,
                            "unknown constraint field '" + key + "'");
        }
    }

    VersionConstraint c;
    if (auto exact = read("exact")) {
        if (match.size() != 1) {
            throw DataError(DataError::Kind::Malformed,
                            "'exact' cannot be combined with range fields");
        }
        if (*exact != "*") {
            c.kind = VersionConstraint::Kind::Exact;
            c.exact = {*exact, true, VersionKey(*exact, rules)};
        }
        return c;
    }

    auto bound = [&](const char* inc, const char* exc) -> std::optional<VersionBound> {
        auto a = read(inc);
        auto b = read(exc);
        if (a && b) {
            throw DataError(DataError::Kind::Malformed,
                            std::string("both '") + inc + "' and '" + exc + "' given");
        }
        if (a && *a != "*") return VersionBound{*a, true, VersionKey(*a, rules)};
        if (b && *b != "*") return VersionBound{*b, false, VersionKey(*b, rules)};
        return std::nullopt;
    };
    c.start = bound("startIncluding", "startExcluding");
    c.end = bound("endIncluding", "endExcluding");
    return c;
}

}  // namespace patchsim
