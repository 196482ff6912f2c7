#pragma once

#include <nlohmann/json.hpp>

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace patchsim {

/// Per-vendor normalization quirks. Loaded from a JSON quirk file so new
/// products do not need code changes.
struct VersionRules {
    /// Letter runs that act as a separator when they sit between two digit
    /// runs, e.g. "u" turns "6u13" into [6, 13].
    std::vector<std::string> update_markers{"u"};
    /// Drop trailing ".0" segments so "10.0.0" == "10".
    bool strip_trailing_zeros = false;
    /// Leading text removed before tokenizing, e.g. "v" or "r".
    std::vector<std::string> strip_prefixes;

    friend bool operator==(const VersionRules&, const VersionRules&) = default;
};

/// Rule lookup keyed by "vendor" or "vendor:product"; the product key wins.
class QuirkTable {
public:
    QuirkTable() = default;

    const VersionRules& rules_for(std::string_view vendor, std::string_view product) const;
    void set(const std::string& key, VersionRules rules) { entries_[key] = std::move(rules); }
    void set_default(VersionRules rules) { default_ = std::move(rules); }

    /// Parses `{"default": {...}, "oracle": {...}, "adobe:flash_player": {...}}`.
    static QuirkTable from_json(const nlohmann::json& doc);
    static QuirkTable load(const std::string& path);

private:
    VersionRules default_;
    std::map<std::string, VersionRules, std::less<>> entries_;
};

struct VersionSegment {
    bool numeric = false;
    /// Digits without leading zeros for numeric segments, lowercase text otherwise.
    std::string text;

    friend bool operator==(const VersionSegment&, const VersionSegment&) = default;
};

/// Normalized comparable form of a vendor version string. Numeric segments
/// compare numerically, alphabetic ones lexically, an alphabetic segment sorts
/// before a numeric one, and a strict prefix sorts first.
class VersionKey {
public:
    VersionKey() = default;
    explicit VersionKey(std::string_view raw, const VersionRules& rules = {});

    const std::vector<VersionSegment>& segments() const noexcept { return segments_; }
    /// First segment, or nullptr for an empty key.
    const VersionSegment* major() const noexcept {
        return segments_.empty() ? nullptr : &segments_.front();
    }
    std::string to_string() const;

    friend std::strong_ordering operator<=>(const VersionKey& a, const VersionKey& b);
    friend bool operator==(const VersionKey& a, const VersionKey& b) {
        return a.segments_ == b.segments_;
    }

private:
    std::vector<VersionSegment> segments_;
};

std::strong_ordering compare_segments(const VersionSegment& a, const VersionSegment& b);

/// Orders two raw version strings under the default rules.
std::strong_ordering compare_versions(std::string_view a, std::string_view b,
                                      const VersionRules& rules = {});

struct VersionBound {
    std::string version;
    bool inclusive = true;
    VersionKey key;

    friend bool operator==(const VersionBound& a, const VersionBound& b) {
        return a.version == b.version && a.inclusive == b.inclusive;
    }
};

/// NVD-style version predicate: either a single exact version or a range whose
/// missing bounds are unbounded. A "*" bound is treated as missing.
struct VersionConstraint {
    enum class Kind { Exact, Range };

    Kind kind = Kind::Range;
    std::optional<VersionBound> start;
    std::optional<VersionBound> end;
    /// The exact version for Kind::Exact.
    VersionBound exact;

    bool satisfied_by(const VersionKey& v) const;
    /// Recomputes bound keys under product-specific rules.
    void rekey(const VersionRules& rules);
    /// True when both bounds exist and start > end, or an exclusive bound
    /// pair leaves no room.
    bool is_empty_range() const;

    nlohmann::json to_json() const;
    std::string describe() const;

    friend bool operator==(const VersionConstraint& a, const VersionConstraint& b) {
        return a.kind == b.kind && a.start == b.start && a.end == b.end &&
               (a.kind == Kind::Range || a.exact == b.exact);
    }
};

/// Parses `{"exact": "v"}` or any combination of startIncluding /
/// startExcluding / endIncluding / endExcluding. Throws DataError{Malformed}.
VersionConstraint parse_constraint(const nlohmann::json& match,
                                   const VersionRules& rules = {});

}  // namespace patchsim
