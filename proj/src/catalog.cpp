#include "patchsim/catalog.hpp"

#include "csv.hpp"
#include "patchsim/errors.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <sstream>

namespace patchsim {

namespace {

constexpr std::array<std::pair<AttackVector, std::string_view>, 8> kVectorTags{{
    {AttackVector::Spearphishing, "spearphishing"},
    {AttackVector::DriveBy, "drive-by"},
    {AttackVector::SupplyChain, "supply-chain"},
    {AttackVector::ValidAccounts, "valid-accounts"},
    {AttackVector::ExternalRemoteServices, "external-remote-services"},
    {AttackVector::PublicFacingApp, "public-facing-app"},
    {AttackVector::RemovableMedia, "removable-media"},
    {AttackVector::Undetermined, "undetermined"},
}};

std::string where(const std::filesystem::path& file, std::size_t line, std::string_view field) {
    std::string out = file.filename().string() + ":" + std::to_string(line);
    if (!field.empty()) out += ": field '" + std::string(field) + "'";
    return out;
}

[[noreturn]] void fail(DataError::Kind kind, const std::string& context, const std::string& what) {
    throw DataError(kind, context + ": " + what);
}

/// Header-indexed CSV reader with line tracking.
class CsvTable {
public:
    CsvTable(const std::filesystem::path& path, std::vector<std::string> required)
        : path_(path), in_(path) {
        if (!in_) throw IoError("cannot open " + path.string());
        std::string header;
        if (!next_raw(header)) fail(DataError::Kind::Malformed, where(path_, 1, ""), "missing header");
        std::vector<std::string> names;
        detail::split_csv_line(strip_bom(header), names);
        for (std::size_t i = 0; i < names.size(); ++i) columns_[detail::trim(names[i])] = i;
        for (const auto& r : required) {
            if (!columns_.contains(r)) {
                fail(DataError::Kind::Malformed, where(path_, line_, ""),
                     "header lacks required column '" + r + "'");
            }
        }
    }

    bool next() {
        std::string raw;
        while (next_raw(raw)) {
            if (detail::trim(raw).empty()) continue;
            if (!detail::split_csv_line(raw, fields_)) {
                fail(DataError::Kind::Malformed, where(path_, line_, ""), "unterminated quote");
            }
            if (fields_.size() != columns_.size()) {
                fail(DataError::Kind::Malformed, where(path_, line_, ""),
                     "expected " + std::to_string(columns_.size()) + " fields, got " +
                         std::to_string(fields_.size()));
            }
            return true;
        }
        return false;
    }

    bool has(const std::string& column) const { return columns_.contains(column); }
    std::string get(const std::string& column) const {
        return detail::trim(fields_.at(columns_.at(column)));
    }
    std::string required(const std::string& column) const {
        auto v = get(column);
        if (v.empty()) fail(DataError::Kind::Malformed, context(column), "empty value");
        return v;
    }
    std::size_t line() const { return line_; }
    std::string context(std::string_view field) const { return where(path_, line_, field); }

private:
    bool next_raw(std::string& out) {
        if (!std::getline(in_, out)) return false;
        ++line_;
        if (!out.empty() && out.back() == '\r') out.pop_back();
        return true;
    }
    static std::string strip_bom(const std::string& s) {
        return s.starts_with("\xEF\xBB\xBF") ? s.substr(3) : s;
    }

    std::filesystem::path path_;
    std::ifstream in_;
    std::size_t line_ = 0;
    std::map<std::string, std::size_t> columns_;
    std::vector<std::string> fields_;
};

CalendarMonth parse_date(const std::string& text, const Horizon& horizon,
                         const std::string& context) {
    try {
        return parse_calendar_month(text, horizon, true);
    } catch (const DataError& e) {
        fail(e.kind(), context, e.what());
    }
}

bool parse_bool(const std::string& text, const std::string& context) {
    if (text.empty() || text == "0" || text == "false" || text == "no") return false;
    if (text == "1" || text == "true" || text == "yes") return true;
    fail(DataError::Kind::Malformed, context, "expected a boolean, got '" + text + "'");
}

void note_count(Catalog& cat, std::size_t count, const std::string& what) {
    if (count > 0) cat.notes.push_back(std::to_string(count) + " " + what);
}

void load_releases(Catalog& cat, const std::filesystem::path& path, const QuirkTable& quirks) {
    CsvTable table(path, {"vendor", "product", "version", "release_date"});
    std::size_t truncated = 0;
    std::size_t clamped = 0;
    while (table.next()) {
        const auto vendor = table.required("vendor");
        const auto name = table.required("product");
        const auto version = table.required("version");
        const auto date = parse_date(table.required("release_date"), cat.horizon,
                                     table.context("release_date"));
        if (date.offset > cat.horizon.end_index) {
            fail(DataError::Kind::AfterHorizon, table.context("release_date"),
                 "release " + version + " is past the horizon " +
                     format_month(cat.horizon.end_index, cat.horizon));
        }
        truncated += date.truncated ? 1 : 0;
        clamped += date.offset < 0 ? 1 : 0;

        auto index = cat.find_product(vendor, name);
        if (!index) {
            SoftwareProduct p{vendor, name, {}, false};
            index = cat.products.size();
            cat.products.push_back(std::move(p));
            cat.timelines.push_back(ReleaseTimeline{*index, {}});
        }
        auto& product = cat.products[*index];
        if (table.has("platform") && !table.get("platform").empty()) {
            product.platform = table.get("platform");
        }
        if (table.has("cumulative") &&
            parse_bool(table.get("cumulative"), table.context("cumulative"))) {
            product.cumulative = true;
        }

        VersionKey key(version, quirks.rules_for(vendor, name));
        auto& timeline = cat.timelines[*index];
        for (const auto& r : timeline.releases) {
            if (r.version == version || r.key == key) {
                fail(DataError::Kind::DuplicateKey, table.context("version"),
                     "duplicate version " + version + " of " + product.id() +
                         (r.version == version ? "" : " (normalizes like " + r.version + ")"));
            }
        }
        timeline.releases.push_back(
            VersionRelease{*index, version, std::move(key), Month{std::max(date.offset, 0)}});
    }
    for (auto& t : cat.timelines) sort_timeline(t);
    note_count(cat, truncated, "release dates truncated to month in " + path.filename().string());
    note_count(cat, clamped, "pre-epoch releases clamped to the epoch month");
}

void load_vulns(Catalog& cat, const std::filesystem::path& path, const QuirkTable& quirks) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + upto, '\n');
        fail(DataError::Kind::Malformed, where(path, line, ""), e.what());
    }
    if (!doc.is_array()) {
        fail(DataError::Kind::Malformed, where(path, 1, ""), "expected a JSON array");
    }

    std::size_t truncated = 0;
    std::size_t unmatched = 0;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& entry = doc[i];
        std::string ctx = path.filename().string() + ": entry " + std::to_string(i);
        auto str_field = [&](const char* field) {
            auto it = entry.find(field);
            if (it == entry.end() || !it->is_string() || it->get<std::string>().empty()) {
                fail(DataError::Kind::Malformed, ctx + ": field '" + field + "'",
                     "missing or not a non-empty string");
            }
            return it->get<std::string>();
        };
        if (!entry.is_object()) fail(DataError::Kind::Malformed, ctx, "expected an object");

        VulnRecord v;
        v.cve_id = str_field("cve");
        ctx += " (" + v.cve_id + ")";
        if (cat.find_vuln(v.cve_id)) {
            fail(DataError::Kind::DuplicateKey, ctx + ": field 'cve'", "duplicate CVE " + v.cve_id);
        }
        const auto reserved = parse_date(str_field("reserved"), cat.horizon, ctx + ": field 'reserved'");
        const auto published =
            parse_date(str_field("published"), cat.horizon, ctx + ": field 'published'");
        truncated += (reserved.truncated ? 1 : 0) + (published.truncated ? 1 : 0);
        v.reserved = Month{reserved.offset};
        v.published = Month{published.offset};

        auto affected = entry.find("affected");
        if (affected == entry.end() || !affected->is_array()) {
            fail(DataError::Kind::Malformed, ctx + ": field 'affected'", "expected an array");
        }
        for (std::size_t k = 0; k < affected->size(); ++k) {
            const auto& a = (*affected)[k];
            const auto actx = ctx + ": affected[" + std::to_string(k) + "]";
            if (!a.is_object() || !a.contains("vendor") || !a.contains("product") ||
                !a.contains("match") || !a["vendor"].is_string() || !a["product"].is_string()) {
                fail(DataError::Kind::Malformed, actx, "expected {vendor, product, match}");
            }
            AffectedProduct ap;
            ap.vendor = a["vendor"].get<std::string>();
            ap.product = a["product"].get<std::string>();
            try {
                ap.match = parse_constraint(a["match"], quirks.rules_for(ap.vendor, ap.product));
            } catch (const DataError& e) {
                fail(e.kind(), actx + ": field 'match'", e.what());
            }
            ap.product_index = cat.find_product(ap.vendor, ap.product);
            if (ap.product_index) {
                const auto& releases = cat.timelines[*ap.product_index].releases;
                const bool any = std::any_of(releases.begin(), releases.end(), [&](const auto& r) {
                    return ap.match.satisfied_by(r.key);
                });
                if (!any) {
                    ++unmatched;
                    cat.notes.push_back(v.cve_id + ": constraint " + ap.match.describe() + " on " +
                                        ap.vendor + ":" + ap.product + " matches no release");
                }
            }
            v.affected.push_back(std::move(ap));
        }
        cat.vulns.push_back(std::move(v));
    }
    note_count(cat, truncated, "CVE dates truncated to month in " + path.filename().string());
    note_count(cat, unmatched, "constraints matched no release");
}

void load_campaigns(Catalog& cat, const std::filesystem::path& path) {
    CsvTable table(path, {"apt", "date", "cves", "vectors"});
    std::size_t truncated = 0;
    std::size_t merged = 0;
    while (table.next()) {
        CampaignRecord c;
        c.apt = table.required("apt");
        const auto date = parse_date(table.required("date"), cat.horizon, table.context("date"));
        if (date.offset < 0) {
            fail(DataError::Kind::BeforeEpoch, table.context("date"),
                 "campaign precedes the epoch " + format_month(0, cat.horizon));
        }
        if (date.offset > cat.horizon.end_index) {
            fail(DataError::Kind::AfterHorizon, table.context("date"),
                 "campaign is past the horizon " + format_month(cat.horizon.end_index, cat.horizon));
        }
        truncated += date.truncated ? 1 : 0;
        c.start = Month{date.offset};

        for (auto& cve : detail::split_list(table.get("cves"), '|')) {
            if (!cat.find_vuln(cve)) {
                fail(DataError::Kind::DanglingReference, table.context("cves"),
                     "unknown CVE " + cve);
            }
            c.cve_ids.push_back(std::move(cve));
        }
        for (const auto& tag : detail::split_list(table.get("vectors"), '|')) {
            auto v = parse_attack_vector(tag);
            if (!v) fail(DataError::Kind::Malformed, table.context("vectors"), "unknown vector '" + tag + "'");
            c.vectors.insert(*v);
        }
        if (c.cve_ids.empty() && c.vectors.empty()) {
            fail(DataError::Kind::Malformed, table.context("cves"),
                 "campaign lists neither CVEs nor attack vectors");
        }

        auto existing = std::find_if(cat.campaigns.begin(), cat.campaigns.end(), [&](const auto& o) {
            return o.apt == c.apt && o.start == c.start;
        });
        if (existing != cat.campaigns.end()) {
            existing->cve_ids.insert(existing->cve_ids.end(), c.cve_ids.begin(), c.cve_ids.end());
            existing->vectors.insert(c.vectors.begin(), c.vectors.end());
            c = std::move(*existing);
            cat.campaigns.erase(existing);
            ++merged;
        }
        std::sort(c.cve_ids.begin(), c.cve_ids.end());
        c.cve_ids.erase(std::unique(c.cve_ids.begin(), c.cve_ids.end()), c.cve_ids.end());
        cat.campaigns.push_back(std::move(c));
    }
    std::stable_sort(cat.campaigns.begin(), cat.campaigns.end(), [](const auto& a, const auto& b) {
        return std::tie(a.start, a.apt) < std::tie(b.start, b.apt);
    });
    note_count(cat, truncated, "campaign dates truncated to month");
    note_count(cat, merged, "campaign rows merged on (apt, month)");
}

std::string join(const auto& items, char sep, auto&& to_text) {
    std::string out;
    for (const auto& item : items) {
        if (!out.empty()) out += sep;
        out += to_text(item);
    }
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << content)) throw IoError("cannot write " + path.string());
}

}  // namespace

std::string_view to_string(AttackVector v) {
    for (const auto& [value, tag] : kVectorTags) {
        if (value == v) return tag;
    }
    return "undetermined";
}

std::optional<AttackVector> parse_attack_vector(std::string_view tag) {
    for (const auto& [value, name] : kVectorTags) {
        if (name == tag) return value;
    }
    return std::nullopt;
}

const VulnRecord* Catalog::find_vuln(std::string_view cve_id) const {
    for (const auto& v : vulns) {
        if (v.cve_id == cve_id) return &v;
    }
    return nullptr;
}

std::optional<std::size_t> Catalog::find_product(std::string_view vendor,
                                                 std::string_view name) const {
    for (std::size_t i = 0; i < products.size(); ++i) {
        if (products[i].vendor == vendor && products[i].name == name) return i;
    }
    return std::nullopt;
}

bool Catalog::is_affected(const VulnRecord& v, const VersionRelease& r) const {
    return std::any_of(v.affected.begin(), v.affected.end(), [&](const AffectedProduct& a) {
        return a.product_index == r.product && a.match.satisfied_by(r.key);
    });
}

std::string Catalog::campaign_label(std::size_t campaign) const {
    const auto& c = campaigns.at(campaign);
    return c.apt + " " + format_month(c.start, horizon);
}

void sort_timeline(ReleaseTimeline& timeline) {
    std::stable_sort(timeline.releases.begin(), timeline.releases.end(),
                     [](const VersionRelease& a, const VersionRelease& b) {
                         if (a.release != b.release) return a.release < b.release;
                         return a.key < b.key;
                     });
}

Catalog load_catalog(const DatasetPaths& paths, const LoadOptions& options) {
    Catalog cat;
    cat.horizon = options.horizon;
    load_releases(cat, paths.releases, options.quirks);
    load_vulns(cat, paths.vulns, options.quirks);
    load_campaigns(cat, paths.campaigns);
    return cat;
}

void save_catalog(const Catalog& cat, const DatasetPaths& paths) {
    using detail::csv_escape;
    std::ostringstream rel;
    rel << "vendor,product,version,release_date,platform,cumulative\n";
    for (const auto& t : cat.timelines) {
        const auto& p = cat.products.at(t.product);
        for (const auto& r : t.releases) {
            rel << csv_escape(p.vendor) << ',' << csv_escape(p.name) << ','
                << csv_escape(r.version) << ',' << format_month(r.release, cat.horizon) << ','
                << csv_escape(p.platform) << ',' << (p.cumulative ? "true" : "false") << '\n';
        }
    }
    write_file(paths.releases, rel.str());

    auto vulns = nlohmann::json::array();
    for (const auto& v : cat.vulns) {
        auto affected = nlohmann::json::array();
        for (const auto& a : v.affected) {
            affected.push_back({{"vendor", a.vendor}, {"product", a.product}, {"match", a.match.to_json()}});
        }
        vulns.push_back({{"cve", v.cve_id},
                         {"reserved", format_month(v.reserved, cat.horizon)},
                         {"published", format_month(v.published, cat.horizon)},
                         {"affected", std::move(affected)}});
    }
    write_file(paths.vulns, vulns.dump(2) + "\n");

    std::ostringstream camp;
    camp << "apt,date,cves,vectors\n";
    for (const auto& c : cat.campaigns) {
        camp << csv_escape(c.apt) << ',' << format_month(c.start, cat.horizon) << ','
             << csv_escape(join(c.cve_ids, '|', [](const auto& s) { return s; })) << ','
             << join(c.vectors, '|', [](AttackVector v) { return std::string(to_string(v)); })
             << '\n';
    }
    write_file(paths.campaigns, camp.str());
}

std::vector<Violation> validate_catalog(const Catalog& cat) {
    std::vector<Violation> out;
    auto add = [&](std::string entity, std::string rule, std::string detail) {
        out.push_back({std::move(entity), std::move(rule), std::move(detail)});
    };

    for (std::size_t i = 0; i < cat.products.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (cat.products[i].vendor == cat.products[j].vendor &&
                cat.products[i].name == cat.products[j].name) {
                add(cat.products[i].id(), "duplicate-product", "listed twice");
            }
        }
    }

    if (cat.timelines.size() != cat.products.size()) {
        add("catalog", "timeline-mismatch",
            std::to_string(cat.timelines.size()) + " timelines for " +
                std::to_string(cat.products.size()) + " products");
    }
    for (std::size_t i = 0; i < cat.timelines.size(); ++i) {
        const auto& t = cat.timelines[i];
        const std::string owner = t.product < cat.products.size() ? cat.products[t.product].id()
                                                                  : "timeline#" + std::to_string(i);
        if (t.product != i) {
            add(owner, "timeline-mismatch", "timeline " + std::to_string(i) + " names product " +
                                                std::to_string(t.product));
        }
        for (std::size_t k = 0; k < t.releases.size(); ++k) {
            const auto& r = t.releases[k];
            const std::string id = owner + " " + r.version;
            if (r.product != t.product) add(id, "release-product-mismatch", "release filed under another product");
            if (r.release.index < 0) add(id, "release-before-epoch", format_month(r.release, cat.horizon));
            if (r.release.index > cat.horizon.end_index) {
                add(id, "release-after-horizon", format_month(r.release, cat.horizon));
            }
            if (k > 0) {
                const auto& prev = t.releases[k - 1];
                if (prev.release > r.release || (prev.release == r.release && prev.key > r.key)) {
                    add(id, "timeline-order", "listed after " + prev.version);
                }
            }
            for (std::size_t m = 0; m < k; ++m) {
                if (t.releases[m].key == r.key) {
                    add(id, "duplicate-version", "same key as " + t.releases[m].version);
                }
            }
        }
    }

    for (std::size_t i = 0; i < cat.vulns.size(); ++i) {
        const auto& v = cat.vulns[i];
        for (std::size_t j = 0; j < i; ++j) {
            if (cat.vulns[j].cve_id == v.cve_id) add(v.cve_id, "duplicate-cve", "listed twice");
        }
        if (v.reserved > v.published) {
            add(v.cve_id, "reserved-after-published",
                format_month(v.reserved, cat.horizon) + " > " + format_month(v.published, cat.horizon));
        }
        for (const auto& a : v.affected) {
            if (a.match.is_empty_range()) {
                add(v.cve_id, "empty-constraint-range", a.vendor + ":" + a.product + " " + a.match.describe());
            }
            const auto expected = cat.find_product(a.vendor, a.product);
            if (a.product_index != expected) {
                add(v.cve_id, "affected-product-link", a.vendor + ":" + a.product + " is linked inconsistently");
            }
        }
    }

    for (std::size_t i = 0; i < cat.campaigns.size(); ++i) {
        const auto& c = cat.campaigns[i];
        const std::string id = c.apt + " " + format_month(c.start, cat.horizon);
        for (std::size_t j = 0; j < i; ++j) {
            if (cat.campaigns[j].apt == c.apt && cat.campaigns[j].start == c.start) {
                add(id, "duplicate-campaign", "same (apt, month) twice");
            }
        }
        if (!cat.horizon.contains(c.start)) add(id, "campaign-outside-horizon", "start month out of range");
        for (const auto& cve : c.cve_ids) {
            if (!cat.find_vuln(cve)) add(id, "dangling-cve", cve);
        }
        if (c.cve_ids.empty() && c.vectors.empty()) add(id, "empty-campaign", "no CVEs and no vectors");
    }
    return out;
}

}  // namespace patchsim
