#include "patchsim/campaign.hpp"

#include "patchsim/errors.hpp"
#include "patchsim/matching.hpp"

#include <numeric>

namespace patchsim {

ExposureMatrix build_campaign_matrix(const CampaignRecord& campaign, const Catalog& catalog,
                                     std::shared_ptr<const RowSpace> rows) {
    if (!rows) rows = std::make_shared<const RowSpace>(catalog);
    ExposureMatrix m{rows, BitMatrix(rows->size(), catalog.horizon.columns()), campaign.start};
    if (!catalog.horizon.contains(campaign.start)) return m;
    for (const auto& cve : campaign.cve_ids) {
        const auto* v = catalog.find_vuln(cve);
        if (!v) continue;
        for (std::size_t p = 0; p < catalog.timelines.size(); ++p) {
            for (auto r : affected_versions(*v, catalog.timelines[p])) {
                m.cells.set_suffix(rows->row_of(p, r), static_cast<std::size_t>(campaign.start.index));
            }
        }
    }
    return m;
}

std::string to_string(TieRule rule) {
    return rule == TieRule::AtOrAfter ? "at-or-after" : "strict";
}

std::optional<TieRule> parse_tie_rule(std::string_view text) {
    if (text == "at-or-after") return TieRule::AtOrAfter;
    if (text == "strict") return TieRule::Strict;
    return std::nullopt;
}

std::string to_string(Knowledge k) {
    switch (k) {
        case Knowledge::UU: return "UU";
        case Knowledge::KU: return "KU";
        case Knowledge::KK: return "KK";
    }
    return "?";
}

std::string to_string(AttackScenario s) {
    static constexpr const char* names[] = {"UU-U", "UU-P", "KU-U", "KU-P", "KK-U", "KK-P"};
    return names[static_cast<int>(s)];
}

Knowledge knowledge_at(Month reserved, Month published, Month exploited, TieRule rule) {
    if (rule == TieRule::AtOrAfter) {
        if (exploited < reserved) return Knowledge::UU;
        if (exploited < published) return Knowledge::KU;
        return Knowledge::KK;
    }
    if (exploited <= reserved) return Knowledge::UU;
    if (exploited <= published) return Knowledge::KU;
    return Knowledge::KK;
}

AttackScenario classify_attack(const VulnRecord& vuln, Month exploited, std::optional<Month> fix,
                               TieRule rule) {
    if (vuln.reserved > vuln.published) {
        throw ContractViolation(vuln.cve_id + " is published before it is reserved");
    }
    const bool preventable =
        fix && (rule == TieRule::AtOrAfter ? *fix <= exploited : *fix < exploited);
    const int base = 2 * static_cast<int>(knowledge_at(vuln.reserved, vuln.published, exploited, rule));
    return static_cast<AttackScenario>(base + (preventable ? 1 : 0));
}

std::string CampaignClass::to_string() const {
    std::string out;
    for (auto [flag, name] : {std::pair{kk, "KK"}, std::pair{ku, "KU"}, std::pair{uu, "UU"}}) {
        if (!flag) continue;
        if (!out.empty()) out += '|';
        out += name;
    }
    return out;
}

CampaignClass classify_campaign(const CampaignRecord& campaign, const Catalog& catalog,
                                TieRule rule) {
    CampaignClass cls;
    for (const auto& cve : campaign.cve_ids) {
        const auto* v = catalog.find_vuln(cve);
        if (!v) continue;
        switch (knowledge_at(v->reserved, v->published, campaign.start, rule)) {
            case Knowledge::KK: cls.kk = true; break;
            case Knowledge::KU: cls.ku = true; break;
            case Knowledge::UU: cls.uu = true; break;
        }
    }
    return cls;
}

std::vector<CampaignClassification> classify_campaigns(const Catalog& catalog, TieRule rule) {
    std::vector<CampaignClassification> out;
    for (std::size_t i = 0; i < catalog.campaigns.size(); ++i) {
        const auto& c = catalog.campaigns[i];
        CampaignClassification row{i, classify_campaign(c, catalog, rule), {}};
        for (const auto& cve : c.cve_ids) {
            const auto* v = catalog.find_vuln(cve);
            if (!v) continue;
            CveScenario s{cve, {}, fix_month(*v, catalog), {}};
            s.scenario = classify_attack(*v, c.start, s.fix, rule);
            for (const auto& t : catalog.timelines) {
                if (affected_versions(*v, t).empty()) continue;
                s.per_product.push_back({catalog.products[t.product].id(),
                                         classify_attack(*v, c.start, fix_month(*v, t), rule)});
            }
            row.cves.push_back(std::move(s));
        }
        out.push_back(std::move(row));
    }
    return out;
}

std::size_t VennCounts::total() const {
    return std::accumulate(regions.begin(), regions.end(), std::size_t{0});
}

const char* VennCounts::region_name(int region) {
    static constexpr const char* names[] = {"KK", "KU", "UU", "KK+KU", "KK+UU", "KU+UU", "KK+KU+UU"};
    return names[region];
}

VennCounts venn_counts(const std::vector<CampaignClassification>& classified) {
    VennCounts v;
    for (const auto& row : classified) {
        const auto& c = row.classes;
        if (c.none()) continue;
        int region = 0;
        if (c.kk && c.ku && c.uu) region = VennCounts::All;
        else if (c.kk && c.ku) region = VennCounts::KK_KU;
        else if (c.kk && c.uu) region = VennCounts::KK_UU;
        else if (c.ku && c.uu) region = VennCounts::KU_UU;
        else if (c.kk) region = VennCounts::KKOnly;
        else if (c.ku) region = VennCounts::KUOnly;
        else region = VennCounts::UUOnly;
        ++v.regions[static_cast<std::size_t>(region)];
    }
    return v;
}

}  // namespace patchsim
