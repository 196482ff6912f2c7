#pragma once

#include "patchsim/bit_matrix.hpp"
#include "patchsim/catalog.hpp"
#include "patchsim/strategy.hpp"

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace patchsim {

/// Versions a campaign can exploit, per month. Each non-empty row is the
/// suffix [campaign start, horizon].
struct ExposureMatrix {
    std::shared_ptr<const RowSpace> rows;
    BitMatrix cells;
    Month start;

    /// True when no CVE of the campaign touches a tracked product version.
    bool empty() const { return !cells.any(); }
};

ExposureMatrix build_campaign_matrix(const CampaignRecord& campaign, const Catalog& catalog,
                                     std::shared_ptr<const RowSpace> rows = nullptr);

/// How month ties are resolved when classifying.
enum class TieRule {
    /// equality counts as "at or after" (t_ve == t_Vp is KK, fix == t_ve is preventable)
    AtOrAfter,
    /// equality counts as "before" (t_ve == t_Vp is KU, fix == t_ve is unpreventable)
    Strict,
};

std::string to_string(TieRule rule);
std::optional<TieRule> parse_tie_rule(std::string_view text);

enum class Knowledge { UU, KU, KK };
enum class AttackScenario { UU_U, UU_P, KU_U, KU_P, KK_U, KK_P };

std::string to_string(Knowledge k);
std::string to_string(AttackScenario s);

Knowledge knowledge_at(Month reserved, Month published, Month exploited,
                       TieRule rule = TieRule::AtOrAfter);

/// Places one exploitation of `vuln` at `exploited` in the six-way grid.
/// Throws ContractViolation when the CVE was published before it was reserved.
AttackScenario classify_attack(const VulnRecord& vuln, Month exploited,
                               std::optional<Month> fix, TieRule rule = TieRule::AtOrAfter);

/// Non-exclusive campaign groups.
struct CampaignClass {
    bool kk = false;
    bool ku = false;
    bool uu = false;

    bool none() const { return !kk && !ku && !uu; }
    std::string to_string() const;

    friend bool operator==(const CampaignClass&, const CampaignClass&) = default;
};

CampaignClass classify_campaign(const CampaignRecord& campaign, const Catalog& catalog,
                                TieRule rule = TieRule::AtOrAfter);

struct ProductScenario {
    std::string product;
    AttackScenario scenario;
};

struct CveScenario {
    std::string cve_id;
    /// Against the earliest fix across products.
    AttackScenario scenario;
    std::optional<Month> fix;
    std::vector<ProductScenario> per_product;
};

struct CampaignClassification {
    std::size_t campaign;
    CampaignClass classes;
    std::vector<CveScenario> cves;
};

std::vector<CampaignClassification> classify_campaigns(const Catalog& catalog,
                                                       TieRule rule = TieRule::AtOrAfter);

/// Sizes of the seven regions of the KK/KU/UU Venn diagram over campaigns that
/// exploit at least one vulnerability.
struct VennCounts {
    enum Region { KKOnly, KUOnly, UUOnly, KK_KU, KK_UU, KU_UU, All, RegionCount };
    std::array<std::size_t, RegionCount> regions{};

    std::size_t total() const;
    static const char* region_name(int region);
};

VennCounts venn_counts(const std::vector<CampaignClassification>& classified);

}  // namespace patchsim
