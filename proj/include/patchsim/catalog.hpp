#pragma once

#include "patchsim/month.hpp"
#include "patchsim/version.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace patchsim {

enum class AttackVector {
    Spearphishing,
    DriveBy,
    SupplyChain,
    ValidAccounts,
    ExternalRemoteServices,
    PublicFacingApp,
    RemovableMedia,
    Undetermined,
};

std::string_view to_string(AttackVector v);
std::optional<AttackVector> parse_attack_vector(std::string_view tag);

struct SoftwareProduct {
    std::string vendor;
    std::string name;
    std::string platform;
    /// Updates are cumulative (e.g. Office KBs). Informational only.
    bool cumulative = false;

    std::string id() const { return vendor + ":" + name; }

    friend bool operator==(const SoftwareProduct&, const SoftwareProduct&) = default;
};

struct VersionRelease {
    std::size_t product = 0;
    std::string version;
    VersionKey key;
    /// Month the release became available. Releases that predate the epoch
    /// are clamped to month 0.
    Month release;

    friend bool operator==(const VersionRelease& a, const VersionRelease& b) {
        return a.product == b.product && a.version == b.version && a.release == b.release;
    }
};

/// All releases of one product, ordered by release month then version key.
struct ReleaseTimeline {
    std::size_t product = 0;
    std::vector<VersionRelease> releases;

    friend bool operator==(const ReleaseTimeline&, const ReleaseTimeline&) = default;
};

struct AffectedProduct {
    std::string vendor;
    std::string product;
    VersionConstraint match;
    /// Index into Catalog::products, empty when the product has no timeline.
    std::optional<std::size_t> product_index;

    friend bool operator==(const AffectedProduct&, const AffectedProduct&) = default;
};

/// A CVE with its reservation and publication months. Unlike releases and
/// campaigns these months may fall outside the observation window (a CVE can be
/// published years before the epoch or after the horizon).
struct VulnRecord {
    std::string cve_id;
    Month reserved;
    Month published;
    std::vector<AffectedProduct> affected;

    friend bool operator==(const VulnRecord&, const VulnRecord&) = default;
};

struct CampaignRecord {
    std::string apt;
    Month start;
    /// Sorted and de-duplicated. Empty for attack-vector-only campaigns, which
    /// are kept for reporting but never enter the exposure matrices.
    std::vector<std::string> cve_ids;
    std::set<AttackVector> vectors;

    bool exploits_vulnerabilities() const noexcept { return !cve_ids.empty(); }

    friend bool operator==(const CampaignRecord&, const CampaignRecord&) = default;
};

/// Immutable after load. `timelines[i]` belongs to `products[i]`.
struct Catalog {
    Horizon horizon;
    std::vector<SoftwareProduct> products;
    std::vector<ReleaseTimeline> timelines;
    std::vector<VulnRecord> vulns;
    std::vector<CampaignRecord> campaigns;
    /// Load diagnostics (date truncation, clamped releases, merged campaigns,
    /// constraints that match no release). Not part of catalog identity.
    std::vector<std::string> notes;

    const VulnRecord* find_vuln(std::string_view cve_id) const;
    std::optional<std::size_t> find_product(std::string_view vendor,
                                            std::string_view name) const;
    /// True when any affected entry of `v` for the release's product matches it.
    bool is_affected(const VulnRecord& v, const VersionRelease& r) const;
    std::string campaign_label(std::size_t campaign) const;

    friend bool operator==(const Catalog& a, const Catalog& b) {
        return a.horizon == b.horizon && a.products == b.products &&
               a.timelines == b.timelines && a.vulns == b.vulns && a.campaigns == b.campaigns;
    }
};

struct LoadOptions {
    Horizon horizon;
    QuirkTable quirks;
};

struct DatasetPaths {
    std::filesystem::path releases;
    std::filesystem::path vulns;
    std::filesystem::path campaigns;

    static DatasetPaths in_directory(const std::filesystem::path& dir) {
        return {dir / "releases.csv", dir / "vulns.json", dir / "campaigns.csv"};
    }
};

/// Loads and cross-links the three dataset files. Throws DataError with
/// file:line:field context, or IoError when a file cannot be read.
Catalog load_catalog(const DatasetPaths& paths, const LoadOptions& options = {});

/// Writes the catalog back in the same three formats.
void save_catalog(const Catalog& catalog, const DatasetPaths& paths);

struct Violation {
    std::string entity;
    std::string rule;
    std::string detail;

    friend bool operator==(const Violation&, const Violation&) = default;
};

/// Checks every catalog invariant; an empty result means the catalog is sound.
std::vector<Violation> validate_catalog(const Catalog& catalog);

/// Sorts a timeline into canonical order (release month, then version key).
void sort_timeline(ReleaseTimeline& timeline);

}  // namespace patchsim
