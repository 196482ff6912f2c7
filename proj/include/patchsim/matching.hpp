#pragma once

#include "patchsim/catalog.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace patchsim {

enum class ReactivePick {
    First,   ///< earliest newer release that escapes every CVE
    Latest,  ///< highest version that escapes every CVE
};

/// Indices (ascending) of the releases in `timeline` that satisfy `constraint`.
std::vector<std::size_t> affected_versions(const VersionConstraint& constraint,
                                           const ReleaseTimeline& timeline);

/// Indices of releases affected by any of `vuln`'s entries for this product.
std::vector<std::size_t> affected_versions(const VulnRecord& vuln, const ReleaseTimeline& timeline);

bool release_affected_by_any(const VersionRelease& release,
                             std::span<const VulnRecord* const> vulns);

/// The release to move to from `installed` so that none of `vulns` applies:
/// released at or before `at`, strictly newer than `installed`, unaffected.
std::optional<std::size_t> first_nonvulnerable(const ReleaseTimeline& timeline,
                                               std::span<const VulnRecord* const> vulns,
                                               Month at, std::size_t installed,
                                               ReactivePick pick = ReactivePick::First);

/// Month of the earliest release of this product that escapes `vuln` while
/// being newer than its oldest affected release. Empty when the CVE hits no
/// release of the product or no fix was ever released.
std::optional<Month> fix_month(const VulnRecord& vuln, const ReleaseTimeline& timeline);

/// Earliest fix month across every product the catalog tracks.
std::optional<Month> fix_month(const VulnRecord& vuln, const Catalog& catalog);

}  // namespace patchsim
