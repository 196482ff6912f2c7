#include "patchsim/matching.hpp"

#include <algorithm>

namespace patchsim {

namespace {

bool affected_by(const VulnRecord& v, const VersionRelease& r) {
    return std::any_of(v.affected.begin(), v.affected.end(), [&](const AffectedProduct& a) {
        return a.product_index == r.product && a.match.satisfied_by(r.key);
    });
}

}  // namespace

std::vector<std::size_t> affected_versions(const VersionConstraint& constraint,
                                           const ReleaseTimeline& timeline) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < timeline.releases.size(); ++i) {
        if (constraint.satisfied_by(timeline.releases[i].key)) out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> affected_versions(const VulnRecord& vuln, const ReleaseTimeline& timeline) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < timeline.releases.size(); ++i) {
        if (affected_by(vuln, timeline.releases[i])) out.push_back(i);
    }
    return out;
}

bool release_affected_by_any(const VersionRelease& release,
                             std::span<const VulnRecord* const> vulns) {
    return std::any_of(vulns.begin(), vulns.end(),
                       [&](const VulnRecord* v) { return affected_by(*v, release); });
}

std::optional<std::size_t> first_nonvulnerable(const ReleaseTimeline& timeline,
                                               std::span<const VulnRecord* const> vulns,
                                               Month at, std::size_t installed,
                                               ReactivePick pick) {
    const auto& releases = timeline.releases;
    const auto& current = releases.at(installed).key;
    std::optional<std::size_t> best;
    // timeline order is release month then key, so the first hit is the earliest
    for (std::size_t i = 0; i < releases.size(); ++i) {
        const auto& r = releases[i];
        if (r.release > at) break;
        if (!(r.key > current) || release_affected_by_any(r, vulns)) continue;
        if (pick == ReactivePick::First) return i;
        if (!best || r.key > releases[*best].key) best = i;
    }
    return best;
}

std::optional<Month> fix_month(const VulnRecord& vuln, const ReleaseTimeline& timeline) {
    const auto hit = affected_versions(vuln, timeline);
    if (hit.empty()) return std::nullopt;
    const auto& releases = timeline.releases;
    const VersionKey* oldest = &releases[hit.front()].key;
    for (auto i : hit) {
        if (releases[i].key < *oldest) oldest = &releases[i].key;
    }
    for (std::size_t i = 0; i < releases.size(); ++i) {
        if (releases[i].key > *oldest && !affected_by(vuln, releases[i])) return releases[i].release;
    }
    return std::nullopt;
}

std::optional<Month> fix_month(const VulnRecord& vuln, const Catalog& catalog) {
    std::optional<Month> best;
    for (const auto& t : catalog.timelines) {
        if (auto m = fix_month(vuln, t); m && (!best || *m < *best)) best = m;
    }
    return best;
}

}  // namespace patchsim
