#pragma once

// Brute-force reference model. Works from raw version strings and direct
// month walks; shares no code with the matrix pipeline beyond the comparator.

#include "patchsim/catalog.hpp"
#include "patchsim/evaluator.hpp"
#include "patchsim/strategy.hpp"

#include <optional>
#include <set>
#include <vector>

namespace patchsim::testing {

inline bool oracle_satisfies(const VersionConstraint& c, const std::string& version) {
    if (c.kind == VersionConstraint::Kind::Exact) return compare_versions(version, c.exact.version) == 0;
    if (c.start) {
        const auto cmp = compare_versions(version, c.start->version);
        if (c.start->inclusive ? cmp < 0 : cmp <= 0) return false;
    }
    if (c.end) {
        const auto cmp = compare_versions(version, c.end->version);
        if (c.end->inclusive ? cmp > 0 : cmp >= 0) return false;
    }
    return true;
}

inline bool oracle_affected(const VulnRecord& v, std::size_t product, const std::string& version) {
    for (const auto& a : v.affected) {
        if (a.product_index == product && oracle_satisfies(a.match, version)) return true;
    }
    return false;
}

class Oracle {
public:
    explicit Oracle(const Catalog& cat) : cat_(cat) {}

    std::size_t initial(std::size_t p) const {
        const auto& rel = cat_.timelines[p].releases;
        std::optional<std::size_t> any, vulnerable;
        for (std::size_t i = 0; i < rel.size(); ++i) {
            if (rel[i].release.index > 0) continue;
            if (!any || compare_versions(rel[i].version, rel[*any].version) < 0) any = i;
            bool hit = false;
            for (const auto& c : cat_.campaigns) {
                for (const auto& id : c.cve_ids) {
                    if (const auto* v = cat_.find_vuln(id); v && oracle_affected(*v, p, rel[i].version)) hit = true;
                }
            }
            if (hit && (!vulnerable || compare_versions(rel[i].version, rel[*vulnerable].version) < 0)) vulnerable = i;
        }
        return vulnerable ? *vulnerable : any.value();
    }

    std::size_t immediate(std::size_t p, int t) const {
        const auto& rel = cat_.timelines[p].releases;
        std::size_t cur = initial(p);
        for (int s = 1; s <= t; ++s) {
            std::optional<std::size_t> best;
            for (std::size_t i = 0; i < rel.size(); ++i) {
                if (rel[i].release.index != s || compare_versions(rel[i].version, rel[cur].version) <= 0) continue;
                if (!best || compare_versions(rel[i].version, rel[*best].version) > 0) best = i;
            }
            if (best) cur = *best;
        }
        return cur;
    }

    std::size_t planned(std::size_t p, int t, int delay) const {
        return t - delay >= 0 ? immediate(p, t - delay) : initial(p);
    }

    std::vector<std::size_t> reactive(std::size_t p, int delay, bool informed, ReactivePick pick) const {
        const auto& rel = cat_.timelines[p].releases;
        const int H = cat_.horizon.end_index;
        auto known = [&](int t, std::size_t cur) {
            std::vector<const VulnRecord*> out;
            for (const auto& v : cat_.vulns) {
                const int trig = std::max(0, informed ? v.reserved.index : v.published.index);
                if (trig <= t && oracle_affected(v, p, rel[cur].version)) out.push_back(&v);
            }
            return out;
        };
        auto choose = [&](const std::vector<const VulnRecord*>& cves, int t, std::size_t cur) {
            std::optional<std::size_t> best;
            for (std::size_t i = 0; i < rel.size(); ++i) {
                if (rel[i].release.index > t || compare_versions(rel[i].version, rel[cur].version) <= 0) continue;
                bool clean = true;
                for (const auto* v : cves) clean = clean && !oracle_affected(*v, p, rel[i].version);
                if (!clean) continue;
                if (!best) best = i;
                else if (pick == ReactivePick::First
                             ? (rel[i].release < rel[*best].release ||
                                (rel[i].release == rel[*best].release && compare_versions(rel[i].version, rel[*best].version) < 0))
                             : compare_versions(rel[i].version, rel[*best].version) > 0)
                    best = i;
            }
            return best;
        };

        std::vector<std::size_t> seq;
        std::size_t cur = initial(p);
        std::optional<int> land;
        std::vector<const VulnRecord*> cause;
        for (int t = 0; t <= H; ++t) {
            if (land && *land == t) {
                auto c = choose(known(t, cur), t, cur);
                if (!c) c = choose(cause, t, cur);
                if (c) cur = *c;
                land.reset();
            }
            for (int guard = 0; !land && guard <= static_cast<int>(rel.size()); ++guard) {
                auto k = known(t, cur);
                if (k.empty() || !choose(k, t, cur)) break;
                if (delay > 0) {
                    if (t + delay <= H) {
                        land = t + delay;
                        cause = k;
                    }
                    break;
                }
                auto c = choose(k, t, cur);
                cur = *c;
            }
            seq.push_back(cur);
        }
        return seq;
    }

    /// Installed release per product per month (update-first).
    std::vector<std::vector<std::size_t>> installed(const StrategyConfig& s) const {
        std::vector<std::vector<std::size_t>> out;
        for (std::size_t p = 0; p < cat_.timelines.size(); ++p) {
            if (s.kind == StrategyKind::Reactive || s.kind == StrategyKind::InformedReactive) {
                out.push_back(reactive(p, s.delay_months, s.kind == StrategyKind::InformedReactive, s.reactive_pick));
                continue;
            }
            std::vector<std::size_t> seq;
            for (int t = 0; t <= cat_.horizon.end_index; ++t) seq.push_back(planned(p, t, s.delay_months));
            out.push_back(std::move(seq));
        }
        return out;
    }

    /// Overall probability by walking months campaign by campaign.
    std::optional<Rational> overall(const StrategyConfig& s) const {
        const auto plan = installed(s);
        long long campaigns = 0;
        long long successes = 0;
        for (const auto& c : cat_.campaigns) {
            auto targeted = [&](std::size_t p, std::size_t r) {
                for (const auto& id : c.cve_ids) {
                    const auto* v = cat_.find_vuln(id);
                    if (v && oracle_affected(*v, p, cat_.timelines[p].releases[r].version)) return true;
                }
                return false;
            };
            bool reachable = false;
            for (std::size_t p = 0; p < cat_.timelines.size(); ++p) {
                for (std::size_t r = 0; r < cat_.timelines[p].releases.size(); ++r) reachable = reachable || targeted(p, r);
            }
            if (!reachable) continue;
            ++campaigns;
            bool hit = false;
            for (int t = c.start.index; t <= cat_.horizon.end_index && !hit; ++t) {
                for (std::size_t p = 0; p < plan.size() && !hit; ++p) {
                    std::set<std::size_t> present{plan[p][static_cast<std::size_t>(t)]};
                    if (s.scenario == Scenario::AptFirst && t > 0) present.insert(plan[p][static_cast<std::size_t>(t - 1)]);
                    for (auto r : present) hit = hit || targeted(p, r);
                }
            }
            successes += hit ? 1 : 0;
        }
        if (campaigns == 0) return std::nullopt;
        return Rational(successes, campaigns);
    }

private:
    const Catalog& cat_;
};

}  // namespace patchsim::testing
