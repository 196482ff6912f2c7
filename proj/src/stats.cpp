#include "patchsim/stats.hpp"

#include "patchsim/errors.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace patchsim {

int BinomialCI::low_percent() const { return static_cast<int>(std::round(low * 100.0)); }
int BinomialCI::high_percent() const { return static_cast<int>(std::round(high * 100.0)); }

double normal_quantile(double confidence) {
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw ContractViolation("confidence level must lie in (0, 1)");
    }
    return boost::math::quantile(boost::math::normal(), 0.5 + confidence / 2.0);
}

BinomialCI agresti_coull(long long successes, long long trials, double confidence) {
    if (trials < 1 || successes < 0 || successes > trials) {
        throw ContractViolation("agresti_coull needs 0 <= successes <= trials and trials >= 1");
    }
    const double z = normal_quantile(confidence);
    const double z2 = z * z;
    const double n = static_cast<double>(trials) + z2;
    const double p = (static_cast<double>(successes) + z2 / 2.0) / n;
    const double half = z * std::sqrt(p * (1.0 - p) / n);
    return {successes, trials, confidence, p, std::max(0.0, p - half), std::min(1.0, p + half)};
}

Agreement pairwise_agreement(std::span<const CampaignOutcome> a, std::span<const CampaignOutcome> b,
                             double confidence) {
    if (a.size() != b.size() || a.empty()) {
        throw ContractViolation("pairwise agreement needs two equally sized, non-empty outcome lists");
    }
    std::map<std::size_t, bool> left;
    for (const auto& o : a) left[o.campaign] = o.success();
    if (left.size() != a.size()) throw ContractViolation("duplicate campaign in outcome list");
    long long same = 0;
    for (const auto& o : b) {
        auto it = left.find(o.campaign);
        if (it == left.end()) throw ContractViolation("outcome lists cover different campaigns");
        same += it->second == o.success() ? 1 : 0;
        left.erase(it);
    }
    const auto n = static_cast<long long>(a.size());
    return {Rational(same, n), agresti_coull(same, n, confidence)};
}

double SurvivalCurve::at(int age) const {
    double s = 1.0;
    for (const auto& p : points) {
        if (p.age > age) break;
        s = p.survival;
    }
    return s;
}

SurvivalCurve kaplan_meier(std::span<const ExploitAgeSample> samples) {
    if (samples.empty()) throw ContractViolation("kaplan_meier needs at least one sample");
    // per age: (events, censored)
    std::map<int, std::pair<long long, long long>> by_age;
    for (const auto& s : samples) {
        auto& slot = by_age[s.age];
        (s.censored ? slot.second : slot.first) += 1;
    }
    SurvivalCurve curve;
    auto at_risk = static_cast<long long>(samples.size());
    double s = 1.0;
    for (const auto& [age, counts] : by_age) {
        const auto [events, censored] = counts;
        if (events > 0) {
            // events at an age precede censoring at the same age
            s *= 1.0 - static_cast<double>(events) / static_cast<double>(at_risk);
            if (at_risk == events) s = 0.0;
            curve.points.push_back({age, s});
        }
        at_risk -= events + censored;
    }
    return curve;
}

std::vector<ExploitAgeSample> exploit_ages(const Catalog& catalog, const ExploitAgeOptions& options) {
    std::map<std::string, Month> first_seen;
    for (const auto& c : catalog.campaigns) {
        for (const auto& cve : c.cve_ids) {
            auto [it, inserted] = first_seen.emplace(cve, c.start);
            if (!inserted && c.start < it->second) it->second = c.start;
        }
    }

    auto wanted = [&](const VulnRecord& v) {
        if (options.products.empty()) return true;
        return std::any_of(v.affected.begin(), v.affected.end(), [&](const AffectedProduct& a) {
            const auto id = a.vendor + ":" + a.product;
            return std::find(options.products.begin(), options.products.end(), id) !=
                   options.products.end();
        });
    };

    std::vector<ExploitAgeSample> out;
    for (const auto& v : catalog.vulns) {
        if (!wanted(v)) continue;
        auto it = first_seen.find(v.cve_id);
        if (it == first_seen.end()) {
            if (options.censor_unexploited && !options.known_known_only) {
                out.push_back({v.cve_id, catalog.horizon.end_index - v.published.index, true});
            }
            continue;
        }
        if (options.known_known_only &&
            knowledge_at(v.reserved, v.published, it->second, options.tie_rule) != Knowledge::KK) {
            continue;
        }
        out.push_back({v.cve_id, it->second.index - v.published.index, false});
    }
    return out;
}

std::string survival_to_csv(const SurvivalCurve& curve) {
    std::string out = "age_months,survival\n";
    char buf[64];
    if (!curve.points.empty()) {
        std::snprintf(buf, sizeof buf, "%d,%.6f\n", curve.points.front().age - 1, 1.0);
        out += buf;
    }
    for (const auto& p : curve.points) {
        std::snprintf(buf, sizeof buf, "%d,%.6f\n", p.age, p.survival);
        out += buf;
    }
    return out;
}

}  // namespace patchsim
