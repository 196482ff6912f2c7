#include "patchsim/evaluator.hpp"

#include "patchsim/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <future>

namespace patchsim {

double to_double(const Rational& p) {
    return static_cast<double>(p.numerator()) / static_cast<double>(p.denominator());
}

std::string percent_string(const Rational& p) {
    // exact half-up rounding on tenths of a percent
    const long long num = p.numerator() * 1000;
    const long long den = p.denominator();
    const long long tenths = (2 * num + den) / (2 * den);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld.%lld", tenths / 10, tenths % 10);
    return buf;
}

std::vector<Month> successful_months(const DeploymentMatrix& deployment,
                                     const ExposureMatrix& exposure) {
    if (!deployment.cells.same_shape(exposure.cells) ||
        (deployment.rows && exposure.rows && !(*deployment.rows == *exposure.rows))) {
        throw ContractViolation("deployment and exposure matrices differ in shape");
    }
    const auto hit = deployment.cells & exposure.cells;
    std::vector<Month> months;
    for (std::size_t t = 0; t < hit.cols(); ++t) {
        if (hit.column_any(t)) months.push_back(Month{static_cast<int>(t)});
    }
    return months;
}

std::optional<Rational> probability_at(std::span<const CampaignOutcome> outcomes, Month t) {
    long long active = 0;
    long long succeeded = 0;
    for (const auto& o : outcomes) {
        if (o.start > t) continue;
        ++active;
        if (std::binary_search(o.success_months.begin(), o.success_months.end(), t)) ++succeeded;
    }
    if (active == 0) return std::nullopt;
    return Rational(succeeded, active);
}

Rational overall_probability(std::span<const CampaignOutcome> outcomes) {
    if (outcomes.empty()) throw ContractViolation("overall probability of an empty campaign set");
    const auto succeeded = std::count_if(outcomes.begin(), outcomes.end(),
                                         [](const CampaignOutcome& o) { return o.success(); });
    return Rational(static_cast<long long>(succeeded), static_cast<long long>(outcomes.size()));
}

std::optional<double> odds_ratio(double p, double p0) {
    if (p < 0.0 || p >= 1.0 || p0 <= 0.0 || p0 >= 1.0) return std::nullopt;
    return (p / (1.0 - p)) / (p0 / (1.0 - p0));
}

std::optional<double> odds_ratio(const Rational& p, const Rational& p0) {
    if (p == p0 && p0 > 0 && p0 < 1) return 1.0;
    return odds_ratio(to_double(p), to_double(p0));
}

CampaignSet evaluated_campaigns(const Catalog& catalog) {
    CampaignSet set{std::make_shared<const RowSpace>(catalog), {}, {}};
    for (std::size_t i = 0; i < catalog.campaigns.size(); ++i) {
        const auto& c = catalog.campaigns[i];
        if (!c.exploits_vulnerabilities()) continue;
        auto exposure = build_campaign_matrix(c, catalog, set.rows);
        if (exposure.empty()) continue;
        set.campaigns.push_back(i);
        set.exposures.push_back(std::move(exposure));
    }
    return set;
}

std::vector<CampaignOutcome> campaign_outcomes(const DeploymentMatrix& deployment,
                                               const CampaignSet& campaigns) {
    std::vector<CampaignOutcome> out;
    out.reserve(campaigns.campaigns.size());
    for (std::size_t k = 0; k < campaigns.campaigns.size(); ++k) {
        out.push_back({campaigns.campaigns[k], campaigns.exposures[k].start,
                       successful_months(deployment, campaigns.exposures[k])});
    }
    return out;
}

namespace {

EvaluationReport run_one(const Catalog& catalog, const CampaignSet& campaigns,
                         const StrategyConfig& config) {
    EvaluationReport report;
    report.config = config;
    const auto deployment = build_deployment(catalog, config);
    report.updates = count_updates(deployment);
    report.outcomes = campaign_outcomes(deployment, campaigns);
    report.overall = overall_probability(report.outcomes);
    report.monthly.reserve(static_cast<std::size_t>(catalog.horizon.columns()));
    for (int t = 0; t < catalog.horizon.columns(); ++t) {
        report.monthly.push_back(probability_at(report.outcomes, Month{t}));
    }
    return report;
}

}  // namespace

std::vector<EvaluationReport> evaluate(const Catalog& catalog,
                                       const std::vector<StrategyConfig>& strategies,
                                       const std::vector<Scenario>& scenarios,
                                       const EvaluateOptions& options) {
    if (strategies.empty()) throw ContractViolation("evaluate needs at least one strategy");
    if (scenarios.empty()) throw ContractViolation("evaluate needs at least one scenario");
    const auto campaigns = evaluated_campaigns(catalog);
    if (campaigns.campaigns.empty()) {
        throw ContractViolation("no campaign reaches a tracked product version");
    }
    // surface configuration errors (missing epoch release) before fanning out
    (void)initial_versions(catalog);

    std::vector<StrategyConfig> configs;
    for (auto s : strategies) {
        if (options.reactive_pick) s.reactive_pick = *options.reactive_pick;
        for (auto scenario : scenarios) {
            s.scenario = scenario;
            s.check();
            configs.push_back(s);
        }
    }
    auto baseline = options.baseline;
    if (options.reactive_pick) baseline.reactive_pick = *options.reactive_pick;

    std::vector<std::future<EvaluationReport>> jobs;
    jobs.reserve(configs.size());
    for (const auto& c : configs) {
        jobs.push_back(std::async(std::launch::async,
                                  [&catalog, &campaigns, c] { return run_one(catalog, campaigns, c); }));
    }
    std::vector<EvaluationReport> reports;
    reports.reserve(jobs.size());
    for (auto& j : jobs) reports.push_back(j.get());

    Rational base;
    auto it = std::find_if(reports.begin(), reports.end(),
                           [&](const EvaluationReport& r) { return r.config == baseline; });
    if (it != reports.end()) {
        base = it->overall;
    } else {
        base = run_one(catalog, campaigns, baseline).overall;
    }
    for (auto& r : reports) r.odds = odds_ratio(r.overall, base);
    return reports;
}

}  // namespace patchsim
