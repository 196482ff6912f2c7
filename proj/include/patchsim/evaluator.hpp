#pragma once

#include "patchsim/campaign.hpp"
#include "patchsim/catalog.hpp"
#include "patchsim/strategy.hpp"

#include <boost/rational.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace patchsim {

using Rational = boost::rational<long long>;

/// Renders a proportion as a percentage with one decimal ("22.2").
std::string percent_string(const Rational& p);
double to_double(const Rational& p);

struct CampaignOutcome {
    std::size_t campaign = 0;  ///< index into Catalog::campaigns
    Month start;
    std::vector<Month> success_months;

    bool success() const noexcept { return !success_months.empty(); }
};

/// Months in which some installed version is also targeted.
/// Throws ContractViolation when the matrices do not share a shape.
std::vector<Month> successful_months(const DeploymentMatrix& deployment,
                                     const ExposureMatrix& exposure);

/// Share of campaigns active at `t` that succeed at `t`; empty when no
/// campaign is active.
std::optional<Rational> probability_at(std::span<const CampaignOutcome> outcomes, Month t);

/// Share of campaigns that succeed in at least one month.
/// Throws ContractViolation for an empty outcome list.
Rational overall_probability(std::span<const CampaignOutcome> outcomes);

/// (p / (1 - p)) / (p0 / (1 - p0)); empty when either odds is undefined or p0 == 0.
std::optional<double> odds_ratio(double p, double p0);
std::optional<double> odds_ratio(const Rational& p, const Rational& p0);

struct EvaluationReport {
    StrategyConfig config;
    std::vector<std::optional<Rational>> monthly;
    Rational overall;
    UpdateCounts updates;
    std::vector<CampaignOutcome> outcomes;
    std::optional<double> odds;
};

struct EvaluateOptions {
    StrategyConfig baseline{StrategyKind::Immediate, 0, ReactivePick::First, Scenario::UpdateFirst};
    /// Overrides the reactive pick of every config.
    std::optional<ReactivePick> reactive_pick;
};

/// Campaigns that can reach at least one tracked version, with their
/// exposure matrices (same order).
struct CampaignSet {
    std::shared_ptr<const RowSpace> rows;
    std::vector<std::size_t> campaigns;
    std::vector<ExposureMatrix> exposures;
};

CampaignSet evaluated_campaigns(const Catalog& catalog);

std::vector<CampaignOutcome> campaign_outcomes(const DeploymentMatrix& deployment,
                                               const CampaignSet& campaigns);

/// One report per (strategy, scenario) pair, strategy-major. Throws
/// ContractViolation when either list is empty or no campaign can reach a
/// tracked product.
std::vector<EvaluationReport> evaluate(const Catalog& catalog,
                                       const std::vector<StrategyConfig>& strategies,
                                       const std::vector<Scenario>& scenarios,
                                       const EvaluateOptions& options = {});

}  // namespace patchsim
