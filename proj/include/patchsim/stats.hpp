#pragma once

#include "patchsim/catalog.hpp"
#include "patchsim/evaluator.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace patchsim {

struct BinomialCI {
    long long successes = 0;
    long long trials = 0;
    double confidence = 0.95;
    double center = 0.0;  ///< adjusted proportion p~
    double low = 0.0;
    double high = 0.0;

    /// Whole-percent bounds, rounded half away from zero.
    int low_percent() const;
    int high_percent() const;
};

/// Two-sided standard normal quantile for a confidence level in (0, 1).
double normal_quantile(double confidence);

/// Agresti-Coull interval. Throws ContractViolation unless
/// 0 <= successes <= trials, trials >= 1 and 0 < confidence < 1.
BinomialCI agresti_coull(long long successes, long long trials, double confidence = 0.95);

struct Agreement {
    Rational proportion;
    BinomialCI interval;
};

/// Share of campaigns with the same outcome under both strategies.
/// Throws ContractViolation when the two lists cover different campaigns.
Agreement pairwise_agreement(std::span<const CampaignOutcome> a, std::span<const CampaignOutcome> b,
                             double confidence = 0.95);

struct ExploitAgeSample {
    std::string cve_id;
    int age = 0;  ///< months from publication to first exploitation, may be negative
    bool censored = false;
};

struct SurvivalPoint {
    int age;
    double survival;
};

/// Right-continuous step function: `points` are the event ages with the
/// survival value reached at each one.
struct SurvivalCurve {
    std::vector<SurvivalPoint> points;

    /// S(t): survival after all events at ages <= t.
    double at(int age) const;
};

/// Product-limit estimator. Throws ContractViolation on empty input.
SurvivalCurve kaplan_meier(std::span<const ExploitAgeSample> samples);

struct ExploitAgeOptions {
    /// Emit CVEs nobody exploited as censored at the horizon.
    bool censor_unexploited = false;
    /// Keep only CVEs whose first exploitation was known-known.
    bool known_known_only = false;
    TieRule tie_rule = TieRule::AtOrAfter;
    /// Restrict to CVEs affecting these product ids ("vendor:name"); empty = all.
    std::vector<std::string> products;
};

std::vector<ExploitAgeSample> exploit_ages(const Catalog& catalog,
                                           const ExploitAgeOptions& options = {});

/// "age_months,survival" rows, starting with the value before the first event.
std::string survival_to_csv(const SurvivalCurve& curve);

}  // namespace patchsim
