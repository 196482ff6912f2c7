// Acceptance suite: one PASS/FAIL/SKIP line per criterion, non-zero exit on
// any failure. Set PATCHSIM_FULL_DATASET to a directory holding releases.csv,
// vulns.json and campaigns.csv (optionally quirks.json) to run the full-data
// reproduction check.

#include "patchsim/campaign.hpp"
#include "patchsim/catalog.hpp"
#include "patchsim/evaluator.hpp"
#include "patchsim/stats.hpp"
#include "patchsim/strategy.hpp"
#include "support/oracle.hpp"
#include "support/random_catalog.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace patchsim;
using namespace patchsim::testing;

namespace {

struct Verdict {
    enum { Pass, Fail, Skip } state;
    std::string detail;
};

Verdict pass(std::string d) { return {Verdict::Pass, std::move(d)}; }
Verdict fail(std::string d) { return {Verdict::Fail, std::move(d)}; }

// Reference strategy results: probabilities (percent), odds against the first
// entry, and the campaign counts out of 72 behind each probability.
constexpr double kPercent[] = {22.2, 58.3, 63.9, 61.1, 66.7, 72.2, 75.0, 73.6, 76.4, 86.1, 87.5, 84.7};
constexpr double kOdds[] = {1, 4.9, 6.2, 5.5, 7.0, 9.1, 10.5, 9.8, 11.3, 21.7, 24.5, 19.4};
constexpr long long kCounts[] = {16, 42, 46, 44, 48, 52, 54, 53, 55, 62, 63, 61};
constexpr long long kCampaigns = 72;

std::string fmt(const char* format, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c);
    return buf;
}

Verdict odds_reproduction() {
    double worst = 0;
    for (std::size_t i = 0; i < std::size(kPercent); ++i) {
        const auto odds = odds_ratio(kPercent[i] / 100.0, kPercent[0] / 100.0);
        if (!odds) return fail("odds undefined for " + fmt("%.1f%%", kPercent[i]));
        const double shown = std::round(*odds * 10.0) / 10.0;
        worst = std::max(worst, std::abs(shown - kOdds[i]));
        if (std::abs(shown - kOdds[i]) > 0.05 + 1e-9) {
            return fail(fmt("%.1f%% gives %.1fx, table says %.1fx", kPercent[i], shown, kOdds[i]));
        }
    }
    return pass(fmt("12/12 odds within 0.05 (max deviation %.2f)", worst));
}

Verdict agresti_coull_reproduction() {
    struct Case { long long k, n; int low, high; };
    std::ostringstream d;
    d.setf(std::ios::fixed);
    d.precision(2);
    bool ok = true;
    for (const auto& c : {Case{46, 72, 52, 74}, Case{48, 72, 55, 77}}) {
        const auto ci = agresti_coull(c.k, c.n, 0.95);
        // the stated tolerance applies to the unrounded bounds
        ok = ok && std::abs(ci.low * 100 - c.low) <= 1.0 && std::abs(ci.high * 100 - c.high) <= 1.0;
        d << "(" << c.k << "/" << c.n << ") -> [" << ci.low * 100 << "%, " << ci.high * 100 << "%] rounds to ["
          << ci.low_percent() << "%, " << ci.high_percent() << "%] vs quoted [" << c.low << "%, " << c.high
          << "%]; ";
    }
    return ok ? pass(d.str() + "all bounds within 1pp") : fail(d.str());
}

Verdict rational_reconstruction() {
    for (std::size_t i = 0; i < std::size(kPercent); ++i) {
        // independent search over every k/72
        long long found = -1;
        for (long long k = 0; k <= kCampaigns; ++k) {
            if (std::abs(100.0 * static_cast<double>(k) / kCampaigns - kPercent[i]) <= 0.05) found = k;
        }
        if (found != kCounts[i]) return fail(fmt("%.1f%% reconstructs to k=%.0f", kPercent[i], static_cast<double>(found)));
        if (percent_string(Rational(found, kCampaigns)) != fmt("%.1f", kPercent[i])) {
            return fail("renderer disagrees for k=" + std::to_string(found));
        }
    }
    return pass("all 12 percentages are k/72 and render identically from exact rationals");
}

std::vector<StrategyConfig> all_strategies() {
    std::vector<StrategyConfig> out{{StrategyKind::Immediate, 0}};
    for (int d : {1, 3, 7}) {
        out.push_back({StrategyKind::Planned, d});
        for (auto pick : {ReactivePick::First, ReactivePick::Latest}) {
            out.push_back({StrategyKind::Reactive, d, pick});
            out.push_back({StrategyKind::InformedReactive, d, pick});
        }
    }
    return out;
}

/// Random catalogs in which at least one campaign reaches a tracked version.
std::vector<Catalog> reachable_catalogs(std::uint64_t seed, std::size_t count, const RandomCatalogShape& shape) {
    std::mt19937_64 rng(seed);
    std::vector<Catalog> out;
    while (out.size() < count) {
        auto cat = random_catalog(rng, shape);
        if (!evaluated_campaigns(cat).campaigns.empty()) out.push_back(std::move(cat));
    }
    return out;
}

Verdict oracle_equivalence() {
    const auto start = std::chrono::steady_clock::now();
    const auto catalogs = reachable_catalogs(20240601, 200, RandomCatalogShape{});
    const auto strategies = all_strategies();
    std::size_t comparisons = 0;
    for (std::size_t i = 0; i < catalogs.size(); ++i) {
        const auto& cat = catalogs[i];
        const Oracle oracle(cat);
        for (const auto& r : evaluate(cat, strategies, {Scenario::UpdateFirst, Scenario::AptFirst})) {
            const auto expected = oracle.overall(r.config);
            if (!expected || *expected != r.overall) {
                std::ostringstream d;
                d << "catalog " << i << " " << r.config.spec() << "/" << to_string(r.config.scenario) << ": "
                  << r.overall << " vs oracle " << (expected ? *expected : Rational(-1));
                return fail(d.str());
            }
            ++comparisons;
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs >= 60.0) return fail(fmt("exact agreement but took %.1f s", secs));
    return pass(fmt("200 catalogs, %.0f exact comparisons in %.2f s", static_cast<double>(comparisons), secs));
}

Verdict pessimistic_dominance() {
    const auto catalogs = reachable_catalogs(77, 250, RandomCatalogShape{});
    std::size_t checks = 0;
    for (std::size_t i = 0; i < catalogs.size(); ++i) {
        const auto& cat = catalogs[i];
        for (const auto& s : all_strategies()) {
            auto uf_cfg = s;
            auto af_cfg = s;
            af_cfg.scenario = Scenario::AptFirst;
            const auto uf = build_deployment(cat, uf_cfg);
            const auto af = build_deployment(cat, af_cfg);
            if (!uf.cells.is_subset_of(af.cells)) return fail("cell set not a superset, catalog " + std::to_string(i));
            const auto set = evaluated_campaigns(cat);
            const auto p_uf = overall_probability(campaign_outcomes(uf, set));
            const auto p_af = overall_probability(campaign_outcomes(af, set));
            if (p_af < p_uf) return fail("apt-first below update-first, catalog " + std::to_string(i) + " " + s.spec());
            ++checks;
        }
    }
    return pass(fmt("%.0f catalog/strategy pairs: superset cells and P(apt-first) >= P(update-first)",
                    static_cast<double>(checks)));
}

Verdict planned_monotonicity() {
    std::mt19937_64 rng(4242);
    RandomCatalogShape shape;
    shape.horizon_end = 47;  // long enough for shifted deployments to fall off the end
    std::size_t strict_drops = 0;
    for (int i = 0; i < 300; ++i) {
        const auto cat = random_catalog(rng, shape);
        if (!(build_planned(cat, 0).cells == build_immediate(cat).cells)) {
            return fail("planned(0) differs from immediate, catalog " + std::to_string(i));
        }
        std::size_t previous = count_updates(build_immediate(cat)).raw;
        for (int delay = 1; delay <= 24; ++delay) {
            const auto raw = count_updates(build_planned(cat, delay)).raw;
            if (raw > previous) return fail("raw updates rose at delay " + std::to_string(delay));
            strict_drops += raw < previous ? 1 : 0;
            previous = raw;
        }
    }
    return pass(fmt("300 catalogs, delays 0..24, %.0f strict decreases, planned(0) == immediate",
                    static_cast<double>(strict_drops)));
}

Verdict survival_oracle() {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<ExploitAgeSample> s;
        const int n = std::uniform_int_distribution<int>(1, 60)(rng);
        for (int i = 0; i < n; ++i) s.push_back({"", std::uniform_int_distribution<int>(-36, 96)(rng), false});
        const auto curve = kaplan_meier(s);
        double previous = 1.0;
        if (curve.at(-37) != 1.0) return fail("curve does not start at 1");
        for (int age = -37; age <= 97; ++age) {
            long long survivors = 0;
            for (const auto& x : s) survivors += x.age > age ? 1 : 0;
            const double empirical = static_cast<double>(survivors) / n;
            if (std::abs(curve.at(age) - empirical) > 1e-12) {
                return fail(fmt("trial %.0f age %.0f: %.6f", trial, age, curve.at(age)));
            }
            if (curve.at(age) > previous) return fail("curve increases");
            previous = curve.at(age);
        }
    }
    return pass("500 random uncensored samples match the empirical survival function");
}

Verdict classifier_totality() {
    // Definitions restated directly from the knowledge/fix grid.
    std::size_t cases = 0;
    for (auto rule : {TieRule::AtOrAfter, TieRule::Strict}) {
        auto at_or_after = [&](int a, int b) { return rule == TieRule::AtOrAfter ? a >= b : a > b; };
        for (int ve = 0; ve < 4; ++ve) for (int vr = 0; vr < 4; ++vr) for (int vp = vr; vp < 4; ++vp) {
            for (int fix = -1; fix < 4; ++fix) {
                const bool kk = at_or_after(ve, vp);
                const bool ku = !kk && at_or_after(ve, vr);
                const bool uu = !kk && !ku;
                const bool prevented = fix >= 0 && at_or_after(ve, fix);
                const bool member[6] = {uu && !prevented, uu && prevented, ku && !prevented,
                                        ku && prevented,  kk && !prevented, kk && prevented};
                const int hits = static_cast<int>(std::count(std::begin(member), std::end(member), true));
                const VulnRecord v{"CVE", Month{vr}, Month{vp}, {}};
                const auto got = classify_attack(v, Month{ve},
                                                 fix < 0 ? std::nullopt : std::optional<Month>(Month{fix}), rule);
                if (hits != 1 || !member[static_cast<int>(got)]) {
                    return fail(fmt("ve=%.0f vr=%.0f vp=%.0f", ve, vr, vp) + " fix=" + std::to_string(fix));
                }
                ++cases;
            }
        }
    }
    return pass(fmt("%.0f cases (both tie rules, fix present or absent) map to exactly one class",
                    static_cast<double>(cases)));
}

Verdict full_dataset() {
    const char* dir = std::getenv("PATCHSIM_FULL_DATASET");
    if (!dir || !*dir) return {Verdict::Skip, "PATCHSIM_FULL_DATASET not set; needs the converted campaign dataset"};
    const std::filesystem::path root(dir);
    LoadOptions options;
    if (std::filesystem::exists(root / "quirks.json")) options.quirks = QuirkTable::load((root / "quirks.json").string());
    const auto cat = load_catalog(DatasetPaths::in_directory(root), options);

    struct Row { StrategyConfig s; std::size_t updates; double uf, af; };
    const std::vector<Row> table{
        {{StrategyKind::Immediate, 0}, 360, 22.2, 58.3},
        {{StrategyKind::Planned, 1}, 357, 58.3, 63.9},
        {{StrategyKind::Reactive, 1}, 44, 61.1, 66.7},
        {{StrategyKind::InformedReactive, 1}, 44, 58.3, 66.7},
        {{StrategyKind::Planned, 3}, 350, 72.2, 75.0},
        {{StrategyKind::Reactive, 3}, 44, 73.6, 76.4},
        {{StrategyKind::InformedReactive, 3}, 44, 73.6, 76.4},
        {{StrategyKind::Planned, 7}, 337, 86.1, 87.5},
        {{StrategyKind::Reactive, 7}, 44, 84.7, 86.1},
        {{StrategyKind::InformedReactive, 7}, 44, 84.7, 86.1},
    };
    std::vector<StrategyConfig> strategies;
    for (const auto& r : table) strategies.push_back(r.s);
    const auto reports = evaluate(cat, strategies, {Scenario::UpdateFirst, Scenario::AptFirst});
    std::ostringstream misses;
    if (reports.front().outcomes.size() != static_cast<std::size_t>(kCampaigns)) {
        misses << "campaigns " << reports.front().outcomes.size() << " != 72; ";
    }
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto& uf = reports[2 * i];
        const auto& af = reports[2 * i + 1];
        if (uf.updates.raw != table[i].updates) misses << uf.config.spec() << " updates " << uf.updates.raw << "; ";
        if (std::abs(to_double(uf.overall) * 100 - table[i].uf) > 1.4) {
            misses << uf.config.spec() << " update-first " << percent_string(uf.overall) << "%; ";
        }
        if (std::abs(to_double(af.overall) * 100 - table[i].af) > 1.4) {
            misses << af.config.spec() << " apt-first " << percent_string(af.overall) << "%; ";
        }
    }
    return misses.str().empty() ? pass("10 strategies within 1.4pp, counts exact") : fail(misses.str());
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
        {"1 odds-ratio reproduction", odds_reproduction},
        {"2 Agresti-Coull reproduction", agresti_coull_reproduction},
        {"3 probability-count consistency", rational_reconstruction},
        {"4 oracle equivalence", oracle_equivalence},
        {"5 pessimistic dominance", pessimistic_dominance},
        {"6 planned monotonicity", planned_monotonicity},
        {"7 survival oracle", survival_oracle},
        {"8 scenario classifier totality", classifier_totality},
        {"9 full-dataset reproduction", full_dataset},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v = fail(std::string("exception: ") + e.what());
        }
        const char* tag = v.state == Verdict::Pass ? "PASS" : v.state == Verdict::Fail ? "FAIL" : "SKIP";
        failures += v.state == Verdict::Fail ? 1 : 0;
        std::cout << tag << "  [" << name << "] " << v.detail << "\n";
    }
    return failures == 0 ? 0 : 1;
}
