#include "patchsim/cli.hpp"

#include "csv.hpp"
#include "patchsim/campaign.hpp"
#include "patchsim/catalog.hpp"
#include "patchsim/errors.hpp"
#include "patchsim/evaluator.hpp"
#include "patchsim/report.hpp"
#include "patchsim/stats.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <iostream>

namespace patchsim::cli {

namespace {

struct RunConfig {
    std::string releases;
    std::string vulns;
    std::string campaigns;
    std::string quirks;
    std::string epoch = "2008-01";
    std::string horizon = "2020-01";
    std::string strategies =
        "immediate,planned:1,reactive:1,informed:1,planned:3,reactive:3,informed:3,"
        "planned:7,reactive:7,informed:7";
    std::string scenarios = "update-first,apt-first";
    std::string baseline = "immediate@update-first";
    std::string reactive_pick = "first";
    std::string tie_rule = "at-or-after";
    std::string out;
    std::string format = "both";
    std::string products = "all";
    bool censor_unexploited = false;
    bool kk_only = false;
    bool matrices = false;
};

void add_dataset_flags(CLI::App& cmd, RunConfig& cfg) {
    cmd.add_option("--releases", cfg.releases,
                   "Release timeline CSV (vendor,product,version,release_date)");
    cmd.add_option("--vulns", cfg.vulns,
                   "CVE JSON array of {cve, reserved, published, affected:[{vendor, product, match}]}");
    cmd.add_option("--campaigns", cfg.campaigns, "Campaign CSV (apt,date,cves,vectors)");
    cmd.add_option("--quirks", cfg.quirks, "Per-vendor version normalization JSON");
    cmd.add_option("--epoch", cfg.epoch, "First month of the observation window (YYYY-MM)")
        ->capture_default_str();
    cmd.add_option("--horizon", cfg.horizon, "Last month of the observation window (YYYY-MM)")
        ->capture_default_str();
}

void add_strategy_flags(CLI::App& cmd, RunConfig& cfg) {
    cmd.add_option("--strategies", cfg.strategies,
                   "Comma-separated name[:delay] list; names: immediate, planned, reactive, informed")
        ->capture_default_str();
    cmd.add_option("--scenarios", cfg.scenarios, "Comma-separated: update-first, apt-first")
        ->capture_default_str();
    cmd.add_option("--baseline", cfg.baseline, "Odds baseline as name[:delay][@scenario]")
        ->capture_default_str();
    cmd.add_option("--reactive-pick", cfg.reactive_pick,
                   "Reactive target: first (earliest fixing release) or latest")
        ->capture_default_str();
    cmd.add_flag("--matrices", cfg.matrices, "Also write every deployment matrix as CSV under --out");
}

void add_tie_flag(CLI::App& cmd, RunConfig& cfg) {
    cmd.add_option("--tie-rule", cfg.tie_rule,
                   "Same-month ordering for classification: at-or-after or strict")
        ->capture_default_str();
}

void add_survival_flags(CLI::App& cmd, RunConfig& cfg) {
    cmd.add_option("--products", cfg.products, "Comma-separated vendor:product ids, or all")
        ->capture_default_str();
    cmd.add_flag("--censor-unexploited", cfg.censor_unexploited,
                 "Include never-exploited CVEs as censored at the horizon");
    cmd.add_flag("--kk-only", cfg.kk_only, "Keep only CVEs first exploited after publication");
}

void add_output_flags(CLI::App& cmd, RunConfig& cfg, bool required) {
    auto* o = cmd.add_option("--out", cfg.out, "Output directory for report files and manifest.json");
    if (required) o->required();
    cmd.add_option("--format", cfg.format, "Output files: json, csv or both")->capture_default_str();
}

std::string resolve(const std::string& flag_value, const char* file, const char* flag) {
    if (!flag_value.empty()) return flag_value;
    if (const char* dir = std::getenv(kDataDirEnv); dir && *dir) {
        return (std::filesystem::path(dir) / file).string();
    }
    throw UsageError(std::string(flag) + " is required (or set " + kDataDirEnv + ")");
}

Catalog load(const RunConfig& cfg, std::ostream& err) {
    LoadOptions options;
    try {
        options.horizon = make_horizon(cfg.epoch, cfg.horizon);
    } catch (const DataError& e) {
        throw UsageError(std::string("--epoch/--horizon: ") + e.what());
    }
    if (!cfg.quirks.empty()) options.quirks = QuirkTable::load(cfg.quirks);
    const DatasetPaths paths{resolve(cfg.releases, "releases.csv", "--releases"),
                             resolve(cfg.vulns, "vulns.json", "--vulns"),
                             resolve(cfg.campaigns, "campaigns.csv", "--campaigns")};
    for (const auto& p : {paths.releases, paths.vulns, paths.campaigns}) {
        if (!std::filesystem::exists(p)) throw IoError("no such file: " + p.string());
    }
    auto catalog = load_catalog(paths, options);
    for (const auto& note : catalog.notes) err << "note: " << note << "\n";
    return catalog;
}

OutputFormat output_format(const RunConfig& cfg) {
    auto f = parse_output_format(cfg.format);
    if (!f) throw UsageError("--format must be json, csv or both");
    return *f;
}

TieRule tie_rule(const RunConfig& cfg) {
    auto r = parse_tie_rule(cfg.tie_rule);
    if (!r) throw UsageError("--tie-rule must be at-or-after or strict");
    return *r;
}

ReactivePick reactive_pick(const RunConfig& cfg) {
    if (cfg.reactive_pick == "first") return ReactivePick::First;
    if (cfg.reactive_pick == "latest") return ReactivePick::Latest;
    throw UsageError("--reactive-pick must be first or latest");
}

std::vector<EvaluationReport> run_evaluation(const Catalog& catalog, const RunConfig& cfg) {
    EvaluateOptions options;
    options.baseline = parse_baseline(cfg.baseline);
    options.reactive_pick = reactive_pick(cfg);
    return evaluate(catalog, parse_strategies(cfg.strategies), parse_scenarios(cfg.scenarios), options);
}

void add_matrices(ReportBundle& bundle, const Catalog& catalog, const RunConfig& cfg) {
    const auto pick = reactive_pick(cfg);
    for (auto s : parse_strategies(cfg.strategies)) {
        s.reactive_pick = pick;
        for (auto scenario : parse_scenarios(cfg.scenarios)) {
            s.scenario = scenario;
            const auto m = build_deployment(catalog, s);
            auto stem = s.spec() + "_" + to_string(scenario);
            std::replace(stem.begin(), stem.end(), ':', '-');
            bundle.matrices.emplace_back(std::move(stem), matrix_to_csv(catalog, *m.rows, m.cells));
        }
    }
}

SurvivalCurve run_survival(const Catalog& catalog, const RunConfig& cfg) {
    ExploitAgeOptions options;
    options.censor_unexploited = cfg.censor_unexploited;
    options.known_known_only = cfg.kk_only;
    options.tie_rule = tie_rule(cfg);
    if (cfg.products != "all") options.products = detail::split_list(cfg.products, ',');
    const auto samples = exploit_ages(catalog, options);
    if (samples.empty()) throw ContractViolation("no exploited CVE matches the survival filter");
    return kaplan_meier(samples);
}

void print_manifest(const std::vector<ManifestEntry>& manifest, const std::string& dir,
                    std::ostream& out) {
    for (const auto& m : manifest) out << m.sha256 << "  " << dir << "/" << m.file << "\n";
}

}  // namespace

std::vector<StrategyConfig> parse_strategies(std::string_view text) {
    std::vector<StrategyConfig> out;
    for (const auto& item : detail::split_list(text, ',')) {
        const auto colon = item.find(':');
        const auto name = item.substr(0, colon);
        StrategyConfig c;
        if (name == "immediate") c.kind = StrategyKind::Immediate;
        else if (name == "planned") c.kind = StrategyKind::Planned;
        else if (name == "reactive") c.kind = StrategyKind::Reactive;
        else if (name == "informed") c.kind = StrategyKind::InformedReactive;
        else throw UsageError("unknown strategy '" + name + "'");
        if (colon != std::string::npos) {
            const auto digits = item.substr(colon + 1);
            auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), c.delay_months);
            if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size() ||
                c.delay_months < 0) {
                throw UsageError("bad delay in strategy '" + item + "'");
            }
        }
        if (c.kind == StrategyKind::Immediate && c.delay_months != 0) {
            throw UsageError("immediate takes no delay (use planned:" + std::to_string(c.delay_months) + ")");
        }
        if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
    }
    if (out.empty()) throw UsageError("--strategies lists no strategy");
    return out;
}

std::vector<Scenario> parse_scenarios(std::string_view text) {
    std::vector<Scenario> out;
    for (const auto& item : detail::split_list(text, ',')) {
        Scenario s;
        if (item == "update-first") s = Scenario::UpdateFirst;
        else if (item == "apt-first") s = Scenario::AptFirst;
        else throw UsageError("unknown scenario '" + item + "'");
        if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
    }
    if (out.empty()) throw UsageError("--scenarios lists no scenario");
    return out;
}

StrategyConfig parse_baseline(std::string_view text) {
    const auto at = text.find('@');
    const auto strategies = parse_strategies(text.substr(0, at));
    if (strategies.size() != 1) throw UsageError("--baseline names exactly one strategy");
    auto c = strategies.front();
    if (at != std::string_view::npos) c.scenario = parse_scenarios(text.substr(at + 1)).front();
    return c;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Replays software release timelines against APT campaigns to compare update strategies"};
    app.name(args.empty() ? "patchsim" : std::filesystem::path(args.front()).filename().string());
    app.set_config("--config", "", "TOML/INI file with flag values; command-line flags override it");
    app.require_subcommand(1);
    app.footer(std::string("Environment: ") + kDataDirEnv +
               " names a directory holding releases.csv, vulns.json and campaigns.csv, used when "
               "--releases/--vulns/--campaigns are omitted.");

    auto* validate = app.add_subcommand("validate", "Load the dataset and check catalog integrity");
    add_dataset_flags(*validate, cfg);

    auto* evaluate_cmd = app.add_subcommand("evaluate", "Compromise probability, update counts and odds per strategy");
    add_dataset_flags(*evaluate_cmd, cfg);
    add_strategy_flags(*evaluate_cmd, cfg);
    add_output_flags(*evaluate_cmd, cfg, false);

    auto* classify = app.add_subcommand("classify", "Attack scenario labels per campaign and CVE plus Venn counts");
    add_dataset_flags(*classify, cfg);
    add_tie_flag(*classify, cfg);
    add_output_flags(*classify, cfg, false);

    auto* survival = app.add_subcommand("survival", "Kaplan-Meier curve of exploit age in months");
    add_dataset_flags(*survival, cfg);
    add_survival_flags(*survival, cfg);
    add_tie_flag(*survival, cfg);
    add_output_flags(*survival, cfg, false);

    auto* report = app.add_subcommand("report", "Write evaluate, classify and survival outputs to one directory");
    add_dataset_flags(*report, cfg);
    add_strategy_flags(*report, cfg);
    add_tie_flag(*report, cfg);
    add_survival_flags(*report, cfg);
    add_output_flags(*report, cfg, true);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        if (!reversed.empty()) reversed.pop_back();
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        const auto format = output_format(cfg);
        if (validate->parsed()) {
            Catalog catalog;
            try {
                catalog = load(cfg, err);
            } catch (const DataError& e) {
                out << "load-error: " << e.what() << "\n";
                return 1;
            }
            const auto violations = validate_catalog(catalog);
            for (const auto& v : violations) out << v.entity << ": " << v.rule << " (" << v.detail << ")\n";
            if (!violations.empty()) {
                out << violations.size() << " violation(s)\n";
                return 1;
            }
            out << "ok: " << catalog.products.size() << " products, " << catalog.vulns.size()
                << " CVEs, " << catalog.campaigns.size() << " campaigns\n";
            return 0;
        }

        const auto catalog = load(cfg, err);
        ReportBundle bundle;
        bundle.catalog = &catalog;

        if (evaluate_cmd->parsed()) {
            bundle.evaluations = run_evaluation(catalog, cfg);
            out << evaluation_table(bundle.evaluations);
            if (cfg.out.empty()) return 0;
            if (cfg.matrices) add_matrices(bundle, catalog, cfg);
        } else if (classify->parsed()) {
            bundle.classifications = classify_campaigns(catalog, tie_rule(cfg));
            if (cfg.out.empty()) {
                out << classification_csv(catalog, *bundle.classifications);
                out << venn_json(venn_counts(*bundle.classifications)).dump(2) << "\n";
                return 0;
            }
        } else if (survival->parsed()) {
            bundle.survival = run_survival(catalog, cfg);
            if (cfg.out.empty()) {
                out << survival_to_csv(*bundle.survival);
                return 0;
            }
        } else if (report->parsed()) {
            bundle.evaluations = run_evaluation(catalog, cfg);
            bundle.classifications = classify_campaigns(catalog, tie_rule(cfg));
            bundle.survival = run_survival(catalog, cfg);
            if (cfg.matrices) add_matrices(bundle, catalog, cfg);
            out << evaluation_table(bundle.evaluations);
        }
        print_manifest(emit_report(bundle, cfg.out, format), cfg.out, out);
        return 0;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << "\n";
        return 1;
    } catch (const ContractViolation& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace patchsim::cli
