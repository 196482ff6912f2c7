#include "patchsim/report.hpp"

#include "csv.hpp"
#include "patchsim/errors.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace patchsim {

namespace {

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string interval_label(const StrategyConfig& c) {
    if (c.kind == StrategyKind::Immediate) return "/";
    return std::to_string(c.delay_months) + (c.delay_months == 1 ? " month" : " months");
}

std::string strategy_label(StrategyKind k) {
    switch (k) {
        case StrategyKind::Immediate: return "Immediate";
        case StrategyKind::Planned: return "Planned";
        case StrategyKind::Reactive: return "Reactive";
        case StrategyKind::InformedReactive: return "Informed Reactive";
    }
    return "?";
}

std::string odds_text(const std::optional<double>& odds) {
    return odds ? fixed(*odds, 1) + "x" : "n/a";
}

long long successes(const EvaluationReport& r) {
    return std::count_if(r.outcomes.begin(), r.outcomes.end(),
                         [](const CampaignOutcome& o) { return o.success(); });
}

}  // namespace

std::optional<OutputFormat> parse_output_format(std::string_view text) {
    if (text == "json") return OutputFormat::Json;
    if (text == "csv") return OutputFormat::Csv;
    if (text == "both") return OutputFormat::Both;
    return std::nullopt;
}

nlohmann::json report_to_json(const Catalog& catalog, const EvaluationReport& r) {
    const auto ci = agresti_coull(successes(r), static_cast<long long>(r.outcomes.size()));
    auto outcomes = nlohmann::json::array();
    for (const auto& o : r.outcomes) {
        auto months = nlohmann::json::array();
        for (auto m : o.success_months) months.push_back(format_month(m, catalog.horizon));
        outcomes.push_back({{"campaign", catalog.campaign_label(o.campaign)},
                            {"success", o.success()},
                            {"success_months", std::move(months)}});
    }
    nlohmann::json j = {
        {"strategy", to_string(r.config.kind)},
        {"delay", r.config.delay_months},
        {"scenario", to_string(r.config.scenario)},
        {"reactive_pick", r.config.reactive_pick == ReactivePick::First ? "first" : "latest"},
        {"probability",
         {{"numerator", r.overall.numerator()},
          {"denominator", r.overall.denominator()},
          {"successful_campaigns", successes(r)},
          {"campaigns", r.outcomes.size()},
          {"percent", percent_string(r.overall)},
          {"ci95", {{"low", ci.low}, {"high", ci.high}}}}},
        {"updates", {{"raw", r.updates.raw}, {"net", r.updates.net}}},
        {"odds", r.odds ? nlohmann::json(*r.odds) : nlohmann::json(nullptr)},
        {"outcomes", std::move(outcomes)},
    };
    return j;
}

std::string evaluation_csv(const std::vector<EvaluationReport>& reports) {
    std::ostringstream out;
    out << "interval,strategy,scenario,updates_raw,updates_net,successful,campaigns,"
           "probability_pct,odds,ci_low_pct,ci_high_pct\n";
    for (const auto& r : reports) {
        const auto n = static_cast<long long>(r.outcomes.size());
        const auto ci = agresti_coull(successes(r), n);
        out << interval_label(r.config) << ',' << r.config.spec() << ',' << to_string(r.config.scenario)
            << ',' << r.updates.raw << ',' << r.updates.net << ',' << successes(r) << ',' << n << ','
            << percent_string(r.overall) << ',' << (r.odds ? fixed(*r.odds, 1) : "") << ','
            << ci.low_percent() << ',' << ci.high_percent() << '\n';
    }
    return out.str();
}

std::string monthly_csv(const Catalog& catalog, const std::vector<EvaluationReport>& reports) {
    std::ostringstream out;
    out << "month";
    for (const auto& r : reports) out << ',' << r.config.spec() << '@' << to_string(r.config.scenario);
    out << '\n';
    for (int t = 0; t < catalog.horizon.columns(); ++t) {
        out << format_month(t, catalog.horizon);
        for (const auto& r : reports) {
            out << ',';
            if (const auto& p = r.monthly.at(static_cast<std::size_t>(t))) out << fixed(to_double(*p), 6);
        }
        out << '\n';
    }
    return out.str();
}

std::string evaluation_table(const std::vector<EvaluationReport>& reports) {
    struct Row {
        const EvaluationReport* uf = nullptr;
        const EvaluationReport* af = nullptr;
    };
    std::vector<std::pair<StrategyConfig, Row>> rows;
    for (const auto& r : reports) {
        auto key = r.config;
        key.scenario = Scenario::UpdateFirst;
        auto it = std::find_if(rows.begin(), rows.end(), [&](const auto& p) { return p.first == key; });
        if (it == rows.end()) {
            rows.push_back({key, {}});
            it = std::prev(rows.end());
        }
        (r.config.scenario == Scenario::UpdateFirst ? it->second.uf : it->second.af) = &r;
    }

    auto both = [](const Row& row, auto&& render) {
        std::string out;
        if (row.uf) out += render(*row.uf);
        if (row.uf && row.af) out += "-";
        if (row.af) out += render(*row.af);
        return out;
    };

    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-10s %-18s %9s %-14s %s\n", "Interval", "Strategy", "#Updates",
                  "Prob.", "Odds");
    out << line << "  (probability and odds as update-first - apt-first)\n";
    for (const auto& [config, row] : rows) {
        const auto* any = row.uf ? row.uf : row.af;
        const auto prob = both(row, [](const EvaluationReport& r) { return percent_string(r.overall); }) + "%";
        const auto odds = both(row, [](const EvaluationReport& r) { return odds_text(r.odds); });
        std::snprintf(line, sizeof line, "%-10s %-18s %9zu %-14s %s\n", interval_label(config).c_str(),
                      strategy_label(config.kind).c_str(), any->updates.raw, prob.c_str(), odds.c_str());
        out << line;
    }
    return out.str();
}

std::string classification_csv(const Catalog& catalog,
                               const std::vector<CampaignClassification>& rows) {
    std::ostringstream out;
    out << "apt,month,classes,cve,scenario,fix_month,per_product\n";
    for (const auto& row : rows) {
        const auto& c = catalog.campaigns.at(row.campaign);
        const auto prefix = detail::csv_escape(c.apt) + "," + format_month(c.start, catalog.horizon) +
                            "," + row.classes.to_string() + ",";
        if (row.cves.empty()) {
            out << prefix << ",,,\n";
            continue;
        }
        for (const auto& cve : row.cves) {
            std::string per_product;
            for (const auto& p : cve.per_product) {
                if (!per_product.empty()) per_product += '|';
                per_product += p.product + "=" + to_string(p.scenario);
            }
            out << prefix << cve.cve_id << ',' << to_string(cve.scenario) << ','
                << (cve.fix ? format_month(*cve.fix, catalog.horizon) : "") << ','
                << detail::csv_escape(per_product) << '\n';
        }
    }
    return out.str();
}

nlohmann::json venn_json(const VennCounts& venn) {
    nlohmann::json regions = nlohmann::json::object();
    for (int i = 0; i < VennCounts::RegionCount; ++i) {
        regions[VennCounts::region_name(i)] = venn.regions[static_cast<std::size_t>(i)];
    }
    return {{"regions", std::move(regions)}, {"campaigns", venn.total()}};
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < length; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

std::vector<ManifestEntry> emit_report(const ReportBundle& bundle, const std::filesystem::path& dir,
                                       OutputFormat format) {
    if (bundle.empty() || !bundle.catalog) throw ContractViolation("nothing to emit");
    const auto& catalog = *bundle.catalog;
    const bool json = format != OutputFormat::Csv;
    const bool csv = format != OutputFormat::Json;

    // relative path -> body; std::map keeps the manifest order stable
    std::map<std::string, std::string> files;
    if (!bundle.evaluations.empty()) {
        if (json) {
            auto arr = nlohmann::json::array();
            for (const auto& r : bundle.evaluations) arr.push_back(report_to_json(catalog, r));
            files["evaluation.json"] = arr.dump(2) + "\n";
        }
        if (csv) {
            files["evaluation.csv"] = evaluation_csv(bundle.evaluations);
            files["monthly_probability.csv"] = monthly_csv(catalog, bundle.evaluations);
        }
    }
    if (bundle.classifications) {
        const auto venn = venn_counts(*bundle.classifications);
        if (csv) files["classification.csv"] = classification_csv(catalog, *bundle.classifications);
        if (json) files["venn.json"] = venn_json(venn).dump(2) + "\n";
        if (csv) {
            std::string body = "region,campaigns\n";
            for (int i = 0; i < VennCounts::RegionCount; ++i) {
                body += std::string(VennCounts::region_name(i)) + "," +
                        std::to_string(venn.regions[static_cast<std::size_t>(i)]) + "\n";
            }
            files["venn.csv"] = body;
        }
    }
    if (bundle.survival) {
        if (csv) files["survival.csv"] = survival_to_csv(*bundle.survival);
        if (json) {
            auto pts = nlohmann::json::array();
            for (const auto& p : bundle.survival->points) pts.push_back({{"age_months", p.age}, {"survival", p.survival}});
            files["survival.json"] = nlohmann::json{{"points", std::move(pts)}}.dump(2) + "\n";
        }
    }
    for (const auto& [stem, body] : bundle.matrices) files["matrices/" + stem + ".csv"] = body;

    std::error_code ec;
    std::filesystem::create_directories(dir / "matrices", ec);
    if (ec) throw IoError("cannot create " + (dir / "matrices").string() + ": " + ec.message());
    if (bundle.matrices.empty()) std::filesystem::remove(dir / "matrices", ec);

    std::vector<ManifestEntry> manifest;
    for (const auto& [name, body] : files) {
        const auto path = dir / name;
        std::ofstream out(path, std::ios::binary);
        if (!out || !(out << body) || !out.flush()) throw IoError("cannot write " + path.string());
        manifest.push_back({name, sha256_hex(body), body.size()});
    }
    auto doc = nlohmann::json::array();
    for (const auto& m : manifest) doc.push_back({{"file", m.file}, {"sha256", m.sha256}, {"bytes", m.bytes}});
    const auto path = dir / "manifest.json";
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << doc.dump(2) << "\n")) throw IoError("cannot write " + path.string());
    return manifest;
}

}  // namespace patchsim
