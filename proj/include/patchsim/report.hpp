#pragma once

#include "patchsim/campaign.hpp"
#include "patchsim/catalog.hpp"
#include "patchsim/evaluator.hpp"
#include "patchsim/stats.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace patchsim {

enum class OutputFormat { Json, Csv, Both };

std::optional<OutputFormat> parse_output_format(std::string_view text);

nlohmann::json report_to_json(const Catalog& catalog, const EvaluationReport& report);

/// Strategy table with one row per report: interval, strategy, scenario,
/// update counts, probability, odds and the Agresti-Coull interval.
std::string evaluation_csv(const std::vector<EvaluationReport>& reports);

/// probability_at per month, one column per report ("" where undefined).
std::string monthly_csv(const Catalog& catalog, const std::vector<EvaluationReport>& reports);

/// Human-readable strategy table; pairs update-first and apt-first results of
/// the same strategy on one row ("22.2-58.3%").
std::string evaluation_table(const std::vector<EvaluationReport>& reports);

std::string classification_csv(const Catalog& catalog,
                               const std::vector<CampaignClassification>& rows);
nlohmann::json venn_json(const VennCounts& venn);

struct ReportBundle {
    const Catalog* catalog = nullptr;
    std::vector<EvaluationReport> evaluations;
    std::optional<std::vector<CampaignClassification>> classifications;
    std::optional<SurvivalCurve> survival;
    /// (file stem, CSV body) pairs written under matrices/.
    std::vector<std::pair<std::string, std::string>> matrices;

    bool empty() const {
        return evaluations.empty() && !classifications && !survival && matrices.empty();
    }
};

struct ManifestEntry {
    std::string file;  ///< relative to the output directory
    std::string sha256;
    std::size_t bytes = 0;
};

std::string sha256_hex(std::string_view data);

/// Writes the bundle into `dir` plus a manifest.json listing each file with
/// its digest. Throws ContractViolation for an empty bundle and IoError when a
/// file cannot be written.
std::vector<ManifestEntry> emit_report(const ReportBundle& bundle, const std::filesystem::path& dir,
                                       OutputFormat format);

}  // namespace patchsim
