#pragma once

#include "patchsim/bit_matrix.hpp"
#include "patchsim/catalog.hpp"
#include "patchsim/matching.hpp"

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace patchsim {

/// Row layout shared by deployment and exposure matrices: every release of
/// every product, products in catalog order, releases in timeline order.
class RowSpace {
public:
    struct Row {
        std::size_t product;
        std::size_t release;
    };

    explicit RowSpace(const Catalog& catalog);

    std::size_t size() const noexcept { return rows_.size(); }
    const Row& operator[](std::size_t r) const { return rows_[r]; }
    std::size_t row_of(std::size_t product, std::size_t release) const {
        return offsets_[product] + release;
    }
    std::size_t product_count() const noexcept { return offsets_.size(); }
    /// Rows [first, last) belonging to a product.
    std::size_t first_row(std::size_t product) const { return offsets_[product]; }
    std::size_t end_row(std::size_t product) const {
        return product + 1 < offsets_.size() ? offsets_[product + 1] : rows_.size();
    }

    friend bool operator==(const RowSpace& a, const RowSpace& b) {
        return a.offsets_ == b.offsets_ && a.rows_.size() == b.rows_.size();
    }

private:
    std::vector<Row> rows_;
    std::vector<std::size_t> offsets_;
};

enum class StrategyKind { Immediate, Planned, Reactive, InformedReactive };
enum class Scenario { UpdateFirst, AptFirst };

std::string to_string(StrategyKind kind);
std::string to_string(Scenario scenario);

struct StrategyConfig {
    StrategyKind kind = StrategyKind::Immediate;
    int delay_months = 0;
    ReactivePick reactive_pick = ReactivePick::First;
    Scenario scenario = Scenario::UpdateFirst;

    /// "immediate", "planned:3", "informed:1", ...
    std::string spec() const;
    /// Throws ContractViolation when Immediate carries a delay or delay < 0.
    void check() const;

    friend bool operator==(const StrategyConfig&, const StrategyConfig&) = default;
};

/// Installed-version matrix (rows = product versions, columns = months).
struct DeploymentMatrix {
    std::shared_ptr<const RowSpace> rows;
    BitMatrix cells;
    Scenario scenario = Scenario::UpdateFirst;

    /// Installed release indices of a product in a month (one, or two in an
    /// APT-first transition month).
    std::vector<std::size_t> installed(std::size_t product, std::size_t month) const;
};

/// Per product, per month installed release index (update-first view).
using InstallPlan = std::vector<std::vector<std::size_t>>;

/// Oldest release available at the epoch that some campaign CVE affects, or
/// the oldest available release when none is affected. Indexed by product.
/// Throws DataError{Configuration} for a product without a release at the epoch.
std::vector<std::size_t> initial_versions(const Catalog& catalog);

struct Deployment {
    Month month;
    std::size_t release;
};

/// Version switches made by the Immediate strategy for one product: in each
/// month with new releases it moves to the newest one that is not a downgrade.
std::vector<Deployment> immediate_deployments(const Catalog& catalog, std::size_t product,
                                              std::size_t initial);

DeploymentMatrix build_immediate(const Catalog& catalog);
DeploymentMatrix build_planned(const Catalog& catalog, int delay);
DeploymentMatrix build_reactive(const Catalog& catalog, int delay, bool informed,
                                ReactivePick pick = ReactivePick::First);

/// Keeps the outgoing version set in every transition month.
/// Throws ContractViolation if the matrix is already APT-first.
DeploymentMatrix apply_apt_first(const DeploymentMatrix& m);

/// Builds the matrix a config describes, including the scenario transform.
DeploymentMatrix build_deployment(const Catalog& catalog, const StrategyConfig& config);

struct UpdateCounts {
    /// Rows with at least one installed month.
    std::size_t raw = 0;
    /// raw minus one initial installation per product.
    std::size_t net = 0;
};

UpdateCounts count_updates(const DeploymentMatrix& m);

DeploymentMatrix matrix_from_plan(const Catalog& catalog, const InstallPlan& plan);

/// "product,version,YYYY-MM,..." with 0/1 cells.
std::string matrix_to_csv(const Catalog& catalog, const RowSpace& rows, const BitMatrix& cells);

}  // namespace patchsim
