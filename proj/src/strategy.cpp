#include "patchsim/strategy.hpp"

#include "csv.hpp"
#include "patchsim/errors.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace patchsim {

RowSpace::RowSpace(const Catalog& catalog) {
    offsets_.reserve(catalog.timelines.size());
    for (std::size_t p = 0; p < catalog.timelines.size(); ++p) {
        offsets_.push_back(rows_.size());
        for (std::size_t r = 0; r < catalog.timelines[p].releases.size(); ++r) {
            rows_.push_back({p, r});
        }
    }
}

std::string to_string(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::Immediate: return "immediate";
        case StrategyKind::Planned: return "planned";
        case StrategyKind::Reactive: return "reactive";
        case StrategyKind::InformedReactive: return "informed";
    }
    return "?";
}

std::string to_string(Scenario scenario) {
    return scenario == Scenario::UpdateFirst ? "update-first" : "apt-first";
}

std::string StrategyConfig::spec() const {
    if (kind == StrategyKind::Immediate) return "immediate";
    return to_string(kind) + ":" + std::to_string(delay_months);
}

void StrategyConfig::check() const {
    if (delay_months < 0) throw ContractViolation("strategy delay must be non-negative");
    if (kind == StrategyKind::Immediate && delay_months != 0) {
        throw ContractViolation("immediate strategy cannot carry a delay");
    }
}

std::vector<std::size_t> DeploymentMatrix::installed(std::size_t product, std::size_t month) const {
    std::vector<std::size_t> out;
    for (auto r = rows->first_row(product); r < rows->end_row(product); ++r) {
        if (cells.get(r, month)) out.push_back((*rows)[r].release);
    }
    return out;
}

std::vector<std::size_t> initial_versions(const Catalog& catalog) {
    std::set<std::string> campaign_cves;
    for (const auto& c : catalog.campaigns) campaign_cves.insert(c.cve_ids.begin(), c.cve_ids.end());

    std::vector<std::size_t> out;
    out.reserve(catalog.timelines.size());
    for (const auto& t : catalog.timelines) {
        std::optional<std::size_t> oldest;
        std::optional<std::size_t> oldest_vulnerable;
        for (std::size_t i = 0; i < t.releases.size() && t.releases[i].release.index <= 0; ++i) {
            const auto& r = t.releases[i];
            if (!oldest || r.key < t.releases[*oldest].key) oldest = i;
            const bool vulnerable = std::any_of(campaign_cves.begin(), campaign_cves.end(),
                                                [&](const std::string& id) {
                                                    const auto* v = catalog.find_vuln(id);
                                                    return v && catalog.is_affected(*v, r);
                                                });
            if (vulnerable && (!oldest_vulnerable || r.key < t.releases[*oldest_vulnerable].key)) {
                oldest_vulnerable = i;
            }
        }
        if (!oldest) {
            throw DataError(DataError::Kind::Configuration,
                            "product " + catalog.products.at(t.product).id() +
                                " has no release available at the epoch " +
                                format_month(0, catalog.horizon));
        }
        out.push_back(oldest_vulnerable.value_or(*oldest));
    }
    return out;
}

std::vector<Deployment> immediate_deployments(const Catalog& catalog, std::size_t product,
                                              std::size_t initial) {
    const auto& releases = catalog.timelines.at(product).releases;
    std::vector<Deployment> out;
    std::size_t current = initial;
    std::size_t i = 0;
    // month 0 is the shared starting point; only later releases trigger
    while (i < releases.size() && releases[i].release.index <= 0) ++i;
    while (i < releases.size()) {
        const Month month = releases[i].release;
        std::optional<std::size_t> newest;
        for (; i < releases.size() && releases[i].release == month; ++i) {
            // anything not above the installed key would be a downgrade
            if (releases[i].key > releases[current].key &&
                (!newest || releases[i].key > releases[*newest].key)) {
                newest = i;
            }
        }
        if (newest) {
            current = *newest;
            out.push_back({month, current});
        }
    }
    return out;
}

DeploymentMatrix matrix_from_plan(const Catalog& catalog, const InstallPlan& plan) {
    auto rows = std::make_shared<const RowSpace>(catalog);
    DeploymentMatrix m{rows, BitMatrix(rows->size(), catalog.horizon.columns()), Scenario::UpdateFirst};
    for (std::size_t p = 0; p < plan.size(); ++p) {
        for (std::size_t t = 0; t < plan[p].size(); ++t) m.cells.set(rows->row_of(p, plan[p][t]), t);
    }
    return m;
}

namespace {

InstallPlan plan_from_deployments(const Catalog& catalog,
                                  const std::vector<std::size_t>& initial,
                                  const std::vector<std::vector<Deployment>>& deployments) {
    const auto columns = static_cast<std::size_t>(catalog.horizon.columns());
    InstallPlan plan(catalog.timelines.size());
    for (std::size_t p = 0; p < plan.size(); ++p) {
        plan[p].assign(columns, initial[p]);
        std::size_t current = initial[p];
        std::size_t next = 0;
        const auto& deps = deployments[p];
        for (std::size_t t = 0; t < columns; ++t) {
            while (next < deps.size() && deps[next].month.index == static_cast<int>(t)) {
                current = deps[next].release;
                ++next;
            }
            plan[p][t] = current;
        }
    }
    return plan;
}

}  // namespace

DeploymentMatrix build_immediate(const Catalog& catalog) {
    return build_planned(catalog, 0);
}

DeploymentMatrix build_planned(const Catalog& catalog, int delay) {
    if (delay < 0) throw ContractViolation("planned delay must be non-negative");
    const auto initial = initial_versions(catalog);
    std::vector<std::vector<Deployment>> shifted(catalog.timelines.size());
    for (std::size_t p = 0; p < catalog.timelines.size(); ++p) {
        const auto& releases = catalog.timelines[p].releases;
        for (const auto& d : immediate_deployments(catalog, p, initial[p])) {
            const Month land{d.month.index + delay};
            if (land.index > catalog.horizon.end_index) continue;
            auto& out = shifted[p];
            if (!out.empty() && out.back().month == land) {
                // several landings in one month: the newest wins
                if (releases[d.release].key > releases[out.back().release].key) {
                    out.back().release = d.release;
                }
            } else {
                out.push_back({land, d.release});
            }
        }
    }
    return matrix_from_plan(catalog, plan_from_deployments(catalog, initial, shifted));
}

DeploymentMatrix build_reactive(const Catalog& catalog, int delay, bool informed,
                                ReactivePick pick) {
    if (delay < 0) throw ContractViolation("reactive delay must be non-negative");
    const auto initial = initial_versions(catalog);
    const int columns = catalog.horizon.columns();
    InstallPlan plan(catalog.timelines.size());

    for (std::size_t p = 0; p < catalog.timelines.size(); ++p) {
        const auto& timeline = catalog.timelines[p];
        struct Watched {
            const VulnRecord* vuln;
            int trigger;
        };
        std::vector<Watched> watched;
        for (const auto& v : catalog.vulns) {
            const bool relevant = std::any_of(v.affected.begin(), v.affected.end(),
                                              [&](const auto& a) { return a.product_index == p; });
            if (relevant) {
                const int trigger = informed ? v.reserved.index : v.published.index;
                watched.push_back({&v, std::max(trigger, 0)});
            }
        }

        std::size_t current = initial[p];
        auto outstanding = [&](int t) {
            std::vector<const VulnRecord*> out;
            for (const auto& w : watched) {
                if (w.trigger <= t && catalog.is_affected(*w.vuln, timeline.releases[current])) {
                    out.push_back(w.vuln);
                }
            }
            return out;
        };

        struct Pending {
            int land;
            std::vector<const VulnRecord*> cause;
        };
        std::optional<Pending> pending;
        auto deploy = [&](int t, const std::vector<const VulnRecord*>& cause) {
            // re-resolve against everything known now, fall back to the trigger set
            auto target = first_nonvulnerable(timeline, outstanding(t), Month{t}, current, pick);
            if (!target) target = first_nonvulnerable(timeline, cause, Month{t}, current, pick);
            if (target) current = *target;
        };

        plan[p].resize(static_cast<std::size_t>(columns));
        for (int t = 0; t < columns; ++t) {
            if (pending && pending->land == t) {
                deploy(t, pending->cause);
                pending.reset();
            }
            while (!pending) {
                auto cause = outstanding(t);
                if (cause.empty() || !first_nonvulnerable(timeline, cause, Month{t}, current, pick)) break;
                if (delay > 0) {
                    if (t + delay < columns) pending = Pending{t + delay, std::move(cause)};
                    break;
                }
                const auto before = current;
                deploy(t, cause);
                if (current == before) break;
            }
            plan[p][static_cast<std::size_t>(t)] = current;
        }
    }
    return matrix_from_plan(catalog, plan);
}

DeploymentMatrix apply_apt_first(const DeploymentMatrix& m) {
    if (m.scenario != Scenario::UpdateFirst) {
        throw ContractViolation("apt-first transform applied to an apt-first matrix");
    }
    DeploymentMatrix out = m;
    out.scenario = Scenario::AptFirst;
    for (std::size_t r = 0; r < m.cells.rows(); ++r) {
        for (std::size_t t = 1; t < m.cells.cols(); ++t) {
            if (m.cells.get(r, t - 1) && !m.cells.get(r, t)) out.cells.set(r, t);
        }
    }
    return out;
}

DeploymentMatrix build_deployment(const Catalog& catalog, const StrategyConfig& config) {
    config.check();
    DeploymentMatrix m;
    switch (config.kind) {
        case StrategyKind::Immediate: m = build_immediate(catalog); break;
        case StrategyKind::Planned: m = build_planned(catalog, config.delay_months); break;
        case StrategyKind::Reactive:
            m = build_reactive(catalog, config.delay_months, false, config.reactive_pick);
            break;
        case StrategyKind::InformedReactive:
            m = build_reactive(catalog, config.delay_months, true, config.reactive_pick);
            break;
    }
    return config.scenario == Scenario::AptFirst ? apply_apt_first(m) : m;
}

UpdateCounts count_updates(const DeploymentMatrix& m) {
    UpdateCounts counts;
    std::size_t products = 0;
    for (std::size_t p = 0; p < m.rows->product_count(); ++p) {
        bool any = false;
        for (auto r = m.rows->first_row(p); r < m.rows->end_row(p); ++r) {
            if (m.cells.row_any(r)) {
                ++counts.raw;
                any = true;
            }
        }
        products += any ? 1 : 0;
    }
    counts.net = counts.raw - products;
    return counts;
}

std::string matrix_to_csv(const Catalog& catalog, const RowSpace& rows, const BitMatrix& cells) {
    std::ostringstream out;
    out << "product,version";
    for (std::size_t t = 0; t < cells.cols(); ++t) {
        out << ',' << format_month(static_cast<int>(t), catalog.horizon);
    }
    out << '\n';
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        out << detail::csv_escape(catalog.products[row.product].id()) << ','
            << detail::csv_escape(catalog.timelines[row.product].releases[row.release].version);
        for (std::size_t t = 0; t < cells.cols(); ++t) out << ',' << (cells.get(r, t) ? '1' : '0');
        out << '\n';
    }
    return out.str();
}

}  // namespace patchsim
