#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "putlab/errors.hpp"
#include "putlab/market.hpp"
#include "putlab/paper_data.hpp"
#include "putlab/pricing.hpp"
#include "putlab/rng.hpp"
#include "putlab/utility.hpp"

namespace putlab {

enum class StrategyKind { A1, A2 };

inline const char* to_string(StrategyKind s) { return s == StrategyKind::A1 ? "A1" : "A2"; }

struct EquityRow {
    Move move;
    double probability = 0.0;
    double net_change = 0.0;
    double contribution = 0.0;  // probability * net_change
};

/// Expected-change-in-equity table for one (scenario, instance) cell.
struct EquityTable {
    StrategyKind strategy = StrategyKind::A1;
    std::string scenario_label;
    int instance_ordinal = 0;
    std::array<EquityRow, 3> rows;  // up, neutral, down
    double total = 0.0;
    std::optional<double> put_price_used;
};

/// A1: long underlying only. Nets are (+up_move, 0, -down_move).
inline EquityTable equity_table_a1(const ScenarioSpec& scenario, const MoveInstance& instance) {
    EquityTable t;
    t.strategy = StrategyKind::A1;
    t.scenario_label = scenario.label;
    t.instance_ordinal = instance.ordinal;
    t.rows = {{{Move::up, scenario.p_up, instance.up_move, scenario.p_up * instance.up_move},
               {Move::neutral, scenario.p_neutral, 0.0, 0.0},
               {Move::down, scenario.p_down, -instance.down_move,
                scenario.p_down * -instance.down_move}}};
    for (const auto& r : t.rows) t.total += r.contribution;
    return t;
}

/// A2: long underlying plus long put bought at put_price. Per-move net adds
/// the put payoff and subtracts the premium.
inline EquityTable equity_table_a2(const MarketParams& params, const ScenarioSpec& scenario,
                                   const MoveInstance& instance, double put_price) {
    if (!(put_price >= 0.0))
        throw ValidationError("equity_table_a2: put price must be >= 0");
    const auto dist = terminal_distribution(params, scenario, instance);
    EquityTable t;
    t.strategy = StrategyKind::A2;
    t.scenario_label = scenario.label;
    t.instance_ordinal = instance.ordinal;
    t.put_price_used = put_price;
    const double base[3] = {instance.up_move, 0.0, -instance.down_move};
    for (int i = 0; i < 3; ++i) {
        const auto& o = dist.outcomes[static_cast<std::size_t>(i)];
        const double net =
            base[i] + std::max(params.strike - o.terminal_price, 0.0) - put_price;
        t.rows[static_cast<std::size_t>(i)] = {o.move, o.probability, net, o.probability * net};
        t.total += o.probability * net;
    }
    return t;
}

struct StrategyComparison {
    double a1_total = 0.0;
    double a2_total = 0.0;
    double excess_equity = 0.0;  // a2_total - a1_total
    std::string scenario_label;
    int instance_ordinal = 0;
    std::string price_source;
};

inline StrategyComparison compare_strategies(const EquityTable& a1, const EquityTable& a2) {
    if (a1.scenario_label != a2.scenario_label || a1.instance_ordinal != a2.instance_ordinal)
        throw ValidationError("compare_strategies: tables come from different cells");
    if (a1.strategy != StrategyKind::A1 || a2.strategy != StrategyKind::A2)
        throw ValidationError("compare_strategies: expected an A1 and an A2 table");
    StrategyComparison c;
    c.a1_total = a1.total;
    c.a2_total = a2.total;
    c.excess_equity = a2.total - a1.total;
    c.scenario_label = a1.scenario_label;
    c.instance_ordinal = a1.instance_ordinal;
    return c;
}

/// Where the A2 put price comes from: exact enumeration, a seeded Monte Carlo
/// run, or externally fixed values (e.g. the paper's printed prices).
struct PriceSource {
    enum class Kind { analytic, monte_carlo, fixed };
    Kind kind = Kind::analytic;
    std::uint64_t replications = 100;
    std::uint64_t seed = 1;
    double fixed_value = 0.0;
    // per-cell overrides keyed by (scenario label, instance ordinal)
    std::map<std::pair<std::string, int>, double> fixed_cells;

    static PriceSource analytic() { return {}; }
    static PriceSource monte_carlo(std::uint64_t replications, std::uint64_t seed) {
        PriceSource s;
        s.kind = Kind::monte_carlo;
        s.replications = replications;
        s.seed = seed;
        return s;
    }
    static PriceSource fixed(double value) {
        PriceSource s;
        s.kind = Kind::fixed;
        s.fixed_value = value;
        return s;
    }
    static PriceSource fixed_table(std::map<std::pair<std::string, int>, double> cells) {
        PriceSource s;
        s.kind = Kind::fixed;
        s.fixed_cells = std::move(cells);
        return s;
    }
    /// Fixed source carrying the paper's nine printed simulated put prices.
    static PriceSource paper_fixed() {
        std::map<std::pair<std::string, int>, double> cells;
        for (const auto& c : paper_dataset().a2_cells)
            cells[{c.scenario, c.instance}] = c.put_price;
        return fixed_table(std::move(cells));
    }

    std::string descriptor() const {
        switch (kind) {
            case Kind::analytic: return "analytic";
            case Kind::monte_carlo:
                return "monte_carlo(reps=" + std::to_string(replications) +
                       ",seed=" + std::to_string(seed) + ")";
            case Kind::fixed: return "fixed";
        }
        return "?";
    }
};

inline PriceSource validate_price_source(const PriceSource& candidate) {
    if (candidate.kind == PriceSource::Kind::monte_carlo && candidate.replications < 1)
        throw ValidationError("price source: replications must be >= 1");
    if (candidate.kind == PriceSource::Kind::fixed) {
        if (!(candidate.fixed_value >= 0.0))
            throw ValidationError("price source: fixed value must be >= 0");
        for (const auto& [cell, v] : candidate.fixed_cells)
            if (!(v >= 0.0))
                throw ValidationError("price source: fixed price for " + cell.first + "/" +
                                      std::to_string(cell.second) + " must be >= 0");
    }
    return candidate;
}

struct SuiteCell {
    StrategyComparison comparison;
    EquityTable a1;
    EquityTable a2;
    OracleValues oracle;
    std::optional<SimulationEstimate> estimate;  // present for monte_carlo sources
};

struct SuiteResult {
    std::vector<SuiteCell> cells;  // scenario-major, instance-minor
};

/// Runs every (scenario, instance) cell with the given price source. Under a
/// monte_carlo source each cell gets its own sub-stream derived from the
/// source seed and the cell index, so the suite is deterministic.
inline SuiteResult run_suite(const MarketParams& params,
                             const std::vector<ScenarioSpec>& scenarios,
                             const std::vector<MoveInstance>& instances,
                             const PriceSource& source, unsigned workers = 1) {
    if (scenarios.empty()) throw ValidationError("run_suite: scenario list must not be empty");
    if (instances.empty()) throw ValidationError("run_suite: instance list must not be empty");
    validate_price_source(source);

    SuiteResult result;
    std::uint64_t cell_index = 0;
    for (const auto& scenario : scenarios) {
        for (const auto& instance : instances) {
            SuiteCell cell;
            cell.oracle = analytic_values(params, scenario, instance);
            double put_price = 0.0;
            switch (source.kind) {
                case PriceSource::Kind::analytic:
                    put_price = cell.oracle.put_price;
                    break;
                case PriceSource::Kind::monte_carlo: {
                    const std::uint64_t cell_seed = derive_stream(source.seed, cell_index);
                    cell.estimate = mc_estimate(params, scenario, instance, source.replications,
                                                cell_seed, workers);
                    put_price = cell.estimate->put_price_mean;
                    break;
                }
                case PriceSource::Kind::fixed: {
                    if (!source.fixed_cells.empty()) {
                        const auto it =
                            source.fixed_cells.find({scenario.label, instance.ordinal});
                        if (it == source.fixed_cells.end())
                            throw ValidationError("run_suite: no fixed price for cell " +
                                                  scenario.label + "/" +
                                                  std::to_string(instance.ordinal));
                        put_price = it->second;
                    } else {
                        put_price = source.fixed_value;
                    }
                    break;
                }
            }
            cell.a1 = equity_table_a1(scenario, instance);
            cell.a2 = equity_table_a2(params, scenario, instance, put_price);
            cell.comparison = compare_strategies(cell.a1, cell.a2);
            cell.comparison.price_source = source.descriptor();
            result.cells.push_back(std::move(cell));
            ++cell_index;
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Paper replication audit
// ---------------------------------------------------------------------------

struct DiscrepancyEntry {
    int table = 0;         // 0 for the fitted-case entries
    std::string cell;      // human-readable cell name
    double printed = 0.0;
    double recomputed = 0.0;
    double abs_diff = 0.0;
    bool match = false;
};

struct DiscrepancyReport {
    std::vector<DiscrepancyEntry> entries;
    double tolerance = 0.01;

    std::size_t mismatch_count() const {
        std::size_t n = 0;
        for (const auto& e : entries)
            if (!e.match) ++n;
        return n;
    }
};

/// Statistical-consistency check of one printed simulated put price against
/// the enumeration oracle: |printed - oracle| <= 3 * sqrt(printed var / 100).
struct ConsistencyEntry {
    int table = 0;
    std::string scenario;
    int instance = 0;
    double printed_price = 0.0;
    double oracle_price = 0.0;
    double abs_diff = 0.0;
    double bound = 0.0;
    bool consistent = false;
};

inline std::vector<ConsistencyEntry> consistency_audit() {
    const auto& d = paper_dataset();
    std::vector<ConsistencyEntry> entries;
    for (const auto& c : d.sim_cells) {
        const auto oracle = analytic_values(d.market, d.scenario(c.scenario), d.instance(c.instance));
        ConsistencyEntry e;
        e.table = c.table;
        e.scenario = c.scenario;
        e.instance = c.instance;
        e.printed_price = c.put_price;
        e.oracle_price = oracle.put_price;
        e.abs_diff = std::fabs(c.put_price - oracle.put_price);
        e.bound = 3.0 * std::sqrt(c.put_variance / 100.0);
        e.consistent = e.abs_diff <= e.bound;
        entries.push_back(e);
    }
    return entries;
}

/// Recomputes every derivable printed cell of the paper's tables and fitted
/// cases from the paper's own inputs and reports match/mismatch per cell.
inline DiscrepancyReport replicate_paper(double tolerance = 0.01) {
    const auto& d = paper_dataset();
    DiscrepancyReport report;
    report.tolerance = tolerance;
    auto add = [&](int table, std::string cell, double printed, double recomputed) {
        DiscrepancyEntry e;
        e.table = table;
        e.cell = std::move(cell);
        e.printed = printed;
        e.recomputed = recomputed;
        e.abs_diff = std::fabs(printed - recomputed);
        e.match = e.abs_diff <= tolerance;
        report.entries.push_back(std::move(e));
    };

    for (const auto& c : d.a1_cells) {
        const auto t = equity_table_a1(d.scenario(c.scenario), d.instance(c.instance));
        add(c.table, "A1 total", c.total, t.total);
    }

    for (const auto& c : d.a2_cells) {
        const auto a1 = equity_table_a1(d.scenario(c.scenario), d.instance(c.instance));
        const auto t =
            equity_table_a2(d.market, d.scenario(c.scenario), d.instance(c.instance), c.put_price);
        add(c.table, "A2 up net", c.up_net, t.rows[0].net_change);
        add(c.table, "A2 neutral net", c.neutral_net, t.rows[1].net_change);
        add(c.table, "A2 down net", c.down_net, t.rows[2].net_change);
        add(c.table, "A2 up contribution", c.up_contribution, t.rows[0].contribution);
        add(c.table, "A2 neutral contribution", c.neutral_contribution, t.rows[1].contribution);
        add(c.table, "A2 down contribution", c.down_contribution, t.rows[2].contribution);
        add(c.table, "A2 total", c.total, t.total);
        add(c.table, "excess equity", c.excess, t.total - a1.total);
    }

    // Fitted cases: refit from the printed (excess, utility index) points and
    // compare against the printed coefficients and stationary boundary.
    for (const auto& pc : d.cases) {
        std::vector<UtilityPoint> points;
        for (const auto& c : d.a2_cells)
            if (c.scenario == pc.scenario) points.push_back({c.excess, c.utility_index});
        const auto fit = fit_quadratic(points);
        add(0, "Case " + pc.case_label + " a2", pc.fit.a2, fit.a2);
        add(0, "Case " + pc.case_label + " a1", pc.fit.a1, fit.a1);
        add(0, "Case " + pc.case_label + " a0", pc.fit.a0, fit.a0);
        // The printed boundary is the vertex of the printed parabola.
        const auto analysis = analyze_utility(pc.fit, Interval{-1.0, 2.0});
        add(0, "Case " + pc.case_label + " boundary", pc.boundary, analysis.vertex_x.value());
    }
    return report;
}

/// One scenario's utility pipeline: points, fitted curve, analysis.
struct PipelineFit {
    std::vector<UtilityPoint> points;
    QuadraticUtility fit;
    UtilityAnalysis analysis;
};

/// Both readings of the paper's utility curves per scenario: as-printed
/// (excess equities exactly as tabulated) and recomputed (excess equities
/// rebuilt from the printed put prices, which corrects the inconsistent
/// Table 15 cell).
struct ScenarioFits {
    std::string scenario;
    PipelineFit as_printed;
    PipelineFit recomputed;
};

inline std::vector<ScenarioFits> paper_scenario_fits(
    const UtilityIndexScheme& scheme = UtilityIndexScheme{}) {
    const auto& d = paper_dataset();
    std::vector<ScenarioFits> result;
    for (const auto& scenario : d.scenarios) {
        std::vector<double> printed_excess;
        std::vector<double> recomputed_excess;
        for (const auto& c : d.a2_cells) {
            if (c.scenario != scenario.label) continue;
            printed_excess.push_back(c.excess);
            const auto a1 = equity_table_a1(scenario, d.instance(c.instance));
            const auto a2 = equity_table_a2(d.market, scenario, d.instance(c.instance), c.put_price);
            recomputed_excess.push_back(a2.total - a1.total);
        }
        auto build = [&](const std::vector<double>& excess) {
            PipelineFit p;
            p.points = assign_utility_indices(excess, scheme);
            p.fit = fit_quadratic(p.points);
            const auto [lo, hi] = std::minmax_element(excess.begin(), excess.end());
            p.analysis = analyze_utility(p.fit, Interval{*lo, *hi});
            return p;
        };
        result.push_back({scenario.label, build(printed_excess), build(recomputed_excess)});
    }
    return result;
}

}  // namespace putlab
